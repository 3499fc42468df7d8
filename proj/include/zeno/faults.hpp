#pragma once

#include <string>
#include <vector>

#include "zeno/aggregation.hpp"
#include "zeno/rng.hpp"

namespace zeno {

enum class FaultKind { none, label_flip, bit_flip, arbitrary };
enum class FaultSelection { fixed, rotating, random };

struct FaultSpec {
  FaultKind kind = FaultKind::none;
  int q = 0;
  FaultSelection selection = FaultSelection::fixed;
  double magnitude = -10.0;  // arbitrary kind only
};

FaultKind fault_kind_from_string(const std::string& name);
std::string to_string(FaultKind kind);
FaultSelection fault_selection_from_string(const std::string& name);
std::string to_string(FaultSelection sel);

// Which workers are faulty in iteration t. fixed -> {0..q-1}; rotating ->
// {(t q + i) mod m}; random -> uniform q-subset from the fault stream.
// Returned sorted ascending.
std::vector<int> select_faulty(int m, int q, FaultSelection selection, long t,
                               Rng& rng);

// Every faulty candidate is overwritten with the negation of the lowest
// faulty index's original gradient, so all faulty values coincide.
GradientSet apply_bit_flip(GradientSet g, const std::vector<int>& faulty);

// label -> C - 1 - label.
int flip_label(int label, int num_classes);

// Faulty candidates become magnitude * mean(correct candidates); with no
// correct candidate left the fallback is magnitude * (random unit vector).
GradientSet apply_arbitrary(GradientSet g, const std::vector<int>& faulty,
                            double magnitude, Rng& rng);

}  // namespace zeno
