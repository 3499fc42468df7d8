#include "zeno/faults.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zeno {

namespace {

void check_faulty_indices(const GradientSet& g, const std::vector<int>& faulty) {
  for (int i : faulty) {
    if (i < 0 || i >= g.m()) {
      throw std::invalid_argument("faulty index out of range");
    }
  }
}

}  // namespace

std::vector<int> select_faulty(int m, int q, FaultSelection selection, long t,
                               Rng& rng) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (q < 0 || q > m) throw std::invalid_argument("q exceeds worker count");
  std::vector<int> out;
  out.reserve(q);
  switch (selection) {
    case FaultSelection::fixed:
      for (int i = 0; i < q; ++i) out.push_back(i);
      break;
    case FaultSelection::rotating:
      for (int i = 0; i < q; ++i) {
        out.push_back(static_cast<int>((t * q + i) % m));
      }
      std::sort(out.begin(), out.end());
      break;
    case FaultSelection::random: {
      // Partial Fisher-Yates: first q entries form a uniform q-subset.
      std::vector<int> pool(m);
      std::iota(pool.begin(), pool.end(), 0);
      for (int i = 0; i < q; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(m - i));
        std::swap(pool[i], pool[j]);
      }
      out.assign(pool.begin(), pool.begin() + q);
      std::sort(out.begin(), out.end());
      break;
    }
  }
  return out;
}

GradientSet apply_bit_flip(GradientSet g, const std::vector<int>& faulty) {
  check_faulty_indices(g, faulty);
  if (faulty.empty()) return g;
  const int source = *std::min_element(faulty.begin(), faulty.end());
  ParamVector overwrite = g.candidates[source];
  overwrite *= -1.0;
  for (int i : faulty) g.candidates[i] = overwrite;
  std::vector<int> truth = faulty;
  std::sort(truth.begin(), truth.end());
  g.truth = std::move(truth);
  return g;
}

int flip_label(int label, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("need at least two classes");
  if (label < 0 || label >= num_classes) {
    throw std::invalid_argument("label out of range");
  }
  return num_classes - 1 - label;
}

GradientSet apply_arbitrary(GradientSet g, const std::vector<int>& faulty,
                            double magnitude, Rng& rng) {
  check_faulty_indices(g, faulty);
  if (faulty.empty()) return g;

  std::vector<bool> is_faulty(g.m(), false);
  for (int i : faulty) is_faulty[i] = true;
  std::vector<int> correct;
  for (int i = 0; i < g.m(); ++i) {
    if (!is_faulty[i]) correct.push_back(i);
  }

  const std::size_t d = g.candidates.front().size();
  ParamVector payload(d);
  if (correct.empty()) {
    // Nothing to mimic; fall back to a random direction of unit length.
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        payload[k] = rng.gaussian();
        n2 += payload[k] * payload[k];
      }
    } while (n2 == 0.0);
    payload *= magnitude / std::sqrt(n2);
  } else {
    for (int i : correct) payload += g.candidates[i];
    payload *= magnitude / static_cast<double>(correct.size());
  }

  for (int i : faulty) g.candidates[i] = payload;
  std::vector<int> truth = faulty;
  std::sort(truth.begin(), truth.end());
  g.truth = std::move(truth);
  return g;
}

FaultKind fault_kind_from_string(const std::string& name) {
  if (name == "none") return FaultKind::none;
  if (name == "label_flip") return FaultKind::label_flip;
  if (name == "bit_flip") return FaultKind::bit_flip;
  if (name == "arbitrary") return FaultKind::arbitrary;
  throw std::invalid_argument("unknown fault kind: " + name);
}

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::none:
      return "none";
    case FaultKind::label_flip:
      return "label_flip";
    case FaultKind::bit_flip:
      return "bit_flip";
    case FaultKind::arbitrary:
      return "arbitrary";
  }
  return "?";
}

FaultSelection fault_selection_from_string(const std::string& name) {
  if (name == "fixed") return FaultSelection::fixed;
  if (name == "rotating") return FaultSelection::rotating;
  if (name == "random") return FaultSelection::random;
  throw std::invalid_argument("unknown fault selection: " + name);
}

std::string to_string(FaultSelection sel) {
  switch (sel) {
    case FaultSelection::fixed:
      return "fixed";
    case FaultSelection::rotating:
      return "rotating";
    case FaultSelection::random:
      return "random";
  }
  return "?";
}

}  // namespace zeno
