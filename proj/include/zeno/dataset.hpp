#pragma once

#include <cstddef>
#include <vector>

#include "zeno/rng.hpp"

namespace zeno {

// One training example. For classification `label` holds an integer class id
// in [0, num_classes); for regression tasks it holds a real target (unused by
// the quadratic task, whose target is encoded in the features).
struct DataPoint {
  std::vector<double> features;
  double label = 0.0;

  int class_id() const { return static_cast<int>(label); }
};

struct Dataset {
  std::vector<DataPoint> points;
  int num_classes = 0;  // 0 for regression

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// `size` points drawn uniformly with replacement; one raw draw per point.
std::vector<DataPoint> sample_batch(const Dataset& dataset, std::size_t size,
                                    Rng& rng);

// m disjoint, collectively exhaustive shards whose sizes differ by at most
// one. Points are stably sorted by label first, so contiguous slices give
// maximally heterogeneous (non-identically distributed) shards.
std::vector<Dataset> partition_dataset(const Dataset& dataset, std::size_t m);

}  // namespace zeno
