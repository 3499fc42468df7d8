#include "zeno/dataset.hpp"

#include <algorithm>
#include <stdexcept>

namespace zeno {

std::vector<DataPoint> sample_batch(const Dataset& dataset, std::size_t size,
                                    Rng& rng) {
  if (size == 0) throw std::invalid_argument("empty batch requested");
  if (dataset.empty()) throw std::invalid_argument("dataset is empty");
  std::vector<DataPoint> batch;
  batch.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    batch.push_back(dataset.points[rng.uniform_int(dataset.size())]);
  }
  return batch;
}

std::vector<Dataset> partition_dataset(const Dataset& dataset, std::size_t m) {
  if (m == 0) throw std::invalid_argument("partition into zero shards");
  if (m > dataset.size()) {
    throw std::invalid_argument("more shards than data points");
  }

  std::vector<DataPoint> sorted = dataset.points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DataPoint& a, const DataPoint& b) {
                     return a.label < b.label;
                   });

  const std::size_t base = sorted.size() / m;
  const std::size_t extra = sorted.size() % m;
  std::vector<Dataset> shards(m);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    shards[i].num_classes = dataset.num_classes;
    shards[i].points.assign(sorted.begin() + pos, sorted.begin() + pos + len);
    pos += len;
  }
  return shards;
}

}  // namespace zeno
