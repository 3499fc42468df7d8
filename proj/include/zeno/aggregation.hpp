#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zeno/param_vector.hpp"
#include "zeno/task.hpp"

namespace zeno {

// The m candidate gradients of one iteration. `truth` is test-only metadata
// naming the indices that were actually faulty; injectors fill it in and
// property tests read it. Aggregation rules never look at it.
struct GradientSet {
  std::vector<ParamVector> candidates;
  std::optional<std::vector<int>> truth;

  int m() const { return static_cast<int>(candidates.size()); }
};

// Everything needed to score one iteration's candidates: the server's fresh
// n_r-point batch (drawn after the candidates arrived), the step size and
// the magnitude penalty weight. One oracle scores all m candidates.
struct ScoreOracle {
  TaskSpec task;
  std::vector<DataPoint> batch;
  double gamma = 0.1;
  double rho = 0.0;
};

enum class AggRule { mean, median, krum, zeno };

struct AggregatorConfig {
  AggRule rule = AggRule::mean;
  int b = 0;  // trim parameter, used by krum and zeno
};

AggRule agg_rule_from_string(const std::string& name);
std::string to_string(AggRule rule);

// Coordinate-wise arithmetic mean, summed in ascending candidate order.
ParamVector aggregate_mean(const GradientSet& g);

// Per-coordinate marginal median; an even count uses the mean of the two
// middle order statistics.
ParamVector aggregate_median(const GradientSet& g);

struct KrumResult {
  ParamVector vector;
  int chosen = 0;
};

// The candidate minimizing the summed squared distances to its m - b - 2
// nearest neighbours (self excluded); ties go to the lowest index.
// Requires 2b + 2 < m.
KrumResult aggregate_krum(const GradientSet& g, int b);

// Score(u, x) = f_r(x) - f_r(x - gamma u) - rho ||u||^2 on the oracle batch.
double zeno_score(const ParamVector& u, const ParamVector& x,
                  const ScoreOracle& oracle);

struct ZenoResult {
  ParamVector vector;
  std::vector<int> selected;  // original indices, highest score first
};

// Mean of the m - b candidates with the highest scores. Ties are broken by
// ascending candidate index; f_r(x) is evaluated once and shared by all m
// scores (m + 1 loss evaluations total). The averaged sum runs in ascending
// original-index order, so b = 0 reproduces aggregate_mean bit for bit.
ZenoResult aggregate_zeno(const GradientSet& g, int b, const ParamVector& x,
                          const ScoreOracle& oracle);

}  // namespace zeno
