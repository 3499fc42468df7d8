#include "zeno/aggregation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace zeno {

namespace {

void check_nonempty(const GradientSet& g) {
  if (g.candidates.empty()) throw std::invalid_argument("empty gradient set");
  for (const ParamVector& c : g.candidates) {
    check_same_dim(g.candidates.front(), c);
  }
}

// Mean over a subset of candidates, accumulated in ascending index order.
ParamVector mean_of(const GradientSet& g, const std::vector<int>& indices) {
  ParamVector sum(g.candidates.front().size());
  for (int i : indices) sum += g.candidates[i];
  sum *= 1.0 / static_cast<double>(indices.size());
  return sum;
}

}  // namespace

ParamVector aggregate_mean(const GradientSet& g) {
  check_nonempty(g);
  std::vector<int> all(g.candidates.size());
  std::iota(all.begin(), all.end(), 0);
  return mean_of(g, all);
}

ParamVector aggregate_median(const GradientSet& g) {
  check_nonempty(g);
  const std::size_t m = g.candidates.size();
  const std::size_t d = g.candidates.front().size();
  ParamVector out(d);
  std::vector<double> column(m);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i) column[i] = g.candidates[i][j];
    const std::size_t hi = m / 2;
    std::nth_element(column.begin(), column.begin() + hi, column.end());
    if (m % 2 == 1) {
      out[j] = column[hi];
    } else {
      // Partner order statistic is the max of the untouched lower partition.
      const double lo = *std::max_element(column.begin(), column.begin() + hi);
      out[j] = 0.5 * (lo + column[hi]);
    }
  }
  return out;
}

KrumResult aggregate_krum(const GradientSet& g, int b) {
  check_nonempty(g);
  const int m = g.m();
  if (b < 0 || 2 * b + 2 >= m) {
    throw std::invalid_argument("krum cardinality violated");
  }
  const int neighbours = m - b - 2;

  // Pairwise squared distances, computed once.
  std::vector<std::vector<double>> dist2(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      double s = 0.0;
      const ParamVector& a = g.candidates[i];
      const ParamVector& c = g.candidates[j];
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double r = a[k] - c[k];
        s += r * r;
      }
      dist2[i][j] = s;
      dist2[j][i] = s;
    }
  }

  int best = 0;
  double best_score = 0.0;
  std::vector<double> others;
  others.reserve(m - 1);
  for (int i = 0; i < m; ++i) {
    others.clear();
    for (int j = 0; j < m; ++j) {
      if (j != i) others.push_back(dist2[i][j]);
    }
    std::sort(others.begin(), others.end());
    double score = 0.0;
    for (int k = 0; k < neighbours; ++k) score += others[k];
    if (i == 0 || score < best_score) {
      best = i;
      best_score = score;
    }
  }
  return {g.candidates[best], best};
}

double zeno_score(const ParamVector& u, const ParamVector& x,
                  const ScoreOracle& oracle) {
  check_same_dim(u, x);
  const double fx = loss_eval(oracle.task, x, oracle.batch);
  ParamVector moved = x;
  for (std::size_t k = 0; k < moved.size(); ++k) {
    moved[k] -= oracle.gamma * u[k];
  }
  const double fu = loss_eval(oracle.task, moved, oracle.batch);
  return fx - fu - oracle.rho * squared_norm(u);
}

ZenoResult aggregate_zeno(const GradientSet& g, int b, const ParamVector& x,
                          const ScoreOracle& oracle) {
  check_nonempty(g);
  const int m = g.m();
  if (b < 0 || b >= m) throw std::invalid_argument("nothing to aggregate");

  // f_r(x) is shared by all candidates; one evaluation, not m.
  const double fx = loss_eval(oracle.task, x, oracle.batch);
  std::vector<double> scores(m);
  ParamVector moved(x.size());
  for (int i = 0; i < m; ++i) {
    const ParamVector& u = g.candidates[i];
    check_same_dim(u, x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      moved[k] = x[k] - oracle.gamma * u[k];
    }
    scores[i] = fx - loss_eval(oracle.task, moved, oracle.batch) -
                oracle.rho * squared_norm(u);
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int c) { return scores[a] > scores[c]; });
  order.resize(m - b);

  std::vector<int> by_index = order;
  std::sort(by_index.begin(), by_index.end());
  return {mean_of(g, by_index), std::move(order)};
}

AggRule agg_rule_from_string(const std::string& name) {
  if (name == "mean") return AggRule::mean;
  if (name == "median") return AggRule::median;
  if (name == "krum") return AggRule::krum;
  if (name == "zeno") return AggRule::zeno;
  throw std::invalid_argument("unknown aggregation rule: " + name);
}

std::string to_string(AggRule rule) {
  switch (rule) {
    case AggRule::mean:
      return "mean";
    case AggRule::median:
      return "median";
    case AggRule::krum:
      return "krum";
    case AggRule::zeno:
      return "zeno";
  }
  return "?";
}

}  // namespace zeno
