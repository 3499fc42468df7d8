#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace zeno::oracles {

int krum_bruteforce(const GradientSet& g, int b) {
  const int m = g.m();
  if (m == 0) throw std::invalid_argument("empty gradient set");
  if (b < 0 || 2 * b + 2 >= m) {
    throw std::invalid_argument("krum cardinality violated");
  }
  const int neighbours = m - b - 2;

  std::vector<std::vector<double>> table(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const ParamVector diff = g.candidates[i] - g.candidates[j];
      table[i][j] = squared_norm(diff);
    }
  }

  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    std::vector<double> row;
    for (int j = 0; j < m; ++j) {
      if (j != i) row.push_back(table[i][j]);
    }
    std::sort(row.begin(), row.end());
    double score = 0.0;
    for (int k = 0; k < neighbours; ++k) score += row[k];
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

ParamVector median_bruteforce(const GradientSet& g) {
  const int m = g.m();
  if (m == 0) throw std::invalid_argument("empty gradient set");
  const std::size_t d = g.candidates.front().size();
  ParamVector out(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> col;
    col.reserve(m);
    for (int i = 0; i < m; ++i) col.push_back(g.candidates[i][j]);
    std::sort(col.begin(), col.end());
    if (m % 2 == 1) {
      out[j] = col[m / 2];
    } else {
      out[j] = 0.5 * (col[m / 2 - 1] + col[m / 2]);
    }
  }
  return out;
}

ParamVector mean_bruteforce(const GradientSet& g) {
  const int m = g.m();
  if (m == 0) throw std::invalid_argument("empty gradient set");
  ParamVector sum(g.candidates.front().size());
  for (int i = m - 1; i >= 0; --i) sum += g.candidates[i];
  sum *= 1.0 / m;
  return sum;
}

std::vector<int> zeno_bruteforce(const GradientSet& g, int b,
                                 const ParamVector& x,
                                 const ScoreOracle& oracle) {
  const int m = g.m();
  if (m == 0) throw std::invalid_argument("empty gradient set");
  if (b < 0 || b >= m) throw std::invalid_argument("nothing to aggregate");

  std::vector<double> scores(m);
  for (int i = 0; i < m; ++i) {
    scores[i] = zeno_score(g.candidates[i], x, oracle);
  }

  std::vector<bool> taken(m, false);
  std::vector<int> selected;
  for (int round = 0; round < m - b; ++round) {
    int best = -1;
    for (int i = 0; i < m; ++i) {
      if (taken[i]) continue;
      if (best < 0 || scores[i] > scores[best]) best = i;
    }
    taken[best] = true;
    selected.push_back(best);
  }
  return selected;
}

}  // namespace zeno::oracles
