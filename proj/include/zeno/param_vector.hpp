#pragma once

#include <cstddef>
#include <vector>

namespace zeno {

// Dense model-parameter or gradient-candidate vector. The dimension is fixed
// at construction; element values may be anything, including non-finite ones
// produced by a diverging run (query with is_finite()).
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim) : values_(dim, 0.0) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  bool is_finite() const;

  ParamVector& operator+=(const ParamVector& o);
  ParamVector& operator-=(const ParamVector& o);
  ParamVector& operator*=(double s);

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator*(double s, ParamVector a);

double dot(const ParamVector& a, const ParamVector& b);
double squared_norm(const ParamVector& a);
double norm(const ParamVector& a);

// Throws std::invalid_argument("dimension mismatch") unless sizes agree.
void check_same_dim(const ParamVector& a, const ParamVector& b);

}  // namespace zeno
