#include "zeno/param_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

void check_same_dim(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
}

bool ParamVector::is_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ParamVector& ParamVector::operator+=(const ParamVector& o) {
  check_same_dim(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& o) {
  check_same_dim(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator*(double s, ParamVector a) { return a *= s; }

double dot(const ParamVector& a, const ParamVector& b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const ParamVector& a) { return dot(a, a); }

double norm(const ParamVector& a) { return std::sqrt(squared_norm(a)); }

}  // namespace zeno
