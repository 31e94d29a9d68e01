#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsm {

/// Element of the discretized real Hilbert space: dense coordinates plus
/// quadrature weights defining the inner product <u,v> = sum_i w_i u_i v_i.
class HVector {
 public:
  HVector() = default;
  HVector(std::vector<double> coords,
          std::shared_ptr<const std::vector<double>> weights)
      : coords_(std::move(coords)), weights_(std::move(weights)) {
    if (!weights_ || coords_.size() != weights_->size() || coords_.empty())
      throw std::invalid_argument("HVector: coords/weights length mismatch");
    for (double w : *weights_)
      if (!(w > 0.0))
        throw std::invalid_argument("HVector: weights must be positive");
  }

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& coords() { return coords_; }
  const std::vector<double>& weights() const { return *weights_; }
  const std::shared_ptr<const std::vector<double>>& weights_ptr() const {
    return weights_;
  }

  HVector zeros_like() const {
    return HVector(std::vector<double>(size(), 0.0), weights_);
  }
  HVector with_coords(std::vector<double> c) const {
    return HVector(std::move(c), weights_);
  }

 private:
  std::vector<double> coords_;
  std::shared_ptr<const std::vector<double>> weights_;
};

inline std::shared_ptr<const std::vector<double>> uniform_weights(
    std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_weights: n must be >= 1");
  return std::make_shared<const std::vector<double>>(n, 1.0 / double(n));
}

inline std::shared_ptr<const std::vector<double>> make_weights(
    std::vector<double> w) {
  return std::make_shared<const std::vector<double>>(std::move(w));
}

inline void require_compatible(const HVector& u, const HVector& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("HVector: dimension mismatch");
  if (u.weights_ptr() == v.weights_ptr()) return;
  const auto& wu = u.weights();
  const auto& wv = v.weights();
  for (std::size_t i = 0; i < wu.size(); ++i)
    if (wu[i] != wv[i])
      throw std::invalid_argument("HVector: weight mismatch");
}

inline double inner(const HVector& u, const HVector& v) {
  require_compatible(u, v);
  const auto& w = u.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * v[i];
  return s;
}

inline double norm(const HVector& u) { return std::sqrt(inner(u, u)); }

/// alpha*u + v, weights preserved.
inline HVector axpy(double alpha, const HVector& u, const HVector& v) {
  require_compatible(u, v);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = alpha * u[i] + v[i];
  return v.with_coords(std::move(out));
}

inline HVector operator+(const HVector& u, const HVector& v) {
  return axpy(1.0, u, v);
}
inline HVector operator-(const HVector& u, const HVector& v) {
  return axpy(-1.0, v, u);
}
inline HVector operator*(double s, const HVector& u) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = s * u[i];
  return u.with_coords(std::move(out));
}

// Weighted norm on raw coordinate arrays; hot-path form used by the solvers.
inline double norm_raw(const std::vector<double>& x,
                       const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
  return std::sqrt(s);
}

}  // namespace dsm
