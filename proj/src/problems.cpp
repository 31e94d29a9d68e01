#include "dsm/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dsm {

namespace {

void matvec(const DenseMatrix& a, const std::vector<double>& x,
            std::vector<double>& out) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto& row = a[i];
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

void check_square_symmetric(const DenseMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("matrix must be nonempty");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("matrix must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a[i][j] - a[j][i]) > 1e-12 * (1.0 + std::abs(a[i][j])))
        throw std::invalid_argument("matrix must be symmetric");
}

// Sampled Rayleigh-quotient check of positive semidefiniteness.
void check_psd_sampled(const DenseMatrix& a) {
  const std::size_t n = a.size();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  std::vector<double> x(n), ax(n);
  for (int trial = 0; trial < 500; ++trial) {
    double nx2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gauss(rng);
      nx2 += x[i] * x[i];
    }
    matvec(a, x, ax);
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += x[i] * ax[i];
    if (q / nx2 < -1e-10)
      throw std::invalid_argument("matrix is not positive semidefinite");
  }
}

double signed_pow(double v, double alpha) {
  return v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), alpha), v);
}

}  // namespace

HVector MonotoneProblem::minimal_distance_solution(
    const HVector& anchor) const {
  HVector out = y;
  for (const auto& nb : null_basis) {
    const double c = inner(anchor - y, nb);
    out = axpy(c, nb, out);
  }
  return out;
}

MonotoneProblem make_identity(std::size_t n, std::optional<HVector> y) {
  if (n < 1) throw std::invalid_argument("make_identity: n must be >= 1");
  HVector yy = y ? *y : HVector(std::vector<double>(n, 1.0), uniform_weights(n));
  if (yy.size() != n) throw std::invalid_argument("make_identity: bad y");
  MonotoneProblem p;
  p.op.dim = n;
  p.op.holder_exponent = 1.0;
  p.op.holder_constant = 1.0;
  p.op.differentiable = true;
  p.op.apply_into = [](const std::vector<double>& in,
                       std::vector<double>& out) { out = in; };
  p.y = yy;
  p.f = yy;
  p.label = "identity";
  return p;
}

MonotoneProblem make_psd_linear(const DenseMatrix& matrix, const HVector& y,
                                std::vector<HVector> null_basis) {
  check_square_symmetric(matrix);
  check_psd_sampled(matrix);
  const std::size_t n = matrix.size();
  if (y.size() != n) throw std::invalid_argument("make_psd_linear: bad y");
  for (const auto& nb : null_basis) {
    HVector an = y.zeros_like();
    matvec(matrix, nb.coords(), an.coords());
    if (norm(an) > 1e-10)
      throw std::invalid_argument("make_psd_linear: null basis not in ker(A)");
    if (std::abs(inner(y, nb)) > 1e-10)
      throw std::invalid_argument(
          "make_psd_linear: y has a null-space component, not minimal-norm");
  }
  MonotoneProblem p;
  p.op.dim = n;
  p.op.holder_exponent = 1.0;
  p.op.differentiable = true;
  p.op.apply_into = [matrix](const std::vector<double>& in,
                             std::vector<double>& out) {
    matvec(matrix, in, out);
  };
  p.y = y;
  p.f = p.op.apply(y);
  p.matrix = matrix;
  p.null_basis = std::move(null_basis);
  p.label = "psd_linear";
  return p;
}

MonotoneProblem make_pointwise_holder(std::size_t n, double alpha,
                                      std::optional<HVector> y,
                                      bool allow_low_alpha) {
  if (n < 1) throw std::invalid_argument("make_pointwise_holder: n >= 1");
  const double lo = allow_low_alpha ? 0.0 : 0.5;
  if (!(alpha > lo && alpha <= 1.0))
    throw std::invalid_argument("make_pointwise_holder: alpha out of range");
  HVector yy =
      y ? *y : HVector(std::vector<double>(n, 1.0), uniform_weights(n));
  if (yy.size() != n)
    throw std::invalid_argument("make_pointwise_holder: bad y");
  MonotoneProblem p;
  p.op.dim = n;
  p.op.holder_exponent = alpha;
  p.op.holder_constant = 1.0;  // global for the scalar map |v|^alpha sign(v)
  p.op.differentiable = false;  // kink at 0
  p.op.apply_into = [alpha](const std::vector<double>& in,
                            std::vector<double>& out) {
    for (std::size_t i = 0; i < in.size(); ++i)
      out[i] = signed_pow(in[i], alpha);
  };
  p.y = yy;
  p.f = p.op.apply(yy);
  p.label = "pointwise_holder";
  return p;
}

MonotoneProblem make_composite(const DenseMatrix& matrix, double alpha,
                               const HVector& y) {
  check_square_symmetric(matrix);
  check_psd_sampled(matrix);
  const std::size_t n = matrix.size();
  if (y.size() != n) throw std::invalid_argument("make_composite: bad y");
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw std::invalid_argument("make_composite: alpha out of range");
  MonotoneProblem p;
  p.op.dim = n;
  p.op.holder_exponent = alpha;
  p.op.differentiable = false;
  p.op.apply_into = [matrix, alpha](const std::vector<double>& in,
                                    std::vector<double>& out) {
    matvec(matrix, in, out);
    for (std::size_t i = 0; i < in.size(); ++i)
      out[i] += signed_pow(in[i], alpha);
  };
  p.y = y;
  p.f = p.op.apply(y);
  p.matrix = matrix;
  p.label = "composite";
  return p;
}

NoisyData perturb(const HVector& f, double delta, unsigned seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("perturb: delta must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  HVector e = f.zeros_like();
  double ne = 0.0;
  while (ne == 0.0) {
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = gauss(rng);
    ne = norm(e);
  }
  HVector fd = axpy(delta / ne, e, f);
  return NoisyData{std::move(fd), delta};
}

namespace {

// 5x5 singular PSD test matrix: Q D Q with the Householder reflection
// Q = I - (2/5) ones*ones^T and D = diag(1, 0.4, 0.15, 0.04, 0).
// Exactly one null direction, spectrum wide enough that the regularized
// solutions resolve every range mode at desk-scale a.
MonotoneProblem build_psd5() {
  const std::size_t n = 5;
  const std::vector<double> d = {1.0, 0.4, 0.15, 0.04, 0.0};
  auto qmul = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - 0.4 * s;
    return out;
  };
  DenseMatrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> ej(n, 0.0);
    ej[j] = 1.0;
    auto qx = qmul(ej);
    for (std::size_t i = 0; i < n; ++i) qx[i] *= d[i];
    auto col = qmul(qx);
    for (std::size_t i = 0; i < n; ++i) a[i][j] = col[i];
  }
  auto w = uniform_weights(n);
  // y = Q x with x supported on the range modes; heavier weight on the
  // smallest nonzero eigenvalue so the noise-free error is visible.
  std::vector<double> x = {0.5, 0.5, 0.5, 1.5, 0.0};
  HVector y(qmul(x), w);
  std::vector<double> e5(n, 0.0);
  e5[4] = 1.0;
  auto nullv = qmul(e5);
  HVector nb(nullv, w);
  nb = (1.0 / norm(nb)) * nb;
  auto p = make_psd_linear(a, y, {nb});
  p.label = "psd5";
  return p;
}

MonotoneProblem build_psd2() {
  const std::size_t n = 2;
  DenseMatrix a = {{1.0, 0.0}, {0.0, 0.0}};
  auto w = uniform_weights(n);
  HVector y({1.0, 0.0}, w);
  HVector nb({0.0, 1.0}, w);
  nb = (1.0 / norm(nb)) * nb;
  auto p = make_psd_linear(a, y, {nb});
  p.label = "psd2";
  p.ubar = HVector({0.0, 5.0}, w);
  return p;
}

MonotoneProblem build_holder075() {
  const std::size_t n = 4;
  auto w = uniform_weights(n);
  HVector y({0.8, -0.6, 0.5, -0.4}, w);
  auto p = make_pointwise_holder(n, 0.75, y);
  p.label = "holder075";
  return p;
}

MonotoneProblem build_composite() {
  DenseMatrix a = {{1.0, 0.3, 0.0, 0.1},
                   {0.3, 0.8, 0.2, 0.0},
                   {0.0, 0.2, 0.9, 0.25},
                   {0.1, 0.0, 0.25, 0.7}};
  auto w = uniform_weights(4);
  HVector y({0.5, -0.4, 0.3, 0.6}, w);
  auto p = make_composite(a, 0.75, y);
  p.label = "composite";
  return p;
}

}  // namespace

MonotoneProblem registry(const std::string& label) {
  if (label == "identity") {
    auto p = make_identity(1);
    p.label = "identity";
    return p;
  }
  if (label == "psd2") return build_psd2();
  if (label == "psd5") return build_psd5();
  if (label == "holder075") return build_holder075();
  if (label == "composite") return build_composite();
  throw std::invalid_argument("unknown problem label: " + label);
}

std::vector<std::string> registry_labels() {
  return {"identity", "psd2", "psd5", "holder075", "composite"};
}

}  // namespace dsm
