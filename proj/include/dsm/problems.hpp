#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsm/hvector.hpp"

namespace dsm {

/// Monotone operator F on the discretized space: <F(u)-F(v), u-v> >= 0.
/// Holder metadata (exponent alpha, constant C_R) is declared, never used
/// by the solvers.
struct MonotoneOperator {
  std::size_t dim = 0;
  double holder_exponent = 1.0;               // alpha in (0,1]
  std::optional<double> holder_constant;      // C_R, if known
  bool differentiable = false;                // metadata only

  // Hot-path form; operates on raw coordinates of compatible vectors.
  std::function<void(const std::vector<double>&, std::vector<double>&)>
      apply_into;

  HVector apply(const HVector& u) const {
    std::vector<double> out(u.size());
    apply_into(u.coords(), out);
    return u.with_coords(std::move(out));
  }
};

using DenseMatrix = std::vector<std::vector<double>>;  // row-major, square

/// Test problem: operator F, exact data f = F(y), and the minimal-norm
/// solution y. For linear problems the matrix and a weighted-orthonormal
/// null-space basis are kept so minimal-norm / minimal-distance ground
/// truth stays exact.
struct MonotoneProblem {
  MonotoneOperator op;
  HVector y;   // minimal-norm solution
  HVector f;   // = op.apply(y)
  std::optional<HVector> ubar;  // shift anchor, when the problem ships one
  std::string label;

  std::optional<DenseMatrix> matrix;  // present for linear (A u) problems
  std::vector<HVector> null_basis;    // empty when the solution is unique

  /// Solution with minimal distance to `anchor`: y + P_null(anchor - y).
  HVector minimal_distance_solution(const HVector& anchor) const;
};

struct NoisyData {
  HVector f_delta;
  double delta = 0.0;
};

MonotoneProblem make_identity(std::size_t n,
                              std::optional<HVector> y = std::nullopt);

MonotoneProblem make_psd_linear(const DenseMatrix& matrix, const HVector& y,
                                std::vector<HVector> null_basis = {});

MonotoneProblem make_pointwise_holder(std::size_t n, double alpha,
                                      std::optional<HVector> y = std::nullopt,
                                      bool allow_low_alpha = false);

MonotoneProblem make_composite(const DenseMatrix& matrix, double alpha,
                               const HVector& y);

/// f_delta = f + delta * e with e a seeded pseudo-random unit-norm vector,
/// so ||f_delta - f|| = delta exactly (up to rounding).
NoisyData perturb(const HVector& f, double delta, unsigned seed);

/// Problems addressable by label from the CLI and the studies:
/// identity, psd2, psd5, holder075, composite.
MonotoneProblem registry(const std::string& label);
std::vector<std::string> registry_labels();

}  // namespace dsm
