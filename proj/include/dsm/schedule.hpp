#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dsm {

/// Regularizing schedule a(t): positive, strictly decreasing, a -> 0 with
/// |a'|/a^2 decreasing to 0. Power family a(t) = d/(c+t)^b in closed form;
/// custom schedules from samples via monotone cubic interpolation.
class Schedule {
 public:
  static Schedule power(double d, double c, double b, double t_max = 1e6);
  static Schedule from_samples(std::vector<double> t, std::vector<double> a);

  double value(double t) const;
  double derivative(double t) const;
  /// integral of a over [0, t]
  double integral_phi(double t) const;
  /// |a'(t)| / a(t)^2
  double ratio(double t) const;

  double t_max() const { return t_max_; }
  bool is_power() const { return kind_ == Kind::Power; }
  double d() const { return d_; }
  double c() const { return c_; }
  double b() const { return b_; }

 private:
  enum class Kind { Power, Sampled };
  Kind kind_ = Kind::Power;
  double d_ = 3.0, c_ = 1.0, b_ = 0.5;
  double t_max_ = 1e6;

  // sampled kind: monotone cubic (Fritsch-Carlson) interpolant
  std::vector<double> ts_, as_, slopes_, seg_integral_;
  std::size_t segment(double t) const;
};

enum class ConditionId { eq28, eq26_q, eq46_q };

struct ConditionCertificate {
  ConditionId condition_id;
  std::optional<double> q;
  bool passed = false;
  std::optional<double> witness;  // first violating t
  std::string detail;
};

/// Grid-certified schedule conditions:
///   eq28    -- a > 0 decreasing, |a'|/a^2 > 0 decreasing
///   eq26_q  -- eq28 plus q in (0,1/2) with |a'|/a^2 < q everywhere
///   eq46_q  -- eq28 plus q in (0,1/3) with |a'|/a^2 < q everywhere
/// For power schedules the closed-form admissibility d > b q^{-1} c^{b-1}
/// is checked as well.
ConditionCertificate certify(const Schedule& s, ConditionId id,
                             std::optional<double> q = std::nullopt,
                             int grid = 2000);

std::string condition_name(ConditionId id);

}  // namespace dsm
