#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsm/integrator.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

/// Batch experiment configuration: one flow run per (delta, seed).
struct StudyConfig {
  std::string problem = "identity";
  double d = 3.0, c = 1.0, b = 0.5;       // schedule
  double C = 1.5, zeta = 0.9;             // stopping rule
  std::vector<double> deltas;             // strictly decreasing
  std::vector<unsigned> seeds = {101, 102, 103};
  std::optional<std::vector<double>> ubar;
  std::optional<std::vector<double>> u0;  // defaults to 0
  std::string output;
  double rtol = 1e-8, atol = 1e-12, t_max = 1e6;
  int workers = 0;  // 0 = hardware concurrency
  bool check_init = true;
  double q = 0.25, p = 0.45, theta = 1.0;

  void validate() const;
  Schedule schedule() const { return Schedule::power(d, c, b, t_max); }
};

struct StudyRow {
  double delta = 0.0;
  unsigned seed = 0;
  double t_delta = 0.0;
  double error = 0.0;  // ||u(t_delta) - y||, or to y* for shifted runs
  double discrepancy_at_stop = 0.0;
  double a_at_stop = 0.0;
  std::string status = "ok";
  double wall_time_ms = 0.0;
  std::string init_summary;
};

/// key=value per line, '#' comments; unknown keys rejected with the line
/// number. Lists are comma separated.
StudyConfig parse_config(const std::string& text);

/// Runs the whole sweep; failures are recorded per row, never aborting the
/// study. Rows come back sorted by (delta desc, seed asc) regardless of
/// completion order. Also returns the per-run trajectories for audits.
struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<TrajectoryRecord> trajectories;  // aligned with rows
  HVector target;                              // y or y*
};

StudyResult run_study(const StudyConfig& cfg);

/// Fixed column order: delta, seed, t_delta, error, discrepancy_at_stop,
/// a_at_stop, status, wall_time_ms. Numbers at 17 significant digits.
void write_csv(const std::vector<StudyRow>& rows, std::ostream& os);

std::string format_double(double v);

}  // namespace dsm
