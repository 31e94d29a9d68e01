#include "dsm/study.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

namespace dsm {

void StudyConfig::validate() const {
  if (deltas.empty())
    throw std::invalid_argument("study config: delta list is empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0))
      throw std::invalid_argument("study config: delta must be > 0");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument(
          "study config: delta list must be strictly decreasing");
    if (!(C * std::pow(deltas[i], zeta) > deltas[i]))
      throw std::invalid_argument(
          "study config: C delta^zeta > delta fails for a listed delta");
  }
  if (seeds.empty())
    throw std::invalid_argument("study config: seeds list is empty");
  const Schedule s = schedule();  // throws on bad d, c, b
  if (!certify(s, ConditionId::eq28, std::nullopt, 500).passed)
    throw std::invalid_argument("study config: schedule fails decay check");
  if (check_init &&
      !certify(s, ConditionId::eq46_q, q, 500).passed)
    throw std::invalid_argument(
        "study config: schedule fails the q-bounded (1/3) check");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      while (pos < item.size() && std::isspace((unsigned char)item[pos])) pos++;
      if (pos != item.size()) throw std::invalid_argument("trailing garbage");
    } catch (...) {
      throw std::invalid_argument("config line " + std::to_string(line) +
                                  ": bad number '" + item + "'");
    }
  }
  if (out.empty())
    throw std::invalid_argument("config line " + std::to_string(line) +
                                ": empty list");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

StudyConfig parse_config(const std::string& text) {
  StudyConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  bool have_delta = false;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line) +
                                  ": expected key=value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    auto num = [&](void) {
      auto v = parse_double_list(val, line);
      if (v.size() != 1)
        throw std::invalid_argument("config line " + std::to_string(line) +
                                    ": expected a single number");
      return v[0];
    };
    if (key == "problem") cfg.problem = val;
    else if (key == "d") cfg.d = num();
    else if (key == "c") cfg.c = num();
    else if (key == "b") cfg.b = num();
    else if (key == "C") cfg.C = num();
    else if (key == "zeta") cfg.zeta = num();
    else if (key == "q") cfg.q = num();
    else if (key == "p") cfg.p = num();
    else if (key == "theta") cfg.theta = num();
    else if (key == "rtol") cfg.rtol = num();
    else if (key == "atol") cfg.atol = num();
    else if (key == "t_max") cfg.t_max = num();
    else if (key == "workers") cfg.workers = int(num());
    else if (key == "check_init") cfg.check_init = num() != 0.0;
    else if (key == "delta") { cfg.deltas = parse_double_list(val, line); have_delta = true; }
    else if (key == "seeds") {
      cfg.seeds.clear();
      for (double v : parse_double_list(val, line))
        cfg.seeds.push_back(unsigned(v));
    }
    else if (key == "ubar") cfg.ubar = parse_double_list(val, line);
    else if (key == "u0") cfg.u0 = parse_double_list(val, line);
    else if (key == "out") cfg.output = val;
    else
      throw std::invalid_argument("config line " + std::to_string(line) +
                                  ": unknown key '" + key + "'");
  }
  if (!have_delta)
    throw std::invalid_argument("study config: delta list is required");
  cfg.validate();
  return cfg;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const MonotoneProblem prob = registry(cfg.problem);
  const Schedule sched = cfg.schedule();
  const StopRule rule{cfg.C, cfg.zeta};

  const std::size_t n = prob.op.dim;
  auto vec_of = [&](const std::vector<double>& v) {
    if (v.size() != n)
      throw std::invalid_argument("study config: vector length != problem dim");
    return prob.y.with_coords(v);
  };
  const HVector u0 = cfg.u0 ? vec_of(*cfg.u0) : prob.y.zeros_like();
  const std::optional<HVector> ubar =
      cfg.ubar ? std::optional<HVector>(vec_of(*cfg.ubar)) : std::nullopt;
  const HVector target =
      ubar ? prob.minimal_distance_solution(*ubar) : prob.y;

  struct Job {
    double delta;
    unsigned seed;
  };
  std::vector<Job> jobs;
  for (double dl : cfg.deltas)
    for (unsigned sd : cfg.seeds) jobs.push_back({dl, sd});

  StudyResult result;
  result.target = target;
  result.rows.resize(jobs.size());
  result.trajectories.resize(jobs.size());

  IntegratorOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  opts.t_max = cfg.t_max;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      StudyRow row;
      row.delta = jobs[i].delta;
      row.seed = jobs[i].seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const NoisyData data = perturb(prob.f, row.delta, row.seed);
        if (cfg.check_init) {
          const auto cert = check_init(prob.op, sched, data, u0, ubar, rule,
                                       cfg.p, cfg.q, cfg.theta);
          std::ostringstream os;
          os << "premise=" << (cert.premise.holds ? 1 : 0)
             << ";p_cond=" << (cert.small_h0_p.holds ? 1 : 0)
             << ";theta_cond=" << (cert.small_h0_th.holds ? 1 : 0);
          row.init_summary = os.str();
        }
        TrajectoryRecord rec =
            ubar ? integrate_shifted(prob.op, sched, data, u0, *ubar, rule,
                                     opts)
                 : integrate(prob.op, sched, data, u0, rule, opts);
        row.t_delta = *rec.t_delta;
        row.error = norm(*rec.u_at_stop - target);
        row.discrepancy_at_stop = rec.final_discrepancy;
        row.a_at_stop = sched.value(row.t_delta);
        result.trajectories[i] = std::move(rec);
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
      }
      row.wall_time_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - start)
              .count();
      result.rows[i] = std::move(row);
    }
  };

  int nw = cfg.workers > 0 ? cfg.workers
                           : int(std::thread::hardware_concurrency());
  nw = std::max(1, std::min<int>(nw, int(jobs.size())));
  std::vector<std::thread> pool;
  for (int k = 0; k < nw; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return result;
}

void write_csv(const std::vector<StudyRow>& rows, std::ostream& os) {
  os << "delta,seed,t_delta,error,discrepancy_at_stop,a_at_stop,status,"
        "wall_time_ms\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << format_double(r.delta) << ',' << r.seed << ','
       << format_double(r.t_delta) << ',' << format_double(r.error) << ','
       << format_double(r.discrepancy_at_stop) << ','
       << format_double(r.a_at_stop) << ',' << status << ','
       << format_double(r.wall_time_ms) << '\n';
  }
}

}  // namespace dsm
