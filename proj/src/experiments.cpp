#include "svolterra/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"
#include "svolterra/parallel.hpp"
#include "svolterra/verify.hpp"

namespace svolterra {

namespace {

class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, csv::format(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add_list(const std::string& key, const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + csv::format(values[i]);
    add(key, s);
  }
  std::vector<std::pair<std::string, std::string>> take() { return std::move(lines_); }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

HVector normalized_ones(std::size_t dim) {
  return HVector(std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
}

bool decreasing_or_zero(const std::vector<double>& v) {
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) return true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

struct Setup {
  Kernel kernel;
  SpectralOperator op;
  TimeGrid grid;
  IntegrandSeries psi;
  EnsembleSpec ensemble;
};

Setup make_setup(const RunConfig& c) {
  SpectralOperator op = make_operator(c.op);
  IntegrandSeries psi = make_integrand(c.integrand, op.size(), c.noise.modes);
  return Setup{make_kernel(c.kernel), std::move(op), TimeGrid(c.grid.t_end, c.grid.steps),
               std::move(psi), EnsembleSpec{c.noise.modes, c.noise.seed, c.noise.paths}};
}

void describe(Report& r, const Setup& s) {
  r.add("kernel", s.kernel.label());
  r.add("operator", s.op.description());
  r.add("modes", s.op.size());
  r.add("t_end", s.grid.t_end());
  r.add("steps", s.grid.steps());
  r.add("integrand", s.psi.name());
  r.add("noise_modes", s.ensemble.modes);
  r.add("seed", std::to_string(s.ensemble.seed));
}

bool run_resolvent(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  const ResolventTable table = build_resolvent(s.op, s.kernel, s.grid);
  {
    auto out = open_output(dir / "resolvent.csv");
    table.write_csv(out);
  }
  bool identity_at_zero = true;
  for (std::size_t k = 0; k < table.modes(); ++k) identity_at_zero &= table(k, 0) == 1.0;
  const HVector v = normalized_ones(s.op.size());
  const ResolventResidual res = resolvent_equation_residual(table, v);
  const double comm = commutation_check(table, s.op, v);
  const ExponentialBound bound = exponential_bound_fit(table);
  double yosida_identity = 0.0;
  for (long n : c.yosida.n_list) {
    for (double lambda : s.op.eigenvalues()) {
      yosida_identity =
          std::max(yosida_identity, std::abs(yosida_scalar(n, lambda) - j_scalar(n, lambda) * lambda));
    }
  }
  const std::vector<double> conv =
      yosida_resolvent_convergence(s.op, s.kernel, s.grid, v, c.yosida.n_list);
  std::vector<double> bound_m, bound_omega;
  for (long n : c.yosida.n_list) {
    const ExponentialBound b = exponential_bound_fit(build_resolvent(s.op, s.kernel, s.grid, n));
    bound_m.push_back(b.M);
    bound_omega.push_back(b.omega);
  }
  r.add("identity_at_zero", identity_at_zero);
  r.add("equation_residual", res.max_residual);
  r.add("coarse_subgrid_residual", res.coarse_residual);
  r.add("commutation_residual", comm);
  r.add("yosida_identity_residual", yosida_identity);
  r.add("bound_M", bound.M);
  r.add("bound_omega", bound.omega);
  std::vector<double> ns(c.yosida.n_list.begin(), c.yosida.n_list.end());
  r.add_list("yosida_n", ns);
  r.add_list("yosida_sup_error", conv);
  r.add_list("yosida_bound_M", bound_m);
  r.add_list("yosida_bound_omega", bound_omega);
  const bool decreasing = decreasing_or_zero(conv);
  r.add("yosida_decreasing", decreasing);
  return identity_at_zero && res.max_residual <= 1e-6 && comm <= 1e-13 &&
         yosida_identity <= 1e-12 && decreasing && std::isfinite(bound.M) &&
         std::isfinite(bound.omega);
}

bool run_cp_check(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Kernel kernel = make_kernel(c.kernel);
  const TimeGrid grid(c.cp.t_end, c.cp.steps);
  r.add("kernel", kernel.label());
  r.add("t_end", grid.t_end());
  r.add("steps", grid.steps());
  r.add("tolerance", c.cp.tolerance);
  r.add("r_without_mu", c.cp.r_without_mu);
  const CompletePositivityOptions options{c.cp.tolerance, c.cp.r_without_mu};
  auto out = open_output(dir / "cp-check.csv");
  out << "mu,t,s,r\n";
  bool pass = true;
  for (double mu : c.cp.mu) {
    const CompletePositivityReport cp = check_complete_positivity(kernel, mu, grid, options);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      out << csv::format(mu) << ',' << csv::format(grid.t(j)) << ',' << csv::format(cp.s_values[j])
          << ',' << csv::format(cp.r_values[j]) << '\n';
    }
    const std::string tag = "mu=" + csv::format(mu);
    r.add(tag + ".min_s", cp.min_s);
    r.add(tag + ".min_r", cp.min_r);
    r.add(tag + ".nonneg", cp.nonneg);
    pass = pass && cp.nonneg;
  }
  return pass;
}

bool run_convolve(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  r.add("paths", s.ensemble.paths);
  const ResolventTable table = build_resolvent(s.op, s.kernel, s.grid);
  TrajectorySet all(s.grid, s.op.size(), s.ensemble.paths, "W^" + s.psi.name());
  parallel::for_each_index(s.ensemble.paths, [&](std::size_t p) {
    const WienerBundle bundle = sample_bundle(s.grid, s.ensemble.modes, s.ensemble.seed, p);
    all.set_path(p, convolve_modes(table, forcing_increments(s.psi, bundle)));
  });
  {
    auto out = open_output(dir / "convolve.csv");
    all.write_summary_csv(out);
  }
  {
    const std::size_t shown = std::min<std::size_t>(4, s.ensemble.paths);
    TrajectorySet head(s.grid, s.op.size(), shown, all.label());
    for (std::size_t p = 0; p < shown; ++p) {
      for (std::size_t j = 0; j < s.grid.size(); ++j) {
        for (std::size_t k = 0; k < s.op.size(); ++k) head.at(p, j, k) = all.at(p, j, k);
      }
    }
    auto out = open_output(dir / "convolve_paths.csv");
    head.write_csv(out);
  }
  bool zero_start = true;
  for (std::size_t p = 0; p < all.paths(); ++p) {
    for (std::size_t k = 0; k < all.dim(); ++k) zero_start &= all.at(p, 0, k) == 0.0;
  }
  const std::vector<double> integrals = all.squared_norm_integrals();
  const bool finite = std::all_of(integrals.begin(), integrals.end(),
                                  [](double x) { return std::isfinite(x); });
  const double max_integral = *std::max_element(integrals.begin(), integrals.end());
  r.add("zero_initial", zero_start);
  r.add("square_integrable", finite);
  r.add("max_sq_norm_integral", max_integral);

  const WienerBundle first = sample_bundle(s.grid, s.ensemble.modes, s.ensemble.seed, 0);
  double interchange = 0.0;
  bool interchange_ok = true;
  try {
    interchange = apply_A_to_convolution(s.op, table, s.psi, first).discrepancy;
  } catch (const NumericError& e) {
    interchange_ok = false;
    r.add("interchange_error", std::string(e.what()));
  }
  r.add("interchange_discrepancy", interchange);

  bool isometry_ok = true;
  if (s.psi.deterministic()) {
    const std::size_t last = s.grid.steps();
    double quad = 0.0;
    std::vector<double> value(s.op.size());
    for (std::size_t l = 0; l < last; ++l) {
      const IncrementPrefix history(first, l);
      for (std::size_t i = 0; i < s.psi.modes(); ++i) {
        std::fill(value.begin(), value.end(), 0.0);
        s.psi.eval(i, history, value);
        for (std::size_t k = 0; k < s.op.size(); ++k) {
          const double sv = table(k, last - l) * value[k];
          quad += sv * sv * s.grid.dt();
        }
      }
    }
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t p = 0; p < all.paths(); ++p) {
      const HVector w = all.state(p, last);
      const double sq = dot(w, w);
      sum += sq;
      sum_sq += sq * sq;
    }
    const double n = static_cast<double>(all.paths());
    const double mean = sum / n;
    const double se = n > 1 ? std::sqrt(std::max(sum_sq - sum * mean, 0.0) / (n - 1) / n) : 0.0;
    isometry_ok = std::abs(mean - quad) <= 3.0 * se;
    r.add("terminal_mean_sq_norm", mean);
    r.add("terminal_isometry_quadrature", quad);
    r.add("terminal_std_error", se);
    r.add("isometry_within_3se", isometry_ok);
  }
  return zero_start && finite && interchange_ok && isometry_ok;
}

bool run_ito_check(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  r.add("paths", c.ito.paths);
  const IsometryReport iso =
      ito_isometry_test(s.psi, s.grid, s.ensemble.modes, c.ito.paths, s.ensemble.seed);
  const bool iso_ok = std::abs(iso.lhs - iso.rhs) <= 3.0 * iso.std_error;
  r.add("isometry_lhs", iso.lhs);
  r.add("isometry_rhs", iso.rhs);
  r.add("isometry_std_error", iso.std_error);
  r.add("isometry_within_3se", iso_ok);
  r.add("tail_budget", s.psi.tail_total());

  auto out = open_output(dir / "ito-check.csv");
  out << "quantity,estimate,reference,std_error\n";
  out << "isometry," << csv::format(iso.lhs) << ',' << csv::format(iso.rhs) << ','
      << csv::format(iso.std_error) << '\n';
  bool cross_ok = true;
  if (std::max(c.ito.i, c.ito.j) <= s.psi.modes()) {
    const CrossReport cross = cross_orthogonality_test(s.psi, s.grid, c.ito.i - 1, c.ito.j - 1,
                                                       c.ito.paths, s.ensemble.seed);
    cross_ok = std::abs(cross.estimate) <= 3.0 * cross.std_error;
    r.add("cross_modes", std::to_string(c.ito.i) + "," + std::to_string(c.ito.j));
    r.add("cross_estimate", cross.estimate);
    r.add("cross_std_error", cross.std_error);
    r.add("cross_within_3se", cross_ok);
    out << "cross," << csv::format(cross.estimate) << ",0," << csv::format(cross.std_error) << '\n';
  } else {
    r.add("cross_modes", std::string("skipped: integrand has fewer noise modes"));
  }
  if (s.grid.steps() % 4 == 0) {
    const std::size_t gap_paths = std::min<std::size_t>(c.ito.paths, 2000);
    const double fine = riemann_refinement_gap(s.psi, s.grid, s.ensemble.modes, gap_paths,
                                               s.ensemble.seed);
    const double coarse = riemann_refinement_gap(s.psi, s.grid.coarsened(2), s.ensemble.modes,
                                                 gap_paths, s.ensemble.seed);
    r.add("riemann_gap_dt", fine);
    r.add("riemann_gap_2dt", coarse);
    out << "riemann_gap," << csv::format(fine) << ',' << csv::format(coarse) << ",0\n";
  }
  return iso_ok && cross_ok;
}

void write_refinement(const VerificationReport& v, const std::filesystem::path& file, Report& r) {
  auto out = open_output(file);
  out << "level,dt,residual_sup_mean,rate\n";
  for (std::size_t l = 0; l < v.level_residuals.size(); ++l) {
    const double rate = l == 0 || !v.refinement_rates ? std::nan("") : (*v.refinement_rates)[l - 1];
    out << l << ',' << csv::format(v.level_dt[l]) << ',' << csv::format(v.level_residuals[l]) << ','
        << csv::format(rate) << '\n';
  }
  r.add("paths", v.paths);
  r.add_list("level_dt", v.level_dt);
  r.add_list("level_residual_sup_mean", v.level_residuals);
  if (v.refinement_rates) r.add_list("observed_rates", *v.refinement_rates);
  r.add("min_rate", v.min_rate);
  r.add("residual_sup_mean", v.residual_sup_mean);
  double worst = 0.0;
  for (double x : v.residual_sup_per_path) worst = std::max(worst, x);
  r.add("residual_sup_max_path", worst);
  r.add("tolerance_used", v.tolerance_used);
  r.add("integrability_witness", v.integrability_witness);
}

bool run_verify(const std::string& name, const RunConfig& c, const std::filesystem::path& dir,
                Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  const double inf = std::numeric_limits<double>::infinity();
  ResidualSuite suite;
  if (name == "verify-strong") {
    suite = [&](std::span<const WienerBundle> b) {
      return strong_solution_residual(s.op, s.kernel, s.psi, b, inf);
    };
  } else if (name == "verify-weak") {
    const HVector xi = HVector::basis(s.op.size(), c.weak.xi_mode - 1);
    suite = [&s, xi, inf](std::span<const WienerBundle> b) {
      return weak_solution_residual(s.op, s.kernel, s.psi, b, xi, inf);
    };
    r.add("xi_mode", c.weak.xi_mode);
  } else {
    suite = [&](std::span<const WienerBundle> b) {
      return mild_weak_equivalence_check(s.op, s.kernel, s.psi, b, inf);
    };
  }
  const VerificationReport v =
      refinement_study(name, suite, s.grid.t_end(), c.refinement.coarse_steps,
                       c.refinement.levels, c.refinement.factor, s.ensemble, c.refinement.min_rate);
  write_refinement(v, dir / (name + ".csv"), r);
  bool pass = v.pass;
  if (name == "verify-weak") {
    const WienerBundle b = sample_bundle(v.grid, s.ensemble.modes, s.ensemble.seed, 0);
    const double consistency = weak_strong_consistency(s.op, s.kernel, s.psi, b);
    r.add("weak_strong_consistency", consistency);
    pass = pass && consistency <= 1e-12;
  }
  return pass;
}

bool run_yosida(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  const YosidaSuiteReport y =
      yosida_strong_convergence_suite(s.op, s.kernel, s.grid, s.psi, s.ensemble, c.yosida.n_list);
  const std::vector<double> resolvent_error = yosida_resolvent_convergence(
      s.op, s.kernel, s.grid, normalized_ones(s.op.size()), c.yosida.n_list);
  auto out = open_output(dir / "yosida-suite.csv");
  out << "n,e1,e2,n1_sq,n2_sq,split_margin,resolvent_sup_error\n";
  bool split = true;
  for (std::size_t m = 0; m < y.n_list.size(); ++m) {
    out << y.n_list[m] << ',' << csv::format(y.e1[m]) << ',' << csv::format(y.e2[m]) << ','
        << csv::format(y.n1_sq[m]) << ',' << csv::format(y.n2_sq[m]) << ','
        << csv::format(y.split_margin[m]) << ',' << csv::format(resolvent_error[m]) << '\n';
    split = split && y.split_bound_holds[m] && y.split_margin[m] >= 0.0;
  }
  r.add("paths", y.paths);
  r.add_list("e1", y.e1);
  r.add_list("e2", y.e2);
  r.add_list("n1_sq", y.n1_sq);
  r.add_list("n2_sq", y.n2_sq);
  r.add_list("split_margin", y.split_margin);
  r.add("split_bound_holds", split);
  r.add("n1_route_discrepancy", y.n1_route_discrepancy);
  r.add("e1_decreasing", y.e1_decreasing);
  r.add("e2_decreasing", y.e2_decreasing);
  r.add("pathwise_decreasing", y.pathwise_decreasing);
  r.add_list("resolvent_sup_error", resolvent_error);
  const bool route_ok = y.n1_route_discrepancy <= 1e-10;
  return y.e1_decreasing && y.e2_decreasing && y.pathwise_decreasing && split && route_ok &&
         decreasing_or_zero(resolvent_error);
}

bool run_cauchy(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  const TimeGrid coarse(c.grid.t_end, c.cauchy.steps);
  const TimeGrid fine = coarse.refined(c.cauchy.factor);
  r.add("kernel", s.kernel.label());
  r.add("operator", s.op.description());
  r.add("integrand", s.psi.name());
  r.add("coarse_dt", coarse.dt());
  r.add("fine_dt", fine.dt());
  r.add("paths", c.cauchy.paths);
  std::vector<double> d_coarse(c.cauchy.paths), d_fine(c.cauchy.paths), ode(c.cauchy.paths);
  parallel::for_each_index(c.cauchy.paths, [&](std::size_t p) {
    const WienerBundle bundle = sample_bundle(fine, s.ensemble.modes, s.ensemble.seed, p);
    const CauchyReport rc = cauchy_reformulation(s.op, s.kernel, s.psi,
                                                 bundle.aggregated(c.cauchy.factor));
    d_coarse[p] = rc.sup_discrepancy;
    ode[p] = rc.ode_residual;
    d_fine[p] = cauchy_reformulation(s.op, s.kernel, s.psi, bundle).sup_discrepancy;
  });
  auto out = open_output(dir / "cauchy.csv");
  out << "path,discrepancy_coarse,discrepancy_fine,ratio\n";
  double mean_coarse = 0.0, mean_fine = 0.0;
  for (std::size_t p = 0; p < c.cauchy.paths; ++p) {
    out << p << ',' << csv::format(d_coarse[p]) << ',' << csv::format(d_fine[p]) << ','
        << csv::format(d_coarse[p] / d_fine[p]) << '\n';
    mean_coarse += d_coarse[p];
    mean_fine += d_fine[p];
  }
  mean_coarse /= static_cast<double>(c.cauchy.paths);
  mean_fine /= static_cast<double>(c.cauchy.paths);
  const double factor = mean_coarse / mean_fine;
  const double residual = cauchy_ode_residual(
      s.op, s.kernel, coarse,
      [](std::size_t k, double t) { return std::sin(std::numbers::pi * t) / static_cast<double>(k + 1); });
  const bool contraction_ok = factor >= c.cauchy.min_factor && factor <= c.cauchy.max_factor;
  const bool residual_ok = residual <= 10.0 * coarse.dt();
  r.add("mean_sup_discrepancy_coarse", mean_coarse);
  r.add("mean_sup_discrepancy_fine", mean_fine);
  r.add("contraction_factor", factor);
  r.add("contraction_band", csv::format(c.cauchy.min_factor) + "," + csv::format(c.cauchy.max_factor));
  r.add("contraction_in_band", contraction_ok);
  r.add("stochastic_y_residual_max", *std::max_element(ode.begin(), ode.end()));
  r.add("deterministic_ode_residual", residual);
  r.add("deterministic_ode_bound", 10.0 * coarse.dt());
  r.add("deterministic_ode_ok", residual_ok);
  return contraction_ok && residual_ok;
}

bool run_regularity(const RunConfig& c, const std::filesystem::path& dir, Report& r) {
  const Setup s = make_setup(c);
  describe(r, s);
  const TimeGrid fine = s.grid.refined(c.regularity.factor);
  const ResolventTable coarse_table = build_resolvent(s.op, s.kernel, s.grid);
  const ResolventTable fine_table = build_resolvent(s.op, s.kernel, fine);
  TrajectorySet coarse_set(s.grid, s.op.size(), c.regularity.paths, "coarse");
  TrajectorySet fine_set(fine, s.op.size(), c.regularity.paths, "fine");
  parallel::for_each_index(c.regularity.paths, [&](std::size_t p) {
    const WienerBundle bundle = sample_bundle(fine, s.ensemble.modes, s.ensemble.seed, p);
    fine_set.set_path(p, convolve_modes(fine_table, forcing_increments(s.psi, bundle)));
    const WienerBundle agg = bundle.aggregated(c.regularity.factor);
    coarse_set.set_path(p, convolve_modes(coarse_table, forcing_increments(s.psi, agg)));
  });
  const RegularityReport rc = regularity_probe(coarse_set);
  const RegularityReport rf = regularity_probe(fine_set);
  auto out = open_output(dir / "regularity.csv");
  out << "level,dt,lag,modulus\n";
  for (std::size_t i = 0; i < rc.lags.size(); ++i) {
    out << "coarse," << csv::format(s.grid.dt()) << ',' << rc.lags[i] << ','
        << csv::format(rc.modulus[i]) << '\n';
  }
  for (std::size_t i = 0; i < rf.lags.size(); ++i) {
    out << "fine," << csv::format(fine.dt()) << ',' << rf.lags[i] << ','
        << csv::format(rf.modulus[i]) << '\n';
  }
  r.add("paths", c.regularity.paths);
  r.add("fine_dt", fine.dt());
  r.add("max_jump_coarse", rc.max_jump);
  r.add("max_jump_fine", rf.max_jump);
  r.add("holder_estimate_coarse", rc.holder_estimate);
  r.add("holder_estimate_fine", rf.holder_estimate);
  const bool both_zero = rc.max_jump == 0.0 && rf.max_jump == 0.0;
  const bool decreasing = both_zero || rf.max_jump < rc.max_jump;
  r.add("max_jump_decreasing", decreasing);
  return decreasing;
}

}  // namespace

ExperimentResult run_experiment(const std::string& name, const RunConfig& config,
                                const std::filesystem::path& dir, std::ostream& log,
                                bool verbose) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.add("experiment", name);
  bool pass = false;
  try {
    if (name == "resolvent") {
      pass = run_resolvent(config, dir, report);
    } else if (name == "cp-check") {
      pass = run_cp_check(config, dir, report);
    } else if (name == "convolve") {
      pass = run_convolve(config, dir, report);
    } else if (name == "ito-check") {
      pass = run_ito_check(config, dir, report);
    } else if (name == "verify-strong" || name == "verify-weak" || name == "verify-mild") {
      pass = run_verify(name, config, dir, report);
    } else if (name == "yosida-suite") {
      pass = run_yosida(config, dir, report);
    } else if (name == "cauchy") {
      pass = run_cauchy(config, dir, report);
    } else if (name == "regularity") {
      pass = run_regularity(config, dir, report);
    } else {
      throw ConfigError("unknown experiment '" + name + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    report.add("error", std::string(e.what()));
    pass = false;
  }
  report.add("pass", pass);
  ExperimentResult result{name, pass, report.take()};
  {
    auto out = open_output(dir / (name + ".report.txt"));
    for (const auto& [key, value] : result.report) out << key << " = " << value << '\n';
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << name << ": " << (pass ? "pass" : "FAIL");
  if (verbose) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%.2f s)", seconds);
    log << buf;
  }
  log << '\n';
  if (verbose) {
    for (const auto& [key, value] : result.report) log << "  " << key << " = " << value << '\n';
  }
  return result;
}

void write_plot_script(const std::vector<ExperimentResult>& results, const RunConfig& config,
                       const std::filesystem::path& dir) {
  auto out = open_output(dir / "plots.gnu");
  out << "# gnuplot -c plots.gnu\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 900,600\n";
  for (const auto& r : results) {
    const std::string& n = r.name;
    out << "\nset output '" << n << ".png'\nset title '" << n << "'\n";
    if (n == "resolvent") {
      out << "plot for [c=2:" << config.op.modes + 1 << "] 'resolvent.csv' using 1:c with lines\n";
    } else if (n == "cp-check") {
      out << "plot 'cp-check.csv' using 2:3 with points pt 7 ps 0.2 title 's', "
             "'' using 2:4 with points pt 7 ps 0.2 title 'r'\n";
    } else if (n == "convolve") {
      out << "plot 'convolve.csv' using 1:2:3 with yerrorlines\n";
    } else if (n == "ito-check") {
      out << "plot 'ito-check.csv' using 0:2:xtic(1) with boxes, '' using 0:3 with points pt 7\n";
    } else if (n == "verify-strong" || n == "verify-weak" || n == "verify-mild") {
      out << "set logscale xy\nplot '" << n << ".csv' using 2:3 with linespoints\nunset logscale\n";
    } else if (n == "yosida-suite") {
      out << "set logscale xy\nplot 'yosida-suite.csv' using 1:2 with linespoints, "
             "'' using 1:3 with linespoints\nunset logscale\n";
    } else if (n == "cauchy") {
      out << "plot 'cauchy.csv' using 1:2 with points, '' using 1:3 with points\n";
    } else if (n == "regularity") {
      out << "set logscale xy\nplot 'regularity.csv' using ($2*$3):4 with points pt 7\n"
             "unset logscale\n";
    }
  }
}

}  // namespace svolterra
