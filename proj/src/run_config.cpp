#include "svolterra/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "svolterra/csv.hpp"
#include "svolterra/errors.hpp"

namespace svolterra {

namespace pt = boost::property_tree;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "resolvent",    "cp-check", "convolve", "ito-check", "verify-strong",
      "verify-weak",  "verify-mild", "yosida-suite", "cauchy", "regularity"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"kernel", {"kind", "alpha", "path"}},
      {"operator", {"name", "modes", "path"}},
      {"grid", {"t_end", "steps"}},
      {"noise", {"modes", "seed", "paths"}},
      {"integrand", {"name", "decay", "index"}},
      {"refinement", {"coarse_steps", "levels", "factor", "min_rate"}},
      {"yosida", {"n_list"}},
      {"cp", {"mu", "t_end", "steps", "r_without_mu", "tolerance"}},
      {"ito", {"paths", "i", "j"}},
      {"weak", {"xi_mode"}},
      {"cauchy", {"steps", "factor", "paths", "min_factor", "max_factor"}},
      {"regularity", {"factor", "paths"}},
      {"experiments", {"list"}},
      {"output", {"dir"}},
  };
  return keys;
}

bool is_experiment(const std::string& name) {
  const auto& names = experiment_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

[[noreturn]] void bad_value(const std::string& field, const std::string& value,
                            const std::string& expected) {
  throw ConfigError(field + ": expected " + expected + ", got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
T parse_integer(const std::string& field, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(field, value, "an integer");
  }
  return out;
}

double parse_real(const std::string& field, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(field, value, "a finite number");
  }
  return out;
}

bool parse_bool(const std::string& field, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(field, value, "true or false");
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class F>
  void read(const std::string& section, const std::string& key, F&& assign) const {
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return;
    assign(section + "." + key, it->second.data());
  }

  void size(const std::string& s, const std::string& k, std::size_t& out) const {
    read(s, k, [&](const std::string& f, const std::string& v) { out = parse_integer<std::size_t>(f, v); });
  }
  void real(const std::string& s, const std::string& k, double& out) const {
    read(s, k, [&](const std::string& f, const std::string& v) { out = parse_real(f, v); });
  }
  void text(const std::string& s, const std::string& k, std::string& out) const {
    read(s, k, [&](const std::string&, const std::string& v) { out = v; });
  }
  void path(const std::string& s, const std::string& k, std::filesystem::path& out) const {
    read(s, k, [&](const std::string&, const std::string& v) { out = v; });
  }

 private:
  const pt::ptree& tree_;
};

void check_sections(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (is_experiment(section)) continue;
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError(section + ": top-level keys are not allowed");
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) throw ConfigError("unknown key " + section + "." + key);
      (void)value;
    }
  }
}

std::string join_ints(const std::vector<long>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + csv::format(v[i]);
  return out;
}

}  // namespace

pt::ptree read_config_tree(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return tree;
}

RunConfig parse_config(const pt::ptree& tree) {
  check_sections(tree);
  const Reader r(tree);
  RunConfig c;
  r.text("kernel", "kind", c.kernel.kind);
  r.real("kernel", "alpha", c.kernel.alpha);
  r.path("kernel", "path", c.kernel.path);
  r.text("operator", "name", c.op.name);
  r.size("operator", "modes", c.op.modes);
  r.path("operator", "path", c.op.path);
  r.real("grid", "t_end", c.grid.t_end);
  r.size("grid", "steps", c.grid.steps);
  r.size("noise", "modes", c.noise.modes);
  r.read("noise", "seed", [&](const std::string& f, const std::string& v) {
    c.noise.seed = parse_integer<std::uint64_t>(f, v);
  });
  r.size("noise", "paths", c.noise.paths);
  r.text("integrand", "name", c.integrand.name);
  r.real("integrand", "decay", c.integrand.decay);
  r.size("integrand", "index", c.integrand.index);
  r.size("refinement", "coarse_steps", c.refinement.coarse_steps);
  r.size("refinement", "levels", c.refinement.levels);
  r.size("refinement", "factor", c.refinement.factor);
  r.real("refinement", "min_rate", c.refinement.min_rate);
  r.read("yosida", "n_list", [&](const std::string& f, const std::string& v) {
    c.yosida.n_list.clear();
    for (const auto& item : split_list(v)) c.yosida.n_list.push_back(parse_integer<long>(f, item));
  });
  r.read("cp", "mu", [&](const std::string& f, const std::string& v) {
    c.cp.mu.clear();
    for (const auto& item : split_list(v)) c.cp.mu.push_back(parse_real(f, item));
  });
  r.real("cp", "t_end", c.cp.t_end);
  r.size("cp", "steps", c.cp.steps);
  r.read("cp", "r_without_mu", [&](const std::string& f, const std::string& v) {
    c.cp.r_without_mu = parse_bool(f, v);
  });
  r.real("cp", "tolerance", c.cp.tolerance);
  r.size("ito", "paths", c.ito.paths);
  r.size("ito", "i", c.ito.i);
  r.size("ito", "j", c.ito.j);
  r.size("weak", "xi_mode", c.weak.xi_mode);
  r.size("cauchy", "steps", c.cauchy.steps);
  r.size("cauchy", "factor", c.cauchy.factor);
  r.size("cauchy", "paths", c.cauchy.paths);
  r.real("cauchy", "min_factor", c.cauchy.min_factor);
  r.real("cauchy", "max_factor", c.cauchy.max_factor);
  r.size("regularity", "factor", c.regularity.factor);
  r.size("regularity", "paths", c.regularity.paths);

  c.experiments = experiment_names();
  r.read("experiments", "list", [&](const std::string& f, const std::string& v) {
    c.experiments.clear();
    for (const auto& item : split_list(v)) {
      if (item == "all") {
        for (const auto& name : experiment_names()) c.experiments.push_back(name);
      } else if (is_experiment(item)) {
        c.experiments.push_back(item);
      } else {
        bad_value(f, item, "an experiment name or 'all'");
      }
    }
  });
  r.path("output", "dir", c.output_dir);
  return c;
}

RunConfig experiment_config(const pt::ptree& tree, const std::string& experiment) {
  if (!is_experiment(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  pt::ptree merged = tree;
  merged.erase(experiment);
  const auto overrides = tree.find(experiment);
  if (overrides != tree.not_found()) {
    for (const auto& [key, value] : overrides->second) {
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        throw ConfigError(experiment + "." + key + ": overrides must be written section.key");
      }
      const std::string section = key.substr(0, dot);
      const std::string field = key.substr(dot + 1);
      const auto known = known_keys().find(section);
      if (known == known_keys().end() || section == "experiments" || section == "output" ||
          !known->second.contains(field)) {
        throw ConfigError(experiment + "." + key + ": unknown override target");
      }
      merged.put(pt::ptree::path_type(section + '\x1f' + field, '\x1f'), value.data());
    }
  }
  return parse_config(merged);
}

Kernel make_kernel(const KernelSpec& spec) {
  try {
    if (spec.kind == "exponential") return Kernel::exponential();
    if (spec.kind == "fractional") return Kernel::fractional(spec.alpha);
    if (spec.kind == "csv") {
      if (spec.path.empty()) throw ConfigError("kernel.path: required for kind = csv");
      return Kernel::load_csv(spec.path);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  throw ConfigError("kernel.kind: expected exponential, fractional or csv, got '" + spec.kind + "'");
}

SpectralOperator make_operator(const OperatorSpec& spec) {
  if (spec.name != "csv" && spec.modes < 1) throw ConfigError("operator.modes: must be >= 1");
  try {
    if (spec.name == "dirichlet-laplacian") return SpectralOperator::dirichlet_laplacian(spec.modes);
    if (spec.name == "zero") return SpectralOperator::zero(spec.modes);
    if (spec.name == "csv") {
      if (spec.path.empty()) throw ConfigError("operator.path: required for name = csv");
      return SpectralOperator::load_csv(spec.path);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("operator: ") + e.what());
  }
  throw ConfigError("operator.name: expected dirichlet-laplacian, zero or csv, got '" + spec.name +
                    "'");
}

IntegrandSeries make_integrand(const IntegrandSpec& spec, std::size_t dim, std::size_t modes) {
  if (spec.name == "zero") return IntegrandSeries::zero(dim, modes);
  if (spec.name == "unit") {
    if (spec.index < 1 || spec.index > dim) {
      throw ConfigError("integrand.index: must lie in 1.." + std::to_string(dim));
    }
    return IntegrandSeries::unit(dim, spec.index - 1);
  }
  if (spec.name == "geometric") return IntegrandSeries::geometric(dim, modes);
  if (spec.name == "diagonal-decay") {
    if (!(spec.decay > 0.0)) throw ConfigError("integrand.decay: must be > 0");
    return IntegrandSeries::diagonal_decay(dim, modes, spec.decay);
  }
  if (spec.name == "smooth-time") return IntegrandSeries::smooth_time(dim);
  if (spec.name == "brownian-feedback") {
    if (dim < 2) throw ConfigError("integrand.name: brownian-feedback needs operator.modes >= 2");
    if (modes < 2) throw ConfigError("integrand.name: brownian-feedback needs noise.modes >= 2");
    return IntegrandSeries::brownian_feedback(dim);
  }
  throw ConfigError("integrand.name: unknown integrand '" + spec.name + "'");
}

void validate(const RunConfig& c, const std::string& experiment) {
  if (!is_experiment(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  const Kernel kernel = make_kernel(c.kernel);
  const SpectralOperator op = make_operator(c.op);
  if (!(c.grid.t_end > 0.0)) throw ConfigError("grid.t_end: must be > 0");
  if (c.grid.steps < 1) throw ConfigError("grid.steps: must be >= 1");
  if (c.noise.modes < 1) throw ConfigError("noise.modes: must be >= 1");
  if (c.noise.paths < 1) throw ConfigError("noise.paths: must be >= 1");
  const IntegrandSeries psi = make_integrand(c.integrand, op.size(), c.noise.modes);
  if (psi.modes() > c.noise.modes) {
    throw ConfigError("noise.modes: integrand " + psi.name() + " needs " +
                      std::to_string(psi.modes()) + " noise modes");
  }

  auto require_table = [&](double t_end, const std::string& field) {
    if (t_end > kernel.support_end()) {
      throw ConfigError(field + ": " + csv::format(t_end) + " exceeds the kernel table end " +
                        csv::format(kernel.support_end()));
    }
  };

  if (experiment == "cp-check") {
    if (!(c.cp.t_end > 0.0)) throw ConfigError("cp.t_end: must be > 0");
    if (c.cp.steps < 1) throw ConfigError("cp.steps: must be >= 1");
    if (c.cp.mu.empty()) throw ConfigError("cp.mu: list is empty");
    for (double mu : c.cp.mu) {
      if (!(mu >= 0.0)) throw ConfigError("cp.mu: every mu must be >= 0");
    }
    if (!(c.cp.tolerance >= 0.0)) throw ConfigError("cp.tolerance: must be >= 0");
    require_table(c.cp.t_end, "cp.t_end");
    return;
  }
  require_table(c.grid.t_end, "grid.t_end");

  if (experiment == "resolvent" || experiment == "yosida-suite") {
    if (c.yosida.n_list.empty()) throw ConfigError("yosida.n_list: list is empty");
    for (std::size_t i = 0; i < c.yosida.n_list.size(); ++i) {
      const long n = c.yosida.n_list[i];
      if (n < 1 || !(static_cast<double>(n) > op.max_eigenvalue())) {
        throw ConfigError("yosida.n_list: n = " + std::to_string(n) +
                          " must be positive and exceed the largest eigenvalue " +
                          csv::format(op.max_eigenvalue()));
      }
      if (i > 0 && n <= c.yosida.n_list[i - 1]) {
        throw ConfigError("yosida.n_list: values must be strictly increasing");
      }
    }
  }
  if (experiment == "ito-check") {
    if (c.ito.paths < 100) throw ConfigError("ito.paths: must be >= 100");
    if (c.ito.i < 1 || c.ito.j < 1 || c.ito.i == c.ito.j) {
      throw ConfigError("ito.i, ito.j: need two distinct 1-based noise modes");
    }
  }
  if (experiment == "verify-strong" || experiment == "verify-weak" ||
      experiment == "verify-mild") {
    if (c.refinement.coarse_steps < 1) throw ConfigError("refinement.coarse_steps: must be >= 1");
    if (c.refinement.levels < 2) throw ConfigError("refinement.levels: must be >= 2");
    if (c.refinement.factor < 2) throw ConfigError("refinement.factor: must be >= 2");
  }
  if (experiment == "verify-weak" && (c.weak.xi_mode < 1 || c.weak.xi_mode > op.size())) {
    throw ConfigError("weak.xi_mode: must lie in 1.." + std::to_string(op.size()));
  }
  if (experiment == "cauchy") {
    const double a0 = kernel.a0();
    if (!std::isfinite(a0) || a0 == 0.0) {
      throw ConfigError("cauchy: kernel " + kernel.label() + " has a(0) = " + csv::format(a0) +
                        "; the Cauchy reformulation uses c = a(0) and needs it finite and nonzero");
    }
    if (c.cauchy.steps < 2) throw ConfigError("cauchy.steps: must be >= 2");
    if (c.cauchy.factor < 2) throw ConfigError("cauchy.factor: must be >= 2");
    if (c.cauchy.paths < 1) throw ConfigError("cauchy.paths: must be >= 1");
  }
  if (experiment == "regularity") {
    if (c.regularity.factor < 2) throw ConfigError("regularity.factor: must be >= 2");
    if (c.regularity.paths < 1) throw ConfigError("regularity.paths: must be >= 1");
    if (c.grid.steps < 2) throw ConfigError("grid.steps: regularity needs >= 2 steps");
  }
}

void write_config(const RunConfig& c, std::ostream& out) {
  out << "[kernel]\nkind = " << c.kernel.kind << "\nalpha = " << csv::format(c.kernel.alpha)
      << "\npath = " << c.kernel.path.string() << "\n\n";
  out << "[operator]\nname = " << c.op.name << "\nmodes = " << c.op.modes
      << "\npath = " << c.op.path.string() << "\n\n";
  out << "[grid]\nt_end = " << csv::format(c.grid.t_end) << "\nsteps = " << c.grid.steps << "\n\n";
  out << "[noise]\nmodes = " << c.noise.modes << "\nseed = " << c.noise.seed
      << "\npaths = " << c.noise.paths << "\n\n";
  out << "[integrand]\nname = " << c.integrand.name << "\ndecay = " << csv::format(c.integrand.decay)
      << "\nindex = " << c.integrand.index << "\n\n";
  out << "[refinement]\ncoarse_steps = " << c.refinement.coarse_steps
      << "\nlevels = " << c.refinement.levels << "\nfactor = " << c.refinement.factor
      << "\nmin_rate = " << csv::format(c.refinement.min_rate) << "\n\n";
  out << "[yosida]\nn_list = " << join_ints(c.yosida.n_list) << "\n\n";
  out << "[cp]\nmu = " << join_reals(c.cp.mu) << "\nt_end = " << csv::format(c.cp.t_end)
      << "\nsteps = " << c.cp.steps
      << "\nr_without_mu = " << (c.cp.r_without_mu ? "true" : "false")
      << "\ntolerance = " << csv::format(c.cp.tolerance) << "\n\n";
  out << "[ito]\npaths = " << c.ito.paths << "\ni = " << c.ito.i << "\nj = " << c.ito.j << "\n\n";
  out << "[weak]\nxi_mode = " << c.weak.xi_mode << "\n\n";
  out << "[cauchy]\nsteps = " << c.cauchy.steps << "\nfactor = " << c.cauchy.factor
      << "\npaths = " << c.cauchy.paths << "\nmin_factor = " << csv::format(c.cauchy.min_factor)
      << "\nmax_factor = " << csv::format(c.cauchy.max_factor) << "\n\n";
  out << "[regularity]\nfactor = " << c.regularity.factor << "\npaths = " << c.regularity.paths
      << "\n\n";
  out << "[experiments]\nlist = ";
  for (std::size_t i = 0; i < c.experiments.size(); ++i) out << (i ? "," : "") << c.experiments[i];
  out << "\n\n[output]\ndir = " << c.output_dir.string() << '\n';
}

}  // namespace svolterra
