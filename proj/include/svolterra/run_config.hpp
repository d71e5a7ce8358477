#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "svolterra/kernels.hpp"
#include "svolterra/spectral_operator.hpp"
#include "svolterra/stochastic.hpp"

namespace svolterra {

struct KernelSpec {
  std::string kind = "exponential";  // exponential | fractional | csv
  double alpha = 0.5;
  std::filesystem::path path;
};

struct OperatorSpec {
  std::string name = "dirichlet-laplacian";  // dirichlet-laplacian | zero | csv
  std::size_t modes = 8;
  std::filesystem::path path;
};

struct GridSpec {
  double t_end = 1.0;
  std::size_t steps = 1000;
};

struct NoiseSpec {
  std::size_t modes = 8;
  std::uint64_t seed = 42;
  std::size_t paths = 256;
};

struct IntegrandSpec {
  // zero | unit | geometric | diagonal-decay | smooth-time | brownian-feedback
  std::string name = "diagonal-decay";
  double decay = 3.0;
  std::size_t index = 1;
};

struct RefinementSpec {
  std::size_t coarse_steps = 200;
  std::size_t levels = 3;
  std::size_t factor = 2;
  double min_rate = 0.4;
};

struct YosidaSpec {
  std::vector<long> n_list{10, 100, 1000};
};

struct CpSpec {
  std::vector<double> mu{0.0, 0.5, 1.0, 10.0};
  double t_end = 2.0;
  std::size_t steps = 2000;
  bool r_without_mu = false;
  double tolerance = 1e-8;
};

struct ItoSpec {
  std::size_t paths = 20000;
  std::size_t i = 1;
  std::size_t j = 2;
};

struct WeakSpec {
  std::size_t xi_mode = 1;
};

struct CauchySpec {
  std::size_t steps = 1000;
  std::size_t factor = 4;
  std::size_t paths = 32;
  double min_factor = 1.2;
  double max_factor = 2.8;
};

struct RegularitySpec {
  std::size_t factor = 4;
  std::size_t paths = 32;
};

/// Fully resolved run configuration. Every field has a default.
struct RunConfig {
  KernelSpec kernel;
  OperatorSpec op;
  GridSpec grid;
  NoiseSpec noise;
  IntegrandSpec integrand;
  RefinementSpec refinement;
  YosidaSpec yosida;
  CpSpec cp;
  ItoSpec ito;
  WeakSpec weak;
  CauchySpec cauchy;
  RegularitySpec regularity;
  std::vector<std::string> experiments;
  std::filesystem::path output_dir = "svolterra-out";
};

/// Experiment names in canonical order.
const std::vector<std::string>& experiment_names();

/// Reads an INI file. Sections [kernel], [operator], ...; a section named
/// after an experiment holds dotted overrides such as `noise.paths = 64`.
boost::property_tree::ptree read_config_tree(const std::filesystem::path& path);

/// Base configuration with defaults applied. Throws ConfigError naming the
/// offending field.
RunConfig parse_config(const boost::property_tree::ptree& tree);

/// Configuration for one experiment: base sections plus that experiment's
/// override section.
RunConfig experiment_config(const boost::property_tree::ptree& tree,
                            const std::string& experiment);

/// Checks that the configuration can run `experiment`. Throws ConfigError.
void validate(const RunConfig& config, const std::string& experiment);

/// Resolved configuration as INI text with a fixed key order.
void write_config(const RunConfig& config, std::ostream& out);

Kernel make_kernel(const KernelSpec& spec);
SpectralOperator make_operator(const OperatorSpec& spec);
IntegrandSeries make_integrand(const IntegrandSpec& spec, std::size_t dim, std::size_t modes);

}  // namespace svolterra
