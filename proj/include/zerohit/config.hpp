#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "zerohit/complex_flow.hpp"
#include "zerohit/flow.hpp"

namespace zerohit {

inline constexpr int kSchemaVersion = 1;

/// Raised for unreadable, malformed or out-of-range configuration. The
/// message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyLawSettings {
  std::vector<double> deltas{0.0};
  std::size_t n_paths = 10000;
  /// CDF levels; the checked times are the exact law's quantiles at these.
  std::vector<double> probabilities{0.1, 0.25, 0.5, 0.75, 0.9, 0.95};
};

struct FieldSettings {
  std::vector<double> xs{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5};
  std::vector<double> deltas{-4.5, -4.0, -3.5, -3.0, -2.5, -2.0, -1.5, -1.0, -0.5, 0.0};
  std::size_t paths = 1;
  /// Grids evaluated for the refinement diagnostic (1 = none).
  int refine_levels = 3;
  bool svg = true;
};

struct WeldSettings {
  std::vector<double> kappas{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> xs{0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8,
                         2.0, 2.2, 2.4, 2.6, 2.8, 3.0, 3.2, 3.4, 3.6, 3.8};
  double psi_tolerance = 1e-7;
  bool svg = true;
};

struct EventSpec {
  double x = 0.1;
  std::size_t k = 100;
  double lambda = 1.0;
};

struct WalkSettings {
  double x = 0.05;
  std::size_t k = 500;
  std::size_t paths = 20;
  /// Increments are checked against the law at lambda * x^2.
  std::vector<double> lambdas{0.25, 0.5, 1.0, 2.0, 5.0, 20.0};
  std::vector<std::size_t> sum_n{1000, 100000};
  std::size_t sum_replicates = 200;
  std::vector<EventSpec> events{{0.1, 100, 1.0},
                                {0.05, 400, 1.0},
                                {0.1, 50, 0.5},
                                {0.2, 20, 2.0},
                                {0.02, 1000, 0.1}};
  std::size_t event_replicates = 10000;
};

struct TraceSettings {
  double kappa = 2.0;
  /// Number of capacity times, evenly spaced on [0, 1].
  std::size_t points = 33;
  double y_probe = 0.1;
  double tolerance = 1e-3;
  double y_floor = 1e-5;
  bool svg = true;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 1;
  FlowConfig flow;
  ComplexFlowConfig complex_flow;
  VerifyLawSettings verify_law;
  FieldSettings field;
  WeldSettings weld;
  WalkSettings walk;
  TraceSettings trace;
};

/// Parses JSON text. Every section and key is optional; unknown keys, a
/// missing or wrong schema_version, and invalid values are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& cfg);

/// The fully resolved configuration as JSON text (stable key order).
std::string canonical_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

}  // namespace zerohit
