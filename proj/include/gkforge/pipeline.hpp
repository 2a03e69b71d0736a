#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkforge/diffops.hpp"
#include "gkforge/gk_assembly.hpp"
#include "gkforge/moment_space.hpp"
#include "gkforge/w_solutions.hpp"

namespace gkforge::pipeline {

inline constexpr int kReportSchemaVersion = 1;
const char* tool_version();

// Construction config document. Keys beyond the core schema: "box" and "tolerances".
struct Config {
  int k_plus = 1;
  std::optional<int> k_minus;
  int l_plus = 0;
  int l_minus = 0;
  double lambda = 1.0;
  double lambda0 = 0.0;
  std::vector<MomentPoint> poles;
  double holonomy = 0.0;
  std::optional<ZTranslation> z_quotient;
  FdScheme fd{4, 5e-3};
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  SampleBox box{Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 0.6, 0.6)};
  std::map<std::string, double> tolerances;  // per-identity overrides

  // Throws ConfigError on unknown keys, wrong types or out-of-range values.
  static Config from_json(const nlohmann::json& doc);
  static Config load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  double tolerance(const std::string& name, double fallback) const;
};

struct RunOptions {
  bool allow_incomplete = false;
  double max_angle = 0.95;
  double pole_margin = 0.2;  // h-distance of samples from every pole
};

// Solution handle: the scalar solution and a GK structure on a chart based at the box centre.
struct Construction {
  Config config;
  SolitonParams params;
  OrbifoldModel model;
  std::shared_ptr<const SolitonAngle> angle;
  std::shared_ptr<const ScalarSolution> w;
  std::vector<MomentPoint> poles;
  std::shared_ptr<const GkStructure> structure;
};

Construction construct(const Config& config, const RunOptions& options = {});

// One pass/fail block of a report.
struct Stage {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

struct Report {
  std::string command;
  nlohmann::json config;  // echo, null for examples
  std::vector<Stage> stages;
  double wall_time = 0.0;  // seconds

  bool pass() const;
  const Stage* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

// W and p ranges over the samples, flux around every pole and the S(W) verdict if defined.
Report construct_report(const Construction& c, const RunOptions& options = {});

// frame identities, W-equation, closed curvature, flux, quantization, GK axioms,
// soliton system and pole asymptotics on the configured samples.
Report verify(const Construction& c, const RunOptions& options = {});

// Flux through two nested spheres around each pole and the integrality verdict.
Report flux_report(const Construction& c);

enum class ExportFormat { Csv, Json };

struct ExportOptions {
  int nodes = 16;  // per axis over the configured box
  ExportFormat format = ExportFormat::Csv;
};

// Lattice of (point, p, W, metric at t = 0 in the gauge A(x) = 0, W-equation residual).
// CSV: one header row, then one row per node, mu1 fastest.
void export_lattice(const Construction& c, const ExportOptions& options, std::ostream& out);
nlohmann::json export_metadata(const Construction& c, const ExportOptions& options);
std::vector<std::string> export_columns();

const std::vector<std::string>& example_names();
// Runs the verification suite of a named oracle; unknown names throw ConfigError.
Report run_example(const std::string& name, std::size_t samples = 24, std::uint64_t seed = 1);

}  // namespace gkforge::pipeline
