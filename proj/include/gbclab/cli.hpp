#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gbclab/report.hpp"

namespace gbclab {

enum class Mode { CheckIdentity, Mass, Balance, Horizon, Penrose, Egb };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);  // ConfigError("mode") when unknown

struct MapConfig {
  int n = 0;
  int m = 0;
  std::string source;
};

struct ComponentConfig {
  std::string rho;
  std::vector<double> center;  // recorded only; the boundary integrals are translation invariant
};

/// Everything a run needs; built from one JSON document plus flag overrides.
struct RunConfig {
  Mode mode = Mode::CheckIdentity;
  std::optional<MapConfig> map;
  std::optional<double> alpha;
  MassKind mass = MassKind::P2;
  IdentityKind identity = IdentityKind::P2;
  bool include_normal_terms = true;
  int level = 5;
  std::vector<double> radii{8.0, 16.0, 32.0, 64.0};
  std::vector<double> steps;            // absolute steps; empty means relative
  double relative_step = 1e-2;          // steps {b, b/2, b/4} times |x|
  int point_count = 50;
  double r_inner = 1.0;
  double r_outer = 4.0;
  std::vector<std::vector<double>> points;  // explicit points replace the quasi-random set
  double r0 = 0.0;
  int radial_points = 16;
  double core_radius = 1.0;
  int hypersurface_n = 0;
  std::vector<ComponentConfig> components;
  std::string boundary_s = "horizon";   // "horizon", "map", or an expression in u1..un
  std::filesystem::path out_dir = "gbc_lab_out";
  bool write_json = true;
  bool write_csv = true;
  bool write_dat = false;
  std::uint64_t seed = 1;
  bool quiet = false;
};

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::filesystem::path> out;
  std::optional<int> level;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Parses and validates; mode-specific required fields are checked here so no
/// computation starts on an incomplete configuration. Errors are ConfigError
/// carrying the dotted field path.
RunConfig parse_config(const Json& doc, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Runs the configured mode, writes report.json, tables/*.csv and summary.txt
/// (plus .dat tables when requested) into out_dir, prints the summary to `out`
/// unless quiet. Returns 0, or 2 when a verdict fails. Errors are thrown.
int run(const RunConfig& config, std::ostream& out);

}  // namespace gbclab
