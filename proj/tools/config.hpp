#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "steklov/axisym3d.hpp"
#include "steklov/geometry.hpp"
#include "steklov/mesh2d.hpp"
#include "steklov/verify.hpp"

namespace steklov::cli {

enum class Command { Ball, Spectrum, Verify, Sweep, Converge, Chain };

std::string to_string(Command c);

struct WeightSpec {
  RadialWeight weight = RadialWeight::constant(0.0);
  std::string file;  // tabulated weights only
};

struct DomainSpec {
  bool solid = false;  // axisymmetric domain in R^3
  Domain2D planar;
  MeridianDomain meridian;
  std::vector<Vec2> polygon;  // as written, before centering
  Vec2 offset = Vec2::Zero();  // as written
  int line = 0;
  std::string id() const { return solid ? meridian.id() : planar.id(); }
};

struct RunConfig {
  Command command = Command::Verify;
  SpaceForm form{Curvature::Euclidean, 2};
  std::vector<WeightSpec> weights;
  std::vector<DomainSpec> domains;
  std::vector<double> radii;     // ball command
  int eigenvalues = 5;           // spectrum / converge / ball
  int random_weights = 0;        // extra seeded quadratic weights for sweeps
  std::uint64_t seed = 0;
  std::string format = "both";  // csv | json | both
  std::string prefix;           // output file stem, defaults to the command name
  VerifyOptions verify;
};

/// Parses the key = value format with [section] headers. Relative weight
/// file paths resolve against base_dir. Throws Error::Kind::Config with
/// "line N" locations.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Adds the seeded random weights (if any) to the weight list.
void expand_random_weights(RunConfig& cfg);

/// Every field after defaults, for embedding into outputs.
nlohmann::ordered_json resolved_config(const RunConfig& cfg);
/// The same, rendered as config-format lines.
std::vector<std::string> resolved_config_lines(const RunConfig& cfg);

}  // namespace steklov::cli
