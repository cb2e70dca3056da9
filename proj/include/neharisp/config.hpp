#pragma once

#include <string>

#include "neharisp/semiclassics.hpp"

namespace neharisp {

/// One JSON configuration document drives every subcommand; all module
/// invariants are re-validated at load and violations name the offending
/// field.
struct RunConfig {
  Grid3 grid{64, 12.0};
  RadialConfig radial;
  PotentialSet potentials;
  SolverConfig solver;
  std::vector<double> eps_list;
  GmapConfig gmap;
  std::string output_dir = "out";
  std::string config_hash;  // FNV-1a of the document bytes, hex
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

/// Shipped example configurations (also installed under configs/).
const std::string& builtin_config(const std::string& name);  // throws on unknown
std::vector<std::string> builtin_config_names();

std::string fnv1a_hex(const std::string& bytes);

}  // namespace neharisp
