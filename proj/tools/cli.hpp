#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopharm/dpw.hpp"
#include "loopharm/liegroup.hpp"
#include "loopharm/mapgrid.hpp"

namespace loopharm::cli {

using Json = nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

/// Thrown for malformed or inconsistent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  std::optional<double> residual;  ///< default 10 h^2 (form scale)
  double oracle = 1e-8;
  double split = 1e-10;
};

struct RunConfig {
  std::string command;
  std::optional<PotentialSpec> potential;
  GridSpec grid{};
  std::optional<std::vector<Complex>> lambdas;
  std::string out_dir = ".";
  std::string name = "loopharm";
  std::string input;
  std::optional<GroupDescriptor> group;
  std::string gallery;
  std::optional<SolvLoopElement> element;
  Tolerances tol;
  unsigned threads = 0;
  Json canonical;  ///< normalized config used for the hash
};

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<int> band;
  std::optional<int> grid;
  std::optional<std::string> lambdas;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  std::optional<std::string> name;
  std::optional<unsigned> threads;
};

/// Parses a config document; throws ConfigError with a readable message.
RunConfig parse_config(const Json& doc, const std::string& command, const Overrides& ov = {});
/// "re,im;re,im;..." or "roots:N" for the N-th roots of unity.
std::vector<Complex> parse_lambda_list(const std::string& text);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const RunConfig& cfg);

/// Wavefront OBJ with one object per sampled surface; quads skip masked samples.
void write_obj(const std::string& path, const MapGrid& grid, const std::vector<std::string>& object_names);
/// CSV with columns x, y, lambda_re, lambda_im, phi1..phiN, one block per slice.
void write_csv(const std::string& path, const MapGrid& grid);
/// Reads a CSV in the format above; returns the grid at lambda = 1 (or the
/// first lambda present) with the other lambdas as slices.
MapGrid read_csv(const std::string& path);

/// Runs one command, writes artifacts, returns the exit status.
int run(const RunConfig& cfg);

/// Names accepted by the gallery command.
const std::vector<std::string>& gallery_names();

}  // namespace loopharm::cli
