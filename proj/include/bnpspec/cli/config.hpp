#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bnpspec/errors.hpp"
#include "bnpspec/fit.hpp"

namespace bnpspec::cli {

/// Bad or missing configuration value; the message names the field.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Run configuration shared by all commands. A JSON file with the sections
///   seed, data{preset,n,input}, truth, working_model{kind,coefficients,sigma2,acf},
///   delta, bounds ("auto" or {m, M_bound}), prior{...}, mcmc{...}, level, output,
///   verify{n, replicates, radius_fraction, perturbations, cases}
/// Unknown keys are rejected. Command-line flags are applied on top.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::size_t> n;
  std::optional<std::string> input;
  std::optional<std::string> truth;
  FitSettings fit;
  std::string output = ".";
  std::vector<std::size_t> verify_n;
  std::optional<std::size_t> replicates;
  double radius_fraction = 0.5;
  std::size_t perturbations = 50;
  std::size_t cases = 10000;

  /// Canonical JSON of every effective setting (used for the manifest hash).
  nlohmann::json to_json() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// "128,512,1024" -> {128, 512, 1024}.
std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& field);

/// 64-bit FNV-1a, hex-encoded.
std::string fnv1a_hex(const std::string& data);

}  // namespace bnpspec::cli
