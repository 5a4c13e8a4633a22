#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hybridbf/beamdesign.hpp"
#include "hybridbf/sensing.hpp"

namespace hbf {

enum class Mode { cs_estimated, perfect_csi, full_digital };

std::string_view to_string(Mode m);
std::string_view to_string(RecoveryMethod m);
std::string_view to_string(ReverseReg r);
Mode parse_mode(std::string_view s);

/// Raised for malformed config text, unknown keys, or violated constraints.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario parameters. Keys in config files and --set overrides use the
/// member names verbatim (N_t, N_RF, snr_grid_dB, ...).
struct ScenarioConfig {
  int N_t = 32;
  int N_r = 32;
  int N_RF = 4;
  int N_s = 4;
  int N = 32;
  int N_cp = 8;
  int L = 6;
  int codebook_size = 64;
  double dictionary_resolution = 2.8125;  // degrees
  int M_r = 0;                            // 0: ceil(2 L log2(grid size))
  int M_t = 0;
  double rolloff = 0.8;
  double T_s = 1.0;
  std::vector<double> snr_grid_dB = {-15, -10, -5, 0, 5, 10, 15};
  int trials = 200;
  int max_iterations = 4;
  std::vector<Mode> mode = {Mode::cs_estimated, Mode::perfect_csi, Mode::full_digital};
  RecoveryMethod recovery = RecoveryMethod::somp;
  ReverseReg reverse_reg = ReverseReg::noise_var;
  int max_sparsity = 0;                  // 0: use L
  double residual_tol = 1e-6;
  double training_snr_offset_dB = 0.0;   // training SNR = data SNR + offset
  std::uint64_t seed = 1;

  int resolved_M_r() const;
  int resolved_M_t() const;
  int resolved_max_sparsity() const;
  bool has_hybrid_mode() const;
};

/// Sets one field from its textual value. Throws ConfigError on unknown keys
/// or unparsable values.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key = value" lines. '#' starts a comment; "[section]" headers group
/// keys but do not change their names. Repeated keys are rejected.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path);

/// Constraint violations, empty when the config is runnable.
std::vector<std::string> config_violations(const ScenarioConfig& cfg);
void check_config(const ScenarioConfig& cfg);

/// Serializes every field in the format parse_config reads back.
std::string config_text(const ScenarioConfig& cfg);

}  // namespace hbf
