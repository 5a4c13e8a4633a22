#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybridbf/beamdesign.hpp"
#include "hybridbf/channel.hpp"
#include "hybridbf/config.hpp"

namespace hbf {

inline constexpr const char* kVersion = "0.1.0";

// Noise variance is fixed; SNR sweeps move the transmit power P = 10^(snr/10).
inline constexpr double kNoiseVar = 1.0;

struct ModeRate {
  Mode mode;
  double rate = 0.0;  // mean over subcarriers, bits/s/Hz
  std::optional<DesignResult> design;  // hybrid modes only
};

struct TrialResult {
  double snr_db = 0.0;
  std::uint64_t trial = 0;
  ChannelRealization channel;
  std::vector<ModeRate> rates;  // config.mode order

  double rate(Mode m) const;
};

/// Everything a trial needs that does not depend on the channel draw.
struct TrialSetup {
  DesignCodebooks books;
  static TrialSetup from(const ScenarioConfig& cfg);
};

// Stream tags for derive_seed.
inline constexpr std::uint64_t kChannelStream = 0x63686e;  // "chn"
inline constexpr std::uint64_t kDesignStream = 0x64736e;   // "dsn"

/// Channel draws depend on (seed, trial) only, so every SNR point sees the same
/// channels; training noise, measurement matrices and initial beams depend on
/// (seed, snr, trial).
std::uint64_t channel_seed(std::uint64_t master, std::uint64_t trial);
std::uint64_t design_seed(std::uint64_t master, double snr_db, std::uint64_t trial);

ChannelRealization sample_channel(const ScenarioConfig& cfg, std::uint64_t trial);
DesignConfig design_config(const ScenarioConfig& cfg, double snr_db, CsiMode csi);

TrialResult run_trial(const ScenarioConfig& cfg, double snr_db, std::uint64_t trial);
TrialResult run_trial(const ScenarioConfig& cfg, const TrialSetup& setup, double snr_db,
                      std::uint64_t trial);

struct CellRecord {
  double snr_db = 0.0;
  Mode mode = Mode::cs_estimated;
  double mean_rate = 0.0;
  double std_err = 0.0;
  std::size_t trials_used = 0;
  bool degenerate_std_err = false;  // trials_used == 1, std_err reported as 0
};

struct SweepResult {
  ScenarioConfig config;
  std::string version = kVersion;
  std::vector<CellRecord> records;  // sorted by (mode name, snr_db)
};

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Runs trials x |snr grid| work units, possibly concurrently; the reduction is
/// ordered so results do not depend on scheduling. The first failing unit
/// aborts the sweep with its context.
SweepResult run_sweep(const ScenarioConfig& cfg, SweepOptions options = {});

std::string csv_text(const SweepResult& result);
std::string metadata_text(const SweepResult& result);

/// Writes `path` and a sidecar `path + ".meta"` holding the config echo.
void emit_csv(const SweepResult& result, const std::string& path);

/// Sample mean and standard error (sample std / sqrt(n)); n == 1 gives 0.
std::pair<double, double> mean_and_std_err(const std::vector<double>& xs);

}  // namespace hbf
