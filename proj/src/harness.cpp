#include "hybridbf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "hybridbf/format.hpp"
#include "hybridbf/metrics.hpp"

namespace hbf {

double TrialResult::rate(Mode m) const {
  for (const auto& r : rates) {
    if (r.mode == m) return r.rate;
  }
  throw std::out_of_range("harness: mode " + std::string(to_string(m)) + " was not run");
}

TrialSetup TrialSetup::from(const ScenarioConfig& cfg) {
  TrialSetup s;
  s.books.tx = build_codebook(cfg.N_t, cfg.codebook_size);
  s.books.rx = build_codebook(cfg.N_r, cfg.codebook_size);
  s.books.tx_dict = build_dictionary(cfg.N_t, cfg.dictionary_resolution);
  s.books.rx_dict = build_dictionary(cfg.N_r, cfg.dictionary_resolution);
  return s;
}

std::uint64_t channel_seed(std::uint64_t master, std::uint64_t trial) {
  return derive_seed(master, kChannelStream, trial);
}

std::uint64_t design_seed(std::uint64_t master, double snr_db, std::uint64_t trial) {
  // + 0.0 folds -0.0 into +0.0.
  return derive_seed(master, kDesignStream, std::bit_cast<std::uint64_t>(snr_db + 0.0), trial);
}

ChannelRealization sample_channel(const ScenarioConfig& cfg, std::uint64_t trial) {
  Rng rng(channel_seed(cfg.seed, trial));
  const PathSet paths = sample_paths(rng, cfg.L, cfg.N_cp, cfg.T_s);
  return frequency_channel(paths, cfg.N, cfg.T_s, cfg.N_r, cfg.N_t, cfg.rolloff);
}

DesignConfig design_config(const ScenarioConfig& cfg, double snr_db, CsiMode csi) {
  DesignConfig d;
  d.num_rf = cfg.N_RF;
  d.num_streams = cfg.N_s;
  d.max_iterations = cfg.max_iterations;
  d.meas_rx = cfg.resolved_M_r();
  d.meas_tx = cfg.resolved_M_t();
  d.max_sparsity = cfg.resolved_max_sparsity();
  d.residual_tol = cfg.residual_tol;
  d.recovery = cfg.recovery;
  d.csi = csi;
  d.reverse_reg = cfg.reverse_reg;
  d.training_snr = std::pow(10.0, (snr_db + cfg.training_snr_offset_dB) / 10.0) / kNoiseVar;
  return d;
}

TrialResult run_trial(const ScenarioConfig& cfg, double snr_db, std::uint64_t trial) {
  check_config(cfg);
  return run_trial(cfg, TrialSetup::from(cfg), snr_db, trial);
}

TrialResult run_trial(const ScenarioConfig& cfg, const TrialSetup& setup, double snr_db,
                      std::uint64_t trial) {
  TrialResult out;
  out.snr_db = snr_db;
  out.trial = trial;
  const double power = std::pow(10.0, snr_db / 10.0) * kNoiseVar;
  Mode current = Mode::full_digital;
  try {
    out.channel = sample_channel(cfg, trial);
    for (Mode m : cfg.mode) {
      current = m;
      ModeRate mr{m, 0.0, std::nullopt};
      if (m == Mode::full_digital) {
        mr.rate = full_digital_bound(out.channel.freq, power, kNoiseVar, cfg.N_s).mean;
      } else {
        const CsiMode csi = m == Mode::perfect_csi ? CsiMode::perfect : CsiMode::estimated;
        Rng rng(design_seed(cfg.seed, snr_db, trial));
        DesignResult design =
            iterate_design(out.channel, setup.books, design_config(cfg, snr_db, csi), rng);
        mr.rate = spectral_efficiency(out.channel.freq, design.beamformer, power, kNoiseVar).mean;
        mr.design = std::move(design);
      }
      out.rates.push_back(std::move(mr));
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("harness: trial " + std::to_string(trial) + " at " +
                             format_double(snr_db) + " dB, mode " +
                             std::string(to_string(current)) + ": " + e.what());
  }
  return out;
}

std::pair<double, double> mean_and_std_err(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

SweepResult run_sweep(const ScenarioConfig& cfg, SweepOptions options) {
  check_config(cfg);
  const TrialSetup setup = TrialSetup::from(cfg);
  const std::size_t n_snr = cfg.snr_grid_dB.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_modes = cfg.mode.size();
  const std::size_t units = n_snr * n_trials;

  // rates[unit * n_modes + mode], unit = snr_index * trials + trial.
  std::vector<double> rates(units * n_modes, 0.0);
  std::vector<std::exception_ptr> errors(units);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units) return;
      try {
        const TrialResult t = run_trial(cfg, setup, cfg.snr_grid_dB[u / n_trials], u % n_trials);
        for (std::size_t m = 0; m < n_modes; ++m) rates[u * n_modes + m] = t.rates[m].rate;
      } catch (...) {
        errors[u] = std::current_exception();
        failed = true;
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(units, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result;
  result.config = cfg;
  for (std::size_t m = 0; m < n_modes; ++m) {
    for (std::size_t s = 0; s < n_snr; ++s) {
      std::vector<double> xs(n_trials);
      for (std::size_t t = 0; t < n_trials; ++t) xs[t] = rates[(s * n_trials + t) * n_modes + m];
      const auto [mean, se] = mean_and_std_err(xs);
      result.records.push_back(
          CellRecord{cfg.snr_grid_dB[s], cfg.mode[m], mean, se, n_trials, n_trials == 1});
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const CellRecord& a, const CellRecord& b) {
              const auto ma = to_string(a.mode), mb = to_string(b.mode);
              if (ma != mb) return ma < mb;
              return a.snr_db < b.snr_db;
            });
  return result;
}

std::string csv_text(const SweepResult& result) {
  std::string out = "snr_db,mode,mean_rate_bps_hz,std_err,trials\n";
  for (const auto& r : result.records) {
    out += format_double(r.snr_db);
    out += ',';
    out += to_string(r.mode);
    out += ',';
    out += format_double(r.mean_rate);
    out += ',';
    out += format_double(r.std_err);
    out += ',';
    out += std::to_string(r.trials_used);
    out += '\n';
  }
  return out;
}

std::string metadata_text(const SweepResult& result) {
  std::ostringstream os;
  os << "# hybridbf " << result.version << " sweep metadata\n";
  os << "# seed " << result.config.seed << '\n';
  for (const auto& r : result.records) {
    if (r.degenerate_std_err) {
      os << "# std_err undefined for a single trial (reported as 0): " << to_string(r.mode)
         << " at " << format_double(r.snr_db) << " dB\n";
    }
  }
  os << config_text(result.config);
  return os.str();
}

void emit_csv(const SweepResult& result, const std::string& path) {
  auto write = [](const std::string& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("harness: cannot open '" + p + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("harness: write to '" + p + "' failed");
  };
  write(path, csv_text(result));
  write(path + ".meta", metadata_text(result));
}

}  // namespace hbf
