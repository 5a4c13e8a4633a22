#include "hybridbf/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridbf/config.hpp"
#include "hybridbf/format.hpp"
#include "hybridbf/harness.hpp"

namespace hbf {

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> mode;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Scenario config file (key = value)");
  sub->add_option("--set", c.overrides, "Override a config field, key=value (repeatable)");
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--trials", c.trials, "Trials per SNR point");
  sub->add_option("--mode", c.mode, "Comma-separated modes: cs_estimated, perfect_csi, full_digital");
}

// Loads the file and applies every override; throws ConfigError on any bad key.
ScenarioConfig resolve(const Common& c) {
  ScenarioConfig cfg = c.config_path.empty() ? ScenarioConfig{} : load_config(c.config_path);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("config: override '" + kv + "' is not key=value");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (c.mode) apply_setting(cfg, "mode", *c.mode);
  return cfg;
}

std::string join(const std::vector<Eigen::Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

void print_trial(const TrialResult& t, std::ostream& out) {
  out << "trial " << t.trial << " at " << format_double(t.snr_db) << " dB\n";
  for (const auto& r : t.rates) {
    out << to_string(r.mode) << ": " << format_double(r.rate) << " bps/Hz\n";
    if (!r.design) continue;
    const auto& d = *r.design;
    out << "  initial F_RF: [" << join(d.initial_f_indices) << "]\n";
    for (std::size_t i = 0; i < d.trace.size(); ++i) {
      out << "  iteration " << i + 1 << ": W_RF [" << join(d.trace[i].w_indices) << "] F_RF ["
          << join(d.trace[i].f_indices) << "]";
      if (d.trace[i].degenerate) out << " (" << d.trace[i].degenerate << " degenerate)";
      out << '\n';
    }
    out << "  " << (d.converged ? "converged" : "iteration cap reached") << " after "
        << d.trace.size() << " iteration(s)\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid precoder/combiner design simulator for mmWave MIMO-OFDM"};
  app.require_subcommand(1);

  Common sweep_opts, trial_opts, validate_opts;
  std::string out_path;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo SNR sweep and write CSV");
  add_common(sweep, sweep_opts);
  sweep->add_option("--out", out_path, "Output CSV path")->required();
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");

  double snr_db = 0.0;
  std::uint64_t index = 0;
  auto* trial = app.add_subcommand("trial", "Run a single trial and print the design trace");
  add_common(trial, trial_opts);
  trial->add_option("--snr", snr_db, "SNR in dB");
  trial->add_option("--index", index, "Trial index");

  auto* validate = app.add_subcommand("validate-config", "Check a config without running it");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Common& opts = sweep->parsed() ? sweep_opts : trial->parsed() ? trial_opts : validate_opts;
  ScenarioConfig cfg;
  try {
    cfg = resolve(opts);
    check_config(cfg);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kUsage;
  }
  if (validate->parsed()) {
    out << "config ok\n";
    return kOk;
  }

  try {
    if (sweep->parsed()) {
      const SweepResult result = run_sweep(cfg, SweepOptions{threads});
      emit_csv(result, out_path);
      out << "wrote " << result.records.size() << " records to " << out_path << '\n';
    } else {
      print_trial(run_trial(cfg, snr_db, index), out);
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace hbf
