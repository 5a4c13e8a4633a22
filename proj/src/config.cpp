#include "hybridbf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hybridbf/codebook.hpp"
#include "hybridbf/format.hpp"

namespace hbf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("config: invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, value);
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, value);
  }
  return out;
}

int parse_count_or_auto(std::string_view key, std::string_view value) {
  if (trim(value) == "auto") return 0;
  return parse_integer<int>(key, value);
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::cs_estimated: return "cs_estimated";
    case Mode::perfect_csi: return "perfect_csi";
    case Mode::full_digital: return "full_digital";
  }
  return "?";
}

std::string_view to_string(RecoveryMethod m) {
  return m == RecoveryMethod::somp ? "somp" : "omp_per_column";
}

std::string_view to_string(ReverseReg r) {
  return r == ReverseReg::noise_var ? "noise_var" : "unit";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::cs_estimated, Mode::perfect_csi, Mode::full_digital}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("config: unknown mode '" + std::string(s) + "'");
}

int ScenarioConfig::resolved_M_r() const {
  if (M_r > 0) return M_r;
  const auto grid = static_cast<double>(dictionary_size(dictionary_resolution));
  return static_cast<int>(std::ceil(2.0 * L * std::log2(grid)));
}

int ScenarioConfig::resolved_M_t() const {
  if (M_t > 0) return M_t;
  const auto grid = static_cast<double>(dictionary_size(dictionary_resolution));
  return static_cast<int>(std::ceil(2.0 * L * std::log2(grid)));
}

int ScenarioConfig::resolved_max_sparsity() const { return max_sparsity > 0 ? max_sparsity : L; }

bool ScenarioConfig::has_hybrid_mode() const {
  for (Mode m : mode) {
    if (m != Mode::full_digital) return true;
  }
  return false;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "N_t") cfg.N_t = parse_integer<int>(key, value);
  else if (key == "N_r") cfg.N_r = parse_integer<int>(key, value);
  else if (key == "N_RF") cfg.N_RF = parse_integer<int>(key, value);
  else if (key == "N_s") cfg.N_s = parse_integer<int>(key, value);
  else if (key == "N") cfg.N = parse_integer<int>(key, value);
  else if (key == "N_cp") cfg.N_cp = parse_integer<int>(key, value);
  else if (key == "L") cfg.L = parse_integer<int>(key, value);
  else if (key == "codebook_size") cfg.codebook_size = parse_integer<int>(key, value);
  else if (key == "dictionary_resolution") cfg.dictionary_resolution = parse_real(key, value);
  else if (key == "M_r") cfg.M_r = parse_count_or_auto(key, value);
  else if (key == "M_t") cfg.M_t = parse_count_or_auto(key, value);
  else if (key == "rolloff") cfg.rolloff = parse_real(key, value);
  else if (key == "T_s") cfg.T_s = parse_real(key, value);
  else if (key == "snr_grid_dB") {
    std::vector<double> grid;
    for (auto item : split_list(value)) grid.push_back(parse_real(key, item));
    cfg.snr_grid_dB = std::move(grid);
  } else if (key == "trials") cfg.trials = parse_integer<int>(key, value);
  else if (key == "max_iterations") cfg.max_iterations = parse_integer<int>(key, value);
  else if (key == "mode") {
    std::vector<Mode> modes;
    for (auto item : split_list(value)) {
      const Mode m = parse_mode(item);
      if (std::find(modes.begin(), modes.end(), m) != modes.end()) {
        throw ConfigError("config: mode '" + std::string(item) + "' listed twice");
      }
      modes.push_back(m);
    }
    cfg.mode = std::move(modes);
  } else if (key == "recovery") {
    if (value == "somp") cfg.recovery = RecoveryMethod::somp;
    else if (value == "omp_per_column") cfg.recovery = RecoveryMethod::omp_per_column;
    else bad_value(key, value);
  } else if (key == "reverse_reg") {
    if (value == "noise_var") cfg.reverse_reg = ReverseReg::noise_var;
    else if (value == "unit") cfg.reverse_reg = ReverseReg::unit;
    else bad_value(key, value);
  } else if (key == "max_sparsity") cfg.max_sparsity = parse_count_or_auto(key, value);
  else if (key == "residual_tol") cfg.residual_tol = parse_real(key, value);
  else if (key == "training_snr_offset_dB") cfg.training_snr_offset_dB = parse_real(key, value);
  else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
  else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: line " + std::to_string(line_no) + ": unterminated section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("config: line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }
    try {
      apply_setting(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> config_violations(const ScenarioConfig& c) {
  std::vector<std::string> v;
  auto need = [&](bool ok, std::string msg) {
    if (!ok) v.push_back(std::move(msg));
  };
  need(c.N_t >= 1 && c.N_r >= 1, "antenna counts N_t, N_r must be positive");
  need(c.N_RF >= 1 && c.N_s >= 1, "N_RF and N_s must be positive");
  need(c.N_RF <= c.N_t && c.N_RF <= c.N_r, "N_RF <= N_t and N_RF <= N_r is required");
  if (c.has_hybrid_mode()) {
    need(c.N_s == c.N_RF, "N_s = N_RF is required for hybrid modes");
  }
  need(c.N_s <= std::min(c.N_t, c.N_r), "N_s <= min(N_t, N_r) is required");
  need(c.N >= 1, "N (subcarriers) must be positive");
  need(c.N_cp >= 1, "N_cp must be positive");
  need(c.L >= 1, "L must be positive");
  need(c.codebook_size >= c.N_RF, "codebook_size must be at least N_RF");
  Eigen::Index grid = 0;
  try {
    grid = dictionary_size(c.dictionary_resolution);
  } catch (const std::invalid_argument&) {
    v.push_back("dictionary_resolution must divide 180 degrees");
  }
  need(c.M_r >= 0 && c.M_t >= 0, "M_r, M_t must be positive or auto");
  need(c.max_sparsity >= 0, "max_sparsity must be positive or auto");
  if (grid > 0) {
    const int s = c.resolved_max_sparsity();
    need(s <= grid, "max_sparsity must not exceed the dictionary size");
    need(s <= c.resolved_M_r() && s <= c.resolved_M_t(), "max_sparsity must not exceed M_r, M_t");
  }
  need(c.rolloff >= 0.0 && c.rolloff <= 1.0, "rolloff must lie in [0, 1]");
  need(c.T_s > 0.0, "T_s must be positive");
  need(!c.snr_grid_dB.empty(), "snr_grid_dB must list at least one value");
  need(std::set<double>(c.snr_grid_dB.begin(), c.snr_grid_dB.end()).size() ==
           c.snr_grid_dB.size(),
       "snr_grid_dB values must be distinct");
  need(c.trials >= 1, "trials must be positive");
  need(c.max_iterations >= 1, "max_iterations must be positive");
  need(!c.mode.empty(), "mode must list at least one mode");
  need(c.residual_tol >= 0.0, "residual_tol must be >= 0");
  return v;
}

void check_config(const ScenarioConfig& cfg) {
  const auto v = config_violations(cfg);
  if (v.empty()) return;
  std::string msg = "config: invalid configuration";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

std::string config_text(const ScenarioConfig& c) {
  std::ostringstream os;
  auto line = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto count = [](int n) { return n > 0 ? std::to_string(n) : std::string("auto"); };
  line("N_t", std::to_string(c.N_t));
  line("N_r", std::to_string(c.N_r));
  line("N_RF", std::to_string(c.N_RF));
  line("N_s", std::to_string(c.N_s));
  line("N", std::to_string(c.N));
  line("N_cp", std::to_string(c.N_cp));
  line("L", std::to_string(c.L));
  line("codebook_size", std::to_string(c.codebook_size));
  line("dictionary_resolution", format_double(c.dictionary_resolution));
  line("M_r", count(c.M_r));
  line("M_t", count(c.M_t));
  line("rolloff", format_double(c.rolloff));
  line("T_s", format_double(c.T_s));
  std::string grid;
  for (std::size_t i = 0; i < c.snr_grid_dB.size(); ++i) {
    if (i) grid += ", ";
    grid += format_double(c.snr_grid_dB[i]);
  }
  line("snr_grid_dB", grid);
  line("trials", std::to_string(c.trials));
  line("max_iterations", std::to_string(c.max_iterations));
  std::string modes;
  for (std::size_t i = 0; i < c.mode.size(); ++i) {
    if (i) modes += ", ";
    modes += to_string(c.mode[i]);
  }
  line("mode", modes);
  line("recovery", std::string(to_string(c.recovery)));
  line("reverse_reg", std::string(to_string(c.reverse_reg)));
  line("max_sparsity", count(c.max_sparsity));
  line("residual_tol", format_double(c.residual_tol));
  line("training_snr_offset_dB", format_double(c.training_snr_offset_dB));
  line("seed", std::to_string(c.seed));
  return os.str();
}

}  // namespace hbf
