#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace branewave::cli {

namespace {

const char* const kCommands[] = {"modes", "spectrum", "tower", "graviton", "oracle-check"};

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(x)) throw ConfigError(key, "not a finite number: '" + v + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key, "not an integer: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(key, "not an integer: '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw ConfigError(key, "not a boolean: '" + v + "'");
}

int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

}  // namespace

double Scenario::resolved_tau_end() const {
  if (tau_end != 0.0) return tau_end;
  if (command == "modes" || command == "graviton") return tau_star + 12.0;
  return tau_star + 2.0;
}

void Scenario::validate() const {
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands))
    throw ConfigError("command", "unknown command '" + command + "'");
  if (!(alpha > -1.0 && alpha < 0.0)) throw ConfigError("alpha", "alpha must lie in (-1, 0)");
  if (!(M >= 0.0 && M <= 10.0)) throw ConfigError("M", "M must lie in [0, 10]");
  if (!dirichlet && !(std::fabs(c) <= 1e3)) throw ConfigError("c", "c must be finite with |c| <= 1000, or inf");
  if (!(kappa >= -100.0 && kappa <= 1e4)) throw ConfigError("kappa", "kappa must lie in [-100, 1e4]");
  if (profile && command != "modes") throw ConfigError("profile", "--profile applies to the modes command");
  if (profile && kappa != 0.0) throw ConfigError("profile", "the limit profile exists for kappa = 0 only");
  if (!(std::fabs(tau_star) <= 50.0)) throw ConfigError("tau-star", "tau-star must lie in [-50, 50]");
  const double te = resolved_tau_end();
  if (!(te > tau_star && te - tau_star <= 60.0))
    throw ConfigError("tau-end", "tau-end must exceed tau-star by at most 60");
  if (out.empty()) throw ConfigError("out", "empty output directory");
  if (!(xi_max > 0.0 && xi_max <= 1e3)) throw ConfigError("xi-max", "xi-max must lie in (0, 1000]");
  if (xi_panels < 1 || xi_panels > 1000) throw ConfigError("xi-panels", "xi-panels must lie in [1, 1000]");
  if (xi_order < 2 || xi_order > 64) throw ConfigError("xi-order", "xi-order must lie in [2, 64]");
  if (!(m_max >= 5.0 && m_max <= 200.0)) throw ConfigError("m-max", "m-max must lie in [5, 200]");
  if (m_order < 2 || m_order > 64) throw ConfigError("m-order", "m-order must lie in [2, 64]");
  if (n_rho < 8 || n_rho > 100000) throw ConfigError("n-rho", "n-rho must lie in [8, 100000]");
  if (!(rho_min > 0.0 && rho_min < 0.5)) throw ConfigError("rho-min", "rho-min must lie in (0, 0.5)");
  if (trials < 1 || trials > 1000) throw ConfigError("trials", "trials must lie in [1, 1000]");
  if (command == "graviton" && (M != 0.0 || dirichlet || c != 0.0))
    throw ConfigError("M", "graviton requires M = 0 and c = 0");
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["alpha"] = alpha;
  j["M"] = M;
  j["c"] = dirichlet ? nlohmann::json("dirichlet") : nlohmann::json(c);
  j["kappa"] = kappa;
  j["profile"] = profile;
  j["tau_star"] = tau_star;
  j["tau_end"] = resolved_tau_end();
  j["out"] = out;
  j["seed"] = seed;
  j["xi_max"] = xi_max;
  j["xi_panels"] = xi_panels;
  j["xi_order"] = xi_order;
  j["m_max"] = m_max;
  j["m_order"] = m_order;
  j["n_rho"] = n_rho;
  j["rho_min"] = rho_min;
  j["trials"] = trials;
  return j;
}

void apply_key(Scenario& s, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string v = trim(raw_value);
  if (key == "command") {
    s.command = v;
  } else if (key == "alpha") {
    s.alpha = parse_real(key, v);
  } else if (key == "M" || key == "m") {
    s.M = parse_real("M", v);
  } else if (key == "c") {
    const std::string l = lower(v);
    if (l == "inf" || l == "+inf" || l == "infinity" || l == "dirichlet") {
      s.dirichlet = true;
      s.c = 0.0;
    } else {
      s.dirichlet = false;
      s.c = parse_real(key, v);
    }
  } else if (key == "kappa") {
    s.kappa = parse_real(key, v);
  } else if (key == "profile") {
    s.profile = parse_bool(key, v);
  } else if (key == "tau-star") {
    s.tau_star = parse_real(key, v);
  } else if (key == "tau-end") {
    s.tau_end = parse_real(key, v);
  } else if (key == "out") {
    s.out = v;
  } else if (key == "seed") {
    const long long x = parse_integer(key, v);
    if (x < 0) throw ConfigError(key, "seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(x);
  } else if (key == "xi-max") {
    s.xi_max = parse_real(key, v);
  } else if (key == "xi-panels") {
    s.xi_panels = parse_int(key, v);
  } else if (key == "xi-order") {
    s.xi_order = parse_int(key, v);
  } else if (key == "m-max") {
    s.m_max = parse_real(key, v);
  } else if (key == "m-order") {
    s.m_order = parse_int(key, v);
  } else if (key == "n-rho") {
    s.n_rho = parse_int(key, v);
  } else if (key == "rho-min") {
    s.rho_min = parse_real(key, v);
  } else if (key == "trials") {
    s.trials = parse_int(key, v);
  } else {
    throw ConfigError(key.empty() ? "config" : key, "unknown key '" + key + "'");
  }
}

void apply_config_text(Scenario& s, const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const std::exception& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& val = it.value();
      std::string sv;
      if (val.is_string()) {
        sv = val.get<std::string>();
      } else if (val.is_number_integer() || val.is_number_unsigned()) {
        sv = std::to_string(val.get<long long>());
      } else if (val.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << val.get<double>();
        sv = os.str();
      } else if (val.is_boolean()) {
        sv = val.get<bool>() ? "true" : "false";
      } else {
        throw ConfigError(it.key(), "value must be a string, number or boolean");
      }
      apply_key(s, it.key(), sv);
    }
    return;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
    apply_key(s, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(Scenario& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(s, buf.str());
}

}  // namespace branewave::cli
