#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qpgen/errors.hpp"

namespace qpgen::cli {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ArgumentError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ArgumentError(where + ": unknown key '" + k + "'");
}

const json& need(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ArgumentError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ArgumentError(what + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ArgumentError(what + ": must be finite");
  return x;
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ArgumentError(what + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& what) {
  if (!v.is_boolean()) throw ArgumentError(what + ": expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& what) {
  if (!v.is_string()) throw ArgumentError(what + ": expected a string");
  return v.get<std::string>();
}

void opt_number(const json& obj, const std::string& where, const char* key, double& out) {
  if (obj.contains(key)) out = number(obj.at(key), where + "." + key);
}

void opt_int(const json& obj, const std::string& where, const char* key, int& out) {
  if (obj.contains(key)) out = integer(obj.at(key), where + "." + key);
}

/// Explicit list, or {"start", "stop", "count"} with count >= 1.
std::vector<double> axis(const json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(number(x, what));
  } else if (v.is_object()) {
    only_keys(v, what, {"start", "stop", "count"});
    const double a = number(need(v, what, "start"), what + ".start");
    const double b = number(need(v, what, "stop"), what + ".stop");
    const int n = integer(need(v, what, "count"), what + ".count");
    if (n < 1) throw ArgumentError(what + ".count: must be >= 1");
    if (n == 1) return {a};
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  } else {
    throw ArgumentError(what + ": expected a list or {start, stop, count}");
  }
  if (out.empty()) throw ArgumentError(what + ": empty axis");
  if (out.size() > 1) {
    const bool up = out[1] > out[0];
    for (std::size_t i = 1; i < out.size(); ++i)
      if (up ? !(out[i] > out[i - 1]) : !(out[i] < out[i - 1]))
        throw ArgumentError(what + ": values must be strictly monotone");
  }
  return out;
}

std::vector<double> turns_to_radians(std::vector<double> v) {
  for (double& x : v) x *= 2.0 * M_PI;
  return v;
}

ScenarioKind parse_scenario(const std::string& s) {
  static const std::pair<const char*, ScenarioKind> names[] = {
      {"charge_drive_map", ScenarioKind::ChargeDriveMap},
      {"stark_cut", ScenarioKind::StarkCut},
      {"readout", ScenarioKind::Readout},
      {"kapitza", ScenarioKind::Kapitza},
      {"label_demo", ScenarioKind::LabelDemo},
      {"structure_factors", ScenarioKind::StructureFactors},
      {"potential", ScenarioKind::Potential},
      {"converge", ScenarioKind::Converge},
  };
  for (const auto& [n, k] : names)
    if (s == n) return k;
  throw ArgumentError("scenario: unknown scenario '" + s + "'");
}

void parse_circuit(const json& c, RunConfig& cfg) {
  const std::string where = "circuit";
  if (!c.is_object()) throw ArgumentError(where + ": expected an object");
  const std::string type = string(need(c, where, "type"), where + ".type");
  if (type == "transmon") {
    only_keys(c, where, {"type", "E_J_GHz", "E_C_GHz", "n_g"});
    cfg.circuit = CircuitKind::Transmon;
    cfg.transmon.e_j = number(need(c, where, "E_J_GHz"), where + ".E_J_GHz");
    cfg.transmon.e_c = number(need(c, where, "E_C_GHz"), where + ".E_C_GHz");
    opt_number(c, where, "n_g", cfg.transmon.n_g);
    cfg.transmon.validate();
  } else if (type == "squid") {
    only_keys(c, where, {"type", "E_J1_GHz", "E_J2_GHz", "E_C_GHz", "n_g", "c1", "c2"});
    cfg.circuit = CircuitKind::Squid;
    cfg.squid.e_j1 = number(need(c, where, "E_J1_GHz"), where + ".E_J1_GHz");
    cfg.squid.e_j2 = number(need(c, where, "E_J2_GHz"), where + ".E_J2_GHz");
    cfg.squid.e_c = number(need(c, where, "E_C_GHz"), where + ".E_C_GHz");
    opt_number(c, where, "n_g", cfg.squid.n_g);
    opt_number(c, where, "c1", cfg.squid.c1);
    opt_number(c, where, "c2", cfg.squid.c2);
    cfg.squid.validate();
  } else {
    throw ArgumentError(where + ".type: expected 'transmon' or 'squid'");
  }
}

void parse_environment(const json& e, RunConfig& cfg) {
  const std::string where = "environment";
  only_keys(e, where, {"delta_GHz", "N_cp", "c_r_per_s"});
  opt_number(e, where, "delta_GHz", cfg.env.gap.delta_ghz);
  opt_number(e, where, "N_cp", cfg.env.n_cp);
  opt_number(e, where, "c_r_per_s", cfg.env.c_r);
  cfg.env.validate();
}

void apply_numerics(const json& n, const std::string& where, scenarios::Numerics& num) {
  only_keys(n, where, {"charge_cutoff", "levels", "m_max", "k_max", "m_guard", "m_initial",
                       "restart_threshold", "label_step", "edge_tolerance", "dim_limit"});
  opt_int(n, where, "charge_cutoff", num.charge_cutoff);
  opt_int(n, where, "levels", num.levels);
  opt_int(n, where, "m_max", num.m_max);
  opt_int(n, where, "k_max", num.k_max);
  opt_int(n, where, "m_guard", num.m_guard);
  opt_int(n, where, "m_initial", num.m_initial);
  opt_number(n, where, "restart_threshold", num.restart_threshold);
  opt_number(n, where, "label_step", num.label_step);
  opt_number(n, where, "edge_tolerance", num.edge_tolerance);
  if (n.contains("dim_limit")) {
    const auto& v = n.at("dim_limit");
    if (!v.is_number_integer()) throw ArgumentError(where + ".dim_limit: expected an integer");
    num.dim_limit = v.get<std::int64_t>();
  }
  num.validate();
}

void require_circuit(const RunConfig& cfg, CircuitKind k) {
  if (cfg.circuit != k)
    throw ArgumentError("circuit: scenario '" + scenario_name(cfg.scenario) + "' needs a " +
                        (k == CircuitKind::Transmon ? "transmon" : "squid"));
}

void parse_grid(const json& g, RunConfig& cfg) {
  const std::string w = "grid";
  if (!g.is_object()) throw ArgumentError(w + ": expected an object");
  switch (cfg.scenario) {
    case ScenarioKind::ChargeDriveMap:
      only_keys(g, w, {"omega_d_GHz", "Omega_GHz", "include_excited"});
      cfg.omega_d = axis(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      cfg.amplitude = axis(need(g, w, "Omega_GHz"), w + ".Omega_GHz");
      if (g.contains("include_excited"))
        cfg.include_excited = boolean(g.at("include_excited"), w + ".include_excited");
      break;
    case ScenarioKind::StarkCut:
      only_keys(g, w, {"omega_d_GHz", "stark_shift_GHz"});
      cfg.omega_d = axis(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      opt_number(g, w, "stark_shift_GHz", cfg.stark_target);
      break;
    case ScenarioKind::Readout:
      only_keys(g, w, {"omega_r_GHz", "chi_GHz", "nbar", "n_g"});
      cfg.drive_frequency = number(need(g, w, "omega_r_GHz"), w + ".omega_r_GHz");
      opt_number(g, w, "chi_GHz", cfg.chi_target);
      cfg.amplitude = axis(need(g, w, "nbar"), w + ".nbar");
      if (g.contains("n_g")) cfg.n_g = axis(g.at("n_g"), w + ".n_g");
      break;
    case ScenarioKind::Kapitza:
      only_keys(g, w, {"omega_d_GHz", "phi_ac_over_2pi"});
      cfg.drive_frequency = number(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      cfg.amplitude = turns_to_radians(axis(need(g, w, "phi_ac_over_2pi"), w + ".phi_ac_over_2pi"));
      break;
    case ScenarioKind::LabelDemo:
      only_keys(g, w, {"omega_d_GHz", "Omega_GHz", "track"});
      cfg.drive_frequency = number(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      cfg.amplitude = axis(need(g, w, "Omega_GHz"), w + ".Omega_GHz");
      if (g.contains("track")) {
        const auto& t = g.at("track");
        only_keys(t, w + ".track", {"alpha", "m"});
        opt_int(t, w + ".track", "alpha", cfg.track.alpha);
        opt_int(t, w + ".track", "m", cfg.track.m);
      }
      break;
    case ScenarioKind::StructureFactors:
      only_keys(g, w, {"frequency_GHz", "quadrature_tol"});
      cfg.frequency = axis(need(g, w, "frequency_GHz"), w + ".frequency_GHz");
      opt_number(g, w, "quadrature_tol", cfg.quadrature_tol);
      if (!(cfg.quadrature_tol > 0.0)) throw ArgumentError(w + ".quadrature_tol: must be positive");
      break;
    case ScenarioKind::Potential:
      only_keys(g, w, {"omega_d_GHz", "phi_ac_over_2pi", "phi_samples", "normalize"});
      cfg.drive_frequency = number(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      cfg.amplitude = turns_to_radians(axis(need(g, w, "phi_ac_over_2pi"), w + ".phi_ac_over_2pi"));
      opt_int(g, w, "phi_samples", cfg.phi_samples);
      if (cfg.phi_samples < 2) throw ArgumentError(w + ".phi_samples: must be >= 2");
      if (g.contains("normalize")) cfg.normalize = boolean(g.at("normalize"), w + ".normalize");
      break;
    case ScenarioKind::Converge: {
      only_keys(g, w, {"omega_d_GHz", "phi_d", "phi_ac_over_2pi", "threshold", "levels"});
      auto& cv = cfg.converge;
      cv.point.omega_d = number(need(g, w, "omega_d_GHz"), w + ".omega_d_GHz");
      if (cfg.circuit == CircuitKind::Transmon) {
        if (g.contains("phi_ac_over_2pi")) throw ArgumentError(w + ": transmon audits take phi_d");
        cv.point.kind = scenarios::AuditPoint::Kind::Transmon;
        cv.point.transmon = cfg.transmon;
        cv.point.amplitude = number(need(g, w, "phi_d"), w + ".phi_d");
      } else {
        if (g.contains("phi_d")) throw ArgumentError(w + ": SQUID audits take phi_ac_over_2pi");
        cv.point.kind = scenarios::AuditPoint::Kind::Squid;
        cv.point.squid = cfg.squid;
        cv.point.amplitude =
            2.0 * M_PI * number(need(g, w, "phi_ac_over_2pi"), w + ".phi_ac_over_2pi");
      }
      opt_number(g, w, "threshold", cv.threshold);
      if (!(cv.threshold > 0.0)) throw ArgumentError(w + ".threshold: must be positive");
      const auto& lv = need(g, w, "levels");
      if (!lv.is_array() || lv.size() < 2)
        throw ArgumentError(w + ".levels: expected a list of at least two numerics objects");
      for (std::size_t i = 0; i < lv.size(); ++i) {
        scenarios::Numerics n = cfg.numerics;
        apply_numerics(lv[i], w + ".levels[" + std::to_string(i) + "]", n);
        cv.levels.push_back(n);
      }
      break;
    }
  }
  for (double x : cfg.omega_d)
    if (!(x > 0.0)) throw ArgumentError(w + ".omega_d_GHz: frequencies must be positive");
  if (cfg.scenario != ScenarioKind::StructureFactors && cfg.scenario != ScenarioKind::ChargeDriveMap &&
      cfg.scenario != ScenarioKind::StarkCut && cfg.scenario != ScenarioKind::Converge &&
      !(cfg.drive_frequency > 0.0))
    throw ArgumentError(w + ": drive frequency must be positive");
  for (double x : cfg.frequency)
    if (!(x >= 0.0)) throw ArgumentError(w + ".frequency_GHz: must be >= 0");
}

scenarios::Numerics profile_numerics(const RunConfig& cfg) {
  switch (cfg.scenario) {
    case ScenarioKind::Readout:
      return scenarios::readout_profile(cfg.ci);
    case ScenarioKind::Kapitza:
      return scenarios::squid_profile(cfg.ci);
    case ScenarioKind::Converge:
      return cfg.circuit == CircuitKind::Squid ? scenarios::squid_profile(cfg.ci)
                                               : scenarios::transmon_profile(cfg.ci);
    default:
      return scenarios::transmon_profile(cfg.ci);
  }
}

}  // namespace

std::string scenario_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::ChargeDriveMap: return "charge_drive_map";
    case ScenarioKind::StarkCut: return "stark_cut";
    case ScenarioKind::Readout: return "readout";
    case ScenarioKind::Kapitza: return "kapitza";
    case ScenarioKind::LabelDemo: return "label_demo";
    case ScenarioKind::StructureFactors: return "structure_factors";
    case ScenarioKind::Potential: return "potential";
    case ScenarioKind::Converge: return "converge";
  }
  return "unknown";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RunConfig parse_config(const json& j, const std::string& profile) {
  only_keys(j, "config", {"scenario", "profile", "circuit", "environment", "grid", "numerics", "output"});
  RunConfig cfg;
  cfg.scenario = parse_scenario(string(need(j, "config", "scenario"), "scenario"));

  std::string prof = j.contains("profile") ? string(j.at("profile"), "profile") : "full";
  if (!profile.empty()) prof = profile;
  if (prof != "full" && prof != "ci") throw ArgumentError("profile: expected 'full' or 'ci'");
  cfg.ci = prof == "ci";

  if (cfg.scenario != ScenarioKind::StructureFactors) {
    parse_circuit(need(j, "config", "circuit"), cfg);
  } else if (j.contains("circuit")) {
    throw ArgumentError("circuit: structure_factors takes no circuit");
  }
  switch (cfg.scenario) {
    case ScenarioKind::Kapitza:
    case ScenarioKind::Potential:
      require_circuit(cfg, CircuitKind::Squid);
      break;
    case ScenarioKind::StructureFactors:
    case ScenarioKind::Converge:
      break;
    default:
      require_circuit(cfg, CircuitKind::Transmon);
  }
  if (j.contains("environment")) parse_environment(j.at("environment"), cfg);

  cfg.numerics = profile_numerics(cfg);
  if (j.contains("numerics")) apply_numerics(j.at("numerics"), "numerics", cfg.numerics);
  parse_grid(need(j, "config", "grid"), cfg);

  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, "output", {"dir", "stem"});
    if (o.contains("dir")) cfg.out_dir = string(o.at("dir"), "output.dir");
    if (o.contains("stem")) cfg.stem = string(o.at("stem"), "output.stem");
  }
  if (cfg.stem.empty()) cfg.stem = scenario_name(cfg.scenario);
  if (cfg.stem.find('/') != std::string::npos) throw ArgumentError("output.stem: must not contain '/'");

  json canon = j;
  canon["profile"] = prof;
  canon.erase("output");
  cfg.canonical = canon.dump();
  cfg.hash = fnv1a(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& profile) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("config: cannot read '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return parse_config(j, profile);
}

}  // namespace qpgen::cli
