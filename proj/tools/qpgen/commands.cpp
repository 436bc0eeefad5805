#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>

#include "output.hpp"
#include "qpgen/errors.hpp"
#include "qpgen/labeling.hpp"
#include "qpgen/specfn.hpp"

#ifndef QPGEN_VERSION
#define QPGEN_VERSION "dev"
#endif

namespace qpgen::cli {

using nlohmann::json;

volatile std::sig_atomic_t g_interrupted = 0;

namespace {

extern "C" void on_sigint(int) { g_interrupted = 1; }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json numerics_json(const scenarios::Numerics& n) {
  return {{"charge_cutoff", n.charge_cutoff}, {"levels", n.levels},
          {"m_max", n.m_max},                 {"k_max", n.k_max},
          {"m_guard", n.m_guard},             {"m_initial", n.m0()},
          {"restart_threshold", n.restart_threshold},
          {"label_step", n.label_step},       {"edge_tolerance", n.edge_tolerance},
          {"dim_limit", n.dim_limit}};
}

json metadata(const RunConfig& cfg, const RunOptions& opt) {
  return {{"scenario", scenario_name(cfg.scenario)},
          {"config_hash", hex64(cfg.hash)},
          {"code_version", QPGEN_VERSION},
          {"created_utc", utc_now()},
          {"threads", opt.threads},
          {"profile", cfg.ci ? "ci" : "full"},
          {"numerics", numerics_json(cfg.numerics)}};
}

void write_text(const std::string& path, const std::string& text) {
  AtomicFile f(path);
  f.write(text);
  f.commit();
}

void write_summary(const RunConfig& cfg, const json& summary) {
  write_text(output_path(cfg, ".json"), summary.dump(2) + "\n");
}

std::vector<std::string> state_names(const RunConfig& cfg) {
  if (cfg.scenario == ScenarioKind::Kapitza) return {"g0", "e0", "gpi", "epi"};
  return {"g", "e"};
}

}  // namespace

void install_interrupt_handler() { std::signal(SIGINT, on_sigint); }

std::string output_path(const RunConfig& cfg, const std::string& suffix) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / (cfg.stem + suffix)).string();
}

int cmd_sweep(const RunConfig& cfg, const RunOptions& opt) {
  const auto& num = cfg.numerics;
  const auto& env = cfg.env;
  const int batch = std::max(1, opt.threads);

  // Work is cut into chunks so an interrupt leaves whole grid points behind.
  std::vector<std::function<scenarios::RateTable()>> chunks;
  json extra = json::object();
  switch (cfg.scenario) {
    case ScenarioKind::ChargeDriveMap:
    case ScenarioKind::StarkCut: {
      const int na = static_cast<int>(cfg.amplitude.size());
      for (std::size_t s = 0; s < cfg.omega_d.size(); s += batch) {
        const std::size_t e = std::min(cfg.omega_d.size(), s + batch);
        std::vector<double> w(cfg.omega_d.begin() + s, cfg.omega_d.begin() + e);
        if (cfg.scenario == ScenarioKind::ChargeDriveMap) {
          chunks.push_back([&, w, s, na] {
            auto t = scenarios::charge_drive_map(cfg.transmon, num, env, w, cfg.amplitude,
                                                 cfg.include_excited);
            for (auto& r : t) r.grid_index += static_cast<int>(s) * na;
            return t;
          });
        } else {
          chunks.push_back([&, w, s] {
            auto t = scenarios::constant_stark_cut(cfg.transmon, num, env, cfg.stark_target, w);
            for (auto& r : t) r.grid_index += static_cast<int>(s);
            return t;
          });
        }
      }
      if (cfg.scenario == ScenarioKind::StarkCut) extra["stark_shift_GHz"] = cfg.stark_target;
      break;
    }
    case ScenarioKind::Readout: {
      std::vector<double> blocks = cfg.n_g.empty() ? std::vector<double>{cfg.transmon.n_g} : cfg.n_g;
      const int nn = static_cast<int>(cfg.amplitude.size());
      json info = json::array();
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        circuits::TransmonParams p = cfg.transmon;
        p.n_g = blocks[b];
        const double g =
            scenarios::solve_readout_coupling(p, num.charge_cutoff, cfg.drive_frequency, cfg.chi_target);
        info.push_back({{"n_g", p.n_g},
                        {"grid_index_start", static_cast<int>(b) * nn},
                        {"grid_index_stop", static_cast<int>(b + 1) * nn},
                        {"coupling_GHz", g}});
        chunks.push_back([&, p, b, nn] {
          auto t = scenarios::readout_sweep(p, num, env, cfg.drive_frequency, cfg.chi_target,
                                            cfg.amplitude);
          for (auto& r : t) r.grid_index += static_cast<int>(b) * nn;
          return t;
        });
      }
      extra["chi_GHz"] = cfg.chi_target;
      extra["n_g_blocks"] = info;
      break;
    }
    case ScenarioKind::Kapitza:
      for (std::size_t i = 0; i < cfg.amplitude.size(); ++i) {
        chunks.push_back([&, i] {
          auto t = scenarios::kapitza_sweep(cfg.squid, num, env, cfg.drive_frequency,
                                            {cfg.amplitude[i]});
          for (auto& r : t) r.grid_index = static_cast<int>(i);
          return t;
        });
      }
      break;
    default:
      throw ArgumentError("sweep: scenario '" + scenario_name(cfg.scenario) +
                          "' has its own subcommand");
  }

  const std::string csv_path = output_path(cfg, ".csv");
  AtomicFile csv(csv_path);
  csv.line(kRateHeader);
  std::size_t rows = 0, points = 0;
  std::map<std::string, int> flag_counts;
  json lifetimes = json::array();
  std::vector<Series> plot;
  const auto names = state_names(cfg);
  for (const auto& n : names) plot.push_back({n, {}, {}});

  for (const auto& run : chunks) {
    if (g_interrupted) break;
    const auto table = run();
    for (const auto& r : table) {
      const auto lines = rate_rows(r, env);
      for (const auto& line : lines) csv.line(line);
      rows += lines.size();
      ++points;
      for (const auto& f : r.flags) ++flag_counts[f];
      json pt = {{"grid_index", r.grid_index}, {"omega_d_GHz", r.omega_d}, {"amplitude", r.amplitude}};
      for (const auto& s : r.states) {
        for (const auto& f : s.flags) ++flag_counts[s.name + ":" + f];
        pt[s.name] = s.present ? json(fmt(s.summary.lifetime)) : json(nullptr);
        if (s.alpha < static_cast<int>(plot.size())) {
          const double x = cfg.scenario == ScenarioKind::StarkCut || cfg.scenario == ScenarioKind::ChargeDriveMap
                               ? r.omega_d
                               : r.amplitude;
          plot[s.alpha].x.push_back(x);
          plot[s.alpha].y.push_back(s.present ? s.summary.lifetime : NAN);
        }
      }
      lifetimes.push_back(pt);
    }
    csv.flush();
  }

  json summary = metadata(cfg, opt);
  summary["csv"] = std::filesystem::path(csv_path).filename().string();
  summary["rows"] = rows;
  summary["points"] = points;
  summary["flag_counts"] = flag_counts;
  summary["states"] = names;
  summary["lifetimes_s"] = lifetimes;
  for (auto& [k, v] : extra.items()) summary[k] = v;

  if (g_interrupted) {
    summary["complete"] = false;
    write_summary(cfg, summary);
    std::fprintf(stderr, "qpgen: interrupted; partial rows in %s\n", csv.partial_path().c_str());
    return kInterrupted;
  }
  csv.commit();
  summary["complete"] = true;
  write_summary(cfg, summary);
  if (opt.svg && cfg.scenario != ScenarioKind::ChargeDriveMap) {
    const char* xl = cfg.scenario == ScenarioKind::StarkCut ? "omega_d (GHz)"
                     : cfg.scenario == ScenarioKind::Readout ? "nbar"
                                                             : "phi_ac (rad)";
    write_text(output_path(cfg, ".svg"),
               svg_plot(scenario_name(cfg.scenario), xl, "T (s)", plot, true));
  }
  int flagged = 0;
  for (const auto& [k, v] : flag_counts) flagged += v;
  if (flagged > 0) std::fprintf(stderr, "qpgen: %d flag(s) raised; see the summary\n", flagged);
  return kOk;
}

int cmd_structure_factors(const RunConfig& cfg, const RunOptions& opt) {
  using specfn::StructureFactorKind;
  const auto& gap = cfg.env.gap;
  AtomicFile csv(output_path(cfg, ".csv"));
  csv.line("frequency_GHz,z,S_plus,S_minus,S_plus_quadrature,S_minus_quadrature,max_rel_diff");
  Series sp{"S+", {}, {}}, sm{"S-", {}, {}};
  double worst = 0.0;
  for (double f : cfg.frequency) {
    const double ap = specfn::s_ph_analytic(StructureFactorKind::Plus, f, gap);
    const double am = specfn::s_ph_analytic(StructureFactorKind::Minus, f, gap);
    const double qp = specfn::s_ph_quadrature(StructureFactorKind::Plus, f, gap, cfg.quadrature_tol);
    const double qm = specfn::s_ph_quadrature(StructureFactorKind::Minus, f, gap, cfg.quadrature_tol);
    double d = 0.0;
    for (auto [a, q] : {std::pair{ap, qp}, std::pair{am, qm}})
      if (a != q) d = std::max(d, std::abs(a - q) / std::max(std::abs(a), std::abs(q)));
    worst = std::max(worst, d);
    csv.line(fmt(f) + "," + fmt(f / gap.delta_ghz) + "," + fmt(ap) + "," + fmt(am) + "," + fmt(qp) +
             "," + fmt(qm) + "," + fmt(d));
    sp.x.push_back(f);
    sp.y.push_back(ap);
    sm.x.push_back(f);
    sm.y.push_back(am);
  }
  csv.commit();
  json summary = metadata(cfg, opt);
  summary.erase("numerics");
  summary["rows"] = cfg.frequency.size();
  summary["delta_GHz"] = gap.delta_ghz;
  summary["max_rel_diff"] = worst;
  summary["complete"] = true;
  write_summary(cfg, summary);
  if (opt.svg)
    write_text(output_path(cfg, ".svg"),
               svg_plot("structure factors", "frequency (GHz)", "S", {sp, sm}, false));
  return kOk;
}

int cmd_potential(const RunConfig& cfg, const RunOptions& opt) {
  AtomicFile csv(output_path(cfg, ".csv"));
  csv.line("phi_ac_over_2pi,phi,U_eff_GHz,normalized");
  std::vector<Series> plot;
  json minima = json::array();
  const int n = cfg.phi_samples;
  for (double ac : cfg.amplitude) {
    std::vector<double> phi(n), u(n);
    for (int i = 0; i < n; ++i) {
      phi[i] = -M_PI + 2.0 * M_PI * i / (n - 1);
      u[i] = circuits::effective_potential(cfg.squid, ac, cfg.drive_frequency, phi[i]);
    }
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    const double umin = *lo, span = *hi - *lo;
    Series s{fmt(ac / (2.0 * M_PI)), phi, {}};
    for (int i = 0; i < n; ++i) {
      const double v = cfg.normalize && span > 0.0 ? (u[i] - umin) / span : u[i];
      s.y.push_back(v);
      csv.line(fmt(ac / (2.0 * M_PI)) + "," + fmt(phi[i]) + "," + fmt(v) + "," +
               (cfg.normalize ? "1" : "0"));
    }
    const double u0 = circuits::effective_potential(cfg.squid, ac, cfg.drive_frequency, 0.0);
    const double upi = circuits::effective_potential(cfg.squid, ac, cfg.drive_frequency, M_PI);
    minima.push_back({{"phi_ac_over_2pi", ac / (2.0 * M_PI)},
                      {"U_0_GHz", u0},
                      {"U_pi_GHz", upi},
                      {"global_minimum", u0 <= upi ? "0" : "pi"}});
    plot.push_back(std::move(s));
  }
  csv.commit();
  json summary = metadata(cfg, opt);
  summary.erase("numerics");
  summary["omega_d_GHz"] = cfg.drive_frequency;
  summary["wells"] = minima;
  summary["complete"] = true;
  write_summary(cfg, summary);
  if (opt.svg)
    write_text(output_path(cfg, ".svg"),
               svg_plot("effective potential", "phi (rad)", cfg.normalize ? "U (normalized)" : "U (GHz)",
                        plot, false));
  return kOk;
}

int cmd_label_demo(const RunConfig& cfg, const RunOptions& opt) {
  const scenarios::TransmonDrive drive(cfg.transmon, cfg.numerics);
  const double w = cfg.drive_frequency;
  const auto spectrum = floquet::label_sweep(
      cfg.amplitude, [&](double o) { return drive.lab_problem(o, w); }, {cfg.track},
      cfg.numerics.restart_threshold, false);

  AtomicFile csv(output_path(cfg, ".csv"));
  csv.line("index,Omega_GHz,bare_overlap,tracking_overlap,energy_GHz,column,restarted,ambiguous");
  Series s{"|<lambda|alpha,m>|", {}, {}};
  json features = json::array();
  double prev = NAN;
  for (std::size_t i = 0; i < spectrum.points.size(); ++i) {
    const auto& pt = spectrum.points[i];
    const double b = pt.labels.bare_overlap[0];
    csv.line(std::to_string(i) + "," + fmt(pt.amplitude) + "," + fmt(b) + "," +
             fmt(pt.labels.overlap[0]) + "," + fmt(pt.energies(0)) + "," +
             std::to_string(pt.labels.index[0]) + "," + std::to_string(pt.labels.restarted[0]) + "," +
             std::to_string(pt.labels.ambiguous[0]));
    if (i > 0 && std::abs(b - prev) > 0.02)
      features.push_back({{"Omega_GHz", pt.amplitude}, {"jump", b - prev}});
    prev = b;
    s.x.push_back(pt.amplitude);
    s.y.push_back(b);
  }
  csv.commit();
  json summary = metadata(cfg, opt);
  summary["omega_d_GHz"] = w;
  summary["track"] = {{"alpha", cfg.track.alpha}, {"m", cfg.track.m}};
  summary["features"] = features;
  summary["complete"] = true;
  write_summary(cfg, summary);
  if (opt.svg)
    write_text(output_path(cfg, ".svg"),
               svg_plot("state overlap", "Omega (GHz)", "overlap", {s}, false));
  return kOk;
}

int cmd_converge(const RunConfig& cfg, const RunOptions& opt) {
  const auto& cv = cfg.converge;
  const auto rep = scenarios::convergence_audit(cv.point, cv.levels, cfg.env, cv.threshold);
  AtomicFile csv(output_path(cfg, ".csv"));
  csv.line("level,charge_cutoff,levels,m_max,k_max,state,gamma_per_s,energy_GHz,truncation");
  json lv = json::array();
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    const auto& l = rep.levels[i];
    for (std::size_t k = 0; k < l.gamma.size(); ++k)
      csv.line(std::to_string(i) + "," + std::to_string(l.numerics.charge_cutoff) + "," +
               std::to_string(l.numerics.levels) + "," + std::to_string(l.numerics.m_max) + "," +
               std::to_string(l.numerics.k_max) + "," + std::to_string(k) + "," + fmt(l.gamma[k]) +
               "," + fmt(l.energy[k]) + "," + (l.truncation_warning ? "1" : "0"));
    lv.push_back(numerics_json(l.numerics));
  }
  csv.commit();
  json summary = metadata(cfg, opt);
  summary["levels"] = lv;
  summary["gamma_drift"] = fmt(rep.gamma_drift);
  summary["energy_drift"] = fmt(rep.energy_drift);
  summary["threshold"] = rep.threshold;
  summary["truncation_warning"] = rep.levels.back().truncation_warning;
  summary["pass"] = rep.pass;
  summary["complete"] = true;
  write_summary(cfg, summary);
  std::printf("gamma_drift=%s energy_drift=%s threshold=%s %s\n", fmt(rep.gamma_drift).c_str(),
              fmt(rep.energy_drift).c_str(), fmt(rep.threshold).c_str(), rep.pass ? "PASS" : "FAIL");
  return rep.pass ? kOk : kAuditFailed;
}

}  // namespace qpgen::cli
