#pragma once

// Run configuration: JSON in, validated structs out. Every object rejects keys
// it does not know about.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpgen/circuits.hpp"
#include "qpgen/rates.hpp"
#include "qpgen/scenarios.hpp"

namespace qpgen::cli {

enum class ScenarioKind {
  ChargeDriveMap,
  StarkCut,
  Readout,
  Kapitza,
  LabelDemo,
  StructureFactors,
  Potential,
  Converge,
};

std::string scenario_name(ScenarioKind k);

enum class CircuitKind { Transmon, Squid };

struct ConvergeSpec {
  scenarios::AuditPoint point;
  std::vector<scenarios::Numerics> levels;
  double threshold = 1e-4;
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::ChargeDriveMap;
  CircuitKind circuit = CircuitKind::Transmon;
  circuits::TransmonParams transmon;
  circuits::SquidParams squid;
  rates::QpEnvironment env;
  bool ci = false;
  scenarios::Numerics numerics;

  // grid; unused axes stay empty
  std::vector<double> omega_d;     // GHz (charge map, Stark cut)
  std::vector<double> amplitude;   // Omega (GHz), nbar, or phi_ac (rad), per scenario
  std::vector<double> n_g;         // readout blocks
  std::vector<double> frequency;   // structure factors, GHz
  double drive_frequency = 0.0;    // omega_d of readout (omega_r), Kapitza, label demo
  double stark_target = 0.003;     // GHz
  double chi_target = 0.001;       // GHz
  bool include_excited = true;
  int phi_samples = 256;
  bool normalize = false;
  double quadrature_tol = 1e-12;
  floquet::StateLabel track{0, 0};
  ConvergeSpec converge;

  std::string out_dir = "out";
  std::string stem;                // defaults to the scenario name
  std::string canonical;           // key-sorted dump used for the hash
  std::uint64_t hash = 0;
};

/// Parses and validates. `profile` ("full"/"ci", empty keeps the config's)
/// picks default numerics before the config's own overrides are applied.
/// Throws ArgumentError/ContractError on any schema or domain violation.
RunConfig parse_config(const nlohmann::json& j, const std::string& profile = "");
RunConfig load_config(const std::string& path, const std::string& profile = "");

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace qpgen::cli
