#pragma once

#include "msflow/anisotropy.hpp"
#include "msflow/bulk_mesh.hpp"
#include "msflow/coupling.hpp"
#include "msflow/initial_data.hpp"
#include "msflow/simulation.hpp"
#include "msflow/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msflow {

struct AnisotropySpec {
  std::string type = "isotropic";  ///< isotropic | hex2d | matrices
  double delta = 0.1;
  double scale = 1.0;
  std::vector<Mat2> matrices;

  Anisotropy build() const;
  bool operator==(const AnisotropySpec&) const = default;
};

struct MobilitySpec {
  std::string type = "constant";  ///< constant | quadratic
  double value = 1.0;
  Mat2 matrix = Mat2::Identity();

  Mobility build() const;
  bool operator==(const MobilitySpec&) const = default;
};

struct OutputSpec {
  std::vector<double> times;
  std::string directory = "out";
  bool bulk = true;
  bool timing = true;

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  std::string name = "custom";
  std::string description;
  GeometrySpec geometry;
  std::optional<std::vector<std::vector<int>>> orientation;
  std::size_t exterior_phase = 2;
  std::vector<AnisotropySpec> anisotropy{AnisotropySpec{}};  ///< one entry for all curves, or one per curve
  std::vector<double> rho{0.0};                              ///< same convention
  MobilitySpec mobility;
  BoundarySpec boundary;
  double tau = 1e-3;
  double T = 1.0;
  AdaptParams mesh;
  SolverConfig solver;
  Quadrature quadrature = Quadrature::Exact;
  SurgeryConfig surgery;
  OutputSpec output;

  bool operator==(const RunConfig& other) const;
};

/// Directory holding the shipped preset files.
std::string default_preset_dir();
std::vector<std::string> list_presets(const std::string& dir = default_preset_dir());

/// Parses a JSON config. A top-level "preset" key loads that preset first and applies the
/// remaining keys on top (JSON merge patch). Unknown keys are rejected with their path.
RunConfig parse_config(const std::string& text, const std::string& preset_dir = default_preset_dir());
RunConfig load_preset(const std::string& name, const std::string& preset_dir = default_preset_dir());

/// Full config from a document, a preset name, and "dotted.path=json-value" overrides.
RunConfig resolve_config(const std::optional<std::string>& text, const std::optional<std::string>& preset,
                         const std::vector<std::string>& overrides,
                         const std::string& preset_dir = default_preset_dir());

std::string serialize_config(const RunConfig& config);

/// Validates cross-field constraints (w_D sum, tau, T, orientation).
void validate(const RunConfig& config);

CurveNetwork build_network(const RunConfig& config);
std::vector<CurveParams> build_curve_params(const RunConfig& config, std::size_t curves);
SimulationConfig to_simulation_config(const RunConfig& config);

}  // namespace msflow
