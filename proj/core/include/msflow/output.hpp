#pragma once

#include "msflow/bulk_mesh.hpp"
#include "msflow/curve_network.hpp"
#include "msflow/simulation.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace msflow {

/// printf("%.12g").
std::string format_number(double value);

std::vector<std::string> energy_columns(std::size_t phases);
void write_energy_header(std::ostream& out, std::size_t phases);
void write_energy_row(std::ostream& out, const StepRecord& record);

/// "curve i closed=0|1" followed by one "x y" line per vertex, for every curve.
void write_curves(std::ostream& out, const CurveNetwork& network);
void write_junctions(std::ostream& out, const CurveNetwork& network);
/// Legacy ASCII VTK unstructured grid with one scalar point field per phase.
void write_vtk(std::ostream& out, const BulkMesh& mesh, const Eigen::VectorXd& W, std::size_t phases,
               const std::string& title);

std::string snapshot_name(double t);
std::string vtk_name(double t);

/// Reads a curve snapshot written by write_curves.
CurveNetwork read_curves(std::istream& in);

struct VerifyReport {
  std::size_t rows = 0;
  std::size_t violations = 0;        ///< steps with slack < -1e-9 max(1, length_before)
  std::size_t inconsistent = 0;      ///< logged slack disagrees with its logged terms
  std::size_t energy_increases = 0;  ///< E^{m+1} > E^m + 1e-9
  double min_relative_slack = 0.0;
  std::vector<std::string> problems;
  bool ok() const { return violations == 0 && inconsistent == 0 && problems.empty(); }
};

/// Re-checks the stability estimate from the terms logged in energy.csv.
VerifyReport verify_run(const std::filesystem::path& run_dir);

}  // namespace msflow
