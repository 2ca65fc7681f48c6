#include "msflow/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msflow {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::vector<std::string> energy_columns(std::size_t phases) {
  std::vector<std::string> cols{"step", "t", "aniso_length", "energy"};
  for (std::size_t l = 0; l < phases; ++l) cols.push_back("area_" + std::to_string(l + 1));
  for (const char* c : {"length_before", "length_after", "grad_w_sq", "kinetic", "wd_term", "slack", "iterations",
                        "residual", "wall_ms", "surgery"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_energy_header(std::ostream& out, std::size_t phases) {
  const auto cols = energy_columns(phases);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_energy_row(std::ostream& out, const StepRecord& r) {
  out << r.step << ',' << format_number(r.t) << ',' << format_number(r.aniso_length) << ','
      << format_number(r.energy);
  for (double a : r.areas) out << ',' << format_number(a);
  const DissipationTerms& d = r.dissipation;
  for (double v : {d.length_before, d.length_after, d.grad_w_sq, d.kinetic, d.wd_term, d.slack})
    out << ',' << format_number(v);
  out << ',' << r.solver.iterations << ',' << format_number(r.solver.residual) << ',' << format_number(r.wall_ms)
      << ',' << r.surgery.size() << '\n';
}

void write_curves(std::ostream& out, const CurveNetwork& network) {
  for (std::size_t i = 0; i < network.curves.size(); ++i) {
    const Curve& c = network.curves[i];
    out << "curve " << i << " closed=" << (c.closed ? 1 : 0) << '\n';
    for (const Vec2& v : c.vertices) out << format_number(v.x()) << ' ' << format_number(v.y()) << '\n';
  }
}

void write_junctions(std::ostream& out, const CurveNetwork& network) {
  for (std::size_t k = 0; k < network.junctions.size(); ++k) {
    const JunctionMap& J = network.junctions[k];
    out << "junction " << k;
    for (int r = 0; r < 3; ++r) out << ' ' << J.curves[r] << ' ' << J.vertices[r];
    out << '\n';
  }
}

void write_vtk(std::ostream& out, const BulkMesh& mesh, const Eigen::VectorXd& W, std::size_t phases,
               const std::string& title) {
  const std::size_t K = mesh.num_vertices();
  if (static_cast<std::size_t>(W.size()) != K * phases) throw Error("write_vtk: field size does not match the mesh");
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << K << " double\n";
  for (const Vec2& v : mesh.vertices) out << format_number(v.x()) << ' ' << format_number(v.y()) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& T : mesh.triangles) out << "3 " << T[0] << ' ' << T[1] << ' ' << T[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << K << '\n';
  for (std::size_t l = 0; l < phases; ++l) {
    out << "SCALARS W_" << l + 1 << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t v = 0; v < K; ++v) out << format_number(W[static_cast<Eigen::Index>(l * K + v)]) << '\n';
  }
}

std::string snapshot_name(double t) { return "curves_t" + format_number(t) + ".txt"; }
std::string vtk_name(double t) { return "w_t" + format_number(t) + ".vtk"; }

CurveNetwork read_curves(std::istream& in) {
  CurveNetwork net;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("curve ", 0) == 0) {
      Curve c;
      c.closed = line.find("closed=1") != std::string::npos;
      net.curves.push_back(std::move(c));
      continue;
    }
    if (net.curves.empty()) throw Error("curve snapshot: vertex line before the first curve header");
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) throw Error("curve snapshot: malformed line '" + line + "'");
    net.curves.back().vertices.emplace_back(x, y);
  }
  return net;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

VerifyReport verify_run(const std::filesystem::path& run_dir) {
  VerifyReport rep;
  std::ifstream in(run_dir / "energy.csv");
  if (!in) {
    rep.problems.push_back("cannot open " + (run_dir / "energy.csv").string());
    return rep;
  }
  std::string line;
  if (!std::getline(in, line)) {
    rep.problems.push_back("energy.csv is empty");
    return rep;
  }
  const auto header = split_csv(line);
  auto col = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("energy.csv: missing column " + name);
  };
  std::size_t c_step, c_energy, c_len, c_before, c_after, c_grad, c_kin, c_wd, c_slack;
  try {
    c_step = col("step");
    c_energy = col("energy");
    c_len = col("aniso_length");
    c_before = col("length_before");
    c_after = col("length_after");
    c_grad = col("grad_w_sq");
    c_kin = col("kinetic");
    c_wd = col("wd_term");
    c_slack = col("slack");
  } catch (const Error& e) {
    rep.problems.emplace_back(e.what());
    return rep;
  }
  bool first = true;
  double prev_energy = 0.0, prev_length = 0.0;
  rep.min_relative_slack = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      rep.problems.push_back("row " + std::to_string(rep.rows + 1) + ": wrong number of fields");
      continue;
    }
    auto num = [&](std::size_t i) { return std::stod(f[i]); };
    ++rep.rows;
    const double energy = num(c_energy);
    if (!first) {
      const double before = num(c_before);
      const double rhs = num(c_after) + num(c_grad) + num(c_kin) + num(c_wd);
      const double slack = before - rhs;
      const double scale = std::max(1.0, before);
      rep.min_relative_slack = std::min(rep.min_relative_slack, slack / scale);
      if (slack < -1e-9 * scale) ++rep.violations;
      if (std::abs(slack - num(c_slack)) > 1e-9 * scale) ++rep.inconsistent;
      if (std::abs(before - prev_length) > 1e-9 * scale) {
        rep.problems.push_back("step " + f[c_step] + ": length_before does not match the previous row");
      }
      if (energy > prev_energy + 1e-9) ++rep.energy_increases;
    }
    first = false;
    prev_energy = energy;
    prev_length = num(c_len);
  }
  if (rep.rows == 0) rep.problems.push_back("energy.csv has no data rows");
  return rep;
}

}  // namespace msflow
