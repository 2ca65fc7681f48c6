#include "msflow/run.hpp"

#include "msflow/output.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>

namespace msflow {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

class SnapshotWriter {
 public:
  SnapshotWriter(const RunConfig& config, fs::path dir) : config_(config), dir_(std::move(dir)), done_(config.output.times.size(), false) {
    fs::create_directories(dir_ / "snapshots");
    if (config_.output.bulk) fs::create_directories(dir_ / "bulk");
    junctions_ = open_output(dir_ / "junctions.txt");
  }

  void maybe_write(const SimulationState& state) {
    for (std::size_t i = 0; i < config_.output.times.size(); ++i) {
      const double t = config_.output.times[i];
      if (done_[i] || std::abs(state.t - t) > 0.5 * config_.tau) continue;
      done_[i] = true;
      auto curves = open_output(dir_ / "snapshots" / snapshot_name(t));
      write_curves(curves, state.network);
      junctions_ << "time " << format_number(t) << '\n';
      write_junctions(junctions_, state.network);
      if (config_.output.bulk) {
        auto vtk = open_output(dir_ / "bulk" / vtk_name(t));
        write_vtk(vtk, state.mesh, state.W, state.network.num_phases(), "msflow potentials t=" + format_number(t));
      }
    }
    junctions_.flush();
  }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::vector<bool> done_;
  std::ofstream junctions_;
};

json summary_json(const RunConfig& config, const RunResult& result, double wall_s) {
  const SimulationState& s = result.state;
  json j;
  j["name"] = config.name;
  j["status"] = result.ok ? "ok" : "error";
  if (!result.ok) j["error"] = result.error;
  j["steps"] = s.step;
  j["t_final"] = s.t;
  j["curves_final"] = s.network.curves.size();
  if (!s.history.empty()) {
    j["areas_final"] = s.history.back().areas;
    j["energy_final"] = s.history.back().energy;
    j["areas_initial"] = s.history.front().areas;
    j["energy_initial"] = s.history.front().energy;
  }
  j["surgery"] = json::array();
  for (const auto& e : s.extinctions) {
    j["surgery"].push_back({{"step", e.step},
                            {"t", e.t},
                            {"kind", to_string(e.event.kind)},
                            {"curve", e.event.curve},
                            {"length", e.event.length}});
  }
  double min_rel = 0.0;
  int max_iter = 0;
  double max_res = 0.0;
  std::size_t fallbacks = 0;
  for (const auto& r : s.history) {
    if (r.step == 0) continue;
    min_rel = std::min(min_rel, r.dissipation.slack / std::max(1.0, r.dissipation.length_before));
    max_iter = std::max(max_iter, r.solver.iterations);
    max_res = std::max(max_res, r.solver.residual);
    if (r.solver.used_fallback) ++fallbacks;
  }
  j["stability_violations"] = result.stability_violations;
  j["min_relative_slack"] = min_rel;
  j["max_iterations"] = max_iter;
  j["max_residual"] = max_res;
  j["solver_fallbacks"] = fallbacks;
  j["resolution"] = {{"vertices_per_curve", config.geometry.vertices_per_curve},
                     {"tau", config.tau},
                     {"h_fine", config.mesh.h_fine},
                     {"coarse_level", config.mesh.coarse_level}};
  if (config.output.timing) j["wall_seconds"] = wall_s;
  return j;
}

}  // namespace

RunResult run(const RunConfig& config, const fs::path& out_dir, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  fs::create_directories(out_dir);
  {
    auto cfg = open_output(out_dir / "config.json");
    cfg << serialize_config(config);
  }
  SnapshotWriter snapshots(config, out_dir);
  auto energy = open_output(out_dir / "energy.csv");

  const SimulationConfig sim = to_simulation_config(config);
  try {
    CurveNetwork network = build_network(config);
    auto params = build_curve_params(config, network.curves.size());
    result.state = initialize(std::move(network), std::move(params), sim);
    write_energy_header(energy, result.state.network.num_phases());
    write_energy_row(energy, result.state.history.back());
    snapshots.maybe_write(result.state);

    const std::size_t steps = num_steps(sim);
    for (std::size_t m = 0; m < steps; ++m) {
      const StepRecord& rec = step(result.state, sim);
      if (!rec.dissipation.ok) ++result.stability_violations;
      write_energy_row(energy, rec);
      snapshots.maybe_write(result.state);
      for (const auto& ev : rec.surgery) {
        if (options.log) {
          *options.log << "t=" << format_number(rec.t) << ": surgery (" << to_string(ev.kind) << ") on curve "
                       << ev.curve << '\n';
        }
      }
      if (options.log && options.log_every > 0 && rec.step % options.log_every == 0) {
        *options.log << "step " << rec.step << "/" << steps << " t=" << format_number(rec.t)
                     << " E=" << format_number(rec.energy) << " gmres=" << rec.solver.iterations << '\n';
      }
      if (options.on_step && !options.on_step(result.state)) break;
    }
    result.ok = true;
  } catch (const Error& e) {
    result.error = e.what();
    if (!result.state.network.curves.empty()) {
      auto dump = open_output(out_dir / "failure_curves.txt");
      write_curves(dump, result.state.network);
    }
    if (options.log) *options.log << "run failed: " << e.what() << '\n';
  }
  energy.flush();
  const double wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto summary = open_output(out_dir / "summary.json");
  summary << summary_json(config, result, wall_s).dump(2) << '\n';
  return result;
}

}  // namespace msflow
