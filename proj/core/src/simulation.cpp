#include "msflow/simulation.hpp"

#include <chrono>
#include <cmath>

namespace msflow {

namespace {

std::vector<Anisotropy> anisotropies(const std::vector<CurveParams>& params) {
  std::vector<Anisotropy> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.gamma);
  return out;
}

CurveField<double> split(const Eigen::VectorXd& flat, const CurveNetwork& network) {
  CurveField<double> out(network.curves.size());
  Eigen::Index g = 0;
  for (std::size_t c = 0; c < network.curves.size(); ++c) {
    out[c].resize(network.curves[c].num_vertices());
    for (double& v : out[c]) v = flat[g++];
  }
  return out;
}

Eigen::VectorXd transfer_all(const BulkMesh& from, const Eigen::VectorXd& W, std::size_t phases, const BulkMesh& to) {
  const auto K = static_cast<Eigen::Index>(from.num_vertices());
  const auto Kn = static_cast<Eigen::Index>(to.num_vertices());
  Eigen::VectorXd out(Kn * static_cast<Eigen::Index>(phases));
  for (std::size_t l = 0; l < phases; ++l) {
    const Eigen::VectorXd comp = W.segment(static_cast<Eigen::Index>(l) * K, K);
    const std::vector<double> v = transfer(from, std::vector<double>(comp.data(), comp.data() + K), to);
    out.segment(static_cast<Eigen::Index>(l) * Kn, Kn) = Eigen::Map<const Eigen::VectorXd>(v.data(), Kn);
  }
  return out;
}

StepRecord make_record(const SimulationState& state, const SimulationConfig& config) {
  StepRecord r;
  r.step = state.step;
  r.t = state.t;
  r.aniso_length = anisotropic_length(state.network, anisotropies(state.params));
  r.energy = discrete_energy(state.network, state.params, config.assembly.boundary);
  r.areas = region_areas(state.network).areas;
  return r;
}

}  // namespace

double discrete_energy(const CurveNetwork& network, const std::vector<CurveParams>& params,
                       const BoundarySpec& boundary) {
  double e = anisotropic_length(network, anisotropies(params));
  if (boundary.side != DirichletSide::None) {
    const auto areas = region_areas(network).areas;
    for (std::size_t l = 0; l < areas.size(); ++l) e -= boundary.w_D[l] * areas[l];
  }
  return e;
}

std::size_t num_steps(const SimulationConfig& config) {
  const double tau = config.assembly.tau;
  if (!(tau > 0.0)) throw ConfigError("time.tau must be positive");
  return static_cast<std::size_t>(std::llround(config.T / tau));
}

SimulationState initialize(CurveNetwork network, std::vector<CurveParams> params, const SimulationConfig& config) {
  if (params.size() != network.curves.size()) throw ConfigError("one set of curve parameters per curve required");
  network.validate();
  check_orientation(network);
  config.assembly.boundary.validate(network.num_phases());

  SimulationState state;
  state.network = std::move(network);
  state.params = std::move(params);
  state.surgery_min_length = config.surgery.min_length_factor * mean_segment_length(state.network);
  state.mesh = adapt(state.network, config.mesh).mesh;
  state.W = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state.mesh.num_vertices() * state.network.num_phases()));
  state.kappa.resize(state.network.curves.size());
  for (std::size_t c = 0; c < state.network.curves.size(); ++c)
    state.kappa[c].assign(state.network.curves[c].num_vertices(), 0.0);
  state.history.push_back(make_record(state, config));
  return state;
}

DissipationTerms check_dissipation(const BlockSystem& s, const CurveNetwork& before, const CurveNetwork& after,
                                   const std::vector<CurveParams>& params, const Eigen::VectorXd& W_full,
                                   const Eigen::VectorXd& deltaX) {
  const auto gam = anisotropies(params);
  const double tau = s.options.tau;
  const auto K = static_cast<Eigen::Index>(s.layout.bulk);
  DissipationTerms d;
  d.length_before = anisotropic_length(before, gam);
  d.length_after = anisotropic_length(after, gam);
  for (std::size_t l = 0; l < s.layout.phases; ++l) {
    const Eigen::VectorXd w = W_full.segment(static_cast<Eigen::Index>(l) * K, K);
    d.grad_w_sq += tau * w.dot(s.A * w);
  }
  // Normal displacement per curve vertex and its lumped integral per curve.
  std::vector<double> normal_integral(before.curves.size(), 0.0);
  for (std::size_t c = 0; c < before.curves.size(); ++c) {
    const std::size_t off = s.layout.curve_offset[c];
    for (std::size_t k = 0; k < before.curves[c].num_vertices(); ++k) {
      const auto g = static_cast<Eigen::Index>(off + k);
      const double vn = s.omega[off + k].dot(deltaX.segment<2>(2 * g));
      d.kinetic += s.kinetic_mass[g] * vn * vn / tau;
      normal_integral[c] += s.mass[g] * vn;
    }
  }
  const BoundarySpec& bc = s.options.boundary;
  if (bc.side != DirichletSide::None) {
    for (std::size_t l = 0; l < s.layout.phases; ++l)
      for (std::size_t c = 0; c < before.curves.size(); ++c)
        d.wd_term -= bc.w_D[l] * s.orientation(l, c) * normal_integral[c];
  }
  d.slack = d.length_before - (d.length_after + d.grad_w_sq + d.kinetic + d.wd_term);
  d.ok = d.slack >= -1e-9 * std::max(1.0, d.length_before);
  return d;
}

std::size_t topology_key(const BulkMesh& mesh, const CurveNetwork& network) {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(mesh.vertices.size());
  for (const Vec2& v : mesh.vertices) {
    mix(std::hash<double>{}(v.x()));
    mix(std::hash<double>{}(v.y()));
  }
  for (const auto& t : mesh.triangles) {
    for (int i : t) mix(static_cast<std::size_t>(i));
  }
  mix(network.curves.size());
  for (const Curve& c : network.curves) {
    mix(c.vertices.size());
    mix(c.closed ? 1 : 0);
  }
  return h;
}

StepSolution solve_step(const BulkMesh& mesh, const CurveNetwork& network, const std::vector<CurveParams>& params,
                        const SimulationConfig& config, PreconditionerCache* cache) {
  StepSolution sol;
  sol.blocks = assemble_blocks(mesh, network, params, config.assembly);
  const ReducedSystem sys = build_reduced_system(sol.blocks);
  const std::size_t key = cache ? topology_key(mesh, network) : 0;
  const Eigen::VectorXd x = solve_reduced(sys, config.solver, sol.stats, cache, key);
  const DofLayout& L = sol.blocks.layout;
  sol.W_full = expand(x.head(static_cast<Eigen::Index>(L.reduced_bulk())), L.phases);
  sol.kappa = x.segment(static_cast<Eigen::Index>(L.kappa_offset()), static_cast<Eigen::Index>(L.curve_vertices));
  sol.deltaX = x.tail(static_cast<Eigen::Index>(2 * L.curve_vertices));
  return sol;
}

CurveNetwork displace(const CurveNetwork& network, const Eigen::VectorXd& deltaX) {
  CurveNetwork out = network;
  Eigen::Index g = 0;
  for (Curve& c : out.curves) {
    for (Vec2& v : c.vertices) {
      v += deltaX.segment<2>(2 * g);
      ++g;
    }
  }
  if (2 * g != deltaX.size()) throw Error("displace: displacement size mismatch");
  return out;
}

const StepRecord& step(SimulationState& state, const SimulationConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  StepSolution sol = solve_step(state.mesh, state.network, state.params, config, state.preconditioner.get());
  if (!sol.stats.converged) throw Error("linear solver failed at step " + std::to_string(state.step + 1) + ": " +
                                        sol.stats.message);

  CurveNetwork next = displace(state.network, sol.deltaX);
  next.validate();
  const DissipationTerms diss =
      check_dissipation(sol.blocks, state.network, next, state.params, sol.W_full, sol.deltaX);
  const SchemeResidual scheme = scheme_residual(sol.blocks, sol.W_full, sol.kappa, sol.deltaX);

  const BulkMesh solve_mesh = state.mesh;
  state.network = std::move(next);
  state.kappa = split(sol.kappa, state.network);
  state.step += 1;
  state.t = static_cast<double>(state.step) * config.assembly.tau;

  std::vector<SurgeryEvent> applied;
  if (config.surgery.enabled) {
    const SurgeryThresholds thr{state.surgery_min_length, config.surgery.min_vertices};
    while (true) {
      const auto events = surgery_scan(state.network, thr);
      if (events.empty()) break;
      const SurgeryEvent ev = events.front();
      const auto parents = apply_surgery(state.network, ev);
      std::vector<CurveParams> params;
      CurveField<double> kappa;
      for (std::size_t c = 0; c < parents.size(); ++c) {
        params.push_back(state.params[parents[c]]);
        const bool same = state.network.curves[c].num_vertices() == state.kappa[parents[c]].size();
        kappa.push_back(same ? state.kappa[parents[c]]
                             : std::vector<double>(state.network.curves[c].num_vertices(), 0.0));
      }
      state.params = std::move(params);
      state.kappa = std::move(kappa);
      applied.push_back(ev);
      state.extinctions.push_back({state.step, state.t, ev});
      state.network.validate();
    }
  }

  state.mesh = adapt(state.network, config.mesh).mesh;
  state.W = transfer_all(solve_mesh, sol.W_full, state.network.num_phases(), state.mesh);

  StepRecord rec = make_record(state, config);
  rec.dissipation = diss;
  rec.solver = sol.stats;
  rec.scheme = scheme;
  rec.surgery = std::move(applied);
  if (config.timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  state.history.push_back(std::move(rec));
  return state.history.back();
}

}  // namespace msflow
