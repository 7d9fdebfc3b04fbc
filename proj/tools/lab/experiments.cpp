#include "lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

#include "mckean/errors.hpp"
#include "mckean/fluctuations.hpp"
#include "mckean/grid.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/metrics.hpp"
#include "mckean/parallel.hpp"
#include "mckean/particle.hpp"
#include "mckean/rng.hpp"
#include "mckean/stats.hpp"

namespace mckean::lab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t step_count(double t_end, double dt) {
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw ConfigError("numerics.t_end must be a whole number of steps dt");
  }
  return steps;
}

Json nan_to_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Initial law on the model grid. "default" is uniform on compact domains and
// exp(-beta V) on the line.
GridDensity initial_density(const PotentialSpec& spec, const Grid& grid, const Numerics& num) {
  const std::string kind = num.text("initial");
  if (kind == "von-mises") {
    const double kappa = num.real("kappa");
    return GridDensity::from_function(grid, [&](double x) { return std::exp(kappa * std::cos(kTwoPi * x)); });
  }
  const double shift = kind == "perturbed" ? num.real("amplitude") : 0.0;
  if (spec.domain().is_line()) {
    double vmin = std::numeric_limits<double>::infinity();
    for (double x : grid.nodes()) vmin = std::min(vmin, spec.V(x));
    return GridDensity::from_function(grid, [&](double x) {
      return std::exp(-spec.beta() * (spec.V(x - shift) - vmin));
    });
  }
  if (kind == "perturbed") {
    const double width = grid.upper() - grid.lower;
    return GridDensity::from_function(grid, [&](double x) {
      return 1.0 + shift * std::cos(kTwoPi * (x - grid.lower) / width);
    });
  }
  return GridDensity::flat(grid);
}

double order_parameter(const PotentialSpec& spec, std::span<const double> x) {
  const std::size_t d = static_cast<std::size_t>(spec.dim());
  const double n = static_cast<double>(x.size() / d);
  if (spec.domain().is_torus()) {
    std::complex<double> m = 0.0;
    for (double xi : x) m += std::polar(1.0, kTwoPi * xi);
    return std::abs(m) / n;
  }
  double norm2 = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double s = 0.0;
    for (std::size_t i = c; i < x.size(); i += d) s += x[i];
    norm2 += (s / n) * (s / n);
  }
  return std::sqrt(norm2);
}

ParticleEnsemble initial_ensemble(const ExperimentConfig& cfg, std::size_t n) {
  const auto& spec = *cfg.model;
  if (spec.dim() == 1) {
    const Grid grid = make_grid(spec, cfg.numerics.size("M"));
    return iid_ensemble(cfg.model, initial_density(spec, grid, cfg.numerics), n, cfg.seed, 0);
  }
  // boxes in d > 1 start uniform
  const auto& dom = spec.domain();
  CounterRng rng(stream_key(cfg.seed, StreamTag::kInitial));
  std::vector<double> x(n * static_cast<std::size_t>(spec.dim()));
  for (double& v : x) v = dom.lower + (dom.upper - dom.lower) * rng.uniform();
  return ParticleEnsemble(cfg.model, std::move(x), cfg.seed, 0);
}

void write_density(OutputDir& out, const std::string& name, const GridDensity& rho) {
  CsvTable t({"x", "rho"});
  for (std::size_t i = 0; i < rho.grid.size; ++i) t.row({rho.grid.x(i), rho.values[i]});
  out.write_csv(name, t);
}

// Converged steady states sorted by energy (lowest first).
std::vector<std::pair<double, SteadyStateResult>> sorted_states(const PotentialSpec& spec,
                                                                std::size_t m, std::uint64_t seed,
                                                                const SteadyStateOptions& opts = {}) {
  std::vector<std::pair<double, SteadyStateResult>> states;
  for (auto& s : multistart_steady_states(spec, m, seed, opts)) {
    states.emplace_back(free_energy(s.density, spec), std::move(s));
  }
  std::sort(states.begin(), states.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (states.empty()) throw DependencyError("no steady state converged");
  return states;
}

// ---------------------------------------------------------------------------

void simulate(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const double dt = num.real("dt");
  const std::size_t steps = step_count(num.real("t_end"), dt);
  const std::size_t record = num.size("record_every");
  const std::size_t snap = num.size("snapshot_every");
  auto ens = initial_ensemble(cfg, num.size("N"));
  const double n = static_cast<double>(ens.size());

  CsvTable traj({"time", "energy_per_particle", "order_parameter"});
  auto log_row = [&] {
    traj.row({ens.time(), hamiltonian(ens) / n, order_parameter(spec, ens.positions())});
  };
  auto snapshot = [&](std::size_t s) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%08zu.bin", s);
    out.write_binary(name, ens.positions(),
                     {{"N", ens.size()}, {"d", ens.dim()}, {"time", ens.time()}, {"seed", cfg.seed}});
  };
  log_row();
  if (snap) snapshot(0);
  for (std::size_t s = 1; s <= steps; ++s) {
    step_euler_maruyama(ens, dt);
    if (s % record == 0 || s == steps) log_row();
    if (snap && s % snap == 0) snapshot(s);
  }
  out.write_csv("trajectory.csv", traj);
  out.write_binary("final.bin", ens.positions(),
                   {{"N", ens.size()}, {"d", ens.dim()}, {"time", ens.time()}, {"seed", cfg.seed}});
}

void gibbs(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  GibbsOptions opts;
  opts.scheme = num.text("scheme") == "ula" ? GibbsScheme::kUla : GibbsScheme::kMala;
  opts.step = num.real("step");
  opts.burn_in = num.size("burn_in");
  opts.thin = num.size("thin");
  opts.n_samples = num.size("samples");
  const auto res = sample_gibbs(cfg.model, num.size("N"), opts, cfg.seed);
  for (const auto& w : res.warnings) out.warn(w);
  CsvTable t({"sample", "energy_per_particle", "order_parameter"});
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    const auto& e = res.samples[i];
    t.row({static_cast<double>(i), hamiltonian(e) / static_cast<double>(e.size()),
           order_parameter(*cfg.model, e.positions())});
  }
  out.write_csv("samples.csv", t);
  out.write_json("summary.json", {{"acceptance_rate", res.acceptance_rate},
                                  {"scheme", num.text("scheme")}});
  if (!res.samples.empty()) {
    const auto& last = res.samples.back();
    out.write_binary("last_sample.bin", last.positions(),
                     {{"N", last.size()}, {"d", last.dim()}, {"time", last.time()}, {"seed", cfg.seed}});
  }
}

void meanfield(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const Grid grid = make_grid(spec, num.size("M"));
  const auto flow = solve_mean_field(spec, initial_density(spec, grid, num), num.real("dt"),
                                     num.real("t_end"), num.size("record_every"));
  CsvTable t({"time", "free_energy", "order_parameter", "dissipation"});
  for (std::size_t i = 0; i < flow.states.size(); ++i) {
    const auto& rho = flow.states[i];
    t.row({flow.times[i], free_energy(rho, spec), order_parameter(rho), dissipation(rho, spec)});
  }
  out.write_csv("free_energy.csv", t);
  write_density(out, "density_initial.csv", flow.states.front());
  write_density(out, "density_final.csv", flow.states.back());
}

void steady_states(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  SteadyStateOptions opts;
  opts.tol = num.real("tol");
  opts.damping = num.real("damping");
  opts.max_iter = num.size("max_iter");
  const auto states = sorted_states(spec, num.size("M"), cfg.seed, opts);
  CsvTable t({"index", "free_energy", "order_parameter", "residual", "dissipation", "iterations"});
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i].second;
    t.row({static_cast<double>(i), states[i].first, order_parameter(s.density), s.residual(),
           dissipation(s.density, spec), static_cast<double>(s.iterations)});
    write_density(out, "state_" + std::to_string(i) + ".csv", s.density);
  }
  out.write_csv("states.csv", t);
}

void phase_scan(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const double lo = num.real("beta_min"), hi = num.real("beta_max"), step = num.real("beta_step");
  std::vector<double> betas;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) betas.push_back(lo + step * static_cast<double>(i));
  SteadyStateOptions opts;
  opts.tol = num.real("tol");
  const int k_max = static_cast<int>(num.integer("k_max"));
  const auto scan = scan_phase_transition(*cfg.model, betas, num.real("amplitude"), opts,
                                          num.size("M"), k_max);
  CsvTable t({"beta", "r", "energy_gap", "lambda1", "converged"});
  for (const auto& row : scan.rows) {
    t.row({row.beta, row.r, row.energy_gap, row.lambda1, row.converged ? 1.0 : 0.0});
    if (!row.converged) out.warn("steady-state iteration did not converge at beta=" + number(row.beta));
  }
  out.write_csv("scan.csv", t);
  out.write_json("summary.json",
                 {{"beta_c", scan.beta_c ? Json(*scan.beta_c) : Json(nullptr)},
                  {"beta_sharp", nan_to_null(beta_sharp(*cfg.model, k_max))}});
}

void lsi(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const auto states = sorted_states(spec, num.size("M"), cfg.seed);
  std::vector<GridDensity> densities;
  for (const auto& s : states) densities.push_back(s.second.density);

  // non-minimising critical point with the highest energy
  std::optional<GridDensity> witness;
  for (auto it = states.rbegin(); it != states.rend(); ++it) {
    if (it->first > states.front().first + 1e-6 && dissipation(it->second.density, spec) < 1e-8) {
      witness = it->second.density;
      break;
    }
  }
  std::optional<double> lambda_single = num.optional_real("lambda_single");
  if (!lambda_single && spec.domain().is_torus() && !spec.has_confinement()) {
    lambda_single = 8.0 * std::numbers::pi * std::numbers::pi;  // uniform measure on the circle
  }
  if (!witness) out.warn("no non-minimising critical point found; witness ratio unavailable");
  if (!lambda_single) out.warn("lambda_single not given; two-scale bound unavailable");

  CsvTable t({"N", "witness_ratio", "lower_bound", "regime"});
  for (std::size_t n : num.sizes("Ns")) {
    double ratio = kNaN, bound = kNaN;
    if (witness) ratio = lsi_witness_ratio(spec, n, *witness, densities).witness_ratio;
    bool guaranteed = false;
    if (lambda_single) {
      const auto b = two_scale_lsi_lower_bound(spec, n, *lambda_single, num.flag("weak_interaction"),
                                               num.real("eps"));
      bound = b.per_n;
      guaranteed = b.guaranteed;
    }
    LsiRegime regime = LsiRegime::kDegenerateWitness;
    if (!witness) {
      regime = guaranteed || spec.k_v() + spec.k_w() <= 0.0 ? LsiRegime::kHighTemperature
                                                            : LsiRegime::kConvexFarField;
    }
    t.row_text({std::to_string(n), number(ratio), number(bound), to_string(regime)});
  }
  out.write_csv("lsi.csv", t);
}

void poc(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const double dt = num.real("dt"), t_end = num.real("t_end");
  const std::size_t replicas = num.size("replicas");
  const Grid grid = make_grid(spec, num.size("M"));
  const auto flow = solve_mean_field(spec, initial_density(spec, grid, num), dt, t_end, 1);
  const double s_const = gronwall_source_constant(flow, spec);

  CsvTable t({"N", "time", "distance", "stderr", "gronwall_bound"});
  std::vector<double> ns, finals;
  for (std::size_t n : num.sizes("Ns")) {
    std::vector<CouplingTrace> traces(replicas);
    parallel_for(replicas, [&](std::size_t r) {
      traces[r] = synchronous_coupling_run(cfg.model, n, dt, t_end, flow, cfg.seed, r,
                                           num.size("log_every"));
    });
    const double k = spec.k_v() + spec.k_w() * (1.0 - 1.0 / static_cast<double>(n));
    for (std::size_t l = 0; l < traces.front().times.size(); ++l) {
      std::vector<double> d(replicas);
      for (std::size_t r = 0; r < replicas; ++r) d[r] = traces[r].distance[l];
      const auto est = mean_and_stderr(d);
      const double time = traces.front().times[l];
      t.row({static_cast<double>(n), time, est.mean, est.stderr, gronwall_bound(k, time, s_const, n)});
      if (l + 1 == traces.front().times.size()) {
        ns.push_back(static_cast<double>(n));
        finals.push_back(est.mean);
      }
    }
  }
  out.write_csv("poc.csv", t);
  Json summary{{"S", s_const}, {"K_V", spec.k_v()}, {"K_W", spec.k_w()}};
  if (ns.size() >= 2) {
    const auto fit = fit_loglog(ns, finals);
    summary["slope"] = fit.slope;
    summary["slope_stderr"] = fit.slope_stderr;
  }
  out.write_json("summary.json", summary);
}

void talagrand(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const std::size_t m = num.size("M");
  const auto states = sorted_states(spec, m, cfg.seed);
  std::vector<GridDensity> minimisers;
  for (const auto& s : states) {
    if (s.first <= states.front().first + 1e-9) minimisers.push_back(s.second.density);
  }
  const double lambda = num.optional_real("lambda").value_or(
      spec.has_confinement() ? kNaN : linearized_gap(spec));
  if (!std::isfinite(lambda)) throw ConfigError("numerics.lambda is required when V is not zero");

  const Grid grid = torus_grid(m);
  const std::size_t count = num.size("perturbations");
  const int modes = static_cast<int>(num.integer("modes"));
  const double amp = num.real("amplitude");
  std::vector<GridDensity> samples;
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(stream_key(cfg.seed, StreamTag::kPerturbation, i));
    std::vector<double> a(modes), p(modes);
    for (int k = 0; k < modes; ++k) {
      a[k] = amp * (2.0 * rng.uniform() - 1.0);
      p[k] = kTwoPi * rng.uniform();
    }
    // perturb the first minimiser
    const auto& base = minimisers.front();
    GridDensity rho = base;
    for (std::size_t j = 0; j < grid.size; ++j) {
      double f = 1.0;
      for (int k = 0; k < modes; ++k) f += a[k] * std::cos(kTwoPi * (k + 1) * grid.x(j) + p[k]);
      rho.values[j] *= std::max(f, 0.0);
    }
    rho.normalize();
    samples.push_back(std::move(rho));
  }
  const auto margins = talagrand_check(spec, samples, minimisers, lambda);
  out.write_json("margins.json", Json(margins));
  out.write_json("summary.json", {{"lambda", lambda},
                                  {"minimisers", minimisers.size()},
                                  {"min_margin", *std::min_element(margins.begin(), margins.end())}});
}

void write_covariance(OutputDir& out, const std::string& name, const std::vector<ModeStatistics>& stats,
                      const PotentialSpec& spec, int k_max) {
  const auto theory = stationary_covariance_theory(spec, k_max);
  const double scale = 8.0 * std::numbers::pi * std::numbers::pi * spec.temperature();
  CsvTable t({"k", "empirical_var", "stderr", "theory_weight", "ratio"});
  for (const auto& s : stats) {
    const double w = scale * theory.at(s.k);
    t.row({static_cast<double>(s.k), s.variance, s.stderr, w, s.variance / w});
  }
  out.write_csv(name, t);
}

void fluctuations(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto& spec = *cfg.model;
  const int k_max = static_cast<int>(num.integer("k_max"));
  stationary_covariance_theory(spec, k_max);  // fail early above beta_sharp
  const auto states = sorted_states(spec, 256, cfg.seed);
  const GridDensity& rho_beta = states.front().second.density;
  const double dt = num.real("dt");
  const std::size_t burn = step_count(num.real("burn_in"), dt);
  const std::size_t steps = step_count(num.real("t_end"), dt);
  const std::size_t record = num.size("record_every");
  auto ens = iid_ensemble(cfg.model, rho_beta, num.size("N"), cfg.seed, 0);
  for (std::size_t s = 0; s < burn; ++s) step_euler_maruyama(ens, dt);
  std::vector<FluctuationField> run;
  for (std::size_t s = 1; s <= steps; ++s) {
    step_euler_maruyama(ens, dt);
    if (s % record == 0) run.push_back(compute_fluctuation_field(ens, rho_beta, k_max));
  }
  write_covariance(out, "covariance.csv", empirical_mode_covariance(run, k_max), spec, k_max);
}

void spde(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const int k_max = static_cast<int>(num.integer("k_max"));
  SpdeOptions so;
  so.dt = num.real("dt");
  so.t_end = num.real("t_end");
  so.record_every = num.size("record_every");
  const auto run = simulate_spde(*cfg.model, k_max, so, cfg.seed);
  if (num.flag("trajectory")) {
    std::vector<std::string> header{"time"};
    for (int k = 1; k <= k_max; ++k) {
      header.push_back("re_" + std::to_string(k));
      header.push_back("im_" + std::to_string(k));
    }
    CsvTable t(header);
    std::vector<double> row(header.size());
    for (const auto& f : run) {
      row[0] = f.time;
      for (int k = 1; k <= k_max; ++k) {
        row[2 * k - 1] = f(k).real();
        row[2 * k] = f(k).imag();
      }
      t.row(row);
    }
    out.write_csv("spde.csv", t);
  }
  write_covariance(out, "covariance.csv", empirical_mode_covariance(run, k_max), *cfg.model, k_max);
}

void lln(const ExperimentConfig& cfg, OutputDir& out) {
  const auto& num = cfg.numerics;
  const auto states = sorted_states(*cfg.model, num.size("M"), cfg.seed);
  LlnOptions opts;
  opts.s = num.real("s");
  opts.k_max = static_cast<int>(num.integer("k_max"));
  opts.replicas = num.size("replicas");
  opts.samples_per_replica = num.size("samples_per_replica");
  opts.gibbs.step = num.real("step");
  opts.gibbs.burn_in = num.size("burn_in");
  opts.gibbs.thin = num.size("thin");
  const auto res = lln_decay_experiment(cfg.model, states.front().second.density, num.sizes("Ns"),
                                        opts, cfg.seed);
  for (const auto& w : res.warnings) out.warn(w);
  CsvTable t({"N", "hminus_s_squared", "stderr", "acceptance"});
  for (const auto& row : res.rows) {
    t.row({static_cast<double>(row.n), row.mean, row.stderr, row.acceptance});
  }
  out.write_csv("lln.csv", t);
  out.write_json("summary.json", {{"slope", res.fit.slope}, {"slope_stderr", res.fit.slope_stderr}});
}

using Runner = void (*)(const ExperimentConfig&, OutputDir&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"simulate", simulate},   {"gibbs", gibbs},         {"meanfield", meanfield},
      {"steady-states", steady_states}, {"phase-scan", phase_scan}, {"lsi", lsi},
      {"poc", poc},             {"talagrand", talagrand}, {"fluctuations", fluctuations},
      {"spde", spde},           {"lln", lln},
  };
  return table;
}

}  // namespace

void run_experiment(const ExperimentConfig& config, OutputDir& out) {
  const auto it = runners().find(config.experiment);
  if (it == runners().end()) throw ConfigError("unknown experiment " + config.experiment);
  it->second(config, out);
}

int execute(const ExperimentConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputDir out(config.output);
  for (const auto& w : config.model_warnings) out.warn("model: " + w);
  int status = kSuccess;
  std::string error;
  try {
    run_experiment(config, out);
  } catch (const ConfigError& e) {
    status = kConfigFailure;
    error = e.what();
  } catch (const NumericalError& e) {
    status = kNumericalFailure;
    error = e.what();
  } catch (const Error& e) {
    // model/experiment mismatches surface as precondition or support errors
    status = kNumericalFailure;
    error = e.what();
  } catch (const std::exception& e) {
    status = kFailure;
    error = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.write_manifest(config, wall, status != kSuccess, error);
  if (!error.empty()) log << "mckean-lab: " << config.experiment << ": " << error << "\n";
  for (const auto& w : out.warnings()) log << "warning: " << w << "\n";
  return status;
}

}  // namespace mckean::lab
