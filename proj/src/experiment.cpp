#include "mmpso/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmpso/error.hpp"
#include "mmpso/gibbs.hpp"
#include "mmpso/output.hpp"

namespace mmpso {

std::size_t EnsembleReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const EnsembleRun& r) { return !r.report; }));
}

namespace {

class Fnv1a {
 public:
  void add(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001B3ULL;
    }
  }
  template <class T>
  void add_values(const T* data, std::size_t count) {
    add(data, count * sizeof(T));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

class Runner {
 public:
  explicit Runner(const ExperimentConfig& cfg) : cfg_(cfg) {}

  RunReport run() {
    const auto start = std::chrono::steady_clock::now();
    initialize();
    report_.mode = cfg_.mode;
    report_.seed = cfg_.seed;
    report_.steps.reserve(static_cast<std::size_t>(cfg_.n_steps) + 1);

    std::int64_t n = 0;
    try {
      report_.steps.push_back(observe(0));
      maybe_snapshot(0);
      for (n = 1; n <= cfg_.n_steps; ++n) {
        const double target = static_cast<double>(n) * cfg_.dt;
        if (swarm_) micro_step();
        if (macro_) macro_advance(target);
        if (coupling_) last_transfer_ = transfer_mass(*coupling_, *swarm_, *macro_, grid_, n);
        report_.steps.push_back(record(n, target));
        maybe_snapshot(n);
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "run aborted at step " << n << ": " << e.what() << " (state digest 0x" << std::hex
          << std::setw(16) << std::setfill('0') << digest() << ")";
      throw SolverError(msg.str());
    }

    finalize();
    report_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(report_);
  }

 private:
  void initialize() {
    if (cfg_.constrained()) {
      pf_micro_.set = cfg_.feasible_set;
      pf_macro_.set = cfg_.feasible_set;
    }
    pf_micro_.objective = cfg_.objective;
    pf_macro_.objective = cfg_.objective;

    if (uses_micro(cfg_.mode)) {
      if (!cfg_.micro) throw ConfigError("[micro] section required");
      micro_params_ = cfg_.micro_params();
      micro_params_.validate();
      const auto& mc = *cfg_.micro;
      swarm_ = make_swarm(mc.n_particles, cfg_.objective.dim, mc.init_lo, mc.init_hi,
                          cfg_.total_mass / static_cast<double>(mc.n_particles), cfg_.seed);
      noise_key_ = {cfg_.seed, streams::micro_noise};
      if (cfg_.constrained()) {
        if (!cfg_.penalty_micro) throw ConfigError("[penalty_micro] section required");
        ctrl_micro_ = PenaltyController::start(*cfg_.penalty_micro);
      }
    }
    if (uses_macro(cfg_.mode)) {
      if (!cfg_.macro) throw ConfigError("[macro] section required");
      grid_ = cfg_.macro->grid;
      macro_ = uniform_macro_state(grid_, cfg_.total_mass, cfg_.macro->temperature);
      if (cfg_.constrained()) {
        if (!cfg_.penalty_macro) throw ConfigError("[penalty_macro] section required");
        ctrl_macro_ = PenaltyController::start(*cfg_.penalty_macro);
      }
    }
    if (cfg_.mode == Mode::micromacro) {
      if (!cfg_.coupling) throw ConfigError("[coupling] section required");
      coupling_ = start_coupling(*cfg_.coupling, cfg_.total_mass, *swarm_, *macro_, grid_);
    }
    sync_beta();
  }

  void sync_beta() {
    pf_micro_.beta = ctrl_micro_ ? ctrl_micro_->beta : 0.0;
    pf_macro_.beta = ctrl_macro_ ? ctrl_macro_->beta : 0.0;
  }

  // Euler–Maruyama step, then the microscopic feasibility check on the new positions.
  void micro_step() {
    const double alpha = micro_params_.alpha;
    const auto before = evaluate_swarm(swarm_->positions, pf_micro_);
    const auto consensus = consensus_point(swarm_->positions, before, alpha);
    const auto theta = draw_noise(noise_key_, swarm_->step, swarm_->size(),
                                  noise_width(micro_params_.diffusion, swarm_->dim()));
    *swarm_ = step_euler_maruyama(*swarm_, micro_params_, consensus, theta);
    observe_micro();
    if (ctrl_micro_) {
      *ctrl_micro_ = update(*ctrl_micro_, micro_scale_.violation);
      micro_scale_.beta = ctrl_micro_->beta;
      micro_scale_.kappa = ctrl_micro_->kappa;
      micro_scale_.branch = ctrl_micro_->last_branch;
    }
    sync_beta();
  }

  void observe_micro() {
    const double alpha = micro_params_.alpha;
    micro_values_ = evaluate_swarm(swarm_->positions, pf_micro_);
    const auto c = consensus_point(swarm_->positions, micro_values_, alpha);
    micro_consensus_.assign(c.data(), c.data() + c.size());
    softmin_gap_ = softmin_gap(micro_values_, alpha);
    assert(softmin_gap_ <= std::log(static_cast<double>(swarm_->size())) / alpha + 1e-12);
    micro_scale_ = {};
    if (ctrl_micro_) {
      micro_scale_.beta = ctrl_micro_->beta;
      micro_scale_.kappa = ctrl_micro_->kappa;
      micro_scale_.violation = violation_micro(swarm_->positions, micro_values_, pf_micro_, alpha);
    }
  }

  // Sub-steps the macroscopic system up to the shared coupling time, then checks feasibility.
  void macro_advance(double target) {
    const auto& mc = *cfg_.macro;
    const double alpha = cfg_.dynamics.alpha;
    const auto source = cfg_.source_params();
    const double eps = 1e-12 * std::max(1.0, std::abs(target));
    std::size_t substeps = 0;
    while (macro_->time < target - eps) {
      if (++substeps > 1'000'000) throw SolverError("macro sub-stepping does not reach the coupling time");
      const double consensus = consensus_point_macro(*macro_, grid_, pf_macro_, alpha);
      const double remaining = target - macro_->time;
      const double dt = std::min(cfl_dt(*macro_, grid_, mc.cfl), remaining);
      *macro_ = lax_friedrichs_step(*macro_, grid_, dt, source, consensus, mc.boundary);
      if (dt == remaining) macro_->time = target;
    }
    macro_->time = target;
    observe_macro();
    if (ctrl_macro_) {
      *ctrl_macro_ = update(*ctrl_macro_, macro_scale_.violation);
      macro_scale_.beta = ctrl_macro_->beta;
      macro_scale_.kappa = ctrl_macro_->kappa;
      macro_scale_.branch = ctrl_macro_->last_branch;
    }
    sync_beta();
  }

  void observe_macro() {
    const double alpha = cfg_.dynamics.alpha;
    macro_consensus_ = consensus_point_macro(*macro_, grid_, pf_macro_, alpha);
    macro_scale_ = {};
    if (ctrl_macro_) {
      macro_scale_.beta = ctrl_macro_->beta;
      macro_scale_.kappa = ctrl_macro_->kappa;
      macro_scale_.violation = violation_macro(*macro_, grid_, pf_macro_, alpha);
    }
  }

  StepRecord observe(std::int64_t n) {
    if (swarm_) observe_micro();
    if (macro_) observe_macro();
    return record(n, 0.0);
  }

  std::vector<double> combined_density() const {
    std::vector<double> rho = macro_->rho;
    if (swarm_) {
      const auto rho_m = micro_cell_density(*swarm_, grid_);
      for (std::size_t j = 0; j < rho.size(); ++j) rho[j] += rho_m[j];
    }
    return rho;
  }

  StepRecord record(std::int64_t n, double time) const {
    StepRecord rec;
    rec.step = n;
    rec.time = time;
    if (swarm_) {
      rec.micro_consensus = micro_consensus_;
      rec.micro = micro_scale_;
      rec.softmin_gap = softmin_gap_;
      rec.micro_mass = swarm_->total_mass();
    }
    if (macro_) {
      rec.macro_consensus = macro_consensus_;
      rec.macro = macro_scale_;
      rec.macro_mass = macro_->total_mass(grid_);
      rec.argmax_x = grid_.center(argmax_cell(combined_density()));
    }
    rec.zeta = coupling_ ? coupling_->zeta : 0.0;
    rec.total_mass = rec.micro_mass + rec.macro_mass;
    return rec;
  }

  FieldSnapshot snapshot(std::int64_t n) const {
    FieldSnapshot s;
    s.step = n;
    s.x = grid_.centers();
    s.rho_macro = macro_->rho;
    s.rho_u = macro_->rho_u;
    if (swarm_) s.rho_micro = micro_cell_density(*swarm_, grid_);
    return s;
  }

  void maybe_snapshot(std::int64_t n) {
    if (!macro_ || cfg_.snapshot_every <= 0 || n % cfg_.snapshot_every != 0) return;
    report_.snapshots.push_back(snapshot(n));
  }

  void finalize() {
    const auto& last = report_.last();
    if (swarm_) {
      report_.final_consensus = last.micro_consensus;
      const auto best = std::distance(micro_values_.begin(),
                                      std::min_element(micro_values_.begin(), micro_values_.end()));
      const auto row = swarm_->positions.row(best);
      report_.argmin_estimate.assign(row.data(), row.data() + row.size());
    }
    if (macro_) {
      if (!swarm_) report_.final_consensus = {last.macro_consensus};
      report_.argmin_estimate = {last.argmax_x};
      report_.final_fields = snapshot(last.step);
    }
    if (ctrl_micro_) report_.final_beta_micro = ctrl_micro_->beta;
    if (ctrl_macro_) report_.final_beta_macro = ctrl_macro_->beta;
    if (coupling_) report_.final_zeta = coupling_->zeta;
  }

  std::uint64_t digest() const {
    Fnv1a h;
    if (swarm_) {
      h.add_values(swarm_->positions.data(), static_cast<std::size_t>(swarm_->positions.size()));
      h.add_values(swarm_->velocities.data(), static_cast<std::size_t>(swarm_->velocities.size()));
      h.add_values(&swarm_->particle_mass, 1);
    }
    if (macro_) {
      h.add_values(macro_->rho.data(), macro_->rho.size());
      h.add_values(macro_->rho_u.data(), macro_->rho_u.size());
    }
    return h.value();
  }

  const ExperimentConfig& cfg_;
  RunReport report_;

  PenalizedObjective pf_micro_;
  PenalizedObjective pf_macro_;
  std::optional<PenaltyController> ctrl_micro_;
  std::optional<PenaltyController> ctrl_macro_;

  MicroParams micro_params_;
  StreamKey noise_key_;
  std::optional<SwarmState> swarm_;
  std::vector<double> micro_values_;
  std::vector<double> micro_consensus_;
  ScaleRecord micro_scale_;
  double softmin_gap_ = 0.0;

  Grid1D grid_;
  std::optional<MacroState> macro_;
  double macro_consensus_ = 0.0;
  ScaleRecord macro_scale_;

  std::optional<CouplingState> coupling_;
  TransferRecord last_transfer_;
};

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  auto report = Runner(cfg).run();
  if (!options.output.empty()) write_run_outputs(options.output, report, cfg.objective.dim);
  return report;
}

EnsembleReport run_ensemble(const ExperimentConfig& cfg, std::size_t n_runs,
                            std::uint64_t base_seed, const RunOptions& options, unsigned threads) {
  if (n_runs == 0) throw ContractViolation("ensemble needs at least one run");
  EnsembleReport ensemble;
  ensemble.runs.resize(n_runs);
  for (std::size_t k = 0; k < n_runs; ++k) {
    ensemble.runs[k].index = k;
    ensemble.runs[k].seed = base_seed + k;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n_runs; k = next++) {
      auto& slot = ensemble.runs[k];
      ExperimentConfig run_cfg = cfg;
      run_cfg.seed = slot.seed;
      try {
        slot.report = run_experiment(run_cfg);
      } catch (const std::exception& e) {
        slot.error = "run " + std::to_string(k) + " (seed " + std::to_string(slot.seed) + "): " + e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_runs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!options.output.empty()) write_ensemble_outputs(options.output, ensemble, cfg.objective.dim);
  return ensemble;
}

}  // namespace mmpso
