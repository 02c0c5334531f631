#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "scardet/circuits.hpp"
#include "scardet/models.hpp"

namespace scardet {

/// Noisy objective; eval_id identifies the evaluation (2k / 2k+1 for the two
/// probes of SPSA iteration k) so callers can derive independent shot seeds.
using Objective = std::function<double(const std::vector<double>&, std::uint64_t eval_id)>;

struct SpsaConfig {
  double step_amplitude = 0.0;   // a; <= 0 requests calibration
  double perturbation = 0.0;     // c; <= 0 requests calibration
  double stability = -1.0;       // A; < 0 resolves to 0.01 * iterations
  double step_decay = 0.602;     // alpha
  double perturbation_decay = 0.101;  // gamma
  int iterations = 0;
  int calibration_samples = 25;
  double target_step = 0.62831853071795864769;  // 2 pi / 10
  // Calibrated perturbations never drop below this. Probes taken at the bare
  // shot-noise scale leave the two-sided differences noise-dominated and the
  // descent stalls; 0.2 matches the stock SPSA perturbation for angle
  // landscapes.
  double perturbation_floor = 0.2;
  int smoothing_window = 25;
  int trace_stride = 0;  // 0 = about 1000 trace points
  std::uint64_t seed = 0;

  double step_at(int k) const;          // a_k = a / (k + 1 + A)^alpha
  double perturbation_at(int k) const;  // c_k = c / (k + 1)^gamma
  void validate() const;
};

struct SpsaResult {
  std::vector<double> best_parameters;
  double best_smoothed = 0.0;
  std::vector<std::pair<int, double>> trace;  // (iteration, smoothed objective)
  std::uint64_t evaluations = 0;
  bool calibration_fallback = false;
};

/// Fills a, c and A of the config from probe statistics at theta0:
/// c = objective standard deviation (floored at 0.01), a scaled so the mean
/// first-step magnitude matches target_step. Returns true on the documented
/// fallback (a = 0.2, c = 0.1) taken when every probe gradient vanishes.
bool calibrate_rates(const Objective& objective, const std::vector<double>& theta0,
                     SpsaConfig& config);

/// Rademacher-perturbation SPSA descent; returns the iterate with the best
/// window-averaged objective. post_update (optional) may re-project the
/// parameters after every update, e.g. to renormalize amplitude vectors.
SpsaResult spsa_minimize(const Objective& objective, std::vector<double> theta0,
                         const SpsaConfig& config,
                         const std::function<void(std::vector<double>&)>& post_update = {});

struct TrainingConfig {
  CircuitSpec circuit;
  int shots = 300;
  int iterations = 20000;
  int ensemble_size = 32;
  std::uint64_t seed_base = 0;
  int calibration_samples = 25;
  SpsaConfig spsa;  // optional overrides of a, c, A, decay exponents
};

struct TrainedModel {
  CircuitSpec circuit;
  std::vector<double> theta;  // optimized angles, reduced mod 2 pi
  int train_state_index = -1;
  double train_energy = 0.0;
  double final_cost = 0.0;  // best smoothed sampled cost
  std::vector<std::pair<int, double>> cost_trace;
  std::uint64_t seed = 0;
  int shots = 0;
  int iterations = 0;
  double spsa_a = 0.0, spsa_c = 0.0, spsa_stability = 0.0;
  bool calibration_fallback = false;
};

/// Trains one autoencoder on an input state: uniform random initial angles,
/// rate calibration, then SPSA on the sampled trash cost. Per-evaluation shot
/// seeds derive from (member_seed, eval_id).
TrainedModel train_qvae(const CircuitEngine& engine, const StateVector& input,
                        int train_state_index, double train_energy, const TrainingConfig& config,
                        std::uint64_t member_seed);

/// Independent trainings with seeds seed_base + k, run across the worker pool.
std::vector<TrainedModel> train_ensemble(const CircuitEngine& engine, const StateVector& input,
                                         int train_state_index, double train_energy,
                                         const TrainingConfig& config, int workers = 0);

struct CostProfile {
  std::vector<double> energies;
  std::vector<double> entropies;  // empty when not computed
  std::vector<double> mean_cost;
  std::vector<double> stderr_cost;
  int n_members = 0;
  int n_trash = 0;
  int train_state_index = -1;
};

/// Exact-mode cost of every eigenstate under each ensemble member, reported
/// as the per-eigenstate mean and standard error over the ensemble.
/// input_state(j) supplies the circuit-basis state of eigenstate j.
CostProfile evaluate_cost_profile(const CircuitEngine& engine,
                                  std::span<const TrainedModel> members,
                                  const Eigensystem& eigensystem,
                                  const std::function<StateVector(std::size_t)>& input_state,
                                  int workers = 0);

struct DreamConfig {
  int optimizations = 15;
  int steps = 50000;
  int shots = 100;
  std::uint64_t seed = 0;
  int calibration_samples = 25;
  double target_step = 0.62831853071795864769;
};

struct DreamState {
  Eigen::VectorXd amplitudes;  // unit norm, over the constrained basis
  double final_cost = 0.0;
  std::vector<std::pair<int, double>> trace;
  std::uint64_t seed = 0;
};

struct DreamResult {
  std::vector<DreamState> runs;
  Eigen::VectorXd mean_magnetization;
  std::vector<double> q_grid;                       // 2 pi m / N
  std::vector<double> mean_abs_structure_factor;    // averaged over runs
};

/// Input-space optimization against a frozen ensemble: a real normalized
/// amplitude vector is optimized by SPSA to minimize the ensemble-mean
/// sampled trash cost, renormalizing after every update.
DreamResult dream(const CircuitEngine& engine, std::span<const TrainedModel> ensemble,
                  const Basis& basis, const DreamConfig& config, int workers = 0);

}  // namespace scardet
