#include "scardet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace scardet {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Disjoint eval-id streams for the calibration phase.
constexpr std::uint64_t kCalibrationStream = std::uint64_t{1} << 62;

/// Mean of the last up-to-`window` objective evaluations.
class SmoothingWindow {
 public:
  explicit SmoothingWindow(int window) : window_(static_cast<std::size_t>(window)) {}

  void push(double value) {
    values_.push_back(value);
    sum_ += value;
    if (values_.size() > window_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }

  double mean() const { return sum_ / static_cast<double>(values_.size()); }
  bool empty() const { return values_.empty(); }

 private:
  std::size_t window_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

}  // namespace

double SpsaConfig::step_at(int k) const {
  return step_amplitude / std::pow(static_cast<double>(k) + 1.0 + stability, step_decay);
}

double SpsaConfig::perturbation_at(int k) const {
  return perturbation / std::pow(static_cast<double>(k) + 1.0, perturbation_decay);
}

void SpsaConfig::validate() const {
  if (step_amplitude <= 0.0 || perturbation <= 0.0)
    throw std::invalid_argument("SPSA rates must be positive (calibrate or set them)");
  if (!(perturbation_decay > 0.0 && perturbation_decay < step_decay && step_decay <= 1.0))
    throw std::invalid_argument("SPSA decay exponents must satisfy 0 < gamma < alpha <= 1");
  if (iterations < 0) throw std::invalid_argument("negative iteration count");
  if (stability < 0.0) throw std::invalid_argument("unresolved stability constant");
  if (smoothing_window < 1) throw std::invalid_argument("smoothing window must be >= 1");
}

bool calibrate_rates(const Objective& objective, const std::vector<double>& theta0,
                     SpsaConfig& config) {
  if (config.calibration_samples < 10)
    throw std::invalid_argument("calibration needs at least 10 samples");
  if (config.stability < 0.0) config.stability = 0.01 * static_cast<double>(config.iterations);

  Rng rng(derive_seed(config.seed, 0xca11b7a7e5ull));
  std::uint64_t eval_id = kCalibrationStream;
  const auto n = theta0.size();

  // c: noise scale of the objective at theta0
  if (config.perturbation <= 0.0) {
    std::vector<double> samples(static_cast<std::size_t>(config.calibration_samples));
    for (double& s : samples) s = objective(theta0, eval_id++);
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                        static_cast<double>(samples.size());
    double var = 0.0;
    for (const double s : samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(samples.size() - 1);
    config.perturbation = std::max(std::sqrt(var), config.perturbation_floor);
  }

  if (config.step_amplitude > 0.0) return false;

  // a: match the mean first-step magnitude to target_step
  const double c = config.perturbation;
  double mean_g = 0.0;
  std::vector<double> plus(n), minus(n);
  for (int s = 0; s < config.calibration_samples; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = rng.rademacher() * c;
      plus[i] = theta0[i] + d;
      minus[i] = theta0[i] - d;
    }
    const double fp = objective(plus, eval_id++);
    const double fm = objective(minus, eval_id++);
    mean_g += std::abs(fp - fm) / (2.0 * c);
  }
  mean_g /= static_cast<double>(config.calibration_samples);

  if (mean_g <= 0.0) {
    config.step_amplitude = 0.2;
    config.perturbation = 0.1;
    return true;  // documented fallback: no gradient signal in any probe
  }
  config.step_amplitude =
      config.target_step * std::pow(1.0 + config.stability, config.step_decay) / mean_g;
  return false;
}

SpsaResult spsa_minimize(const Objective& objective, std::vector<double> theta0,
                         const SpsaConfig& config,
                         const std::function<void(std::vector<double>&)>& post_update) {
  SpsaResult result;
  if (config.iterations == 0) {
    result.best_smoothed = objective(theta0, 0);
    result.evaluations = 1;
    result.best_parameters = std::move(theta0);
    result.trace.emplace_back(0, result.best_smoothed);
    return result;
  }
  config.validate();

  const std::size_t n = theta0.size();
  const int stride = config.trace_stride > 0
                         ? config.trace_stride
                         : std::max(1, config.iterations / 1000);
  Rng rng(derive_seed(config.seed, 0x5b5aull));
  SmoothingWindow window(config.smoothing_window);

  std::vector<double> theta = std::move(theta0);
  std::vector<double> delta(n), probe(n);
  result.best_parameters = theta;
  result.best_smoothed = std::numeric_limits<double>::infinity();

  for (int k = 0; k < config.iterations; ++k) {
    const double ck = config.perturbation_at(k);
    const double ak = config.step_at(k);
    for (double& d : delta) d = rng.rademacher();

    for (std::size_t i = 0; i < n; ++i) probe[i] = theta[i] + ck * delta[i];
    const double fp = objective(probe, 2 * static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < n; ++i) probe[i] = theta[i] - ck * delta[i];
    const double fm = objective(probe, 2 * static_cast<std::uint64_t>(k) + 1);
    result.evaluations += 2;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("SPSA objective returned a non-finite value at iteration " +
                               std::to_string(k));

    window.push(fp);
    window.push(fm);
    const double smoothed = window.mean();
    if (smoothed < result.best_smoothed) {
      result.best_smoothed = smoothed;
      result.best_parameters = theta;  // iterate the probes straddled
    }
    if (k % stride == 0 || k + 1 == config.iterations)
      result.trace.emplace_back(k, smoothed);

    const double slope = (fp - fm) / (2.0 * ck);
    for (std::size_t i = 0; i < n; ++i) theta[i] -= ak * slope * delta[i];
    if (post_update) post_update(theta);
  }
  return result;
}

TrainedModel train_qvae(const CircuitEngine& engine, const StateVector& input,
                        int train_state_index, double train_energy, const TrainingConfig& config,
                        std::uint64_t member_seed) {
  const int n_params = config.circuit.parameter_count();

  Rng init_rng(derive_seed(member_seed, 0x1217ull));
  std::vector<double> theta0(static_cast<std::size_t>(n_params));
  for (double& t : theta0) t = init_rng.uniform(0.0, kTwoPi);

  const Objective objective = [&](const std::vector<double>& theta, std::uint64_t eval_id) {
    const std::uint64_t shot_seed = derive_seed(member_seed, 0x5407ull, eval_id);
    return engine
        .trash_cost(ParameterVector(theta), input, CostMode::Sampled, config.shots, shot_seed)
        .value;
  };

  SpsaConfig spsa = config.spsa;
  spsa.iterations = config.iterations;
  spsa.calibration_samples = config.calibration_samples;
  spsa.seed = member_seed;

  TrainedModel model;
  model.circuit = config.circuit;
  model.train_state_index = train_state_index;
  model.train_energy = train_energy;
  model.seed = member_seed;
  model.shots = config.shots;
  model.iterations = config.iterations;

  if (config.iterations > 0) model.calibration_fallback = calibrate_rates(objective, theta0, spsa);
  if (spsa.stability < 0.0) spsa.stability = 0.01 * static_cast<double>(spsa.iterations);
  model.spsa_a = spsa.step_amplitude;
  model.spsa_c = spsa.perturbation;
  model.spsa_stability = spsa.stability;

  SpsaResult result = spsa_minimize(objective, std::move(theta0), spsa);
  model.theta = ParameterVector(std::move(result.best_parameters)).values();
  model.final_cost = result.best_smoothed;
  model.cost_trace = std::move(result.trace);
  return model;
}

std::vector<TrainedModel> train_ensemble(const CircuitEngine& engine, const StateVector& input,
                                         int train_state_index, double train_energy,
                                         const TrainingConfig& config, int workers) {
  if (config.ensemble_size < 1) throw std::invalid_argument("ensemble needs at least one member");
  std::vector<TrainedModel> models(static_cast<std::size_t>(config.ensemble_size));
  parallel_for(
      models.size(),
      [&](std::size_t k) {
        models[k] = train_qvae(engine, input, train_state_index, train_energy, config,
                               config.seed_base + k);
      },
      workers);
  return models;
}

CostProfile evaluate_cost_profile(const CircuitEngine& engine,
                                  std::span<const TrainedModel> members,
                                  const Eigensystem& eigensystem,
                                  const std::function<StateVector(std::size_t)>& input_state,
                                  int workers) {
  if (members.empty()) throw std::invalid_argument("cost profile needs at least one model");
  const std::size_t dim = eigensystem.dim();

  CostProfile profile;
  profile.n_members = static_cast<int>(members.size());
  profile.n_trash = engine.spec().n_trash;
  profile.train_state_index = members.front().train_state_index;
  profile.energies.resize(dim);
  profile.mean_cost.resize(dim);
  profile.stderr_cost.resize(dim);
  if (eigensystem.entropies.size() == static_cast<Eigen::Index>(dim)) {
    profile.entropies.assign(eigensystem.entropies.data(), eigensystem.entropies.data() + dim);
  }

  std::vector<ParameterVector> thetas;
  thetas.reserve(members.size());
  for (const auto& m : members) thetas.emplace_back(m.theta);

  parallel_for(
      dim,
      [&](std::size_t j) {
        profile.energies[j] = eigensystem.energies[static_cast<Eigen::Index>(j)];
        const StateVector state = input_state(j);
        double mean = 0.0, m2 = 0.0;
        int count = 0;
        for (const auto& theta : thetas) {
          const double cost = engine.exact_cost(theta, state);
          ++count;
          const double d = cost - mean;
          mean += d / count;
          m2 += d * (cost - mean);
        }
        profile.mean_cost[j] = mean;
        profile.stderr_cost[j] =
            count > 1 ? std::sqrt(m2 / (count - 1) / static_cast<double>(count)) : 0.0;
      },
      workers);
  return profile;
}

DreamResult dream(const CircuitEngine& engine, std::span<const TrainedModel> ensemble,
                  const Basis& basis, const DreamConfig& config, int workers) {
  if (ensemble.empty()) throw std::invalid_argument("dreaming needs a non-empty ensemble");
  if (config.optimizations < 1) throw std::invalid_argument("need at least one optimization");
  const std::size_t dim = engine.dim();
  if (basis.size() != dim)
    throw std::invalid_argument("dream basis does not match the circuit dimension");

  std::vector<ParameterVector> thetas;
  thetas.reserve(ensemble.size());
  for (const auto& m : ensemble) thetas.emplace_back(m.theta);

  const auto normalize = [](std::vector<double>& v) {
    double norm2 = 0.0;
    for (const double x : v) norm2 += x * x;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  };

  DreamResult result;
  result.runs.resize(static_cast<std::size_t>(config.optimizations));

  parallel_for(
      result.runs.size(),
      [&](std::size_t run) {
        const std::uint64_t run_seed = derive_seed(config.seed, 0xd3ea3ull, run);
        Rng rng(run_seed);
        std::vector<double> v0(dim);
        for (double& x : v0) x = rng.gaussian();
        normalize(v0);

        StateVector scratch(dim);
        const Objective objective = [&](const std::vector<double>& v, std::uint64_t eval_id) {
          double norm2 = 0.0;
          for (const double x : v) norm2 += x * x;
          const double inv = 1.0 / std::sqrt(norm2);
          for (std::size_t j = 0; j < dim; ++j) scratch[j] = Amplitude{v[j] * inv, 0.0};
          double cost = 0.0;
          for (std::size_t m = 0; m < thetas.size(); ++m) {
            const std::uint64_t shot_seed = derive_seed(run_seed, eval_id, m);
            cost += engine
                        .trash_cost(thetas[m], scratch, CostMode::Sampled, config.shots, shot_seed)
                        .value;
          }
          return cost / static_cast<double>(thetas.size());
        };

        SpsaConfig spsa;
        spsa.iterations = config.steps;
        spsa.calibration_samples = config.calibration_samples;
        spsa.target_step = config.target_step;
        spsa.seed = run_seed;
        calibrate_rates(objective, v0, spsa);

        SpsaResult opt = spsa_minimize(objective, std::move(v0), spsa,
                                       [&](std::vector<double>& v) { normalize(v); });

        DreamState state;
        normalize(opt.best_parameters);
        state.amplitudes = Eigen::Map<const Eigen::VectorXd>(opt.best_parameters.data(),
                                                             static_cast<Eigen::Index>(dim));
        state.final_cost = opt.best_smoothed;
        state.trace = std::move(opt.trace);
        state.seed = run_seed;
        result.runs[run] = std::move(state);
      },
      workers);

  // site-resolved diagnostics averaged over the independent optimizations
  const int n = basis.n_sites();
  result.mean_magnetization = Eigen::VectorXd::Zero(n);
  result.q_grid.resize(static_cast<std::size_t>(n));
  result.mean_abs_structure_factor.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& run : result.runs) {
    const Eigen::VectorXd m = local_magnetization(run.amplitudes, basis);
    result.mean_magnetization += m / static_cast<double>(result.runs.size());
    for (int q = 0; q < n; ++q) {
      const double qv = kTwoPi * static_cast<double>(q) / static_cast<double>(n);
      result.q_grid[static_cast<std::size_t>(q)] = qv;
      result.mean_abs_structure_factor[static_cast<std::size_t>(q)] +=
          std::abs(structure_factor(m, qv)) / static_cast<double>(result.runs.size());
    }
  }
  return result;
}

}  // namespace scardet
