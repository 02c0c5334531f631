#include "scardet/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace scardet {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

void CircuitSpec::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
  if (constrained && n_qubits < 3)
    throw std::invalid_argument("constrained circuits need at least 3 qubits");
  if (layers < 0) throw std::invalid_argument("negative layer count");
  if (n_trash < 0 || n_trash > n_qubits)
    throw std::invalid_argument("trash qubit count out of range");
  if (pattern_parity != 0 && pattern_parity != 1)
    throw std::invalid_argument("pattern parity must be 0 or 1");
}

bool trash_in_light_cone(const CircuitSpec& spec) {
  spec.validate();
  if (spec.n_trash == 0) return true;
  const int n = spec.n_qubits;
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  reach[0] = true;
  auto absorb = [&](const std::vector<int>& support) {
    bool touches = false;
    for (const int q : support)
      if (reach[static_cast<std::size_t>(q)]) touches = true;
    if (touches)
      for (const int q : support) reach[static_cast<std::size_t>(q)] = true;
  };
  for (int l = 0; l < spec.layers; ++l) {
    for (int q = 0; q < n; ++q) {
      if (spec.constrained)
        absorb({(q + n - 1) % n, q, (q + 1) % n});
      else
        absorb({q});
    }
    for (int i = spec.pair_offset(l); i + 1 < n; i += 2) {
      if (spec.constrained)
        absorb({(i + n - 1) % n, i, i + 1, (i + 2) % n});
      else
        absorb({i, i + 1});
    }
  }
  for (int q = spec.first_trash(); q < n; ++q)
    if (!reach[static_cast<std::size_t>(q)]) return false;
  return true;
}

ParameterVector::ParameterVector(std::vector<double> raw) : theta_(std::move(raw)) {
  for (double& t : theta_) t = wrap_angle(t);
}

Eigen::Matrix2d ry_gate(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2d m;
  m << c, -s, s, c;
  return m;
}

Eigen::MatrixXd rtilde_gate(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
  m(0, 0) = c;
  m(0, 1) = s;
  m(1, 0) = -s;
  m(1, 1) = c;
  return m;
}

Eigen::Matrix4d cz_gate() {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(3, 3) = -1.0;
  return m;
}

Eigen::MatrixXd e_gate() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(7, 7);
  m(1, 1) = r;
  m(1, 2) = r;
  m(2, 1) = r;
  m(2, 2) = -r;
  return m;
}

CircuitEngine::CircuitEngine(const CircuitSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.constrained)
    throw std::invalid_argument("constrained circuits need a basis");
  if (spec_.n_qubits > 26) throw std::invalid_argument("generic simulator caps at 26 qubits");
  dim_ = std::size_t{1} << spec_.n_qubits;
  if (!trash_in_light_cone(spec_))
    std::cerr << "[scardet] warning: " << spec_.layers
              << " layers leave trash qubits outside the light cone of qubit 0\n";
}

CircuitEngine::CircuitEngine(const CircuitSpec& spec, std::shared_ptr<const Basis> basis)
    : spec_(spec), basis_(std::move(basis)) {
  spec_.validate();
  if (!spec_.constrained)
    throw std::invalid_argument("generic circuits take no basis");
  if (!basis_) throw std::invalid_argument("null basis");
  if (basis_->n_sites() != spec_.n_qubits)
    throw std::invalid_argument("basis size does not match the qubit count");
  if (basis_->rule().boundary != Boundary::Periodic)
    throw std::invalid_argument("constrained gates use cyclic neighborhoods; basis must be "
                                "periodic");
  dim_ = basis_->size();

  const int n = spec_.n_qubits;
  rot_pairs_.resize(static_cast<std::size_t>(n));
  ent_pairs_.resize(static_cast<std::size_t>(n > 1 ? n - 1 : 0));
  for (std::size_t j = 0; j < dim_; ++j) {
    const SpinWord c = basis_->state(j);
    for (int i = 0; i < n; ++i) {
      const int left = (i + n - 1) % n, right = (i + 1) % n;
      if (get_bit(c, i) == 0 && get_bit(c, left) == 0 && get_bit(c, right) == 0) {
        // flipping a site whose neighbors are down stays inside the basis
        const std::size_t partner = basis_->index_of(flip_bit(c, i));
        rot_pairs_[static_cast<std::size_t>(i)].emplace_back(static_cast<std::uint32_t>(j),
                                                             static_cast<std::uint32_t>(partner));
      }
    }
    for (int i = 0; i + 1 < n; ++i) {
      const int left = (i + n - 1) % n, right = (i + 2) % n;
      if (get_bit(c, left) == 0 && get_bit(c, right) == 0 && get_bit(c, i) == 0 &&
          get_bit(c, i + 1) == 1) {
        const std::size_t partner = basis_->index_of(swap_bits(c, i, i + 1));
        ent_pairs_[static_cast<std::size_t>(i)].emplace_back(static_cast<std::uint32_t>(j),
                                                             static_cast<std::uint32_t>(partner));
      }
    }
  }
  if (!trash_in_light_cone(spec_))
    std::cerr << "[scardet] warning: " << spec_.layers
              << " layers leave trash qubits outside the light cone of qubit 0\n";
}

void CircuitEngine::check_state(const StateVector& state) const {
  if (state.size() != dim_)
    throw std::invalid_argument("state dimension " + std::to_string(state.size()) +
                                " does not match the circuit dimension " + std::to_string(dim_));
}

void CircuitEngine::apply_rotation(int site, double theta, StateVector& state) const {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  if (spec_.constrained) {
    // S1 block [[c, s], [-s, c]] on {|0>, |1>} of the site, identity elsewhere
    for (const auto& [lo, hi] : rot_pairs_[static_cast<std::size_t>(site)]) {
      const Amplitude a0 = state[lo], a1 = state[hi];
      state[lo] = c * a0 + s * a1;
      state[hi] = -s * a0 + c * a1;
    }
    return;
  }
  const std::size_t mask = std::size_t{1} << site;
  for (std::size_t base = 0; base < dim_; base += 2 * mask) {
    for (std::size_t off = 0; off < mask; ++off) {
      const std::size_t i = base + off, j = i + mask;
      const Amplitude a0 = state[i], a1 = state[j];
      state[i] = c * a0 - s * a1;
      state[j] = s * a0 + c * a1;
    }
  }
}

void CircuitEngine::apply_entangler(int site, StateVector& state) const {
  if (spec_.constrained) {
    static const double r = 1.0 / std::sqrt(2.0);
    for (const auto& [i01, i10] : ent_pairs_[static_cast<std::size_t>(site)]) {
      const Amplitude a = state[i01], b = state[i10];
      state[i01] = r * (a + b);
      state[i10] = r * (a - b);
    }
    return;
  }
  const std::size_t both = (std::size_t{1} << site) | (std::size_t{1} << (site + 1));
  for (std::size_t i = 0; i < dim_; ++i)
    if ((i & both) == both) state[i] = -state[i];
}

void CircuitEngine::apply_schedule(const ParameterVector& theta, StateVector& state,
                                   bool adjoint) const {
  if (theta.size() != static_cast<std::size_t>(spec_.parameter_count()))
    throw std::invalid_argument("parameter count mismatch");
  const int n = spec_.n_qubits;
  if (!adjoint) {
    for (int l = 0; l < spec_.layers; ++l) {
      for (int q = 0; q < n; ++q)
        apply_rotation(q, theta[static_cast<std::size_t>(l * n + q)], state);
      for (int i = spec_.pair_offset(l); i + 1 < n; i += 2) apply_entangler(i, state);
    }
    return;
  }
  for (int l = spec_.layers - 1; l >= 0; --l) {
    // entanglers are involutions; rotations invert by negating the angle
    std::vector<int> bonds;
    for (int i = spec_.pair_offset(l); i + 1 < n; i += 2) bonds.push_back(i);
    for (auto it = bonds.rbegin(); it != bonds.rend(); ++it) apply_entangler(*it, state);
    for (int q = n - 1; q >= 0; --q)
      apply_rotation(q, -theta[static_cast<std::size_t>(l * n + q)], state);
  }
}

void CircuitEngine::apply(const ParameterVector& theta, StateVector& state) const {
  check_state(state);
  apply_schedule(theta, state, false);
}

void CircuitEngine::apply_adjoint(const ParameterVector& theta, StateVector& state) const {
  check_state(state);
  apply_schedule(theta, state, true);
}

double CircuitEngine::exact_cost(const StateVector& state) const {
  check_state(state);
  const SpinWord mask = (word_mask(spec_.n_trash)) << spec_.first_trash();
  double cost = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const SpinWord c = basis_ ? basis_->state(j) : static_cast<SpinWord>(j);
    cost += static_cast<double>(popcount(c & mask)) * std::norm(state[j]);
  }
  return cost;
}

namespace {
// per-thread work buffers for the hot evaluation paths
StateVector& state_scratch(const StateVector& source) {
  thread_local StateVector buffer;
  buffer.assign(source.begin(), source.end());
  return buffer;
}
}  // namespace

double CircuitEngine::exact_cost(const ParameterVector& theta, const StateVector& state) const {
  StateVector& out = state_scratch(state);
  apply(theta, out);
  return exact_cost(out);
}

double CircuitEngine::trash_ones_variance(const StateVector& state) const {
  check_state(state);
  const SpinWord mask = (word_mask(spec_.n_trash)) << spec_.first_trash();
  double mean = 0.0, second = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const SpinWord c = basis_ ? basis_->state(j) : static_cast<SpinWord>(j);
    const double k = static_cast<double>(popcount(c & mask));
    const double p = std::norm(state[j]);
    mean += k * p;
    second += k * k * p;
  }
  return std::max(0.0, second - mean * mean);
}

CostSample CircuitEngine::trash_cost(const ParameterVector& theta, const StateVector& state,
                                     CostMode mode, int shots, std::uint64_t seed) const {
  check_state(state);
  StateVector& out = state_scratch(state);
  apply(theta, out);

  CostSample sample;
  sample.mode = mode;
  if (mode == CostMode::Exact) {
    sample.value = exact_cost(out);
    return sample;
  }
  if (shots <= 0) throw std::invalid_argument("sampled cost needs shots > 0");
  sample.shots = shots;
  sample.rng_seed = seed;

  // whole-configuration samples so shot noise is correlated across trash bits
  thread_local std::vector<double> cdf;
  cdf.resize(dim_);
  double acc = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    acc += std::norm(out[j]);
    cdf[j] = acc;
  }
  const double total = cdf.back();
  const SpinWord mask = (word_mask(spec_.n_trash)) << spec_.first_trash();
  Rng rng(seed);
  std::uint64_t ones = 0;
  for (int shot = 0; shot < shots; ++shot) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t j = std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), dim_ - 1);
    const SpinWord c = basis_ ? basis_->state(j) : static_cast<SpinWord>(j);
    ones += static_cast<std::uint64_t>(popcount(c & mask));
  }
  sample.value = static_cast<double>(ones) / static_cast<double>(shots);
  return sample;
}

CircuitEngine::Fidelity CircuitEngine::reconstruction_fidelity(const ParameterVector& theta,
                                                               const StateVector& state) const {
  check_state(state);
  StateVector encoded = state;
  apply(theta, encoded);

  const SpinWord mask = (word_mask(spec_.n_trash)) << spec_.first_trash();
  double norm2 = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const SpinWord c = basis_ ? basis_->state(j) : static_cast<SpinWord>(j);
    if ((c & mask) != 0)
      encoded[j] = Amplitude{0.0, 0.0};
    else
      norm2 += std::norm(encoded[j]);
  }
  if (norm2 <= 0.0) return {0.0, true};
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : encoded) a *= inv;

  apply_adjoint(theta, encoded);
  Amplitude overlap{0.0, 0.0};
  for (std::size_t j = 0; j < dim_; ++j) overlap += std::conj(state[j]) * encoded[j];
  return {std::abs(overlap), false};
}

Eigen::MatrixXcd CircuitEngine::dense_unitary(const ParameterVector& theta) const {
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  StateVector col(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    std::fill(col.begin(), col.end(), Amplitude{0.0, 0.0});
    col[j] = Amplitude{1.0, 0.0};
    apply_schedule(theta, col, false);
    for (std::size_t i = 0; i < dim_; ++i)
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return u;
}

StateVector embed_in_computational_basis(const Basis& basis, const Eigen::VectorXd& v,
                                         int n_qubits) {
  if (basis.n_sites() != n_qubits)
    throw std::invalid_argument("basis does not match the qubit count");
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw std::invalid_argument("vector dimension mismatch");
  StateVector out(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
  for (std::size_t j = 0; j < basis.size(); ++j)
    out[basis.state(j)] = Amplitude{v[static_cast<Eigen::Index>(j)], 0.0};
  return out;
}

StateVector to_state_vector(const Eigen::VectorXd& v) {
  StateVector out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) out[static_cast<std::size_t>(j)] = Amplitude{v[j], 0.0};
  return out;
}

Eigen::VectorXd state_magnetization(const StateVector& state, const Basis& basis) {
  if (state.size() != basis.size()) throw std::invalid_argument("state dimension mismatch");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(basis.n_sites());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double w = std::norm(state[j]);
    const SpinWord c = basis.state(j);
    for (int i = 0; i < basis.n_sites(); ++i) m[i] += w * (get_bit(c, i) ? 1.0 : -1.0);
  }
  return m;
}

}  // namespace scardet
