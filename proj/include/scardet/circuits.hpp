#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "scardet/basis.hpp"

namespace scardet {

using Amplitude = std::complex<double>;
using StateVector = std::vector<Amplitude>;

/// Alternating Layered Ansatz. Each layer rotates every qubit, then entangles
/// disjoint neighbor pairs; the pairing alternates in a checkerboard between
/// layers and never wraps around. The constrained variant swaps Ry -> R~y and
/// CZ -> E, acting natively on a blockade-constrained basis.
struct CircuitSpec {
  int n_qubits = 0;
  int layers = 0;
  bool constrained = false;
  int n_trash = 0;
  /// 0: layer 1 entangles (0,1),(2,3),...; 1: layer 1 starts at (1,2).
  int pattern_parity = 0;

  int parameter_count() const { return n_qubits * layers; }
  /// First qubit of the entangler pairs in 0-based layer l.
  int pair_offset(int layer) const { return (layer + pattern_parity) % 2; }
  /// Trash qubits are the last n_trash sites.
  int first_trash() const { return n_qubits - n_trash; }

  void validate() const;
};

/// True when every trash qubit lies in the causal cone of qubit 0 under the
/// alternating pattern, using the actual gate footprints (3- and 4-site for
/// the constrained gates).
bool trash_in_light_cone(const CircuitSpec& spec);

/// Angles in [0, 2 pi), layer-major then qubit-ascending; values are reduced
/// mod 2 pi on ingest.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> raw);

  std::size_t size() const { return theta_.size(); }
  double operator[](std::size_t i) const { return theta_[i]; }
  const std::vector<double>& values() const { return theta_; }

 private:
  std::vector<double> theta_;
};

enum class CostMode { Exact, Sampled };

struct CostSample {
  double value = 0.0;  // mean number of trash qubits read as '1' per shot
  int shots = 0;
  CostMode mode = CostMode::Exact;
  std::uint64_t rng_seed = 0;
};

// Small gate matrices, mostly for oracle tests and bindings. Row/column
// ordering of the constrained gates follows the neighborhood bases
//   R~y: {|000>, |010>, |001>, |100>, |101>}   (qubits i-1, i, i+1)
//   E:   {|0000>, |0010>, |0100>, |0001>, |0101>, |1000>, |1010>}
// with the |1001> neighborhood state (also admissible) acted on as identity.
Eigen::Matrix2d ry_gate(double theta);
Eigen::MatrixXd rtilde_gate(double theta);
Eigen::Matrix4d cz_gate();
Eigen::MatrixXd e_gate();

/// Exact state-vector simulator for one CircuitSpec. Generic circuits act on
/// all 2^n computational amplitudes (index bit q = qubit q); constrained
/// circuits act on amplitudes over the provided basis and never create
/// support outside it.
class CircuitEngine {
 public:
  explicit CircuitEngine(const CircuitSpec& spec);                            // generic
  CircuitEngine(const CircuitSpec& spec, std::shared_ptr<const Basis> basis); // constrained

  const CircuitSpec& spec() const { return spec_; }
  std::size_t dim() const { return dim_; }
  const Basis* basis() const { return basis_.get(); }

  void apply(const ParameterVector& theta, StateVector& state) const;
  void apply_adjoint(const ParameterVector& theta, StateVector& state) const;

  /// Expected number of trash qubits measured as '1'.
  double exact_cost(const StateVector& state) const;
  double exact_cost(const ParameterVector& theta, const StateVector& state) const;
  /// Shot variance of the trash-ones count in a single measurement.
  double trash_ones_variance(const StateVector& state) const;

  CostSample trash_cost(const ParameterVector& theta, const StateVector& state, CostMode mode,
                        int shots = 0, std::uint64_t seed = 0) const;

  struct Fidelity {
    double value = 0.0;
    bool projected_to_zero = false;
  };
  /// |<state| U^dag P0 U |state>| with the trash-projected vector renormalized
  /// before decoding; flags inputs whose encoded state has no trash-zero
  /// component.
  Fidelity reconstruction_fidelity(const ParameterVector& theta, const StateVector& state) const;

  /// Dense matrix of the whole circuit, built column by column (test oracle).
  Eigen::MatrixXcd dense_unitary(const ParameterVector& theta) const;

 private:
  void check_state(const StateVector& state) const;
  void apply_schedule(const ParameterVector& theta, StateVector& state, bool adjoint) const;
  void apply_rotation(int site, double theta, StateVector& state) const;
  void apply_entangler(int site, StateVector& state) const;

  CircuitSpec spec_;
  std::shared_ptr<const Basis> basis_;  // null for generic circuits
  std::size_t dim_ = 0;

  using IndexPair = std::pair<std::uint32_t, std::uint32_t>;
  std::vector<std::vector<IndexPair>> rot_pairs_;  // per site: (bit=0, bit=1)
  std::vector<std::vector<IndexPair>> ent_pairs_;  // per bond: (01, 10)
};

/// Lifts a real amplitude vector over a constrained basis into the 2^n
/// computational space of a generic circuit.
StateVector embed_in_computational_basis(const Basis& basis, const Eigen::VectorXd& v,
                                         int n_qubits);

/// Complex copy of a real vector (native constrained-circuit input).
StateVector to_state_vector(const Eigen::VectorXd& v);

/// |amplitudes|^2-weighted per-site magnetization of a constrained state.
Eigen::VectorXd state_magnetization(const StateVector& state, const Basis& basis);

}  // namespace scardet
