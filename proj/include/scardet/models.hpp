#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "scardet/basis.hpp"

namespace scardet {

enum class Model { PXP, PXP3, Ladder };

struct HamiltonianSpec {
  Model model = Model::PXP;
  int n_sites = 0;  // chain sites for PXP/PXP3, rungs for the ladder

  // Ladder couplings; leg bonds run over k = 1..N-1 (open along the legs).
  double coupling_j = 1.0;
  double disorder_width = 0.1;
  std::vector<double> delta;  // per-rung anisotropy, empty = all ones
  std::uint64_t disorder_seed = 0;

  /// Constraint rule of the chain models.
  ConstraintRule basis_rule() const;
  /// Total spin count: n_sites for chains, 2*n_sites for the ladder.
  int spin_count() const { return model == Model::Ladder ? 2 * n_sites : n_sites; }
};

/// Per-rung longitudinal fields, drawn uniformly from [-h, h] with the
/// documented mt19937_64 / 53-bit-uniform stream seeded by disorder_seed.
struct LadderFields {
  std::vector<double> h_k;
};

LadderFields draw_ladder_fields(const HamiltonianSpec& spec);

/// Ladder-to-chain embedding: rung k occupies circuit sites (2k, 2k+1) with
/// the right leg (tau) on the even site and the left leg (sigma) on the odd
/// site, so neighboring ladder spins stay close on the chain.
inline int ladder_site(int rung, bool left_leg) { return 2 * rung + (left_leg ? 1 : 0); }

/// Generates the sparse action H|c> as (target, amplitude) pairs. Chain
/// models are pure off-diagonal flip operators; the ladder also emits a
/// diagonal entry. Targets outside the model's constrained basis must be
/// dropped by the caller (the dense builders below do).
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(HamiltonianSpec spec, LadderFields fields = {});

  const HamiltonianSpec& spec() const { return spec_; }
  const LadderFields& fields() const { return fields_; }

  void apply(SpinWord c, std::vector<std::pair<SpinWord, double>>& out) const;

 private:
  HamiltonianSpec spec_;
  LadderFields fields_;
  std::vector<double> delta_;
};

/// Dense matrix in the given basis; the basis kind must match the model.
Eigen::MatrixXd build_dense(const HamiltonianOperator& op, const Basis& basis);

Eigen::MatrixXd build_pxp(const Basis& rydberg_basis);
Eigen::MatrixXd build_pxp3(const Basis& three_body_basis);
Eigen::MatrixXd build_ladder(const HamiltonianSpec& spec, const LadderFields& fields,
                             const Basis& magnetization_basis);

/// Dense matrix in the (k=0, inversion +1) sector. For orbits O1, O2 with
/// normalized symmetric states the matrix element is
///   <o1|H|o2> = sqrt(|O1|/|O2|) * sum_{c in O2} <rep(o1)|H|c>,
/// accumulated from the sparse action on each representative.
Eigen::MatrixXd build_sector_dense(const HamiltonianOperator& op, const SymmetryBasis& sym);

/// Matrix-free action on a block of column vectors in the given basis.
Eigen::MatrixXd apply_operator(const HamiltonianOperator& op, const Basis& basis,
                               const Eigen::MatrixXd& v);

/// Single bare leg-coupling term h^{||}_{k,k+1} (both legs, no 1/4 prefactor)
/// applied to a vector in the magnetization basis.
Eigen::VectorXd apply_leg_coupling(const Basis& basis, int rung_k, const Eigen::VectorXd& v);

struct Eigensystem {
  HamiltonianSpec spec;
  SymmetrySector sector;
  LadderFields fields;
  Eigen::VectorXd energies;   // ascending
  Eigen::MatrixXd vectors;    // orthonormal columns, sign-fixed
  Eigen::VectorXd entropies;  // empty until computed

  std::size_t dim() const { return static_cast<std::size_t>(energies.size()); }
};

/// Full dense symmetric eigendecomposition (LAPACK dsyevd). Eigenvectors get
/// the sign convention that their first amplitude above 1e-10 is positive.
Eigensystem diagonalize(const Eigen::MatrixXd& h, std::size_t dimension_cap = 20000);

/// Bipartite entanglement entropy -sum_k lambda_k ln(lambda_k) of the reduced
/// density matrix spectrum {lambda_k}; v lives in the basis that `map` was
/// built from and must be normalized.
double entanglement_entropy(const Eigen::VectorXd& v, const BipartitionMap& map);
double entanglement_entropy(const Eigen::VectorXd& v, const Basis& basis,
                            const std::vector<int>& left_sites);

/// Fills eigensystem.entropies for all eigenstates; sector eigenvectors are
/// expanded through `sym` first when it is non-null.
void compute_entropies(Eigensystem& es, const Basis& basis, const SymmetryBasis* sym,
                       const std::vector<int>& left_sites, int workers = 0);

/// P = sum_j |<v|f_j>|^2 for a set of Fock configurations.
double fock_family_probability(const Eigen::VectorXd& v_full, const Basis& basis,
                               const std::vector<SpinWord>& focks);

/// Per-site <sigma^z> with |1> -> +1.
Eigen::VectorXd local_magnetization(const Eigen::VectorXd& v_full, const Basis& basis);

/// S(q) = sum_j exp(i q j) m_j (plain, un-normalized Fourier sum).
std::complex<double> structure_factor(const Eigen::VectorXd& magnetization, double q);

struct PatternLabel {
  std::string label;           // canonical gap string, e.g. "2-2-3-2-3-3-3-3-3"
  std::vector<int> gaps;       // canonical rotation of the cyclic gap sequence
  std::array<int, 4> counts;   // occurrences of gaps 2, 3, 4, 5
};

/// Cyclic gaps between consecutive up spins, reported from the
/// lexicographically smallest rotation of the gap sequence.
PatternLabel fock_pattern_label(SpinWord config, int n_sites);

/// Canonical translation+inversion orbit representative (smallest word).
SpinWord orbit_representative(SpinWord config, int n_sites);

// ---------------------------------------------------------------------------
// Spin-ladder invariant subspaces: alternating singlet/triplet backgrounds
// with r inserted holons or doublons span exact C(N, r)-dimensional invariant
// subspaces of the ladder Hamiltonian.
// ---------------------------------------------------------------------------

enum class InsertionSpecies { Holon, Doublon };
enum class BackgroundPhase { SingletFirst, TripletFirst };

/// Product state of single-rung letters over {S, T, D, H} expressed in the
/// matching magnetization basis. First letter = rung 0.
Eigen::VectorXd letter_product_state(const std::string& letters, const Basis& basis);

/// Total S^z (spin-1/2 units) of a letter string: +1 per H, -1 per D.
int letter_string_magnetization(const std::string& letters);

struct InvariantSubspace {
  InsertionSpecies species = InsertionSpecies::Holon;
  BackgroundPhase phase = BackgroundPhase::SingletFirst;
  int insertions = 0;
  std::vector<std::string> members;  // letter strings
  Eigen::MatrixXd vectors;           // orthonormal columns in the magnetization basis
};

InvariantSubspace enumerate_invariant_subspace(int n_rungs, InsertionSpecies species, int r,
                                               BackgroundPhase phase, const Basis& basis);

/// Largest singular value of (1 - P) H P where P projects onto the column
/// span of an orthonormal block V, computed as sigma_max(HV - V (V^T H V)).
double invariance_residual(const HamiltonianOperator& op, const Basis& basis,
                           const Eigen::MatrixXd& v);

}  // namespace scardet
