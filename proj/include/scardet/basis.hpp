#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "scardet/common.hpp"

namespace scardet {

enum class ConstraintKind { None, Rydberg, ThreeBody };
enum class Boundary { Periodic, Open };

struct ConstraintRule {
  ConstraintKind kind = ConstraintKind::None;
  Boundary boundary = Boundary::Periodic;

  bool operator==(const ConstraintRule&) const = default;
};

/// True when `bits` satisfies the occupation rule on an n-site chain:
/// Rydberg forbids adjacent up pairs, ThreeBody forbids three consecutive
/// up spins (both checked cyclically under periodic boundaries).
bool admissible(SpinWord bits, int n_sites, const ConstraintRule& rule);

/// Ordered set of admissible configurations of an n-site chain, sorted by the
/// integer value of the bit word. Immutable after construction.
class Basis {
 public:
  static Basis enumerate(int n_sites, const ConstraintRule& rule);

  /// All configurations of n_spins spin-1/2 sites with total S^z = sz_total
  /// (spin-1/2 units, i.e. (#up - #down)/2 = sz_total).
  static Basis magnetization_sector(int n_spins, int sz_total);

  int n_sites() const { return n_sites_; }
  const ConstraintRule& rule() const { return rule_; }
  std::optional<int> magnetization() const { return magnetization_; }

  std::size_t size() const { return states_.size(); }
  SpinWord state(std::size_t j) const { return states_[j]; }
  const std::vector<SpinWord>& states() const { return states_; }

  /// Ordinal of a member configuration; throws on non-members.
  std::size_t index_of(SpinWord c) const;
  std::optional<std::size_t> find(SpinWord c) const;
  bool contains(SpinWord c) const { return find(c).has_value(); }

  bool operator==(const Basis& other) const = default;

 private:
  Basis() = default;
  int n_sites_ = 0;
  ConstraintRule rule_;
  std::optional<int> magnetization_;
  std::vector<SpinWord> states_;
};

/// Number of admissible configurations without enumerating them; Rydberg with
/// periodic boundary follows the Lucas numbers.
std::uint64_t lucas_number(int n);

struct SymmetrySector {
  int momentum = 0;   // only k = 0 is supported
  int inversion = 1;  // only +1 is supported
  std::optional<int> magnetization;
};

/// Translation + inversion reduction of a periodic basis at k = 0, even
/// parity. Every group orbit carries exactly one symmetric state
///   |o> = |O|^{-1/2} sum_{c in O} |c>,
/// so the sector dimension equals the orbit count.
class SymmetryBasis {
 public:
  static SymmetryBasis build(std::shared_ptr<const Basis> parent, const SymmetrySector& sector);

  std::size_t dim() const { return rep_index_.size(); }
  const Basis& parent() const { return *parent_; }
  std::shared_ptr<const Basis> parent_ptr() const { return parent_; }
  const SymmetrySector& sector() const { return sector_; }

  SpinWord representative(std::size_t o) const { return parent_->state(rep_index_[o]); }
  std::uint32_t orbit_size(std::size_t o) const { return orbit_size_[o]; }
  /// Orbit id of a full-basis state index.
  std::uint32_t orbit_of(std::size_t full_index) const { return orbit_of_[full_index]; }

  /// Lifts a sector vector to the full basis; preserves the norm.
  Eigen::VectorXd expand_to_full(const Eigen::VectorXd& v) const;

  /// Adjoint of expand_to_full; the round trip is the identity on symmetric
  /// vectors.
  Eigen::VectorXd project_from_full(const Eigen::VectorXd& full) const;

 private:
  std::shared_ptr<const Basis> parent_;
  SymmetrySector sector_;
  std::vector<std::uint32_t> rep_index_;
  std::vector<std::uint32_t> orbit_size_;
  std::vector<std::uint32_t> orbit_of_;
};

/// Row/column coordinates of every basis state under a left/right bipartition.
/// Reshaping an amplitude vector by these maps gives the matrix whose singular
/// values square to the reduced density matrix spectrum.
struct BipartitionMap {
  std::vector<std::uint32_t> row_of, col_of;        // per basis state
  std::vector<SpinWord> row_patterns, col_patterns; // sorted sub-configurations
  std::size_t rows() const { return row_patterns.size(); }
  std::size_t cols() const { return col_patterns.size(); }
};

BipartitionMap bipartition_maps(const Basis& basis, const std::vector<int>& left_sites);

}  // namespace scardet
