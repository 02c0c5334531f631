#include "scardet/basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace scardet {

bool admissible(SpinWord bits, int n_sites, const ConstraintRule& rule) {
  switch (rule.kind) {
    case ConstraintKind::None:
      return true;
    case ConstraintKind::Rydberg: {
      const int last = rule.boundary == Boundary::Periodic ? n_sites : n_sites - 1;
      for (int i = 0; i < last; ++i)
        if (get_bit(bits, i) && get_bit(bits, (i + 1) % n_sites)) return false;
      return true;
    }
    case ConstraintKind::ThreeBody: {
      const int last = rule.boundary == Boundary::Periodic ? n_sites : n_sites - 2;
      for (int i = 0; i < last; ++i)
        if (get_bit(bits, i) && get_bit(bits, (i + 1) % n_sites) &&
            get_bit(bits, (i + 2) % n_sites))
          return false;
      return true;
    }
  }
  return false;
}

Basis Basis::enumerate(int n_sites, const ConstraintRule& rule) {
  if (n_sites < 1 || n_sites > 30)
    throw std::invalid_argument("basis enumeration supports 1 <= N <= 30 sites");
  if (rule.kind != ConstraintKind::None && rule.boundary == Boundary::Periodic && n_sites < 3)
    throw std::invalid_argument("cyclic constraint rules need at least 3 sites");

  Basis b;
  b.n_sites_ = n_sites;
  b.rule_ = rule;
  const SpinWord end = SpinWord{1} << n_sites;
  for (SpinWord w = 0; w < end; ++w)
    if (admissible(w, n_sites, rule)) b.states_.push_back(w);
  return b;  // ascending by construction
}

Basis Basis::magnetization_sector(int n_spins, int sz_total) {
  if (n_spins < 1 || n_spins > 30) throw std::invalid_argument("unsupported spin count");
  if ((n_spins + 2 * sz_total) % 2 != 0 || std::abs(2 * sz_total) > n_spins)
    throw std::invalid_argument("magnetization incompatible with the spin count");
  const int n_up = (n_spins + 2 * sz_total) / 2;

  Basis b;
  b.n_sites_ = n_spins;
  b.rule_ = ConstraintRule{ConstraintKind::None, Boundary::Open};
  b.magnetization_ = sz_total;
  const SpinWord end = SpinWord{1} << n_spins;
  for (SpinWord w = 0; w < end; ++w)
    if (popcount(w) == n_up) b.states_.push_back(w);
  return b;
}

std::optional<std::size_t> Basis::find(SpinWord c) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), c);
  if (it == states_.end() || *it != c) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t Basis::index_of(SpinWord c) const {
  const auto idx = find(c);
  if (!idx)
    throw std::out_of_range("configuration " + word_to_string(c, n_sites_) +
                            " is not a member of the basis");
  return *idx;
}

std::uint64_t lucas_number(int n) {
  if (n < 1) throw std::invalid_argument("lucas_number needs n >= 1");
  std::uint64_t a = 2, b = 1;  // L(0), L(1)
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return a;
}

SymmetryBasis SymmetryBasis::build(std::shared_ptr<const Basis> parent,
                                   const SymmetrySector& sector) {
  if (!parent) throw std::invalid_argument("null parent basis");
  if (sector.momentum != 0 || sector.inversion != 1)
    throw std::invalid_argument("only the (k = 0, inversion +1) sector is supported");
  if (sector.magnetization)
    throw std::invalid_argument("momentum/inversion reduction of a magnetization sector "
                                "is not supported");
  if (parent->rule().boundary != Boundary::Periodic)
    throw std::invalid_argument("symmetry reduction needs a periodic basis");

  const int n = parent->n_sites();
  const std::size_t dim = parent->size();
  SymmetryBasis sym;
  sym.parent_ = std::move(parent);
  sym.sector_ = sector;
  sym.orbit_of_.assign(dim, 0);

  constexpr std::uint32_t kUnassigned = 0xffffffffu;
  std::vector<std::uint32_t> assigned(dim, kUnassigned);
  std::vector<SpinWord> orbit;  // scratch
  for (std::size_t j = 0; j < dim; ++j) {
    if (assigned[j] != kUnassigned) {
      sym.orbit_of_[j] = assigned[j];
      continue;
    }
    // States are visited in canonical order, so j is the orbit representative.
    const auto orbit_id = static_cast<std::uint32_t>(sym.rep_index_.size());
    const SpinWord rep = sym.parent_->state(j);
    orbit.clear();
    for (int r = 0; r < n; ++r) {
      orbit.push_back(rotate_sites(rep, n, r));
      orbit.push_back(rotate_sites(reflect_sites(rep, n), n, r));
    }
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    for (const SpinWord member : orbit) {
      const std::size_t idx = sym.parent_->index_of(member);
      assigned[idx] = orbit_id;
    }
    sym.rep_index_.push_back(static_cast<std::uint32_t>(j));
    sym.orbit_size_.push_back(static_cast<std::uint32_t>(orbit.size()));
    sym.orbit_of_[j] = orbit_id;
  }
  return sym;
}

Eigen::VectorXd SymmetryBasis::expand_to_full(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != dim())
    throw std::invalid_argument("sector vector dimension mismatch");
  Eigen::VectorXd full(static_cast<Eigen::Index>(parent_->size()));
  for (std::size_t c = 0; c < parent_->size(); ++c) {
    const std::uint32_t o = orbit_of_[c];
    full[static_cast<Eigen::Index>(c)] =
        v[static_cast<Eigen::Index>(o)] / std::sqrt(static_cast<double>(orbit_size_[o]));
  }
  return full;
}

Eigen::VectorXd SymmetryBasis::project_from_full(const Eigen::VectorXd& full) const {
  if (static_cast<std::size_t>(full.size()) != parent_->size())
    throw std::invalid_argument("full vector dimension mismatch");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t c = 0; c < parent_->size(); ++c) {
    const std::uint32_t o = orbit_of_[c];
    v[static_cast<Eigen::Index>(o)] +=
        full[static_cast<Eigen::Index>(c)] / std::sqrt(static_cast<double>(orbit_size_[o]));
  }
  return v;
}

BipartitionMap bipartition_maps(const Basis& basis, const std::vector<int>& left_sites) {
  if (left_sites.empty()) throw std::invalid_argument("empty left block");
  std::vector<bool> is_left(static_cast<std::size_t>(basis.n_sites()), false);
  for (const int s : left_sites) {
    if (s < 0 || s >= basis.n_sites()) throw std::out_of_range("bipartition site out of range");
    is_left[static_cast<std::size_t>(s)] = true;
  }

  const int n = basis.n_sites();
  auto split = [&](SpinWord c) {
    SpinWord left = 0, right = 0;
    int li = 0, ri = 0;
    for (int s = 0; s < n; ++s) {
      if (is_left[static_cast<std::size_t>(s)])
        left |= SpinWord(get_bit(c, s)) << li++;
      else
        right |= SpinWord(get_bit(c, s)) << ri++;
    }
    return std::pair<SpinWord, SpinWord>{left, right};
  };

  BipartitionMap map;
  map.row_patterns.reserve(basis.size());
  map.col_patterns.reserve(basis.size());
  for (const SpinWord c : basis.states()) {
    const auto [l, r] = split(c);
    map.row_patterns.push_back(l);
    map.col_patterns.push_back(r);
  }
  auto dedupe = [](std::vector<SpinWord>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(map.row_patterns);
  dedupe(map.col_patterns);

  auto ordinal = [](const std::vector<SpinWord>& v, SpinWord x) {
    return static_cast<std::uint32_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  map.row_of.reserve(basis.size());
  map.col_of.reserve(basis.size());
  for (const SpinWord c : basis.states()) {
    const auto [l, r] = split(c);
    map.row_of.push_back(ordinal(map.row_patterns, l));
    map.col_of.push_back(ordinal(map.col_patterns, r));
  }
  return map;
}

}  // namespace scardet
