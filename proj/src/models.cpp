#include "scardet/models.hpp"

#include <lapacke.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scardet {

namespace {

int spin_z(SpinWord c, int site) { return get_bit(c, site) ? 1 : -1; }

void check_basis_for_model(const HamiltonianSpec& spec, const Basis& basis) {
  switch (spec.model) {
    case Model::PXP:
      if (basis.rule().kind != ConstraintKind::Rydberg ||
          basis.rule().boundary != Boundary::Periodic || basis.n_sites() != spec.n_sites)
        throw std::invalid_argument("PXP requires the periodic Rydberg basis");
      break;
    case Model::PXP3:
      if (basis.rule().kind != ConstraintKind::ThreeBody ||
          basis.rule().boundary != Boundary::Periodic || basis.n_sites() != spec.n_sites)
        throw std::invalid_argument("PXP3 requires the periodic three-body basis");
      break;
    case Model::Ladder:
      if (!basis.magnetization() || basis.n_sites() != spec.spin_count())
        throw std::invalid_argument("the ladder requires a magnetization-sector basis");
      break;
  }
}

}  // namespace

ConstraintRule HamiltonianSpec::basis_rule() const {
  switch (model) {
    case Model::PXP:
      return {ConstraintKind::Rydberg, Boundary::Periodic};
    case Model::PXP3:
      return {ConstraintKind::ThreeBody, Boundary::Periodic};
    case Model::Ladder:
      return {ConstraintKind::None, Boundary::Open};
  }
  return {};
}

LadderFields draw_ladder_fields(const HamiltonianSpec& spec) {
  LadderFields fields;
  Rng rng(spec.disorder_seed);
  fields.h_k.resize(static_cast<std::size_t>(spec.n_sites));
  for (double& h : fields.h_k) h = rng.uniform(-spec.disorder_width, spec.disorder_width);
  return fields;
}

HamiltonianOperator::HamiltonianOperator(HamiltonianSpec spec, LadderFields fields)
    : spec_(std::move(spec)), fields_(std::move(fields)) {
  if (spec_.n_sites < 1) throw std::invalid_argument("hamiltonian needs at least one site");
  if (spec_.model == Model::Ladder) {
    if (fields_.h_k.empty()) fields_ = draw_ladder_fields(spec_);
    if (fields_.h_k.size() != static_cast<std::size_t>(spec_.n_sites))
      throw std::invalid_argument("disorder realization size mismatch");
    delta_ = spec_.delta;
    if (delta_.empty()) delta_.assign(static_cast<std::size_t>(spec_.n_sites), 1.0);
    if (delta_.size() != static_cast<std::size_t>(spec_.n_sites))
      throw std::invalid_argument("per-rung anisotropy size mismatch");
  } else if (spec_.n_sites < 3) {
    throw std::invalid_argument("cyclic chain models need at least 3 sites");
  }
}

void HamiltonianOperator::apply(SpinWord c, std::vector<std::pair<SpinWord, double>>& out) const {
  const int n = spec_.n_sites;
  switch (spec_.model) {
    case Model::PXP: {
      for (int i = 0; i < n; ++i) {
        const int left = (i + n - 1) % n, right = (i + 1) % n;
        if (get_bit(c, left) == 0 && get_bit(c, right) == 0) out.emplace_back(flip_bit(c, i), 1.0);
      }
      return;
    }
    case Model::PXP3: {
      // 1 - |111><111| on (i-1, i, i+1) evaluated in the flipped configuration.
      for (int i = 0; i < n; ++i) {
        const SpinWord f = flip_bit(c, i);
        const int left = (i + n - 1) % n, right = (i + 1) % n;
        if (!(get_bit(f, left) && get_bit(f, i) && get_bit(f, right))) out.emplace_back(f, 1.0);
      }
      return;
    }
    case Model::Ladder: {
      double diag = 0.0;
      for (int k = 0; k < n; ++k) {
        const int zs = spin_z(c, ladder_site(k, true));
        const int zt = spin_z(c, ladder_site(k, false));
        diag += 0.25 * (delta_[static_cast<std::size_t>(k)] * zs * zt +
                        fields_.h_k[static_cast<std::size_t>(k)] * (zs + zt));
        // rung flip-flop J(sx tx + sy ty)/4
        const int s = ladder_site(k, true), t = ladder_site(k, false);
        if (get_bit(c, s) != get_bit(c, t))
          out.emplace_back(swap_bits(c, s, t), 0.5 * spec_.coupling_j);
      }
      for (int k = 0; k + 1 < n; ++k) {
        for (const bool leg : {true, false}) {
          const int a = ladder_site(k, leg), b = ladder_site(k + 1, leg);
          if (get_bit(c, a) != get_bit(c, b)) out.emplace_back(swap_bits(c, a, b), 0.5);
        }
      }
      if (diag != 0.0) out.emplace_back(c, diag);
      return;
    }
  }
}

Eigen::MatrixXd build_dense(const HamiltonianOperator& op, const Basis& basis) {
  check_basis_for_model(op.spec(), basis);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<std::pair<SpinWord, double>> terms;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    terms.clear();
    op.apply(basis.state(col), terms);
    for (const auto& [target, amp] : terms) {
      const auto row = basis.find(target);
      if (row) h(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += amp;
    }
  }
  return h;
}

Eigen::MatrixXd build_pxp(const Basis& rydberg_basis) {
  HamiltonianSpec spec;
  spec.model = Model::PXP;
  spec.n_sites = rydberg_basis.n_sites();
  return build_dense(HamiltonianOperator(spec), rydberg_basis);
}

Eigen::MatrixXd build_pxp3(const Basis& three_body_basis) {
  HamiltonianSpec spec;
  spec.model = Model::PXP3;
  spec.n_sites = three_body_basis.n_sites();
  return build_dense(HamiltonianOperator(spec), three_body_basis);
}

Eigen::MatrixXd build_ladder(const HamiltonianSpec& spec, const LadderFields& fields,
                             const Basis& magnetization_basis) {
  return build_dense(HamiltonianOperator(spec, fields), magnetization_basis);
}

Eigen::MatrixXd build_sector_dense(const HamiltonianOperator& op, const SymmetryBasis& sym) {
  check_basis_for_model(op.spec(), sym.parent());
  const auto dim = static_cast<Eigen::Index>(sym.dim());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<std::pair<SpinWord, double>> terms;
  for (std::size_t o1 = 0; o1 < sym.dim(); ++o1) {
    terms.clear();
    op.apply(sym.representative(o1), terms);
    const double n1 = std::sqrt(static_cast<double>(sym.orbit_size(o1)));
    for (const auto& [target, amp] : terms) {
      const auto idx = sym.parent().find(target);
      if (!idx) continue;
      const std::uint32_t o2 = sym.orbit_of(*idx);
      h(static_cast<Eigen::Index>(o1), static_cast<Eigen::Index>(o2)) +=
          amp * n1 / std::sqrt(static_cast<double>(sym.orbit_size(o2)));
    }
  }
  return h;
}

Eigen::MatrixXd apply_operator(const HamiltonianOperator& op, const Basis& basis,
                               const Eigen::MatrixXd& v) {
  if (static_cast<std::size_t>(v.rows()) != basis.size())
    throw std::invalid_argument("vector dimension mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  std::vector<std::pair<SpinWord, double>> terms;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    terms.clear();
    op.apply(basis.state(col), terms);
    for (const auto& [target, amp] : terms) {
      const auto row = basis.find(target);
      if (row)
        out.row(static_cast<Eigen::Index>(*row)) += amp * v.row(static_cast<Eigen::Index>(col));
    }
  }
  return out;
}

Eigen::VectorXd apply_leg_coupling(const Basis& basis, int rung_k, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw std::invalid_argument("vector dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const SpinWord c = basis.state(j);
    for (const bool leg : {true, false}) {
      const int a = ladder_site(rung_k, leg), b = ladder_site(rung_k + 1, leg);
      if (get_bit(c, a) != get_bit(c, b)) {
        const std::size_t row = basis.index_of(swap_bits(c, a, b));
        out[static_cast<Eigen::Index>(row)] += 2.0 * v[static_cast<Eigen::Index>(j)];
      }
    }
  }
  return out;
}

Eigensystem diagonalize(const Eigen::MatrixXd& h, std::size_t dimension_cap) {
  if (h.rows() != h.cols()) throw std::invalid_argument("matrix must be square");
  const auto n = static_cast<std::size_t>(h.rows());
  if (n == 0) throw std::invalid_argument("empty matrix");
  if (n > dimension_cap)
    throw std::invalid_argument("matrix dimension " + std::to_string(n) +
                                " exceeds the dense-solver cap " + std::to_string(dimension_cap));

  Eigensystem es;
  es.vectors = h;
  es.energies.resize(h.rows());
  const auto info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                                   es.vectors.data(), static_cast<lapack_int>(n),
                                   es.energies.data());
  if (info != 0)
    throw std::runtime_error("dsyevd failed with info = " + std::to_string(info));

  // Degenerate-sign convention: first amplitude above 1e-10 made positive.
  for (Eigen::Index j = 0; j < es.vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < es.vectors.rows(); ++i) {
      const double x = es.vectors(i, j);
      if (std::abs(x) > 1e-10) {
        if (x < 0) es.vectors.col(j) = -es.vectors.col(j);
        break;
      }
    }
  }
  return es;
}

double entanglement_entropy(const Eigen::VectorXd& v, const BipartitionMap& map) {
  if (static_cast<std::size_t>(v.size()) != map.row_of.size())
    throw std::invalid_argument("vector dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("entanglement entropy needs a normalized state");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(map.rows()),
                                            static_cast<Eigen::Index>(map.cols()));
  for (std::size_t j = 0; j < map.row_of.size(); ++j)
    m(map.row_of[j], map.col_of[j]) = v[static_cast<Eigen::Index>(j)];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  double s = 0.0;
  for (const double sv : svd.singularValues()) {
    const double p = sv * sv;
    if (p > 1e-16) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

double entanglement_entropy(const Eigen::VectorXd& v, const Basis& basis,
                            const std::vector<int>& left_sites) {
  return entanglement_entropy(v, bipartition_maps(basis, left_sites));
}

void compute_entropies(Eigensystem& es, const Basis& basis, const SymmetryBasis* sym,
                       const std::vector<int>& left_sites, int workers) {
  const BipartitionMap map = bipartition_maps(basis, left_sites);
  es.entropies.resize(es.energies.size());
  parallel_for(
      es.dim(),
      [&](std::size_t j) {
        const Eigen::VectorXd full =
            sym ? sym->expand_to_full(es.vectors.col(static_cast<Eigen::Index>(j)))
                : Eigen::VectorXd(es.vectors.col(static_cast<Eigen::Index>(j)));
        es.entropies[static_cast<Eigen::Index>(j)] = entanglement_entropy(full, map);
      },
      workers);
}

double fock_family_probability(const Eigen::VectorXd& v_full, const Basis& basis,
                               const std::vector<SpinWord>& focks) {
  if (static_cast<std::size_t>(v_full.size()) != basis.size())
    throw std::invalid_argument("vector dimension mismatch");
  double p = 0.0;
  for (const SpinWord f : focks) {
    const double a = v_full[static_cast<Eigen::Index>(basis.index_of(f))];
    p += a * a;
  }
  return p;
}

Eigen::VectorXd local_magnetization(const Eigen::VectorXd& v_full, const Basis& basis) {
  if (static_cast<std::size_t>(v_full.size()) != basis.size())
    throw std::invalid_argument("vector dimension mismatch");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(basis.n_sites());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double w = v_full[static_cast<Eigen::Index>(j)] * v_full[static_cast<Eigen::Index>(j)];
    const SpinWord c = basis.state(j);
    for (int i = 0; i < basis.n_sites(); ++i) m[i] += w * spin_z(c, i);
  }
  return m;
}

std::complex<double> structure_factor(const Eigen::VectorXd& magnetization, double q) {
  std::complex<double> s{0.0, 0.0};
  for (Eigen::Index j = 0; j < magnetization.size(); ++j)
    s += std::exp(std::complex<double>(0.0, q * static_cast<double>(j))) * magnetization[j];
  return s;
}

PatternLabel fock_pattern_label(SpinWord config, int n_sites) {
  std::vector<int> ups;
  for (int i = 0; i < n_sites; ++i)
    if (get_bit(config, i)) ups.push_back(i);
  if (ups.empty()) throw std::invalid_argument("pattern label needs at least one up spin");

  const std::size_t m = ups.size();
  std::vector<int> gaps(m);
  for (std::size_t j = 0; j + 1 < m; ++j) gaps[j] = ups[j + 1] - ups[j];
  gaps[m - 1] = n_sites - ups[m - 1] + ups[0];

  // canonical rotation = lexicographically smallest
  std::size_t best = 0;
  for (std::size_t s = 1; s < m; ++s) {
    for (std::size_t j = 0; j < m; ++j) {
      const int a = gaps[(s + j) % m], b = gaps[(best + j) % m];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }

  PatternLabel out;
  out.counts = {0, 0, 0, 0};
  out.gaps.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const int g = gaps[(best + j) % m];
    out.gaps[j] = g;
    if (g >= 2 && g <= 5) ++out.counts[static_cast<std::size_t>(g - 2)];
    if (j) out.label += '-';
    out.label += std::to_string(g);
  }
  return out;
}

SpinWord orbit_representative(SpinWord config, int n_sites) {
  SpinWord best = config;
  const SpinWord reflected = reflect_sites(config, n_sites);
  for (int r = 0; r < n_sites; ++r) {
    best = std::min(best, rotate_sites(config, n_sites, r));
    best = std::min(best, rotate_sites(reflected, n_sites, r));
  }
  return best;
}

int letter_string_magnetization(const std::string& letters) {
  int sz = 0;
  for (const char l : letters) {
    if (l == 'H')
      ++sz;
    else if (l == 'D')
      --sz;
    else if (l != 'S' && l != 'T')
      throw std::invalid_argument("letters must be over {S, T, D, H}");
  }
  return sz;
}

Eigen::VectorXd letter_product_state(const std::string& letters, const Basis& basis) {
  const int n_rungs = static_cast<int>(letters.size());
  if (basis.n_sites() != 2 * n_rungs)
    throw std::invalid_argument("basis does not match the rung count");
  if (!basis.magnetization() || *basis.magnetization() != letter_string_magnetization(letters))
    throw std::invalid_argument("basis magnetization does not match the letter string");

  // Two-branch rungs (S and T) enumerate a binary choice each; D and H are
  // fixed. Branch bit = 1 selects the (sigma=1, tau=0) component.
  std::vector<int> branching;
  SpinWord fixed = 0;
  for (int k = 0; k < n_rungs; ++k) {
    const char l = letters[static_cast<std::size_t>(k)];
    if (l == 'S' || l == 'T') {
      branching.push_back(k);
    } else if (l == 'H') {
      fixed |= SpinWord{1} << ladder_site(k, true);
      fixed |= SpinWord{1} << ladder_site(k, false);
    }
  }

  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  const double norm = std::pow(0.5, 0.5 * static_cast<double>(branching.size()));
  const SpinWord n_branches = SpinWord{1} << branching.size();
  for (SpinWord mask = 0; mask < n_branches; ++mask) {
    SpinWord c = fixed;
    double amp = norm;
    for (std::size_t b = 0; b < branching.size(); ++b) {
      const int k = branching[b];
      if ((mask >> b) & 1u) {
        c |= SpinWord{1} << ladder_site(k, true);  // |sigma=1, tau=0>
        if (letters[static_cast<std::size_t>(k)] == 'S') amp = -amp;
      } else {
        c |= SpinWord{1} << ladder_site(k, false);  // |sigma=0, tau=1>
      }
    }
    v[static_cast<Eigen::Index>(basis.index_of(c))] = amp;
  }
  return v;
}

InvariantSubspace enumerate_invariant_subspace(int n_rungs, InsertionSpecies species, int r,
                                               BackgroundPhase phase, const Basis& basis) {
  if (r < 0 || r > n_rungs) throw std::invalid_argument("insertion count out of range");
  const char insert = species == InsertionSpecies::Holon ? 'H' : 'D';

  InvariantSubspace sub;
  sub.species = species;
  sub.phase = phase;
  sub.insertions = r;

  // All r-subsets of rung positions, in ascending lexicographic order; the
  // remaining rungs carry the alternating S/T background in order.
  std::vector<int> pick(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) pick[static_cast<std::size_t>(i)] = i;
  const char first = phase == BackgroundPhase::SingletFirst ? 'S' : 'T';
  const char second = phase == BackgroundPhase::SingletFirst ? 'T' : 'S';
  for (;;) {
    std::string letters(static_cast<std::size_t>(n_rungs), '?');
    for (const int p : pick) letters[static_cast<std::size_t>(p)] = insert;
    int bg = 0;
    for (char& l : letters)
      if (l == '?') l = (bg++ % 2 == 0) ? first : second;
    sub.members.push_back(std::move(letters));

    // next combination
    int i = r - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n_rungs - r + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }

  sub.vectors.resize(static_cast<Eigen::Index>(basis.size()),
                     static_cast<Eigen::Index>(sub.members.size()));
  for (std::size_t m = 0; m < sub.members.size(); ++m)
    sub.vectors.col(static_cast<Eigen::Index>(m)) = letter_product_state(sub.members[m], basis);
  return sub;
}

double invariance_residual(const HamiltonianOperator& op, const Basis& basis,
                           const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd hv = apply_operator(op, basis, v);
  const Eigen::MatrixXd m = hv - v * (v.transpose() * hv);
  // sigma_max via the small Gram matrix
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.transpose() * m);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

}  // namespace scardet
