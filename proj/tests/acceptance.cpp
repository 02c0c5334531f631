// Acceptance suite: one pass/fail line per criterion. Every tolerance and
// threshold is pinned in code; the binary exits nonzero if any checked
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "scardet/analysis.hpp"
#include "scardet/circuits.hpp"
#include "scardet/io.hpp"
#include "scardet/models.hpp"
#include "scardet/optimize.hpp"
#include "scardet/run.hpp"

using namespace scardet;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int criterion, const std::string& name, const Outcome& outcome, double seconds) {
  std::ostringstream line;
  line << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name
       << " -- " << outcome.detail << " (" << static_cast<int>(seconds) << " s)";
  std::cout << line.str() << std::endl;
}

SpinWord z2_word(int n) {
  SpinWord w = 0;
  for (int i = 1; i < n; i += 2) w |= SpinWord{1} << i;
  return w;
}

struct ChainWorkspace {
  std::shared_ptr<const Basis> basis;
  std::shared_ptr<SymmetryBasis> sym;
  Eigensystem es;
};

ChainWorkspace chain_workspace(Model model, int n) {
  ChainWorkspace ws;
  HamiltonianSpec spec;
  spec.model = model;
  spec.n_sites = n;
  ws.basis = std::make_shared<const Basis>(Basis::enumerate(n, spec.basis_rule()));
  ws.sym = std::make_shared<SymmetryBasis>(SymmetryBasis::build(ws.basis, SymmetrySector{}));
  ws.es = diagonalize(build_sector_dense(HamiltonianOperator(spec), *ws.sym));
  ws.es.spec = spec;
  return ws;
}

/// Eigenstate ids sorted by descending overlap with the orbit-symmetrized
/// Fock configuration; ties break on the index.
std::vector<std::size_t> rank_by_overlap(const ChainWorkspace& ws, SpinWord fock) {
  const auto o = ws.sym->orbit_of(ws.basis->index_of(fock));
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t j = 0; j < ws.es.dim(); ++j) {
    const double amp = ws.es.vectors(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j));
    ranked.emplace_back(-amp * amp, j);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> ids;
  ids.reserve(ranked.size());
  for (const auto& [negp, j] : ranked) ids.push_back(j);
  return ids;
}

std::size_t max_overlap_in_window(const ChainWorkspace& ws, SpinWord fock, double e_min,
                                  double e_max) {
  const auto o = ws.sym->orbit_of(ws.basis->index_of(fock));
  double best = -1.0;
  std::size_t best_id = 0;
  for (std::size_t j = 0; j < ws.es.dim(); ++j) {
    const double e = ws.es.energies[static_cast<Eigen::Index>(j)];
    if (e < e_min || e > e_max) continue;
    const double amp = ws.es.vectors(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j));
    if (amp * amp > best) {
      best = amp * amp;
      best_id = j;
    }
  }
  return best_id;
}

std::function<StateVector(std::size_t)> sector_input_provider(const ChainWorkspace& ws,
                                                              const CircuitEngine& engine) {
  const bool constrained = engine.spec().constrained;
  const int n_qubits = engine.spec().n_qubits;
  return [&ws, constrained, n_qubits](std::size_t j) {
    const Eigen::VectorXd full =
        ws.sym->expand_to_full(ws.es.vectors.col(static_cast<Eigen::Index>(j)));
    if (constrained) return to_state_vector(full);
    return embed_in_computational_basis(*ws.basis, full, n_qubits);
  };
}

// ---------------------------------------------------------------------------
// 1. Hilbert-space dimensions.
// ---------------------------------------------------------------------------
Outcome criterion1() {
  Timer timer;
  const Basis b24 = Basis::enumerate(24, {ConstraintKind::Rydberg, Boundary::Periodic});
  auto shared = std::make_shared<const Basis>(b24);
  const SymmetryBasis sym = SymmetryBasis::build(shared, SymmetrySector{});
  const bool dims = b24.size() == 103682 && sym.dim() == 2359;

  bool lucas = true;
  for (int n = 3; n <= 20; ++n)
    if (Basis::enumerate(n, {ConstraintKind::Rydberg, Boundary::Periodic}).size() !=
        lucas_number(n))
      lucas = false;

  const double t = timer.seconds();
  std::ostringstream detail;
  detail << "N=24 dim " << b24.size() << " (want 103682), sector " << sym.dim()
         << " (want 2359); Lucas law 3..20 " << (lucas ? "holds" : "violated") << "; "
         << static_cast<int>(t) << " s (< 60 s required)";
  return {dims && lucas && t < 60.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. PXP matrix vs. the brute-force word filter; spectral reflection.
// ---------------------------------------------------------------------------
Outcome criterion2() {
  Timer timer;
  bool matrices = true;
  for (const int n : {6, 9, 12}) {
    const Basis basis = Basis::enumerate(n, {ConstraintKind::Rydberg, Boundary::Periodic});
    const Eigen::MatrixXd h = build_pxp(basis);
    // oracle: filter all 2^n words, apply P sx P site by site
    Eigen::MatrixXd oracle =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()),
                              static_cast<Eigen::Index>(basis.size()));
    for (SpinWord a = 0; a < (SpinWord{1} << n); ++a) {
      if (!basis.contains(a)) continue;
      for (int i = 0; i < n; ++i) {
        if (get_bit(a, (i + n - 1) % n) || get_bit(a, (i + 1) % n)) continue;
        const SpinWord f = flip_bit(a, i);
        if (!basis.contains(f)) continue;
        oracle(static_cast<Eigen::Index>(basis.index_of(f)),
               static_cast<Eigen::Index>(basis.index_of(a))) += 1.0;
      }
    }
    if ((h - oracle).cwiseAbs().maxCoeff() != 0.0) matrices = false;
  }

  double worst_pairing = 0.0;
  for (const int n : {10, 12}) {
    const Basis basis = Basis::enumerate(n, {ConstraintKind::Rydberg, Boundary::Periodic});
    const Eigensystem es = diagonalize(build_pxp(basis));
    const auto dim = es.energies.size();
    for (Eigen::Index k = 0; k < dim; ++k)
      worst_pairing =
          std::max(worst_pairing, std::abs(es.energies[k] + es.energies[dim - 1 - k]));
  }

  std::ostringstream detail;
  detail << "brute-force match " << (matrices ? "exact" : "BROKEN") << ", reflection pairing "
         << format_double(worst_pairing) << " (< 1e-9)";
  return {matrices && worst_pairing < 1e-9, detail.str()};
}

// ---------------------------------------------------------------------------
// 3. N=24 Z2 scar overlap at E close to -2.67.
// ---------------------------------------------------------------------------
Outcome criterion3() {
  Timer timer;
  const ChainWorkspace ws = chain_workspace(Model::PXP, 24);
  const SpinWord z2 = z2_word(24);
  const std::size_t id = max_overlap_in_window(ws, z2, -4.0, 0.0);
  const double energy = ws.es.energies[static_cast<Eigen::Index>(id)];

  // |<chi0|Z2-orbit>|^2 over both orbit members
  const Eigen::VectorXd full =
      ws.sym->expand_to_full(ws.es.vectors.col(static_cast<Eigen::Index>(id)));
  std::vector<SpinWord> orbit{z2, rotate_sites(z2, 24, 1)};
  const double p = fock_family_probability(full, *ws.basis, orbit);

  const double t = timer.seconds();
  std::ostringstream detail;
  detail << "state " << id << " at E=" << format_double(energy) << ", |<chi0|Z2-orbit>|^2 = "
         << format_double(p) << " (want 0.15 +/- 0.02); " << static_cast<int>(t)
         << " s (< 300 s required)";
  const bool pass = std::abs(energy + 2.67) < 0.05 && p > 0.13 && p < 0.17 && t < 300.0;
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Z2-family detection: N=18 at the supplement hyperparameters, plus the
//    CI-scale N=12 variant over 10 seeds. The N=24 run is config-launchable
//    but not a gate.
// ---------------------------------------------------------------------------
constexpr int kN18Ensemble = 16;      // criterion floor is 8
// CI-scale settings: the best configuration found for the 26-state N=12
// sector (layers and iterations reduced from the N=18 grid values, the
// compression ratio raised to keep 2^(n-trash) below the sector size, the
// detection window scaled with the spectrum).
constexpr int kN12Iterations = 8000;
constexpr int kN12Shots = 200;
constexpr int kN12Layers = 2;
constexpr int kN12Trash = 6;
constexpr int kN12Ensemble = 8;
constexpr int kN12Window = 11;
constexpr double kN12Perturbation = 0.4;

Outcome criterion4() {
  Timer timer;
  std::ostringstream detail;

  // --- N=18, supplement hyperparameters ---
  const ChainWorkspace ws18 = chain_workspace(Model::PXP, 18);
  const SpinWord z2_18 = z2_word(18);
  const auto ranked18 = rank_by_overlap(ws18, z2_18);
  const std::vector<std::size_t> top6(ranked18.begin(), ranked18.begin() + 6);
  const std::size_t trainer18 = max_overlap_in_window(ws18, z2_18, -4.0, 0.0);

  const CircuitSpec spec18{.n_qubits = 18, .layers = 5, .constrained = true, .n_trash = 6};
  const CircuitEngine engine18(spec18, ws18.basis);
  TrainingConfig tc18;
  tc18.circuit = spec18;
  tc18.shots = 300;
  tc18.iterations = 20000;
  tc18.ensemble_size = kN18Ensemble;
  tc18.seed_base = 2026;
  const auto provider18 = sector_input_provider(ws18, engine18);
  const auto models18 = train_ensemble(
      engine18, provider18(trainer18), static_cast<int>(trainer18),
      ws18.es.energies[static_cast<Eigen::Index>(trainer18)], tc18);
  const CostProfile profile18 = evaluate_cost_profile(engine18, models18, ws18.es, provider18);

  // mean top-6 cost below the mean of the 5th percentiles of their windows
  double mean_cost = 0.0, mean_p5 = 0.0;
  for (const std::size_t j : top6) {
    mean_cost += profile18.mean_cost[j] / 6.0;
    std::vector<double> window;
    for (std::size_t i = 0; i < profile18.mean_cost.size(); ++i)
      if (i != j) window.push_back(profile18.mean_cost[i]);
    mean_p5 += percentile(window, 5.0) / 6.0;
  }
  const bool percentile_ok = mean_cost < mean_p5;

  const auto drops18 = detect_drops(profile18, DropDetectionConfig{});
  int flagged18 = 0;
  for (const std::size_t j : top6)
    if (std::find(drops18.begin(), drops18.end(), j) != drops18.end()) ++flagged18;
  const bool detect18_ok = flagged18 >= 4;

  detail << "N=18: mean top-6 cost " << format_double(mean_cost) << " vs window p5 "
         << format_double(mean_p5) << (percentile_ok ? " (below)" : " (NOT below)") << ", "
         << flagged18 << "/6 flagged (need >= 4)";

  // --- CI-scale N=12 variant, 10 seeds ---
  const ChainWorkspace ws12 = chain_workspace(Model::PXP, 12);
  const SpinWord z2_12 = z2_word(12);
  // particle-hole symmetry ties overlaps at +/-E exactly; rank on values
  // quantized to 1e-12 with the index as tiebreak
  const auto o12 = ws12.sym->orbit_of(ws12.basis->index_of(z2_12));
  std::vector<std::pair<double, std::size_t>> ranked12;
  for (std::size_t j = 0; j < ws12.es.dim(); ++j) {
    const double amp =
        ws12.es.vectors(static_cast<Eigen::Index>(o12), static_cast<Eigen::Index>(j));
    ranked12.emplace_back(-std::round(amp * amp * 1e12) / 1e12, j);
  }
  std::sort(ranked12.begin(), ranked12.end());
  std::vector<std::size_t> top5;
  for (int k = 0; k < 5; ++k) top5.push_back(ranked12[static_cast<std::size_t>(k)].second);
  const std::size_t trainer12 = max_overlap_in_window(ws12, z2_12, -1.0, 1.0);

  const CircuitSpec spec12{.n_qubits = 12, .layers = kN12Layers, .constrained = true,
                           .n_trash = kN12Trash};
  const CircuitEngine engine12(spec12, ws12.basis);
  const auto provider12 = sector_input_provider(ws12, engine12);
  int good_seeds = 0;
  std::ostringstream per_seed;
  for (int seed = 0; seed < 10; ++seed) {
    TrainingConfig tc12;
    tc12.circuit = spec12;
    tc12.shots = kN12Shots;
    tc12.iterations = kN12Iterations;
    tc12.ensemble_size = kN12Ensemble;
    tc12.seed_base = derive_seed(1000, static_cast<std::uint64_t>(seed));
    tc12.spsa.perturbation = kN12Perturbation;
    const auto models = train_ensemble(
        engine12, provider12(trainer12), static_cast<int>(trainer12),
        ws12.es.energies[static_cast<Eigen::Index>(trainer12)], tc12);
    const CostProfile profile = evaluate_cost_profile(engine12, models, ws12.es, provider12);
    DropDetectionConfig dc;
    dc.window = kN12Window;
    const auto drops = detect_drops(profile, dc);
    int flagged = 0;
    for (const std::size_t j : top5)
      if (std::find(drops.begin(), drops.end(), j) != drops.end()) ++flagged;
    per_seed << (seed ? "," : "") << flagged;
    if (flagged >= 3) ++good_seeds;
  }
  const bool ci_ok = good_seeds >= 7;
  detail << "; N=12 CI: flags per seed [" << per_seed.str() << "], " << good_seeds
         << "/10 seeds with >= 3 of top-5 (need >= 7)";

  // --- the paper-scale N=24 campaign must be launchable from config ---
  bool config_ok = false;
  try {
    const RunConfig big = RunConfig::from_file("configs/pxp24_fig1.json");
    config_ok = big.model.model == Model::PXP && big.model.n_sites == 24 && big.n_trash == 8 &&
                big.layers == 7 && big.shots == 600 && big.iterations == 50000 &&
                big.constrained;
  } catch (const std::exception&) {
  }
  detail << "; N=24 config " << (config_ok ? "launchable" : "BROKEN");

  return {percentile_ok && detect18_ok && ci_ok && config_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 5. Ladder invariant subspaces and the Fig. 3 training analogue.
// ---------------------------------------------------------------------------
constexpr int kLadderIterations = 2000;  // reduced from the paper scale
constexpr int kLadderShots = 300;

Outcome criterion5() {
  Timer timer;
  std::ostringstream detail;

  const Basis basis = Basis::magnetization_sector(16, 1);
  const bool dim_ok = basis.size() == 11440;

  HamiltonianSpec spec;
  spec.model = Model::Ladder;
  spec.n_sites = 8;
  spec.disorder_seed = 7;

  const auto st = enumerate_invariant_subspace(8, InsertionSpecies::Holon, 1,
                                               BackgroundPhase::SingletFirst, basis);
  const auto ts = enumerate_invariant_subspace(8, InsertionSpecies::Holon, 1,
                                               BackgroundPhase::TripletFirst, basis);
  const bool members_ok = st.members.size() == 8 && ts.members.size() == 8;

  double worst_residual = 0.0;
  for (int t = 0; t < 5; ++t) {
    HamiltonianSpec s = spec;
    s.disorder_seed = derive_seed(7, 0xd150ull, static_cast<std::uint64_t>(t));
    const HamiltonianOperator op(s);
    worst_residual = std::max(worst_residual, invariance_residual(op, basis, st.vectors));
    worst_residual = std::max(worst_residual, invariance_residual(op, basis, ts.vectors));
  }

  // bare leg bond annihilates embedded ST, TS, HH, DD pairs at rungs (2, 3)
  double worst_annihilation = 0.0;
  for (const std::string& letters :
       {std::string("HDSTTSDH"), std::string("HDTSTSDH"), std::string("STHHSTST"),
        std::string("STDDSTST")}) {
    const int sz = letter_string_magnetization(letters);
    const Basis b = Basis::magnetization_sector(16, sz);
    const Eigen::VectorXd v = letter_product_state(letters, b);
    worst_annihilation = std::max(worst_annihilation, apply_leg_coupling(b, 2, v).norm());
  }

  detail << "dim " << basis.size() << ", members " << st.members.size() << "+"
         << ts.members.size() << ", invariance residual " << format_double(worst_residual)
         << " (< 1e-10), annihilation " << format_double(worst_annihilation) << " (< 1e-12)";

  // --- training analogue over 10 seeds ---
  const HamiltonianOperator op(spec);
  Eigensystem es = diagonalize(build_dense(op, basis));
  es.spec = spec;
  es.fields = op.fields();

  auto locate = [&](const InvariantSubspace& sub) {
    const Eigen::MatrixXd hv = apply_operator(op, basis, sub.vectors);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub.vectors.transpose() * hv);
    const Eigen::MatrixXd w = sub.vectors * solver.eigenvectors();
    std::vector<std::size_t> ids;
    for (Eigen::Index m = 0; m < w.cols(); ++m) {
      Eigen::Index best = 0;
      (es.vectors.transpose() * w.col(m)).cwiseAbs().maxCoeff(&best);
      ids.push_back(static_cast<std::size_t>(best));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  const auto st_ids = locate(st);
  const auto ts_ids = locate(ts);

  const CircuitSpec cspec{.n_qubits = 16, .layers = 10, .constrained = false, .n_trash = 5};
  const CircuitEngine engine(cspec);
  const auto provider = [&](std::size_t j) {
    return embed_in_computational_basis(basis, es.vectors.col(static_cast<Eigen::Index>(j)), 16);
  };
  const std::size_t train_id = st_ids[st_ids.size() / 2];

  int good_seeds = 0;
  std::ostringstream per_seed;
  for (int seed = 0; seed < 10; ++seed) {
    TrainingConfig tc;
    tc.circuit = cspec;
    tc.shots = kLadderShots;
    tc.iterations = kLadderIterations;
    tc.ensemble_size = 1;
    tc.seed_base = derive_seed(88, static_cast<std::uint64_t>(seed));
    const auto models = train_ensemble(engine, provider(train_id), static_cast<int>(train_id),
                                       es.energies[static_cast<Eigen::Index>(train_id)], tc);
    const CostProfile profile = evaluate_cost_profile(engine, models, es, provider);
    auto mean_over = [&](const std::vector<std::size_t>& ids) {
      double s = 0.0;
      for (const auto id : ids) s += profile.mean_cost[id];
      return s / static_cast<double>(ids.size());
    };
    const double p10 = percentile(profile.mean_cost, 10.0);
    const bool ok = mean_over(st_ids) < p10 && !(mean_over(ts_ids) < p10);
    per_seed << (seed ? "," : "") << (ok ? '1' : '0');
    if (ok) ++good_seeds;
  }
  detail << "; training analogue [" << per_seed.str() << "] " << good_seeds
         << "/10 seeds (need >= 7)";

  const bool pass = dim_ok && members_ok && worst_residual < 1e-10 &&
                    worst_annihilation < 1e-12 && good_seeds >= 7;
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Dreaming at N=12 with the supplement settings.
// ---------------------------------------------------------------------------
Outcome criterion6() {
  Timer timer;
  const ChainWorkspace ws = chain_workspace(Model::PXP, 12);
  const SpinWord z2 = z2_word(12);
  const std::size_t trainer = max_overlap_in_window(ws, z2, -1.0, 1.0);

  const CircuitSpec spec{.n_qubits = 12, .layers = 2, .constrained = true, .n_trash = 4};
  const CircuitEngine engine(spec, ws.basis);
  TrainingConfig tc;
  tc.circuit = spec;
  tc.shots = 100;
  tc.iterations = 1000;
  tc.ensemble_size = 100;
  tc.seed_base = 1212;
  const auto provider = sector_input_provider(ws, engine);
  const auto models = train_ensemble(engine, provider(trainer), static_cast<int>(trainer),
                                     ws.es.energies[static_cast<Eigen::Index>(trainer)], tc);

  DreamConfig dc;
  dc.optimizations = 15;
  dc.steps = 50000;
  dc.shots = 100;
  dc.seed = 345;
  const DreamResult result = dream(engine, models, *ws.basis, dc);

  const auto peak = std::max_element(result.mean_abs_structure_factor.begin(),
                                     result.mean_abs_structure_factor.end());
  const std::size_t peak_idx =
      static_cast<std::size_t>(peak - result.mean_abs_structure_factor.begin());
  const double peak_q = result.q_grid[peak_idx];
  const bool pass = std::abs(peak_q - kPi) < 1e-12;

  std::ostringstream detail;
  detail << "ensemble of " << models.size() << " trained on state " << trainer << " (E="
         << format_double(ws.es.energies[static_cast<Eigen::Index>(trainer)])
         << "); |S(q)| peak at q=" << format_double(peak_q) << " (want pi="
         << format_double(kPi) << "), peak value " << format_double(*peak);
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 7. Circuit and optimizer property suites.
// ---------------------------------------------------------------------------
Outcome criterion7() {
  Timer timer;
  std::ostringstream detail;
  bool pass = true;

  // unitarity via the dense oracle
  {
    Rng rng(71);
    double worst = 0.0;
    {
      const CircuitSpec spec{.n_qubits = 10, .layers = 3, .constrained = false, .n_trash = 3};
      const CircuitEngine engine(spec);
      std::vector<double> theta(static_cast<std::size_t>(spec.parameter_count()));
      for (double& t : theta) t = rng.uniform(0.0, 2.0 * kPi);
      const Eigen::MatrixXcd u = engine.dense_unitary(ParameterVector(theta));
      worst = std::max(worst, (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    {
      auto basis = std::make_shared<const Basis>(
          Basis::enumerate(12, {ConstraintKind::Rydberg, Boundary::Periodic}));
      const CircuitSpec spec{.n_qubits = 12, .layers = 4, .constrained = true, .n_trash = 4};
      const CircuitEngine engine(spec, basis);
      std::vector<double> theta(static_cast<std::size_t>(spec.parameter_count()));
      for (double& t : theta) t = rng.uniform(0.0, 2.0 * kPi);
      const Eigen::MatrixXcd u = engine.dense_unitary(ParameterVector(theta));
      worst = std::max(worst, (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    pass = pass && worst < 1e-9;
    detail << "unitarity " << format_double(worst) << " (< 1e-9)";
  }

  // gate involutions
  {
    const Eigen::MatrixXd e = e_gate();
    const double e2 = (e * e - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff();
    const double rr = (rtilde_gate(1.37) * rtilde_gate(-1.37) - Eigen::MatrixXd::Identity(5, 5))
                          .cwiseAbs()
                          .maxCoeff();
    pass = pass && e2 < 1e-14 && rr < 1e-14;
    detail << "; E^2=I " << format_double(e2) << ", Rt(t)Rt(-t)=I " << format_double(rr);
  }

  // sampled vs exact over 100 random cases
  {
    const CircuitSpec spec{.n_qubits = 6, .layers = 2, .constrained = false, .n_trash = 3};
    const CircuitEngine engine(spec);
    const int shots = 10000;
    int within = 0;
    for (int t = 0; t < 100; ++t) {
      Rng rng(4000 + static_cast<std::uint64_t>(t));
      std::vector<double> theta(static_cast<std::size_t>(spec.parameter_count()));
      for (double& x : theta) x = rng.uniform(0.0, 2.0 * kPi);
      StateVector state(engine.dim());
      double norm2 = 0.0;
      for (auto& a : state) {
        a = Amplitude{rng.gaussian(), rng.gaussian()};
        norm2 += std::norm(a);
      }
      for (auto& a : state) a /= std::sqrt(norm2);
      StateVector encoded = state;
      engine.apply(ParameterVector(theta), encoded);
      const double exact = engine.exact_cost(encoded);
      const double sigma = std::sqrt(engine.trash_ones_variance(encoded) / shots);
      const double sampled = engine
                                 .trash_cost(ParameterVector(theta), state, CostMode::Sampled,
                                             shots, 8000 + static_cast<std::uint64_t>(t))
                                 .value;
      if (std::abs(sampled - exact) < 5.0 * std::max(sigma, 1e-12)) ++within;
    }
    pass = pass && within >= 99;
    detail << "; sampled-vs-exact " << within << "/100 within 5 sigma (need >= 99)";
  }

  // SPSA mean gradient vs finite differences on a smooth objective
  {
    const std::vector<double> grad{2.0, -2.0, 2.0, -2.0};
    Rng rng(2034);
    std::vector<double> mean(4, 0.0);
    std::vector<double> delta(4);
    for (int d = 0; d < 10000; ++d) {
      for (auto& x : delta) x = rng.rademacher();
      double slope = 0.0;
      for (std::size_t i = 0; i < 4; ++i) slope += grad[i] * delta[i];
      for (std::size_t i = 0; i < 4; ++i) mean[i] += slope * delta[i] / 10000.0;
    }
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      worst_rel = std::max(worst_rel, std::abs(mean[i] - grad[i]) / std::abs(grad[i]));
    pass = pass && worst_rel < 0.02;
    detail << "; SPSA gradient error " << format_double(worst_rel) << " (< 0.02)";
  }

  // planted-compression training
  {
    const CircuitSpec spec{.n_qubits = 4, .layers = 2, .constrained = false, .n_trash = 1};
    const CircuitEngine engine(spec);
    TrainingConfig tc;
    tc.circuit = spec;
    tc.shots = 400;
    tc.iterations = 1200;
    int solved = 0;
    for (int s = 0; s < 20; ++s) {
      Rng rng(5000 + static_cast<std::uint64_t>(s));
      std::vector<double> planted(static_cast<std::size_t>(spec.parameter_count()));
      for (double& t : planted) t = rng.uniform(0.0, 2.0 * kPi);
      StateVector compressed(engine.dim(), Amplitude{0.0, 0.0});
      double norm2 = 0.0;
      for (std::size_t j = 0; j < engine.dim(); ++j) {
        if ((j >> 3) != 0) continue;  // trash qubit (bit 3) stays zero
        compressed[j] = Amplitude{rng.gaussian(), 0.0};
        norm2 += std::norm(compressed[j]);
      }
      for (auto& a : compressed) a /= std::sqrt(norm2);
      StateVector input = compressed;
      engine.apply_adjoint(ParameterVector(planted), input);
      const TrainedModel model =
          train_qvae(engine, input, 0, 0.0, tc, 9000 + static_cast<std::uint64_t>(s));
      if (engine.exact_cost(ParameterVector(model.theta), input) < 0.05) ++solved;
    }
    pass = pass && solved >= 18;
    detail << "; planted compression " << solved << "/20 (need >= 18)";
  }

  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Family clustering on synthetic planted-block cost matrices.
// ---------------------------------------------------------------------------
Outcome criterion8() {
  Timer timer;

  auto synthetic_profile = [](std::size_t n, double baseline, double noise,
                              const std::map<std::size_t, double>& dips, std::uint64_t seed) {
    CostProfile profile;
    Rng rng(seed);
    for (std::size_t j = 0; j < n; ++j) {
      profile.energies.push_back(static_cast<double>(j));
      const auto dip = dips.find(j);
      profile.mean_cost.push_back((dip == dips.end() ? baseline : dip->second) +
                                  noise * rng.gaussian());
      profile.stderr_cost.push_back(noise);
    }
    profile.train_state_index = -1;
    return profile;
  };

  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(t);
    Rng rng(seed);
    const std::size_t spectrum = 400;
    const int n_blocks = 2 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<std::size_t> pool;
    while (pool.size() < 24) {
      const auto id = static_cast<std::size_t>(rng.uniform() * spectrum);
      if (std::find(pool.begin(), pool.end(), id) == pool.end()) pool.push_back(id);
    }
    std::size_t next = 0;
    std::vector<std::vector<std::size_t>> blocks;
    for (int b = 0; b < n_blocks; ++b) {
      const std::size_t size = 2 + static_cast<std::size_t>(rng.uniform() * 3.0);
      std::vector<std::size_t> block;
      for (std::size_t m = 0; m < size; ++m) block.push_back(pool[next++]);
      std::sort(block.begin(), block.end());
      blocks.push_back(block);
    }
    std::vector<std::size_t> candidates;
    std::vector<std::size_t> lone;
    for (int e = 0; e < 3; ++e) lone.push_back(pool[next++]);
    candidates = lone;
    for (const auto& block : blocks)
      for (const std::size_t id : block) candidates.push_back(id);
    std::sort(candidates.begin(), candidates.end());

    std::map<std::size_t, std::vector<std::size_t>> detections;
    for (const auto& block : blocks) {
      for (const std::size_t trainer : block) {
        std::map<std::size_t, double> dips;
        for (const std::size_t other : block)
          if (other != trainer) dips[other] = 1.0;
        CostProfile profile =
            synthetic_profile(spectrum, 3.0, 0.05, dips, derive_seed(seed, trainer));
        profile.train_state_index = static_cast<int>(trainer);
        detections[trainer] = detect_drops(profile, DropDetectionConfig{});
      }
    }
    for (const std::size_t id : lone) {
      CostProfile profile =
          synthetic_profile(spectrum, 3.0, 0.05, {}, derive_seed(seed, 999 + id));
      profile.train_state_index = static_cast<int>(id);
      detections[id] = detect_drops(profile, DropDetectionConfig{});
    }

    const auto families = extract_families(build_family_graph(candidates, detections));
    std::vector<std::vector<std::size_t>> expected = blocks;
    std::sort(expected.begin(), expected.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    if (families == expected) ++exact;
  }

  // exact unit cases: transitive chain and strict mutuality
  const auto chain =
      extract_families(build_family_graph({1, 2, 3}, {{1, {2}}, {2, {1, 3}}, {3, {2}}}));
  const bool chain_ok = chain.size() == 1 && chain[0] == std::vector<std::size_t>{1, 2, 3};
  const auto oneway = extract_families(build_family_graph({1, 2}, {{1, {2}}, {2, {}}}));
  const bool mutual_ok = oneway.empty();

  std::ostringstream detail;
  detail << exact << "/100 planted partitions recovered (need >= 95); transitive chain "
         << (chain_ok ? "ok" : "BROKEN") << ", mutuality " << (mutual_ok ? "ok" : "BROKEN");
  return {exact >= 95 && chain_ok && mutual_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Three-body blockade model at N=16.
// ---------------------------------------------------------------------------
constexpr int kPxp3Iterations = 3000;  // reduced from the paper scale
constexpr int kPxp3Shots = 300;
constexpr int kPxp3Seeds = 5;
constexpr int kPxp3Ensemble = 2;

Outcome criterion9() {
  Timer timer;
  const ChainWorkspace ws = chain_workspace(Model::PXP3, 16);
  const SpinWord z2 = z2_word(16);
  const auto ranked = rank_by_overlap(ws, z2);
  const std::vector<std::size_t> top6(ranked.begin(), ranked.begin() + 6);
  const std::size_t trainer = ranked.front();

  const CircuitSpec spec{.n_qubits = 16, .layers = 10, .constrained = false, .n_trash = 5};
  const CircuitEngine engine(spec);
  const auto provider = sector_input_provider(ws, engine);

  int good_seeds = 0;
  std::ostringstream per_seed;
  for (int seed = 0; seed < kPxp3Seeds; ++seed) {
    TrainingConfig tc;
    tc.circuit = spec;
    tc.shots = kPxp3Shots;
    tc.iterations = kPxp3Iterations;
    tc.ensemble_size = kPxp3Ensemble;
    tc.seed_base = derive_seed(316, static_cast<std::uint64_t>(seed));
    const auto models = train_ensemble(engine, provider(trainer), static_cast<int>(trainer),
                                       ws.es.energies[static_cast<Eigen::Index>(trainer)], tc);
    const CostProfile profile = evaluate_cost_profile(engine, models, ws.es, provider);
    const auto drops = detect_drops(profile, DropDetectionConfig{});
    int flagged = 0;
    for (const std::size_t j : top6)
      if (std::find(drops.begin(), drops.end(), j) != drops.end()) ++flagged;
    per_seed << (seed ? "," : "") << flagged;
    if (flagged >= 3) ++good_seeds;
  }

  std::ostringstream detail;
  detail << "trained on state " << trainer << "; flags per seed [" << per_seed.str()
         << "] (top-6, >= 3 counts); " << good_seeds << "/" << kPxp3Seeds
         << " seeds good (majority needed)";
  return {good_seeds > kPxp3Seeds / 2, detail.str()};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical reruns from the same config hash.
// ---------------------------------------------------------------------------
Outcome criterion10() {
  Timer timer;
  const auto root = std::filesystem::temp_directory_path() / "scardet_acceptance_repro";
  std::filesystem::remove_all(root);

  auto run_once = [&](const std::string& tag) {
    std::ostringstream config_json;
    config_json << R"({
      "version": 1,
      "seed": 99,
      "output_dir": ")" << (root / tag).string() << R"(",
      "model": {"name": "pxp", "sites": 10},
      "circuit": {"constrained": true, "layers": 2, "trash_qubits": 3},
      "training": {"shots": 150, "iterations": 400, "ensemble": 2, "seed_base": 3},
      "detection": {"window": 11},
      "selector": {"mode": "index", "index": 5},
      "dream": {"optimizations": 2, "steps": 200, "shots": 60}
    })";
    const RunConfig config = RunConfig::from_json_string(config_json.str());
    std::ostringstream sink;
    cmd_diagonalize(config, sink);
    cmd_train(config, sink);
    cmd_profile(config, sink);
    cmd_dream(config, sink);
    return config;
  };
  const RunConfig a = run_once("a");
  run_once("b");

  bool pass = true;
  const std::vector<std::string> files{"models/member_000.json", "models/member_001.json",
                                       "traces/member_000.csv",  "profile.csv",
                                       "dream_magnetization.csv", "dream_structure_factor.csv"};
  for (const auto& f : files)
    if (read_text_file(root / "a" / f) != read_text_file(root / "b" / f)) pass = false;

  // the resolved config parses back to the same hash
  const RunConfig a2 = RunConfig::from_json_string(a.resolved_json());
  pass = pass && a2.config_hash() == a.config_hash();

  std::filesystem::remove_all(root);
  std::ostringstream detail;
  detail << files.size() << " artifact files byte-compared across independent reruns";
  return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries{
      {1, "Hilbert-space dimensions", criterion1},
      {2, "PXP Hamiltonian vs brute force", criterion2},
      {3, "N=24 Z2 scar overlap", criterion3},
      {4, "Z2-family detection (N=18 + CI N=12)", criterion4},
      {5, "ladder invariant subspaces + training", criterion5},
      {6, "dreaming recovers the Z2 structure-factor peak", criterion6},
      {7, "circuit/optimizer property suites", criterion7},
      {8, "family clustering oracle", criterion8},
      {9, "three-body blockade Z2 detection", criterion9},
      {10, "byte-identical reruns", criterion10},
  };

  bool all_pass = true;
  for (const auto& entry : entries) {
    if (only != 0 && entry.id != only) continue;
    Timer timer;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    report(entry.id, entry.name, outcome, timer.seconds());
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
