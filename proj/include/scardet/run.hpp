#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "scardet/analysis.hpp"
#include "scardet/io.hpp"
#include "scardet/models.hpp"
#include "scardet/optimize.hpp"

namespace scardet {

/// Eigenstate selector for training commands: an explicit index, or the
/// maximal-overlap state with a Fock configuration inside an energy window.
struct StateSelector {
  enum class Mode { Index, FockOverlap };
  Mode mode = Mode::Index;
  std::size_t index = 0;
  std::string fock;  // configuration string, site 0 leftmost
  double energy_min = -1e300;
  double energy_max = 1e300;
  double tie_tolerance = 1e-9;
};

/// Fully-resolved run description. Parsed strictly from versioned JSON
/// (unknown fields are rejected); every command writes the resolved form it
/// actually used back into the output directory.
struct RunConfig {
  int version = 1;
  std::uint64_t seed = 42;
  std::string output_dir;
  int workers = 0;

  HamiltonianSpec model;
  SymmetrySector sector;

  // circuit hyperparameters (qubit count follows the model)
  int layers = 0;
  int n_trash = 0;
  bool constrained = false;
  int pattern_parity = 0;

  int shots = 300;
  int iterations = 20000;
  int ensemble = 8;
  std::uint64_t seed_base = 0;
  int calibration_samples = 25;

  DropDetectionConfig detection;
  double entropy_threshold = 2.7;
  int trainings_per_candidate = 8;
  int top_fock_labels = 10;

  DreamConfig dream;
  StateSelector selector;

  // ladder experiment
  InsertionSpecies species = InsertionSpecies::Holon;
  int insertions = 1;
  BackgroundPhase phase = BackgroundPhase::SingletFirst;
  int disorder_realizations = 5;
  int subspace_state = -1;  // member index within the subspace; -1 = middle

  CircuitSpec circuit_spec() const;
  TrainingConfig training_config() const;

  static RunConfig from_json_string(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);
  std::string resolved_json() const;
  /// FNV-1a fingerprint of the resolved JSON, as fixed-width hex.
  std::string config_hash() const;
};

/// Cache root: SCARDET_CACHE_DIR or <output_dir>/cache.
std::filesystem::path cache_root(const RunConfig& config);

struct Workspace {
  std::shared_ptr<const Basis> basis;       // circuit basis (full constrained space)
  std::shared_ptr<SymmetryBasis> symmetry;  // null for the ladder
  Eigensystem eigensystem;                  // sector spectrum with entropies
  std::vector<int> half_cut;                // left sites of the entropy bipartition
};

/// Loads or builds the basis + eigensystem caches for the configured model.
Workspace prepare_workspace(const RunConfig& config, std::ostream& log);

/// Resolves the training eigenstate; throws (listing ties) when two states
/// match within the tie tolerance.
std::size_t resolve_selector(const StateSelector& selector, const Eigensystem& es,
                             const SymmetryBasis* sym, const Basis& basis);

int cmd_basis(const RunConfig& config, std::ostream& log);
int cmd_diagonalize(const RunConfig& config, std::ostream& log);
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_profile(const RunConfig& config, std::ostream& log);
int cmd_families(const RunConfig& config, std::ostream& log);
int cmd_dream(const RunConfig& config, std::ostream& log);
int cmd_ladder(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

}  // namespace scardet
