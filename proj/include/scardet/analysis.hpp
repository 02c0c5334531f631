#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scardet/models.hpp"
#include "scardet/optimize.hpp"

namespace scardet {

struct DropDetectionConfig {
  int window = 201;        // energy-rank neighbors forming the local baseline
  double zscore = 4.0;     // detection threshold in MAD units
  double min_margin = 0.1; // absolute minimum cost gap, in trash-ones

  void validate() const;
};

/// Eigenstate ids with entanglement entropy below the threshold (natural-log
/// units), sorted by energy.
std::vector<std::size_t> select_low_entropy(const Eigensystem& es, double threshold = 2.7);

/// Ids whose mean cost sits below median(window) - max(zscore * MAD, margin),
/// where the window collects the nearest energy-rank neighbors (excluding the
/// state itself). The training eigenstate never appears in its own list. A
/// window wider than the spectrum is shrunk (with a note to stderr).
std::vector<std::size_t> detect_drops(const CostProfile& profile,
                                      const DropDetectionConfig& config);

struct FamilyGraph {
  std::vector<std::size_t> nodes;  // low-entropy candidate ids, sorted
  std::vector<std::pair<std::size_t, std::size_t>> edges;         // trainer -> drop
  std::vector<std::pair<std::size_t, std::size_t>> mutual_edges;  // both directions, a < b
};

/// Directed drop graph over the candidate set; detections outside the
/// candidate set are ignored (they can never become mutual).
FamilyGraph build_family_graph(const std::vector<std::size_t>& candidates,
                               const std::map<std::size_t, std::vector<std::size_t>>& detections);

/// Families = connected components of the mutual subgraph with >= 2 nodes;
/// the paper's transitivity rule. Deterministic: components sorted by their
/// smallest member.
std::vector<std::vector<std::size_t>> extract_families(const FamilyGraph& graph);

struct FockOverlap {
  SpinWord fock = 0;        // canonical orbit representative
  double probability = 0.0; // |<E|f>|^2 for a single orbit member
  std::string label;
  std::array<int, 4> counts{};  // (#Z2, #Z3, #Z4, #Z5)
};

struct FamilyMemberReport {
  std::size_t index = 0;
  double energy = 0.0;
  double entropy = 0.0;
  std::vector<FockOverlap> top_focks;
};

struct FamilyReportEntry {
  std::vector<FamilyMemberReport> members;
  std::vector<FockOverlap> fock_set;        // union of member labels
  std::vector<double> family_probability;   // P(i) per eigenstate over the spectrum
  bool below_size_threshold = false;
};

/// Per-member top-k Fock overlaps (one entry per translation+inversion
/// orbit), the union of their pattern labels, and the family probability
/// P(i) = sum_f |<E|f>|^2 over the canonical Fock set, for every eigenstate.
FamilyReportEntry characterize_family(const std::vector<std::size_t>& family,
                                      const Eigensystem& es, const SymmetryBasis& sym,
                                      int top_k = 10);

}  // namespace scardet
