#include "scardet/analysis.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace scardet {

void DropDetectionConfig::validate() const {
  if (window < 11 || window % 2 == 0)
    throw std::invalid_argument("detection window must be odd and >= 11");
  if (zscore <= 0.0) throw std::invalid_argument("zscore threshold must be positive");
  if (min_margin < 0.0) throw std::invalid_argument("negative margin");
}

std::vector<std::size_t> select_low_entropy(const Eigensystem& es, double threshold) {
  if (es.entropies.size() != es.energies.size())
    throw std::invalid_argument("entropies have not been computed");
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < es.dim(); ++j)
    if (es.entropies[static_cast<Eigen::Index>(j)] < threshold) ids.push_back(j);
  // energies ascend with the index, so ids are already energy-sorted
  return ids;
}

std::vector<std::size_t> detect_drops(const CostProfile& profile,
                                      const DropDetectionConfig& config) {
  config.validate();
  const std::size_t n = profile.mean_cost.size();
  if (n < 2) return {};

  std::size_t window = static_cast<std::size_t>(config.window);
  if (window > n - 1) {
    std::cerr << "[scardet] note: detection window " << window << " shrunk to spectrum size "
              << n - 1 << "\n";
    window = n - 1;
  }

  std::vector<std::size_t> detected;
  std::vector<double> local;
  local.reserve(window);
  for (std::size_t j = 0; j < n; ++j) {
    // window of energy-rank neighbors, excluding j, clipped at the edges
    const std::size_t half = window / 2;
    std::size_t lo = j > half ? j - half : 0;
    std::size_t hi = lo + window;  // one past, skipping j itself
    if (hi >= n) {
      hi = n - 1;
      lo = hi >= window ? hi - window : 0;
    }
    local.clear();
    for (std::size_t i = lo; i <= hi && local.size() < window; ++i) {
      if (i == j) continue;
      local.push_back(profile.mean_cost[i]);
    }
    std::vector<double> tmp = local;
    const double med = median_inplace(tmp);
    for (std::size_t i = 0; i < local.size(); ++i) tmp[i] = std::abs(local[i] - med);
    const double mad = median_inplace(tmp);
    const double threshold = med - std::max(config.zscore * mad, config.min_margin);
    if (profile.mean_cost[j] < threshold &&
        j != static_cast<std::size_t>(profile.train_state_index))
      detected.push_back(j);
  }
  return detected;
}

FamilyGraph build_family_graph(const std::vector<std::size_t>& candidates,
                               const std::map<std::size_t, std::vector<std::size_t>>& detections) {
  FamilyGraph graph;
  graph.nodes = candidates;
  std::sort(graph.nodes.begin(), graph.nodes.end());
  const std::set<std::size_t> node_set(graph.nodes.begin(), graph.nodes.end());

  std::set<std::pair<std::size_t, std::size_t>> directed;
  for (const auto& [trainer, targets] : detections) {
    if (!node_set.count(trainer)) continue;
    for (const std::size_t t : targets)
      if (t != trainer && node_set.count(t)) directed.insert({trainer, t});
  }
  graph.edges.assign(directed.begin(), directed.end());
  for (const auto& [a, b] : directed)
    if (a < b && directed.count({b, a})) graph.mutual_edges.emplace_back(a, b);
  return graph;
}

std::vector<std::vector<std::size_t>> extract_families(const FamilyGraph& graph) {
  std::map<std::size_t, std::vector<std::size_t>> adjacency;
  for (const auto& [a, b] : graph.mutual_edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }

  std::vector<std::vector<std::size_t>> families;
  std::set<std::size_t> visited;
  for (const std::size_t start : graph.nodes) {
    if (visited.count(start) || !adjacency.count(start)) continue;
    std::vector<std::size_t> component, stack{start};
    visited.insert(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      component.push_back(v);
      for (const std::size_t w : adjacency[v])
        if (visited.insert(w).second) stack.push_back(w);
    }
    if (component.size() >= 2) {
      std::sort(component.begin(), component.end());
      families.push_back(std::move(component));
    }
  }
  std::sort(families.begin(), families.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return families;
}

FamilyReportEntry characterize_family(const std::vector<std::size_t>& family,
                                      const Eigensystem& es, const SymmetryBasis& sym,
                                      int top_k) {
  if (family.empty()) throw std::invalid_argument("empty family");
  const Basis& basis = sym.parent();
  const int n = basis.n_sites();

  FamilyReportEntry entry;
  entry.below_size_threshold = family.size() < 2;

  std::map<SpinWord, FockOverlap> pooled;  // canonical rep -> best overlap seen
  for (const std::size_t id : family) {
    const Eigen::VectorXd full = sym.expand_to_full(es.vectors.col(static_cast<Eigen::Index>(id)));

    // rank orbits by single-member probability
    std::map<SpinWord, double> orbit_prob;
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const double p = full[static_cast<Eigen::Index>(c)] * full[static_cast<Eigen::Index>(c)];
      if (p < 1e-12) continue;
      const SpinWord rep = orbit_representative(basis.state(c), n);
      auto [it, inserted] = orbit_prob.try_emplace(rep, p);
      if (!inserted) it->second = std::max(it->second, p);
    }
    std::vector<std::pair<SpinWord, double>> ranked(orbit_prob.begin(), orbit_prob.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(top_k)) ranked.resize(static_cast<std::size_t>(top_k));

    FamilyMemberReport member;
    member.index = id;
    member.energy = es.energies[static_cast<Eigen::Index>(id)];
    member.entropy = es.entropies.size() == es.energies.size()
                         ? es.entropies[static_cast<Eigen::Index>(id)]
                         : 0.0;
    for (const auto& [rep, p] : ranked) {
      FockOverlap overlap;
      overlap.fock = rep;
      overlap.probability = p;
      if (rep != 0) {
        const PatternLabel label = fock_pattern_label(rep, n);
        overlap.label = label.label;
        overlap.counts = label.counts;
      }
      member.top_focks.push_back(overlap);
      auto [it, inserted] = pooled.try_emplace(rep, overlap);
      if (!inserted) it->second.probability = std::max(it->second.probability, p);
    }
    entry.members.push_back(std::move(member));
  }

  entry.fock_set.reserve(pooled.size());
  std::vector<SpinWord> focks;
  for (const auto& [rep, overlap] : pooled) {
    entry.fock_set.push_back(overlap);
    focks.push_back(rep);
  }

  // P(i) across the whole spectrum for the pooled Fock set
  entry.family_probability.resize(es.dim());
  for (std::size_t j = 0; j < es.dim(); ++j) {
    const Eigen::VectorXd full = sym.expand_to_full(es.vectors.col(static_cast<Eigen::Index>(j)));
    entry.family_probability[j] = fock_family_probability(full, basis, focks);
  }
  return entry;
}

}  // namespace scardet
