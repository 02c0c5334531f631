#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "scardet/analysis.hpp"
#include "scardet/models.hpp"
#include "scardet/optimize.hpp"

namespace scardet {

// Basis cache: versioned text listing with hex-encoded configurations.
void write_basis_cache(const std::filesystem::path& path, const Basis& basis);
Basis read_basis_cache(const std::filesystem::path& path);

// Eigensystem cache: self-describing JSON header + raw little-endian doubles;
// round-trips bit-exactly.
void write_eigensystem_cache(const std::filesystem::path& path, const Eigensystem& es);
Eigensystem read_eigensystem_cache(const std::filesystem::path& path);

nlohmann::json trained_model_to_json(const TrainedModel& model);
TrainedModel trained_model_from_json(const nlohmann::json& j);
void write_trained_model(const std::filesystem::path& path, const TrainedModel& model,
                         const std::string& config_hash);
TrainedModel read_trained_model(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<int, double>>& trace,
                     const std::string& config_hash);

void write_cost_profile_csv(const std::filesystem::path& path, const CostProfile& profile,
                            const std::string& config_hash);
CostProfile read_cost_profile_csv(const std::filesystem::path& path);

void write_dream_csvs(const std::filesystem::path& magnetization_path,
                      const std::filesystem::path& structure_factor_path,
                      const DreamResult& result, const std::string& config_hash);

/// families.json: members, energies, labels, counts per family.
/// families.csv: per eigenstate (index, energy, entropy, family id or -1,
/// one P(i) column per family).
void write_family_report(const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path,
                         const std::vector<std::vector<std::size_t>>& families,
                         const std::vector<FamilyReportEntry>& entries, const Eigensystem& es,
                         int n_sites, const std::string& config_hash);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace scardet
