#include "scardet/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace scardet {

namespace {

using nlohmann::json;

constexpr const char* kBasisMagic = "scardet-basis v1";
constexpr const char* kEigenMagic = "SCEI";
constexpr std::uint32_t kEigenVersion = 1;

std::string kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::None: return "none";
    case ConstraintKind::Rydberg: return "rydberg";
    case ConstraintKind::ThreeBody: return "three-body";
  }
  return "?";
}

ConstraintKind kind_from_name(const std::string& s) {
  if (s == "none") return ConstraintKind::None;
  if (s == "rydberg") return ConstraintKind::Rydberg;
  if (s == "three-body") return ConstraintKind::ThreeBody;
  throw std::runtime_error("unknown constraint kind '" + s + "'");
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

void write_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated cache file");
}

json spec_to_json(const HamiltonianSpec& spec) {
  json j;
  j["model"] = spec.model == Model::PXP ? "pxp" : spec.model == Model::PXP3 ? "pxp3" : "ladder";
  j["sites"] = spec.n_sites;
  if (spec.model == Model::Ladder) {
    j["j"] = spec.coupling_j;
    j["disorder"] = spec.disorder_width;
    j["disorder_seed"] = spec.disorder_seed;
    if (!spec.delta.empty()) j["delta"] = spec.delta;
  }
  return j;
}

HamiltonianSpec spec_from_json(const json& j) {
  HamiltonianSpec spec;
  const std::string model = j.at("model").get<std::string>();
  spec.model = model == "pxp" ? Model::PXP : model == "pxp3" ? Model::PXP3 : Model::Ladder;
  spec.n_sites = j.at("sites").get<int>();
  if (spec.model == Model::Ladder) {
    spec.coupling_j = j.at("j").get<double>();
    spec.disorder_width = j.at("disorder").get<double>();
    spec.disorder_seed = j.at("disorder_seed").get<std::uint64_t>();
    if (j.contains("delta")) spec.delta = j.at("delta").get<std::vector<double>>();
  }
  return spec;
}

json sector_to_json(const SymmetrySector& sector) {
  json j;
  j["momentum"] = sector.momentum;
  j["inversion"] = sector.inversion;
  if (sector.magnetization) j["magnetization"] = *sector.magnetization;
  return j;
}

SymmetrySector sector_from_json(const json& j) {
  SymmetrySector sector;
  sector.momentum = j.at("momentum").get<int>();
  sector.inversion = j.at("inversion").get<int>();
  if (j.contains("magnetization")) sector.magnetization = j.at("magnetization").get<int>();
  return sector;
}

}  // namespace

void write_basis_cache(const std::filesystem::path& path, const Basis& basis) {
  auto out = open_out(path);
  out << kBasisMagic << "\n";
  out << "kind " << kind_name(basis.rule().kind) << "\n";
  out << "boundary " << (basis.rule().boundary == Boundary::Periodic ? "periodic" : "open")
      << "\n";
  out << "sites " << basis.n_sites() << "\n";
  out << "sz " << (basis.magnetization() ? std::to_string(*basis.magnetization()) : "none")
      << "\n";
  out << "count " << basis.size() << "\n";
  out << std::hex;
  for (const SpinWord w : basis.states()) out << w << "\n";
}

Basis read_basis_cache(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line, key, value;
  std::getline(in, line);
  if (line != kBasisMagic) throw std::runtime_error(path.string() + ": not a basis cache");

  ConstraintRule rule;
  int n_sites = 0;
  std::optional<int> sz;
  std::size_t count = 0;
  for (int i = 0; i < 5; ++i) {
    std::getline(in, line);
    std::istringstream row(line);
    row >> key >> value;
    if (key == "kind")
      rule.kind = kind_from_name(value);
    else if (key == "boundary")
      rule.boundary = value == "periodic" ? Boundary::Periodic : Boundary::Open;
    else if (key == "sites")
      n_sites = std::stoi(value);
    else if (key == "sz")
      sz = value == "none" ? std::optional<int>{} : std::optional<int>{std::stoi(value)};
    else if (key == "count")
      count = std::stoull(value);
    else
      throw std::runtime_error(path.string() + ": malformed basis cache header");
  }

  Basis fresh = sz ? Basis::magnetization_sector(n_sites, *sz) : Basis::enumerate(n_sites, rule);
  if (fresh.size() != count)
    throw std::runtime_error(path.string() + ": cached state count disagrees with the rule");
  std::size_t j = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (j >= count || std::stoull(line, nullptr, 16) != fresh.state(j))
      throw std::runtime_error(path.string() + ": cached configurations disagree with the rule");
    ++j;
  }
  if (j != count) throw std::runtime_error(path.string() + ": truncated basis cache");
  return fresh;
}

void write_eigensystem_cache(const std::filesystem::path& path, const Eigensystem& es) {
  json header;
  header["spec"] = spec_to_json(es.spec);
  header["sector"] = sector_to_json(es.sector);
  if (!es.fields.h_k.empty()) header["fields"] = es.fields.h_k;
  header["dim"] = es.dim();
  header["has_entropies"] = es.entropies.size() == es.energies.size();
  const std::string head = header.dump();

  auto out = open_out(path, std::ios::binary);
  out.write(kEigenMagic, 4);
  const std::uint32_t version = kEigenVersion;
  const auto head_len = static_cast<std::uint64_t>(head.size());
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));

  const auto dim = es.dim();
  write_doubles(out, es.energies.data(), dim);
  write_doubles(out, es.vectors.data(), dim * dim);
  if (es.entropies.size() == es.energies.size()) write_doubles(out, es.entropies.data(), dim);
}

Eigensystem read_eigensystem_cache(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != kEigenMagic)
    throw std::runtime_error(path.string() + ": not an eigensystem cache");
  std::uint32_t version = 0;
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (version != kEigenVersion)
    throw std::runtime_error(path.string() + ": unsupported cache version");
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  const json header = json::parse(head);

  Eigensystem es;
  es.spec = spec_from_json(header.at("spec"));
  es.sector = sector_from_json(header.at("sector"));
  if (header.contains("fields")) es.fields.h_k = header.at("fields").get<std::vector<double>>();
  const auto dim = header.at("dim").get<std::size_t>();
  es.energies.resize(static_cast<Eigen::Index>(dim));
  es.vectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  read_doubles(in, es.energies.data(), dim);
  read_doubles(in, es.vectors.data(), dim * dim);
  if (header.at("has_entropies").get<bool>()) {
    es.entropies.resize(static_cast<Eigen::Index>(dim));
    read_doubles(in, es.entropies.data(), dim);
  }
  return es;
}

json trained_model_to_json(const TrainedModel& model) {
  json j;
  j["circuit"] = {{"qubits", model.circuit.n_qubits},
                  {"layers", model.circuit.layers},
                  {"constrained", model.circuit.constrained},
                  {"trash_qubits", model.circuit.n_trash},
                  {"pattern_parity", model.circuit.pattern_parity}};
  j["theta"] = model.theta;
  j["train_state_index"] = model.train_state_index;
  j["train_energy"] = model.train_energy;
  j["final_cost"] = model.final_cost;
  j["seed"] = model.seed;
  j["shots"] = model.shots;
  j["iterations"] = model.iterations;
  j["spsa"] = {{"a", model.spsa_a},
               {"c", model.spsa_c},
               {"stability", model.spsa_stability},
               {"calibration_fallback", model.calibration_fallback}};
  return j;
}

TrainedModel trained_model_from_json(const json& j) {
  TrainedModel model;
  const json& c = j.at("circuit");
  model.circuit.n_qubits = c.at("qubits").get<int>();
  model.circuit.layers = c.at("layers").get<int>();
  model.circuit.constrained = c.at("constrained").get<bool>();
  model.circuit.n_trash = c.at("trash_qubits").get<int>();
  model.circuit.pattern_parity = c.at("pattern_parity").get<int>();
  model.theta = j.at("theta").get<std::vector<double>>();
  model.train_state_index = j.at("train_state_index").get<int>();
  model.train_energy = j.at("train_energy").get<double>();
  model.final_cost = j.at("final_cost").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.shots = j.at("shots").get<int>();
  model.iterations = j.at("iterations").get<int>();
  const json& s = j.at("spsa");
  model.spsa_a = s.at("a").get<double>();
  model.spsa_c = s.at("c").get<double>();
  model.spsa_stability = s.at("stability").get<double>();
  model.calibration_fallback = s.at("calibration_fallback").get<bool>();
  return model;
}

void write_trained_model(const std::filesystem::path& path, const TrainedModel& model,
                         const std::string& config_hash) {
  json j = trained_model_to_json(model);
  j["config_hash"] = config_hash;
  write_text_file(path, j.dump(2) + "\n");
}

TrainedModel read_trained_model(const std::filesystem::path& path) {
  return trained_model_from_json(json::parse(read_text_file(path)));
}

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<int, double>>& trace,
                     const std::string& config_hash) {
  auto out = open_out(path);
  out << "# scardet cost trace v1\n# config_hash=" << config_hash << "\n";
  out << "iteration,smoothed_cost\n";
  for (const auto& [it, cost] : trace) out << it << "," << format_double(cost) << "\n";
}

void write_cost_profile_csv(const std::filesystem::path& path, const CostProfile& profile,
                            const std::string& config_hash) {
  auto out = open_out(path);
  out << "# scardet cost profile v1\n# config_hash=" << config_hash << "\n";
  out << "# train_state_index=" << profile.train_state_index << "\n";
  out << "# n_trash=" << profile.n_trash << "\n";
  out << "index,energy,entropy,mean_cost,stderr,n_members\n";
  const bool has_entropy = profile.entropies.size() == profile.mean_cost.size();
  for (std::size_t j = 0; j < profile.mean_cost.size(); ++j) {
    out << j << "," << format_double(profile.energies[j]) << ","
        << (has_entropy ? format_double(profile.entropies[j]) : std::string("nan")) << ","
        << format_double(profile.mean_cost[j]) << "," << format_double(profile.stderr_cost[j])
        << "," << profile.n_members << "\n";
  }
}

CostProfile read_cost_profile_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  CostProfile profile;
  std::string line;
  bool header_done = false;
  bool any_entropy = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find("train_state_index=");
      if (eq != std::string::npos) profile.train_state_index = std::stoi(line.substr(eq + 18));
      const auto nt = line.find("n_trash=");
      if (nt != std::string::npos) profile.n_trash = std::stoi(line.substr(nt + 8));
      continue;
    }
    if (!header_done) {  // column names
      header_done = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw std::runtime_error(path.string() + ": malformed profile row");
    profile.energies.push_back(std::stod(cells[1]));
    if (cells[2] != "nan") {
      profile.entropies.push_back(std::stod(cells[2]));
      any_entropy = true;
    }
    profile.mean_cost.push_back(std::stod(cells[3]));
    profile.stderr_cost.push_back(std::stod(cells[4]));
    profile.n_members = std::stoi(cells[5]);
  }
  if (!any_entropy) profile.entropies.clear();
  return profile;
}

void write_dream_csvs(const std::filesystem::path& magnetization_path,
                      const std::filesystem::path& structure_factor_path,
                      const DreamResult& result, const std::string& config_hash) {
  {
    auto out = open_out(magnetization_path);
    out << "# scardet dream magnetization v1\n# config_hash=" << config_hash << "\n";
    out << "# optimizations=" << result.runs.size() << "\n";
    out << "site,mean_magnetization\n";
    for (Eigen::Index i = 0; i < result.mean_magnetization.size(); ++i)
      out << i << "," << format_double(result.mean_magnetization[i]) << "\n";
  }
  {
    auto out = open_out(structure_factor_path);
    out << "# scardet dream structure factor v1\n# config_hash=" << config_hash << "\n";
    out << "# optimizations=" << result.runs.size() << "\n";
    out << "q,mean_abs_structure_factor\n";
    for (std::size_t i = 0; i < result.q_grid.size(); ++i)
      out << format_double(result.q_grid[i]) << ","
          << format_double(result.mean_abs_structure_factor[i]) << "\n";
  }
}

void write_family_report(const std::filesystem::path& json_path,
                         const std::filesystem::path& csv_path,
                         const std::vector<std::vector<std::size_t>>& families,
                         const std::vector<FamilyReportEntry>& entries, const Eigensystem& es,
                         int n_sites, const std::string& config_hash) {
  json j;
  j["config_hash"] = config_hash;
  j["families"] = json::array();
  for (std::size_t f = 0; f < families.size(); ++f) {
    json fam;
    fam["id"] = f;
    fam["members"] = json::array();
    for (const auto& member : entries[f].members) {
      json m;
      m["index"] = member.index;
      m["energy"] = member.energy;
      m["entropy"] = member.entropy;
      m["top_focks"] = json::array();
      for (const auto& overlap : member.top_focks) {
        m["top_focks"].push_back({{"fock", word_to_string(overlap.fock, n_sites)},
                                  {"probability", overlap.probability},
                                  {"label", overlap.label},
                                  {"counts", overlap.counts}});
      }
      fam["members"].push_back(std::move(m));
    }
    fam["fock_set"] = json::array();
    for (const auto& overlap : entries[f].fock_set)
      fam["fock_set"].push_back({{"fock", word_to_string(overlap.fock, n_sites)},
                                 {"label", overlap.label},
                                 {"counts", overlap.counts}});
    j["families"].push_back(std::move(fam));
  }
  write_text_file(json_path, j.dump(2) + "\n");

  // per-eigenstate long table for plotting
  auto out = open_out(csv_path);
  out << "# scardet families v1\n# config_hash=" << config_hash << "\n";
  out << "index,energy,entropy,family";
  for (std::size_t f = 0; f < families.size(); ++f) out << ",P_family" << f;
  out << "\n";
  std::vector<int> family_of(es.dim(), -1);
  for (std::size_t f = 0; f < families.size(); ++f)
    for (const std::size_t id : families[f]) family_of[id] = static_cast<int>(f);
  const bool has_entropy = es.entropies.size() == es.energies.size();
  for (std::size_t jdx = 0; jdx < es.dim(); ++jdx) {
    out << jdx << "," << format_double(es.energies[static_cast<Eigen::Index>(jdx)]) << ","
        << (has_entropy ? format_double(es.entropies[static_cast<Eigen::Index>(jdx)])
                        : std::string("nan"))
        << "," << family_of[jdx];
    for (const auto& entry : entries) out << "," << format_double(entry.family_probability[jdx]);
    out << "\n";
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace scardet
