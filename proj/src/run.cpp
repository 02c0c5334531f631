#include "scardet/run.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "scardet/circuits.hpp"

namespace scardet {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& context) {
  if (!j.is_object()) throw std::invalid_argument("config: " + context + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown field '" + key + "' in " + context);
}

std::string model_name(Model m) {
  switch (m) {
    case Model::PXP: return "pxp";
    case Model::PXP3: return "pxp3";
    case Model::Ladder: return "ladder";
  }
  return "?";
}

std::filesystem::path run_dir(const RunConfig& config) {
  if (config.output_dir.empty()) throw std::invalid_argument("config: output_dir is required");
  return config.output_dir;
}

void write_resolved_config(const RunConfig& config) {
  write_text_file(run_dir(config) / "resolved_config.json", config.resolved_json() + "\n");
}

std::string basis_cache_name(const RunConfig& config) {
  std::ostringstream name;
  name << "basis_" << model_name(config.model.model) << "_N" << config.model.n_sites;
  if (config.model.model == Model::Ladder)
    name << "_sz" << config.sector.magnetization.value_or(1);
  name << ".txt";
  return name.str();
}

std::string eigen_cache_name(const RunConfig& config) {
  json key;
  key["model"] = model_name(config.model.model);
  key["sites"] = config.model.n_sites;
  if (config.model.model == Model::Ladder) {
    key["j"] = config.model.coupling_j;
    key["disorder"] = config.model.disorder_width;
    key["disorder_seed"] = config.model.disorder_seed;
    key["delta"] = config.model.delta;
    key["magnetization"] = config.sector.magnetization.value_or(1);
  }
  std::ostringstream name;
  name << "eigen_" << model_name(config.model.model) << "_N" << config.model.n_sites << "_"
       << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key.dump()) << ".bin";
  return name.str();
}

bool same_spec(const HamiltonianSpec& a, const HamiltonianSpec& b) {
  return a.model == b.model && a.n_sites == b.n_sites && a.coupling_j == b.coupling_j &&
         a.disorder_width == b.disorder_width && a.disorder_seed == b.disorder_seed &&
         a.delta == b.delta;
}

std::vector<int> half_cut_sites(const RunConfig& config) {
  std::vector<int> sites;
  if (config.model.model == Model::Ladder) {
    for (int k = 0; k < config.model.n_sites / 2; ++k) {
      sites.push_back(ladder_site(k, false));
      sites.push_back(ladder_site(k, true));
    }
    std::sort(sites.begin(), sites.end());
  } else {
    for (int i = 0; i < config.model.n_sites / 2; ++i) sites.push_back(i);
  }
  return sites;
}

CircuitEngine make_engine(const RunConfig& config, const Workspace& ws) {
  const CircuitSpec spec = config.circuit_spec();
  if (spec.constrained) return CircuitEngine(spec, ws.basis);
  return CircuitEngine(spec);
}

std::function<StateVector(std::size_t)> input_state_provider(const Workspace& ws,
                                                             const CircuitEngine& engine) {
  const bool constrained = engine.spec().constrained;
  const int n_qubits = engine.spec().n_qubits;
  return [&ws, constrained, n_qubits](std::size_t j) {
    Eigen::VectorXd full =
        ws.symmetry ? ws.symmetry->expand_to_full(
                          ws.eigensystem.vectors.col(static_cast<Eigen::Index>(j)))
                    : Eigen::VectorXd(ws.eigensystem.vectors.col(static_cast<Eigen::Index>(j)));
    if (constrained) return to_state_vector(full);
    return embed_in_computational_basis(*ws.basis, full, n_qubits);
  };
}

std::filesystem::path member_path(const RunConfig& config, std::size_t k) {
  std::ostringstream name;
  name << "member_" << std::setw(3) << std::setfill('0') << k << ".json";
  return run_dir(config) / "models" / name.str();
}

std::vector<TrainedModel> read_ensemble(const RunConfig& config) {
  std::vector<TrainedModel> models;
  for (std::size_t k = 0;; ++k) {
    const auto path = member_path(config, k);
    if (!std::filesystem::exists(path)) break;
    models.push_back(read_trained_model(path));
  }
  if (models.empty())
    throw std::runtime_error("no trained models under " +
                             (run_dir(config) / "models").string() + "; run `scardet train` first");
  return models;
}

}  // namespace

CircuitSpec RunConfig::circuit_spec() const {
  CircuitSpec spec;
  spec.n_qubits = model.spin_count();
  spec.layers = layers;
  spec.constrained = constrained;
  spec.n_trash = n_trash;
  spec.pattern_parity = pattern_parity;
  spec.validate();
  return spec;
}

TrainingConfig RunConfig::training_config() const {
  TrainingConfig tc;
  tc.circuit = circuit_spec();
  tc.shots = shots;
  tc.iterations = iterations;
  tc.ensemble_size = ensemble;
  tc.seed_base = derive_seed(seed, 0x7ea13ull, seed_base);
  tc.calibration_samples = calibration_samples;
  return tc;
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  reject_unknown(j, {"version", "seed", "output_dir", "workers", "model", "sector", "circuit",
                     "training", "detection", "dream", "selector", "ladder"},
                 "top level");
  RunConfig config;
  config.version = j.at("version").get<int>();
  if (config.version != 1)
    throw std::invalid_argument("config: unsupported version " + std::to_string(config.version));
  config.seed = j.value("seed", config.seed);
  config.output_dir = j.value("output_dir", std::string{});
  config.workers = j.value("workers", 0);

  {
    const json& m = j.at("model");
    reject_unknown(m, {"name", "sites", "j", "disorder", "delta", "disorder_seed"}, "model");
    const std::string name = m.at("name").get<std::string>();
    if (name == "pxp")
      config.model.model = Model::PXP;
    else if (name == "pxp3")
      config.model.model = Model::PXP3;
    else if (name == "ladder")
      config.model.model = Model::Ladder;
    else
      throw std::invalid_argument("config: unknown model '" + name + "'");
    config.model.n_sites = m.at("sites").get<int>();
    config.model.coupling_j = m.value("j", 1.0);
    config.model.disorder_width = m.value("disorder", 0.1);
    config.model.disorder_seed = m.value("disorder_seed", std::uint64_t{0});
    if (m.contains("delta")) config.model.delta = m.at("delta").get<std::vector<double>>();
  }

  if (j.contains("sector")) {
    const json& s = j.at("sector");
    reject_unknown(s, {"momentum", "inversion", "magnetization"}, "sector");
    config.sector.momentum = s.value("momentum", 0);
    config.sector.inversion = s.value("inversion", 1);
    if (s.contains("magnetization")) config.sector.magnetization = s.at("magnetization").get<int>();
  }
  if (config.model.model == Model::Ladder && !config.sector.magnetization)
    config.sector.magnetization = 1;

  if (j.contains("circuit")) {
    const json& c = j.at("circuit");
    reject_unknown(c, {"constrained", "layers", "trash_qubits", "pattern_parity"}, "circuit");
    config.constrained = c.value("constrained", false);
    config.layers = c.value("layers", 0);
    config.n_trash = c.value("trash_qubits", 0);
    config.pattern_parity = c.value("pattern_parity", 0);
  }

  if (j.contains("training")) {
    const json& t = j.at("training");
    reject_unknown(t, {"shots", "iterations", "ensemble", "seed_base", "calibration_samples"},
                   "training");
    config.shots = t.value("shots", config.shots);
    config.iterations = t.value("iterations", config.iterations);
    config.ensemble = t.value("ensemble", config.ensemble);
    config.seed_base = t.value("seed_base", config.seed_base);
    config.calibration_samples = t.value("calibration_samples", config.calibration_samples);
  }

  if (j.contains("detection")) {
    const json& d = j.at("detection");
    reject_unknown(d,
                   {"window", "zscore", "min_margin", "entropy_threshold",
                    "trainings_per_candidate", "top_fock_labels"},
                   "detection");
    config.detection.window = d.value("window", config.detection.window);
    config.detection.zscore = d.value("zscore", config.detection.zscore);
    config.detection.min_margin = d.value("min_margin", config.detection.min_margin);
    config.entropy_threshold = d.value("entropy_threshold", config.entropy_threshold);
    config.trainings_per_candidate =
        d.value("trainings_per_candidate", config.trainings_per_candidate);
    config.top_fock_labels = d.value("top_fock_labels", config.top_fock_labels);
  }

  if (j.contains("dream")) {
    const json& d = j.at("dream");
    reject_unknown(d, {"optimizations", "steps", "shots", "target_step"}, "dream");
    config.dream.optimizations = d.value("optimizations", config.dream.optimizations);
    config.dream.steps = d.value("steps", config.dream.steps);
    config.dream.shots = d.value("shots", config.dream.shots);
    config.dream.target_step = d.value("target_step", config.dream.target_step);
  }

  if (j.contains("selector")) {
    const json& s = j.at("selector");
    reject_unknown(s, {"mode", "index", "fock", "energy_min", "energy_max", "tie_tolerance"},
                   "selector");
    const std::string mode = s.value("mode", std::string{"index"});
    if (mode == "index")
      config.selector.mode = StateSelector::Mode::Index;
    else if (mode == "fock_overlap")
      config.selector.mode = StateSelector::Mode::FockOverlap;
    else
      throw std::invalid_argument("config: unknown selector mode '" + mode + "'");
    config.selector.index = s.value("index", std::size_t{0});
    config.selector.fock = s.value("fock", std::string{});
    config.selector.energy_min = s.value("energy_min", config.selector.energy_min);
    config.selector.energy_max = s.value("energy_max", config.selector.energy_max);
    config.selector.tie_tolerance = s.value("tie_tolerance", config.selector.tie_tolerance);
  }

  if (j.contains("ladder")) {
    const json& l = j.at("ladder");
    reject_unknown(l, {"species", "insertions", "phase", "realizations", "subspace_state"},
                   "ladder");
    const std::string species = l.value("species", std::string{"holon"});
    if (species == "holon")
      config.species = InsertionSpecies::Holon;
    else if (species == "doublon")
      config.species = InsertionSpecies::Doublon;
    else
      throw std::invalid_argument("config: unknown species '" + species + "'");
    config.insertions = l.value("insertions", config.insertions);
    const std::string phase = l.value("phase", std::string{"st"});
    if (phase == "st")
      config.phase = BackgroundPhase::SingletFirst;
    else if (phase == "ts")
      config.phase = BackgroundPhase::TripletFirst;
    else
      throw std::invalid_argument("config: unknown phase '" + phase + "'");
    config.disorder_realizations = l.value("realizations", config.disorder_realizations);
    config.subspace_state = l.value("subspace_state", config.subspace_state);
  }
  return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

std::string RunConfig::resolved_json() const {
  json j;
  j["version"] = version;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  j["model"] = {{"name", model_name(model.model)}, {"sites", model.n_sites}};
  if (model.model == Model::Ladder) {
    j["model"]["j"] = model.coupling_j;
    j["model"]["disorder"] = model.disorder_width;
    j["model"]["disorder_seed"] = model.disorder_seed;
    j["model"]["delta"] = model.delta;
  }
  j["sector"] = {{"momentum", sector.momentum}, {"inversion", sector.inversion}};
  if (sector.magnetization) j["sector"]["magnetization"] = *sector.magnetization;
  j["circuit"] = {{"constrained", constrained},
                  {"layers", layers},
                  {"trash_qubits", n_trash},
                  {"pattern_parity", pattern_parity}};
  j["training"] = {{"shots", shots},
                   {"iterations", iterations},
                   {"ensemble", ensemble},
                   {"seed_base", seed_base},
                   {"calibration_samples", calibration_samples}};
  j["detection"] = {{"window", detection.window},
                    {"zscore", detection.zscore},
                    {"min_margin", detection.min_margin},
                    {"entropy_threshold", entropy_threshold},
                    {"trainings_per_candidate", trainings_per_candidate},
                    {"top_fock_labels", top_fock_labels}};
  j["dream"] = {{"optimizations", dream.optimizations},
                {"steps", dream.steps},
                {"shots", dream.shots},
                {"target_step", dream.target_step}};
  j["selector"] = {
      {"mode", selector.mode == StateSelector::Mode::Index ? "index" : "fock_overlap"},
      {"index", selector.index},
      {"fock", selector.fock},
      {"energy_min", selector.energy_min},
      {"energy_max", selector.energy_max},
      {"tie_tolerance", selector.tie_tolerance}};
  j["ladder"] = {{"species", species == InsertionSpecies::Holon ? "holon" : "doublon"},
                 {"insertions", insertions},
                 {"phase", phase == BackgroundPhase::SingletFirst ? "st" : "ts"},
                 {"realizations", disorder_realizations},
                 {"subspace_state", subspace_state}};
  return j.dump(2);
}

std::string RunConfig::config_hash() const {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << fnv1a(resolved_json());
  return ss.str();
}

std::filesystem::path cache_root(const RunConfig& config) {
  if (const char* env = std::getenv("SCARDET_CACHE_DIR")) return env;
  return run_dir(config) / "cache";
}

Workspace prepare_workspace(const RunConfig& config, std::ostream& log) {
  Workspace ws;
  const auto root = cache_root(config);

  const auto basis_path = root / basis_cache_name(config);
  const bool basis_cached = std::filesystem::exists(basis_path);
  Basis basis = [&] {
    if (basis_cached) return read_basis_cache(basis_path);
    Basis fresh = config.model.model == Model::Ladder
                      ? Basis::magnetization_sector(config.model.spin_count(),
                                                    config.sector.magnetization.value_or(1))
                      : Basis::enumerate(config.model.n_sites, config.model.basis_rule());
    write_basis_cache(basis_path, fresh);
    return fresh;
  }();
  if (basis.n_sites() != config.model.spin_count())
    throw std::runtime_error("basis cache collision: " + basis_path.string() +
                             " holds a different system");
  log << "basis: " << (basis_cached ? "cache hit " : "built ") << basis_path.filename().string()
      << ", dimension " << basis.size() << "\n";
  ws.basis = std::make_shared<const Basis>(std::move(basis));

  if (config.model.model != Model::Ladder)
    ws.symmetry = std::make_shared<SymmetryBasis>(SymmetryBasis::build(ws.basis, config.sector));

  ws.half_cut = half_cut_sites(config);

  const auto eigen_path = root / eigen_cache_name(config);
  if (std::filesystem::exists(eigen_path)) {
    ws.eigensystem = read_eigensystem_cache(eigen_path);
    if (!same_spec(ws.eigensystem.spec, config.model))
      throw std::runtime_error("eigensystem cache collision: " + eigen_path.string() +
                               " was produced by a different model spec");
    const std::size_t expected = ws.symmetry ? ws.symmetry->dim() : ws.basis->size();
    if (ws.eigensystem.dim() != expected)
      throw std::runtime_error("eigensystem cache collision: dimension mismatch in " +
                               eigen_path.string());
    log << "eigensystem: cache hit " << eigen_path.filename().string() << ", dimension "
        << ws.eigensystem.dim() << "\n";
    return ws;
  }

  HamiltonianOperator op(config.model);
  Eigen::MatrixXd h = ws.symmetry ? build_sector_dense(op, *ws.symmetry)
                                  : build_dense(op, *ws.basis);
  Eigensystem es = diagonalize(h);
  es.spec = config.model;
  es.sector = config.sector;
  es.fields = op.fields();
  compute_entropies(es, *ws.basis, ws.symmetry.get(), ws.half_cut, config.workers);
  write_eigensystem_cache(eigen_path, es);
  log << "eigensystem: built " << eigen_path.filename().string() << ", dimension " << es.dim()
      << ", energies [" << format_double(es.energies.minCoeff()) << ", "
      << format_double(es.energies.maxCoeff()) << "]\n";
  ws.eigensystem = std::move(es);
  return ws;
}

std::size_t resolve_selector(const StateSelector& selector, const Eigensystem& es,
                             const SymmetryBasis* sym, const Basis& basis) {
  if (selector.mode == StateSelector::Mode::Index) {
    if (selector.index >= es.dim())
      throw std::invalid_argument("selector index " + std::to_string(selector.index) +
                                  " out of range (dimension " + std::to_string(es.dim()) + ")");
    return selector.index;
  }

  if (selector.fock.size() != static_cast<std::size_t>(basis.n_sites()))
    throw std::invalid_argument("selector fock string must have one character per site");
  const SpinWord f = string_to_word(selector.fock);
  const std::size_t f_index = basis.index_of(f);

  double best = -1.0, second = -1.0;
  std::size_t best_id = 0, second_id = 0;
  bool any = false;
  for (std::size_t j = 0; j < es.dim(); ++j) {
    const double e = es.energies[static_cast<Eigen::Index>(j)];
    if (e < selector.energy_min || e > selector.energy_max) continue;
    any = true;
    double amp;
    if (sym) {
      const auto o = sym->orbit_of(f_index);
      amp = es.vectors(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(j)) /
            std::sqrt(static_cast<double>(sym->orbit_size(o)));
    } else {
      amp = es.vectors(static_cast<Eigen::Index>(f_index), static_cast<Eigen::Index>(j));
    }
    const double overlap = amp * amp;
    if (overlap > best) {
      second = best;
      second_id = best_id;
      best = overlap;
      best_id = j;
    } else if (overlap > second) {
      second = overlap;
      second_id = j;
    }
  }
  if (!any)
    throw std::invalid_argument("selector matched no eigenstate in the energy window [" +
                                format_double(selector.energy_min) + ", " +
                                format_double(selector.energy_max) + "]");
  if (second >= 0.0 && best - second <= selector.tie_tolerance) {
    std::ostringstream msg;
    msg << "selector is ambiguous: eigenstates " << best_id << " (E="
        << format_double(es.energies[static_cast<Eigen::Index>(best_id)]) << ", overlap "
        << format_double(best) << ") and " << second_id << " (E="
        << format_double(es.energies[static_cast<Eigen::Index>(second_id)]) << ", overlap "
        << format_double(second) << ") are within the tie tolerance";
    throw std::invalid_argument(msg.str());
  }
  return best_id;
}

int cmd_basis(const RunConfig& config, std::ostream& log) {
  const auto root = cache_root(config);
  const auto basis_path = root / basis_cache_name(config);
  const bool cached = std::filesystem::exists(basis_path);

  Basis basis = cached ? read_basis_cache(basis_path)
                       : (config.model.model == Model::Ladder
                              ? Basis::magnetization_sector(config.model.spin_count(),
                                                            config.sector.magnetization.value_or(1))
                              : Basis::enumerate(config.model.n_sites, config.model.basis_rule()));
  if (!cached) write_basis_cache(basis_path, basis);

  log << "model " << model_name(config.model.model) << " N=" << config.model.n_sites
      << (cached ? " (cache hit)" : "") << "\n";
  log << "full dimension: " << basis.size() << "\n";
  if (config.model.model != Model::Ladder) {
    auto shared = std::make_shared<const Basis>(std::move(basis));
    const SymmetryBasis sym = SymmetryBasis::build(shared, config.sector);
    log << "(k=0, inversion +1) sector dimension: " << sym.dim() << "\n";
  } else {
    log << "total S^z (spin-1/2 units): " << config.sector.magnetization.value_or(1) << "\n";
  }
  write_resolved_config(config);
  return 0;
}

int cmd_diagonalize(const RunConfig& config, std::ostream& log) {
  const Workspace ws = prepare_workspace(config, log);
  log << "spectrum: [" << format_double(ws.eigensystem.energies.minCoeff()) << ", "
      << format_double(ws.eigensystem.energies.maxCoeff()) << "], trace "
      << format_double(ws.eigensystem.energies.sum()) << "\n";
  if (ws.eigensystem.entropies.size() > 0)
    log << "entropy: min " << format_double(ws.eigensystem.entropies.minCoeff()) << ", max "
        << format_double(ws.eigensystem.entropies.maxCoeff()) << "\n";
  write_resolved_config(config);
  return 0;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  const Workspace ws = prepare_workspace(config, log);
  const CircuitEngine engine = make_engine(config, ws);
  const auto index = resolve_selector(config.selector, ws.eigensystem, ws.symmetry.get(),
                                      *ws.basis);
  const double energy = ws.eigensystem.energies[static_cast<Eigen::Index>(index)];
  log << "training eigenstate " << index << " at E=" << format_double(energy) << "\n";

  const auto provider = input_state_provider(ws, engine);
  const StateVector input = provider(index);
  const auto models = train_ensemble(engine, input, static_cast<int>(index), energy,
                                     config.training_config(), config.workers);

  const std::string hash = config.config_hash();
  for (std::size_t k = 0; k < models.size(); ++k) {
    write_trained_model(member_path(config, k), models[k], hash);
    std::ostringstream trace_name;
    trace_name << "member_" << std::setw(3) << std::setfill('0') << k << ".csv";
    write_trace_csv(run_dir(config) / "traces" / trace_name.str(), models[k].cost_trace, hash);
    log << "member " << k << ": final smoothed cost " << format_double(models[k].final_cost)
        << "\n";
  }
  write_resolved_config(config);
  return 0;
}

int cmd_profile(const RunConfig& config, std::ostream& log) {
  const Workspace ws = prepare_workspace(config, log);
  const CircuitEngine engine = make_engine(config, ws);
  const auto models = read_ensemble(config);
  const auto provider = input_state_provider(ws, engine);

  CostProfile profile = evaluate_cost_profile(engine, models, ws.eigensystem, provider,
                                              config.workers);
  write_cost_profile_csv(run_dir(config) / "profile.csv", profile, config.config_hash());

  const auto drops = detect_drops(profile, config.detection);
  log << "profile over " << profile.mean_cost.size() << " eigenstates, " << models.size()
      << " members; " << drops.size() << " drops detected\n";
  for (const std::size_t id : drops)
    log << "  drop at " << id << " (E=" << format_double(profile.energies[id]) << ", cost "
        << format_double(profile.mean_cost[id]) << ")\n";
  write_resolved_config(config);
  return 0;
}

int cmd_families(const RunConfig& config, std::ostream& log) {
  const Workspace ws = prepare_workspace(config, log);
  if (!ws.symmetry) throw std::invalid_argument("family detection runs on the chain models");
  const CircuitEngine engine = make_engine(config, ws);
  const auto provider = input_state_provider(ws, engine);
  const std::string hash = config.config_hash();

  const auto candidates = select_low_entropy(ws.eigensystem, config.entropy_threshold);
  log << candidates.size() << " low-entropy candidates (S < "
      << format_double(config.entropy_threshold) << ")\n";

  TrainingConfig tc = config.training_config();
  tc.ensemble_size = config.trainings_per_candidate;

  std::map<std::size_t, std::vector<std::size_t>> detections;
  for (const std::size_t candidate : candidates) {
    TrainingConfig ctc = tc;
    ctc.seed_base = derive_seed(tc.seed_base, 0xfa41ull, candidate);
    const StateVector input = provider(candidate);
    const auto models = train_ensemble(
        engine, input, static_cast<int>(candidate),
        ws.eigensystem.energies[static_cast<Eigen::Index>(candidate)], ctc, config.workers);
    CostProfile profile = evaluate_cost_profile(engine, models, ws.eigensystem, provider,
                                                config.workers);
    std::ostringstream name;
    name << "profile_cand_" << candidate << ".csv";
    write_cost_profile_csv(run_dir(config) / "profiles" / name.str(), profile, hash);
    detections[candidate] = detect_drops(profile, config.detection);
    log << "candidate " << candidate << ": " << detections[candidate].size() << " drops\n";
  }

  const FamilyGraph graph = build_family_graph(candidates, detections);
  const auto families = extract_families(graph);
  std::vector<FamilyReportEntry> entries;
  entries.reserve(families.size());
  for (const auto& family : families)
    entries.push_back(characterize_family(family, ws.eigensystem, *ws.symmetry,
                                          config.top_fock_labels));

  write_family_report(run_dir(config) / "families.json", run_dir(config) / "families.csv",
                      families, entries, ws.eigensystem, ws.basis->n_sites(), hash);
  log << families.size() << " families\n";
  for (std::size_t f = 0; f < families.size(); ++f) {
    log << "  family " << f << ":";
    for (const std::size_t id : families[f]) log << " " << id;
    log << "\n";
  }
  write_resolved_config(config);
  return 0;
}

int cmd_dream(const RunConfig& config, std::ostream& log) {
  if (config.dream.optimizations < 1)
    throw std::invalid_argument("dreaming needs at least one optimization");
  const Workspace ws = prepare_workspace(config, log);
  const CircuitEngine engine = make_engine(config, ws);
  const auto models = read_ensemble(config);
  if (models.empty()) throw std::invalid_argument("dreaming needs a non-empty ensemble");

  // dreaming optimizes over the circuit's own amplitude space
  std::shared_ptr<const Basis> dream_basis =
      engine.spec().constrained
          ? ws.basis
          : std::make_shared<const Basis>(Basis::enumerate(
                engine.spec().n_qubits, ConstraintRule{ConstraintKind::None, Boundary::Periodic}));

  DreamConfig dc = config.dream;
  dc.seed = derive_seed(config.seed, 0xd2ea2full);
  const DreamResult result = dream(engine, models, *dream_basis, dc, config.workers);

  write_dream_csvs(run_dir(config) / "dream_magnetization.csv",
                   run_dir(config) / "dream_structure_factor.csv", result, config.config_hash());

  const auto peak = std::max_element(result.mean_abs_structure_factor.begin(),
                                     result.mean_abs_structure_factor.end());
  const std::size_t peak_idx =
      static_cast<std::size_t>(peak - result.mean_abs_structure_factor.begin());
  log << "dream: " << result.runs.size() << " optimizations, |S(q)| peak at q="
      << format_double(result.q_grid[peak_idx]) << " (value " << format_double(*peak) << ")\n";
  write_resolved_config(config);
  return 0;
}

int cmd_ladder(const RunConfig& config, std::ostream& log) {
  if (config.model.model != Model::Ladder)
    throw std::invalid_argument("cmd_ladder needs a ladder model config");
  const Workspace ws = prepare_workspace(config, log);

  const auto subspace = enumerate_invariant_subspace(config.model.n_sites, config.species,
                                                     config.insertions, config.phase, *ws.basis);
  const auto opposite = enumerate_invariant_subspace(
      config.model.n_sites, config.species, config.insertions,
      config.phase == BackgroundPhase::SingletFirst ? BackgroundPhase::TripletFirst
                                                    : BackgroundPhase::SingletFirst,
      *ws.basis);

  double worst = 0.0;
  for (int t = 0; t < config.disorder_realizations; ++t) {
    HamiltonianSpec spec = config.model;
    spec.disorder_seed = derive_seed(config.model.disorder_seed, 0xd150ull, t);
    const HamiltonianOperator op(spec);
    worst = std::max(worst, invariance_residual(op, *ws.basis, subspace.vectors));
    worst = std::max(worst, invariance_residual(op, *ws.basis, opposite.vectors));
  }
  log << subspace.members.size() << " members, invariance residual "
      << (worst < 1e-10 ? "< 1e-10" : ">= 1e-10 (" + format_double(worst) + ")") << " over "
      << config.disorder_realizations << " disorder realizations\n";

  // Exact subspace eigenstates of this realization and their spectrum indices.
  const HamiltonianOperator op(config.model, ws.eigensystem.fields);
  auto locate = [&](const InvariantSubspace& sub) {
    const Eigen::MatrixXd hv = apply_operator(op, *ws.basis, sub.vectors);
    const Eigen::MatrixXd h_sub = sub.vectors.transpose() * hv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_sub);
    const Eigen::MatrixXd w = sub.vectors * solver.eigenvectors();
    std::vector<std::size_t> ids;
    for (Eigen::Index m = 0; m < w.cols(); ++m) {
      Eigen::Index best = 0;
      (ws.eigensystem.vectors.transpose() * w.col(m)).cwiseAbs().maxCoeff(&best);
      ids.push_back(static_cast<std::size_t>(best));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  const auto subspace_ids = locate(subspace);
  const auto opposite_ids = locate(opposite);
  log << "subspace eigenstates:";
  for (const auto id : subspace_ids) log << " " << id;
  log << "\n";

  if (config.iterations > 0 && config.layers > 0) {
    const CircuitEngine engine = make_engine(config, ws);
    const auto provider = input_state_provider(ws, engine);
    const std::size_t train_id =
        config.subspace_state >= 0 &&
                config.subspace_state < static_cast<int>(subspace_ids.size())
            ? subspace_ids[static_cast<std::size_t>(config.subspace_state)]
            : subspace_ids[subspace_ids.size() / 2];
    log << "training on subspace eigenstate " << train_id << " (E="
        << format_double(ws.eigensystem.energies[static_cast<Eigen::Index>(train_id)]) << ")\n";
    const auto models = train_ensemble(
        engine, provider(train_id), static_cast<int>(train_id),
        ws.eigensystem.energies[static_cast<Eigen::Index>(train_id)], config.training_config(),
        config.workers);
    CostProfile profile = evaluate_cost_profile(engine, models, ws.eigensystem, provider,
                                                config.workers);
    write_cost_profile_csv(run_dir(config) / "ladder_profile.csv", profile, config.config_hash());

    auto mean_over = [&](const std::vector<std::size_t>& ids) {
      double sum = 0.0;
      for (const auto id : ids) sum += profile.mean_cost[id];
      return sum / static_cast<double>(ids.size());
    };
    const double p10 = percentile(profile.mean_cost, 10.0);
    log << "trained-subspace mean cost " << format_double(mean_over(subspace_ids))
        << ", opposite-phase mean cost " << format_double(mean_over(opposite_ids))
        << ", 10th percentile " << format_double(p10) << "\n";
  }
  write_resolved_config(config);
  return 0;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
  const auto path = run_dir(config) / "families.json";
  if (!std::filesystem::exists(path))
    throw std::runtime_error("missing " + path.string() + "; run `scardet families` first");
  const json j = json::parse(read_text_file(path));
  log << "family report (" << j.at("families").size() << " families), config "
      << j.at("config_hash").get<std::string>() << "\n";
  for (const auto& fam : j.at("families")) {
    log << "family " << fam.at("id").get<int>() << " (" << fam.at("members").size()
        << " members)\n";
    for (const auto& m : fam.at("members")) {
      log << "  state " << m.at("index").get<std::size_t>() << "  E="
          << format_double(m.at("energy").get<double>()) << "  S="
          << format_double(m.at("entropy").get<double>());
      if (!m.at("top_focks").empty()) {
        const auto& top = m.at("top_focks").front();
        log << "  top " << top.at("label").get<std::string>() << " (p="
            << format_double(top.at("probability").get<double>()) << ")";
      }
      log << "\n";
    }
  }
  return 0;
}

}  // namespace scardet
