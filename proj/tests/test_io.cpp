#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "scardet/io.hpp"

using namespace scardet;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("scardet_io_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("basis cache round-trips bit-exactly") {
  TempDir dir;
  for (const auto kind : {ConstraintKind::Rydberg, ConstraintKind::ThreeBody}) {
    const Basis basis = Basis::enumerate(14, {kind, Boundary::Periodic});
    const auto path = dir.path / "basis.txt";
    write_basis_cache(path, basis);
    const Basis restored = read_basis_cache(path);
    CHECK(restored == basis);
  }
  const Basis mag = Basis::magnetization_sector(10, 1);
  write_basis_cache(dir.path / "mag.txt", mag);
  CHECK(read_basis_cache(dir.path / "mag.txt") == mag);
}

TEST_CASE("corrupted basis caches are rejected") {
  TempDir dir;
  const Basis basis = Basis::enumerate(6, {ConstraintKind::Rydberg, Boundary::Periodic});
  const auto path = dir.path / "basis.txt";
  write_basis_cache(path, basis);
  std::string text = read_text_file(path);
  text.replace(text.rfind('\n', text.size() - 2) + 1, 1, "f");  // clobber the last word
  write_text_file(path, text);
  CHECK_THROWS_AS(read_basis_cache(path), std::runtime_error);
}

TEST_CASE("eigensystem cache round-trips bit-exactly") {
  TempDir dir;
  const Basis basis = Basis::magnetization_sector(8, 1);
  HamiltonianSpec spec;
  spec.model = Model::Ladder;
  spec.n_sites = 4;
  spec.disorder_seed = 5;
  const LadderFields fields = draw_ladder_fields(spec);
  Eigensystem es = diagonalize(build_ladder(spec, fields, basis));
  es.spec = spec;
  es.sector.magnetization = 1;
  es.fields = fields;
  compute_entropies(es, basis, nullptr, {0, 1, 2, 3});

  const auto path = dir.path / "eigen.bin";
  write_eigensystem_cache(path, es);
  const Eigensystem restored = read_eigensystem_cache(path);
  CHECK(restored.energies == es.energies);  // bitwise: no arithmetic allowed
  CHECK(restored.vectors == es.vectors);
  CHECK(restored.entropies == es.entropies);
  CHECK(restored.fields.h_k == es.fields.h_k);
  CHECK(restored.spec.model == Model::Ladder);
  CHECK(restored.sector.magnetization == 1);
}

TEST_CASE("trained model json round-trips") {
  TempDir dir;
  TrainedModel model;
  model.circuit = CircuitSpec{.n_qubits = 6, .layers = 2, .constrained = true, .n_trash = 2};
  model.theta = {0.1, 1.5, 2.25, 3.0, 0.7, 0.0, 5.5, 1.0 / 3.0, 0.123456789012345, 2.2, 1.1, 0.9};
  model.train_state_index = 17;
  model.train_energy = -2.6731;
  model.final_cost = 0.0625;
  model.seed = 12345678901234ull;
  model.shots = 300;
  model.iterations = 20000;
  model.spsa_a = 1.25;
  model.spsa_c = 0.08;
  model.spsa_stability = 200.0;

  const auto path = dir.path / "model.json";
  write_trained_model(path, model, "abcdef");
  const TrainedModel restored = read_trained_model(path);
  CHECK(restored.theta == model.theta);  // exact doubles through the json layer
  CHECK(restored.train_state_index == model.train_state_index);
  CHECK(restored.train_energy == model.train_energy);
  CHECK(restored.final_cost == model.final_cost);
  CHECK(restored.seed == model.seed);
  CHECK(restored.circuit.n_qubits == 6);
  CHECK(restored.circuit.constrained);
  CHECK(restored.spsa_a == model.spsa_a);
}

TEST_CASE("cost profile csv round-trips") {
  TempDir dir;
  CostProfile profile;
  profile.n_members = 8;
  profile.n_trash = 6;
  profile.train_state_index = 42;
  Rng rng(9);
  for (int j = 0; j < 50; ++j) {
    profile.energies.push_back(rng.uniform(-10.0, 10.0));
    profile.entropies.push_back(rng.uniform(0.0, 3.0));
    profile.mean_cost.push_back(rng.uniform(0.0, 6.0));
    profile.stderr_cost.push_back(rng.uniform(0.0, 0.2));
  }
  const auto path = dir.path / "profile.csv";
  write_cost_profile_csv(path, profile, "deadbeef");
  const CostProfile restored = read_cost_profile_csv(path);
  CHECK(restored.energies == profile.energies);
  CHECK(restored.entropies == profile.entropies);
  CHECK(restored.mean_cost == profile.mean_cost);
  CHECK(restored.stderr_cost == profile.stderr_cost);
  CHECK(restored.train_state_index == 42);
  CHECK(restored.n_members == 8);
  CHECK(restored.n_trash == 6);

  const std::string text = read_text_file(path);
  CHECK(text.find("config_hash=deadbeef") != std::string::npos);
}

TEST_CASE("identical writes produce identical bytes") {
  TempDir dir;
  CostProfile profile;
  profile.n_members = 2;
  profile.n_trash = 3;
  for (int j = 0; j < 10; ++j) {
    profile.energies.push_back(0.1 * j);
    profile.mean_cost.push_back(1.0 / (j + 1));
    profile.stderr_cost.push_back(0.0);
  }
  write_cost_profile_csv(dir.path / "a.csv", profile, "c0ffee");
  write_cost_profile_csv(dir.path / "b.csv", profile, "c0ffee");
  CHECK(read_text_file(dir.path / "a.csv") == read_text_file(dir.path / "b.csv"));
}
