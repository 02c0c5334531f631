#include <CLI11.hpp>
#include <iostream>

#include "scardet/run.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
};

scardet::RunConfig load(const CommonOptions& opts) {
  scardet::RunConfig config = scardet::RunConfig::from_file(opts.config_path);
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "run config JSON")->required();
  cmd->add_option("-o,--output-dir", opts.output_dir, "override the config's output_dir");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scar-family detection with quantum variational autoencoders"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::size_t train_index = 0;
  bool has_train_index = false;

  auto* basis = app.add_subcommand("basis", "enumerate and cache the constrained basis");
  add_common(basis, opts);
  auto* diag = app.add_subcommand("diagonalize", "build and diagonalize the Hamiltonian");
  add_common(diag, opts);
  auto* train = app.add_subcommand("train", "train an autoencoder ensemble on one eigenstate");
  add_common(train, opts);
  train->add_option("--index", train_index, "train on this eigenstate index")
      ->each([&](const std::string&) { has_train_index = true; });
  auto* profile = app.add_subcommand("profile", "evaluate the trained ensemble on the spectrum");
  add_common(profile, opts);
  auto* families = app.add_subcommand("families", "all-pairs scan and family extraction");
  add_common(families, opts);
  auto* dream = app.add_subcommand("dream", "optimize the input of a frozen ensemble");
  add_common(dream, opts);
  auto* ladder = app.add_subcommand("ladder", "invariant-subspace checks and training");
  add_common(ladder, opts);
  auto* report = app.add_subcommand("report", "print a stored family report");
  add_common(report, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    scardet::RunConfig config = load(opts);
    if (has_train_index) {
      config.selector.mode = scardet::StateSelector::Mode::Index;
      config.selector.index = train_index;
    }
    if (basis->parsed()) return scardet::cmd_basis(config, std::cout);
    if (diag->parsed()) return scardet::cmd_diagonalize(config, std::cout);
    if (train->parsed()) return scardet::cmd_train(config, std::cout);
    if (profile->parsed()) return scardet::cmd_profile(config, std::cout);
    if (families->parsed()) return scardet::cmd_families(config, std::cout);
    if (dream->parsed()) return scardet::cmd_dream(config, std::cout);
    if (ladder->parsed()) return scardet::cmd_ladder(config, std::cout);
    if (report->parsed()) return scardet::cmd_report(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
