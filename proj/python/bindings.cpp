#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scardet/analysis.hpp"
#include "scardet/circuits.hpp"
#include "scardet/models.hpp"
#include "scardet/optimize.hpp"

namespace py = pybind11;
using namespace scardet;

namespace {

ConstraintRule make_rule(const std::string& kind, const std::string& boundary) {
  ConstraintRule rule;
  if (kind == "none")
    rule.kind = ConstraintKind::None;
  else if (kind == "rydberg")
    rule.kind = ConstraintKind::Rydberg;
  else if (kind == "three-body")
    rule.kind = ConstraintKind::ThreeBody;
  else
    throw std::invalid_argument("kind must be 'none', 'rydberg' or 'three-body'");
  if (boundary == "periodic")
    rule.boundary = Boundary::Periodic;
  else if (boundary == "open")
    rule.boundary = Boundary::Open;
  else
    throw std::invalid_argument("boundary must be 'periodic' or 'open'");
  return rule;
}

StateVector as_state(const Eigen::VectorXcd& v) {
  return StateVector(v.data(), v.data() + v.size());
}

Eigen::VectorXcd from_state(const StateVector& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

PYBIND11_MODULE(_scardet, m) {
  m.doc() = "Constrained exact diagonalization, variational-autoencoder circuits and "
            "scar-family analysis";

  py::class_<Basis, std::shared_ptr<Basis>>(m, "Basis")
      .def_static(
          "enumerate",
          [](int n, const std::string& kind, const std::string& boundary) {
            return std::make_shared<Basis>(Basis::enumerate(n, make_rule(kind, boundary)));
          },
          py::arg("n_sites"), py::arg("kind") = "rydberg", py::arg("boundary") = "periodic")
      .def_static(
          "magnetization_sector",
          [](int n_spins, int sz) {
            return std::make_shared<Basis>(Basis::magnetization_sector(n_spins, sz));
          },
          py::arg("n_spins"), py::arg("sz_total"))
      .def_property_readonly("n_sites", &Basis::n_sites)
      .def("__len__", &Basis::size)
      .def("state", &Basis::state, py::arg("index"))
      .def("states", &Basis::states)
      .def("index_of", &Basis::index_of, py::arg("configuration"))
      .def("contains", &Basis::contains, py::arg("configuration"))
      .def("string_of", [](const Basis& b, std::size_t j) {
        return word_to_string(b.state(j), b.n_sites());
      });

  py::class_<SymmetryBasis, std::shared_ptr<SymmetryBasis>>(m, "SymmetryBasis")
      .def_static("build",
                  [](std::shared_ptr<Basis> basis) {
                    return std::make_shared<SymmetryBasis>(
                        SymmetryBasis::build(std::move(basis), SymmetrySector{}));
                  },
                  py::arg("basis"))
      .def_property_readonly("dim", &SymmetryBasis::dim)
      .def("representative", &SymmetryBasis::representative, py::arg("orbit"))
      .def("orbit_size", &SymmetryBasis::orbit_size, py::arg("orbit"))
      .def("orbit_of", &SymmetryBasis::orbit_of, py::arg("full_index"))
      .def("expand_to_full", &SymmetryBasis::expand_to_full, py::arg("sector_vector"))
      .def("project_from_full", &SymmetryBasis::project_from_full, py::arg("full_vector"));

  m.def("lucas_number", &lucas_number, py::arg("n"));
  m.def("string_to_word", &string_to_word, py::arg("configuration"));
  m.def("word_to_string", &word_to_string, py::arg("word"), py::arg("n_sites"));

  m.def("build_pxp", &build_pxp, py::arg("rydberg_basis"));
  m.def("build_pxp3", &build_pxp3, py::arg("three_body_basis"));
  m.def(
      "build_ladder",
      [](int rungs, double j, double disorder, std::uint64_t seed, const Basis& basis) {
        HamiltonianSpec spec;
        spec.model = Model::Ladder;
        spec.n_sites = rungs;
        spec.coupling_j = j;
        spec.disorder_width = disorder;
        spec.disorder_seed = seed;
        return build_ladder(spec, draw_ladder_fields(spec), basis);
      },
      py::arg("rungs"), py::arg("j"), py::arg("disorder"), py::arg("disorder_seed"),
      py::arg("magnetization_basis"));
  m.def(
      "build_pxp_sector",
      [](const SymmetryBasis& sym) {
        HamiltonianSpec spec;
        spec.model = sym.parent().rule().kind == ConstraintKind::ThreeBody ? Model::PXP3
                                                                           : Model::PXP;
        spec.n_sites = sym.parent().n_sites();
        return build_sector_dense(HamiltonianOperator(spec), sym);
      },
      py::arg("symmetry_basis"));

  m.def(
      "diagonalize",
      [](const Eigen::MatrixXd& h) {
        const Eigensystem es = diagonalize(h);
        return py::make_tuple(es.energies, es.vectors);
      },
      py::arg("symmetric_matrix"), "Full spectrum and sign-fixed eigenvectors (LAPACK dsyevd).");

  m.def(
      "entanglement_entropy",
      [](const Eigen::VectorXd& v, const Basis& basis, const std::vector<int>& left_sites) {
        return entanglement_entropy(v, basis, left_sites);
      },
      py::arg("state"), py::arg("basis"), py::arg("left_sites"));
  m.def("local_magnetization", &local_magnetization, py::arg("state"), py::arg("basis"));
  m.def("structure_factor", &structure_factor, py::arg("magnetization"), py::arg("q"));
  m.def(
      "fock_pattern_label",
      [](const std::string& configuration) {
        const PatternLabel label =
            fock_pattern_label(string_to_word(configuration), static_cast<int>(configuration.size()));
        return py::make_tuple(label.label, label.counts);
      },
      py::arg("configuration"), "Canonical gap label and (#Z2, #Z3, #Z4, #Z5) counts.");

  py::class_<CircuitSpec>(m, "CircuitSpec")
      .def(py::init([](int n_qubits, int layers, bool constrained, int n_trash,
                       int pattern_parity) {
             CircuitSpec spec{n_qubits, layers, constrained, n_trash, pattern_parity};
             spec.validate();
             return spec;
           }),
           py::arg("n_qubits"), py::arg("layers"), py::arg("constrained"), py::arg("n_trash"),
           py::arg("pattern_parity") = 0)
      .def_readonly("n_qubits", &CircuitSpec::n_qubits)
      .def_readonly("layers", &CircuitSpec::layers)
      .def_readonly("constrained", &CircuitSpec::constrained)
      .def_readonly("n_trash", &CircuitSpec::n_trash)
      .def_property_readonly("parameter_count", &CircuitSpec::parameter_count);

  m.def("trash_in_light_cone", &trash_in_light_cone, py::arg("spec"));
  m.def("ry_gate", &ry_gate, py::arg("theta"));
  m.def("rtilde_gate", &rtilde_gate, py::arg("theta"));
  m.def("cz_gate", &cz_gate);
  m.def("e_gate", &e_gate);

  py::class_<CircuitEngine>(m, "CircuitEngine")
      .def(py::init([](const CircuitSpec& spec) { return CircuitEngine(spec); }),
           py::arg("spec"))
      .def(py::init([](const CircuitSpec& spec, std::shared_ptr<Basis> basis) {
             return CircuitEngine(spec, std::move(basis));
           }),
           py::arg("spec"), py::arg("basis"))
      .def_property_readonly("dim", &CircuitEngine::dim)
      .def(
          "apply",
          [](const CircuitEngine& engine, const std::vector<double>& theta,
             const Eigen::VectorXcd& state) {
            StateVector v = as_state(state);
            engine.apply(ParameterVector(theta), v);
            return from_state(v);
          },
          py::arg("theta"), py::arg("state"))
      .def(
          "apply_adjoint",
          [](const CircuitEngine& engine, const std::vector<double>& theta,
             const Eigen::VectorXcd& state) {
            StateVector v = as_state(state);
            engine.apply_adjoint(ParameterVector(theta), v);
            return from_state(v);
          },
          py::arg("theta"), py::arg("state"))
      .def(
          "exact_cost",
          [](const CircuitEngine& engine, const std::vector<double>& theta,
             const Eigen::VectorXcd& state) {
            return engine.exact_cost(ParameterVector(theta), as_state(state));
          },
          py::arg("theta"), py::arg("state"))
      .def(
          "sampled_cost",
          [](const CircuitEngine& engine, const std::vector<double>& theta,
             const Eigen::VectorXcd& state, int shots, std::uint64_t seed) {
            return engine
                .trash_cost(ParameterVector(theta), as_state(state), CostMode::Sampled, shots,
                            seed)
                .value;
          },
          py::arg("theta"), py::arg("state"), py::arg("shots"), py::arg("seed"))
      .def(
          "reconstruction_fidelity",
          [](const CircuitEngine& engine, const std::vector<double>& theta,
             const Eigen::VectorXcd& state) {
            const auto f = engine.reconstruction_fidelity(ParameterVector(theta), as_state(state));
            return py::make_tuple(f.value, f.projected_to_zero);
          },
          py::arg("theta"), py::arg("state"));

  m.def("embed_in_computational_basis", &embed_in_computational_basis, py::arg("basis"),
        py::arg("state"), py::arg("n_qubits"));

  m.def(
      "spsa_minimize",
      [](const std::function<double(const std::vector<double>&, std::uint64_t)>& objective,
         std::vector<double> theta0, int iterations, std::uint64_t seed, int calibration_samples) {
        SpsaConfig config;
        config.iterations = iterations;
        config.seed = seed;
        config.calibration_samples = calibration_samples;
        calibrate_rates(objective, theta0, config);
        const SpsaResult result = spsa_minimize(objective, std::move(theta0), config);
        return py::make_tuple(result.best_parameters, result.best_smoothed, result.trace);
      },
      py::arg("objective"), py::arg("theta0"), py::arg("iterations"), py::arg("seed") = 0,
      py::arg("calibration_samples") = 25,
      "Calibrated SPSA descent; objective(theta, eval_id) may be noisy.");

  m.def(
      "detect_drops",
      [](const std::vector<double>& energies, const std::vector<double>& mean_cost,
         int train_state_index, int window, double zscore, double min_margin) {
        CostProfile profile;
        profile.energies = energies;
        profile.mean_cost = mean_cost;
        profile.stderr_cost.assign(mean_cost.size(), 0.0);
        profile.train_state_index = train_state_index;
        DropDetectionConfig config{window, zscore, min_margin};
        return detect_drops(profile, config);
      },
      py::arg("energies"), py::arg("mean_cost"), py::arg("train_state_index") = -1,
      py::arg("window") = 201, py::arg("zscore") = 4.0, py::arg("min_margin") = 0.1);

  m.def(
      "extract_families",
      [](const std::vector<std::size_t>& candidates,
         const std::map<std::size_t, std::vector<std::size_t>>& detections) {
        return extract_families(build_family_graph(candidates, detections));
      },
      py::arg("candidates"), py::arg("detections"),
      "Connected components of the mutual drop graph with at least two nodes.");
}
