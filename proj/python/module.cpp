#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swrrst/dense.hpp"
#include "swrrst/errors.hpp"
#include "swrrst/integrals_io.hpp"
#include "swrrst/jw.hpp"
#include "swrrst/pipeline.hpp"

namespace py = pybind11;
using namespace swrrst;

namespace {

SolverOptions options_from_dict(const py::dict& d) {
    SolverOptions opts;
    for (const auto& item : d) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "tol") opts.tol = py::cast<double>(item.second);
        else if (key == "max_iter") opts.max_iter = py::cast<int>(item.second);
        else if (key == "l") opts.l = py::cast<int>(item.second);
        else if (key == "domain") {
            const std::string name = py::cast<std::string>(item.second);
            if (name == "eod") opts.domain = Domain::eod;
            else if (name == "od") opts.domain = Domain::od;
            else throw ConfigError("domain must be 'eod' or 'od', got '" + name + "'");
        } else if (key == "body_rank") opts.body_rank = py::cast<int>(item.second);
        else if (key == "bch_body_rank") opts.bch_body_rank = py::cast<int>(item.second);
        else if (key == "level_shift") opts.level_shift = py::cast<double>(item.second);
        else if (key == "denom_floor") opts.denom_floor = py::cast<double>(item.second);
        else if (key == "acceleration") opts.acceleration = py::cast<bool>(item.second);
        else if (key == "diis_window") opts.diis_window = py::cast<int>(item.second);
        else if (key == "series_tol") opts.series_tol = py::cast<double>(item.second);
        else throw ConfigError("unknown solver option '" + key + "'");
    }
    return opts;
}

py::dict report_to_dict(const SolveReport& report) {
    py::dict out;
    out["iterations"] = report.iterations;
    out["residual_history"] = report.residual_history;
    out["final_residual"] = report.final_residual;
    out["amplitude_norm"] = report.amplitude_norm;
    out["commutator_rank"] = report.commutator_rank;
    out["converged"] = report.converged;
    out["smallest_denominator"] = report.smallest_denominator;
    out["smallest_denominator_term"] = report.smallest_denominator_term;
    return out;
}

py::dict bundle_to_dict(const ResultBundle& bundle) {
    py::dict out;
    out["ok"] = bundle.ok();
    out["config_hash"] = bundle.config_hash;
    out["last_stage"] = to_string(bundle.last_stage);
    if (!bundle.ok()) {
        out["failed_stage"] = bundle.failed_stage;
        out["failure"] = to_string(bundle.failure);
        out["error_message"] = bundle.error_message;
        return out;
    }
    out["solve"] = report_to_dict(bundle.solve_report);
    out["g_terms"] = bundle.g.g.size();
    out["discarded_norm2"] = bundle.g.discarded_norm2;
    out["locality"] = bundle.locality.to_text();
    out["t"] = bundle.t_used;
    py::dict trotter;
    for (const auto& [r, err] : bundle.trotter_errors) trotter[py::int_(r)] = err;
    out["trotter_errors"] = trotter;
    py::dict histograms;
    for (const auto& [sector, hist] : bundle.histograms) {
        py::dict h;
        h["m"] = hist.m;
        h["t"] = hist.t;
        h["peak"] = static_cast<long>(hist.peak());
        h["peak_energy"] = hist.energy(hist.peak(), bundle.window.e_min);
        std::vector<double> probs(hist.probabilities.data(),
                                  hist.probabilities.data() + hist.probabilities.size());
        h["probabilities"] = probs;
        histograms[py::int_(sector)] = h;
    }
    out["qpe"] = histograms;
    out["residual_match"] = bundle.verify.residual_match;
    out["spectra_deviation"] = bundle.verify.spectra_deviation;
    return out;
}

} // namespace

PYBIND11_MODULE(_swrrst, m) {
    m.doc() = "Rank-reducing similarity transformations of second-quantized Hamiltonians";
    m.attr("__version__") = kLibraryVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
    py::register_exception<SingularityError>(m, "SingularityError", PyExc_RuntimeError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
    py::register_exception<StructureError>(m, "StructureError", PyExc_RuntimeError);

    py::class_<FermionOperator>(m, "FermionOperator")
        .def(py::init<>())
        .def_static("from_text", &FermionOperator::from_text, py::arg("text"))
        .def("to_text", &FermionOperator::to_text)
        .def("norm2", &FermionOperator::norm2)
        .def("adjoint", &FermionOperator::adjoint)
        .def("__len__", &FermionOperator::size)
        .def("__add__",
             [](const FermionOperator& a, const FermionOperator& b) {
                 FermionOperator out = a;
                 out += b;
                 return out;
             })
        .def("__sub__",
             [](const FermionOperator& a, const FermionOperator& b) {
                 FermionOperator out = a;
                 out -= b;
                 return out;
             })
        .def("__mul__",
             [](const FermionOperator& a, const FermionOperator& b) { return multiply(a, b); })
        .def("__repr__", [](const FermionOperator& a) {
            return "<FermionOperator with " + std::to_string(a.size()) + " terms>";
        });
    m.def("commutator", [](const FermionOperator& a, const FermionOperator& b) {
        return commutator(a, b);
    });

    py::class_<OrbitalPartition>(m, "OrbitalPartition")
        .def_static("make", &OrbitalPartition::make, py::arg("n"), py::arg("k"),
                    py::arg("energies"), py::arg("iso_tol_rel") = 1e-9)
        .def_property_readonly("n", &OrbitalPartition::n)
        .def_property_readonly("k", &OrbitalPartition::k)
        .def_property_readonly("n_spin_orbitals", &OrbitalPartition::n_spin_orbitals)
        .def("is_active", &OrbitalPartition::is_active, py::arg("p"))
        .def("iso_partner", &OrbitalPartition::iso_partner, py::arg("p"));

    m.def(
        "load_integrals",
        [](const std::string& path, const std::string& format) {
            return hamiltonian_from_tensors(
                load_integrals(path, integral_format_from_name(format)));
        },
        py::arg("path"), py::arg("format") = "fcidump",
        "Load an integrals file and return the Hamiltonian operator.");

    m.def(
        "decompose",
        [](const FermionOperator& h, const OrbitalPartition& part) {
            const Decomposition d = decompose_hamiltonian(h, part);
            py::dict out;
            for (int s = 0; s < 4; ++s) {
                py::dict row;
                row["terms"] = d.census[static_cast<std::size_t>(s)].term_count;
                row["norm2"] = d.census[static_cast<std::size_t>(s)].norm2;
                out[py::str(to_string(static_cast<SectorLabel>(s)))] = row;
            }
            return out;
        },
        py::arg("h"), py::arg("part"), "Four-sector census of a Hamiltonian.");

    m.def(
        "solve",
        [](const FermionOperator& h, const OrbitalPartition& part, const py::dict& options) {
            auto [b, report] = solve_swrrst(h, part, options_from_dict(options));
            return py::make_tuple(b.op, report_to_dict(report));
        },
        py::arg("h"), py::arg("part"), py::arg("options") = py::dict(),
        "Solve the generator equations; returns (B, report).");

    m.def(
        "build_g",
        [](const FermionOperator& h, const FermionOperator& b, const OrbitalPartition& part,
           const std::string& domain, int body_rank) {
            GeneratorB gen{b, domain == "od" ? Domain::od : Domain::eod, body_rank};
            const BuildGResult r = build_G(h, gen, part);
            py::dict info;
            info["discarded_norm1"] = r.discarded_norm1;
            info["discarded_norm2"] = r.discarded_norm2;
            info["discarded_terms"] = r.discarded_terms;
            info["series_rank"] = r.series_rank;
            return py::make_tuple(r.g, info);
        },
        py::arg("h"), py::arg("b"), py::arg("part"), py::arg("domain") = "eod",
        py::arg("body_rank") = 0,
        "Transform H by the generator; returns (G, diagnostics).");

    m.def(
        "locality_report",
        [](const FermionOperator& g, const OrbitalPartition& part) {
            return locality_report(g, part).to_text();
        },
        py::arg("g"), py::arg("part"), "Sector-resolved qubit-locality census as text.");

    m.def(
        "jw_text",
        [](const FermionOperator& a, int n_qubits) {
            return jw_map(a, n_qubits).to_text(n_qubits);
        },
        py::arg("a"), py::arg("n_qubits"), "Jordan-Wigner image as Pauli-string text.");

    m.def(
        "run_pipeline",
        [](const std::string& config_json, bool persist) {
            const RunConfig config = RunConfig::from_json_text(config_json);
            return bundle_to_dict(persist ? run_and_persist(config) : run_pipeline(config));
        },
        py::arg("config_json"), py::arg("persist") = false,
        "Run the full pipeline from a JSON config string; returns a summary dict.");

    m.def(
        "canonical_config",
        [](const std::string& config_json) {
            return RunConfig::from_json_text(config_json).to_json_text();
        },
        py::arg("config_json"), "Canonical serialized form of a run configuration.");
}
