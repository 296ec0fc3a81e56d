#include "swrrst/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swrrst/errors.hpp"
#include "swrrst/integrals_io.hpp"

namespace swrrst {

namespace {

using Json = nlohmann::ordered_json;

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int stage_index(Stage s) { return static_cast<int>(s); }

// last_stage is only meaningful once the first stage completed
bool reached(const ResultBundle& bundle, Stage s) {
    if (bundle.failed_stage == to_string(Stage::load)) return false;
    return stage_index(bundle.last_stage) >= stage_index(s);
}

/// The residual exactly as the solve stage measures it, including the
/// intermediate and amplitude rank truncations.
double recompute_residual(const FermionOperator& h, const FermionOperator& b,
                          const OrbitalPartition& part, const SolverOptions& opts) {
    const FermionOperator g =
        bch_transform(h, b, opts.l, opts.bch_body_rank, opts.term_cap, opts.series_tol);
    FermionOperator r = project(g, opts.domain, part);
    if (opts.body_rank > 0) r = truncate_rank(r, opts.body_rank);
    return r.norm2();
}

void stage_load(ResultBundle& out) {
    const RunConfig& cfg = out.config;
    const ManyBodyTensors tensors = load_integrals(cfg.input.path, cfg.input.format);
    if (tensors.n_spin_orbitals() != 2 * cfg.partition.n)
        throw ConfigError("partition.n=" + std::to_string(cfg.partition.n) + " implies " +
                          std::to_string(2 * cfg.partition.n) + " spin-orbitals but '" +
                          cfg.input.path + "' holds " +
                          std::to_string(tensors.n_spin_orbitals()));
    out.h = hamiltonian_from_tensors(tensors);
    const std::vector<double> epsilons = cfg.h0.choice == "explicit"
                                             ? cfg.h0.epsilons
                                             : diagonal_epsilons(out.h, 2 * cfg.partition.n);
    out.part = OrbitalPartition::make(cfg.partition.n, cfg.partition.k, epsilons);
    const FermionOperator aux = cfg.auxiliary_operator();
    out.h_effective = aux.empty() ? out.h : apply_auxiliary(out.h, aux);
}

void stage_decompose(ResultBundle& out) {
    out.decomposition = decompose_hamiltonian(out.h, out.part);
}

void stage_solve(ResultBundle& out) {
    auto [b, report] = solve_swrrst(out.h_effective, out.part, out.config.solver);
    out.b = std::move(b);
    out.solve_report = std::move(report);
    out.noncommutation = check_noncommutation(out.h_effective, out.b);
}

void stage_map(ResultBundle& out) {
    out.g = build_G(out.h_effective, out.b, out.part, out.config.solver.term_cap);
    out.locality = locality_report(out.g.g, out.part);
    const FermionOperator diagonal =
        project(out.g.g, SectorLabel::external_diagonal, out.part);
    const NumberPolynomial poly = to_number_polynomial(diagonal, out.part);
    // unit-time schedule; rotation angles scale linearly with t
    out.external_schedule =
        schedule_number_exponential(poly, 1.0, out.part.n_spin_orbitals());
}

void stage_evolve(ResultBundle& out) {
    const int n = out.part.n_spin_orbitals();
    const GParts parts = split_G(out.g.g, out.part);
    const DenseMatrix hd = to_dense(out.h_effective, n).matrix;
    out.window = gershgorin_window(hd);
    out.t_used = out.config.evolution.t != 0.0
                     ? out.config.evolution.t
                     : auto_evolution_time(out.window, out.config.evolution.pad);
    const DenseMatrix exact = expm_propagator(to_dense(out.g.g, n).matrix, out.t_used);
    std::set<int> steps{8, 16, 32, 64};
    steps.insert(out.config.evolution.r);
    out.trotter_errors.clear();
    for (const int r : steps) {
        const DenseMatrix u =
            trotter_unitary(parts, out.t_used, r, out.config.evolution.symmetrized);
        out.trotter_errors.emplace_back(r, (u - exact).cwiseAbs().maxCoeff());
    }
}

void stage_qpe(ResultBundle& out) {
    const GParts parts = split_G(out.g.g, out.part);
    out.histograms.clear();
    out.sampled_counts.clear();
    for (const int n_e : out.config.evolution.sectors) {
        const FockStateVector psi0 = sector_prepare(n_e, out.part);
        PhaseHistogram hist = qpe_pipeline(out.b.op, parts, out.t_used,
                                           out.config.evolution.r, psi0,
                                           out.config.evolution.m);
        if (out.config.evolution.shots > 0) {
            std::mt19937_64 rng(out.config.seed + static_cast<std::uint64_t>(n_e));
            std::discrete_distribution<int> dist(hist.probabilities.data(),
                                                 hist.probabilities.data() +
                                                     hist.probabilities.size());
            std::vector<std::uint64_t> counts(
                static_cast<std::size_t>(hist.probabilities.size()), 0);
            for (std::uint64_t s = 0; s < out.config.evolution.shots; ++s)
                ++counts[static_cast<std::size_t>(dist(rng))];
            out.sampled_counts.emplace_back(n_e, std::move(counts));
        }
        out.histograms.emplace_back(n_e, std::move(hist));
    }
}

void stage_verify(ResultBundle& out) {
    out.verify.residual_recorded = out.solve_report.final_residual;
    out.verify.residual_recomputed =
        recompute_residual(out.h_effective, out.b.op, out.part, out.config.solver);
    out.verify.residual_match =
        std::abs(out.verify.residual_recorded - out.verify.residual_recomputed) <= 1e-12;
    const int n = out.part.n_spin_orbitals();
    if (n <= limits::kDenseOracleCap) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eh(to_dense(out.h_effective, n).matrix);
        Eigen::SelfAdjointEigenSolver<DenseMatrix> eg(to_dense(out.g.g, n).matrix);
        out.eig_h = eh.eigenvalues();
        out.eig_g = eg.eigenvalues();
        out.verify.spectra_deviation = (out.eig_h - out.eig_g).cwiseAbs().maxCoeff();
        out.verify.ran_spectra = true;
    }
    if (!out.verify.residual_match)
        throw DivergenceError("verification failed: recomputed residual " +
                                  std::to_string(out.verify.residual_recomputed) +
                                  " does not reproduce the recorded " +
                                  std::to_string(out.verify.residual_recorded),
                              out.verify.residual_recomputed);
}

FailureKind classify_failure(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return FailureKind::config;
    if (dynamic_cast<const CapacityError*>(&e)) return FailureKind::capacity;
    if (dynamic_cast<const SingularityError*>(&e) || dynamic_cast<const DivergenceError*>(&e) ||
        dynamic_cast<const StructureError*>(&e))
        return FailureKind::numerical;
    if (dynamic_cast<const ValidationError*>(&e)) return FailureKind::config;
    return FailureKind::internal;
}

void write_text_file(const std::filesystem::path& path, const std::string& content,
                     std::vector<std::string>& written) {
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf) throw ValidationError("cannot write '" + path.string() + "'");
    outf << content;
    written.push_back(path.string());
}

Json census_json(const Decomposition& d) {
    Json rows = Json::array();
    for (int s = 0; s < 4; ++s)
        rows.push_back({{"sector", to_string(static_cast<SectorLabel>(s))},
                        {"terms", d.census[static_cast<std::size_t>(s)].term_count},
                        {"norm2", d.census[static_cast<std::size_t>(s)].norm2}});
    return rows;
}

Json locality_json(const LocalityReport& report) {
    Json sectors = Json::array();
    for (int s = 0; s < 4; ++s) {
        const PauliCensus& c = report.census[static_cast<std::size_t>(s)];
        sectors.push_back({{"sector", to_string(static_cast<SectorLabel>(s))},
                           {"strings", c.strings},
                           {"max_qubit", c.max_qubit},
                           {"max_width", c.max_width},
                           {"touching_external", c.touching_external},
                           {"z_only", c.z_only}});
    }
    return Json{{"internal_active_only", report.internal_active_only},
                {"diagonal_z_only", report.diagonal_z_only},
                {"ie_pair_confined", report.ie_pair_confined},
                {"sectors", sectors}};
}

} // namespace

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::load: return "load";
        case Stage::decompose: return "decompose";
        case Stage::solve: return "solve";
        case Stage::map: return "map";
        case Stage::evolve: return "evolve";
        case Stage::qpe: return "qpe";
        case Stage::verify: return "verify";
    }
    return "unknown";
}

std::string to_string(FailureKind kind) {
    switch (kind) {
        case FailureKind::none: return "none";
        case FailureKind::config: return "config";
        case FailureKind::numerical: return "numerical";
        case FailureKind::capacity: return "capacity";
        case FailureKind::internal: return "internal";
    }
    return "unknown";
}

ResultBundle run_pipeline(const RunConfig& config, Stage last) {
    ResultBundle out;
    out.config = config;
    out.config_hash = config.hash();
    Stage current = Stage::load;
    try {
        const std::pair<Stage, void (*)(ResultBundle&)> stages[] = {
            {Stage::load, stage_load},     {Stage::decompose, stage_decompose},
            {Stage::solve, stage_solve},   {Stage::map, stage_map},
            {Stage::evolve, stage_evolve}, {Stage::qpe, stage_qpe},
            {Stage::verify, stage_verify},
        };
        for (const auto& [stage, fn] : stages) {
            if (stage_index(stage) > stage_index(last)) break;
            current = stage;
            fn(out);
            out.last_stage = stage;
        }
    } catch (const std::exception& e) {
        out.failed_stage = to_string(current);
        out.failure = classify_failure(e);
        out.error_message = e.what();
    }
    return out;
}

std::vector<std::string> emit_report(const ResultBundle& bundle, ReportFormat format,
                                     const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    std::vector<std::string> written;

    if (format == ReportFormat::structured) {
        write_text_file(base / "config.json", bundle.config.to_json_text(), written);

        Json root;
        root["version"] = bundle.version;
        root["config_hash"] = bundle.config_hash;
        root["last_stage"] = to_string(bundle.last_stage);
        if (bundle.failed_stage.empty())
            root["error"] = nullptr;
        else
            root["error"] = {{"stage", bundle.failed_stage},
                             {"kind", to_string(bundle.failure)},
                             {"message", bundle.error_message}};
        if (reached(bundle, Stage::load)) {
            root["input"] = {{"path", bundle.config.input.path},
                             {"format", to_string(bundle.config.input.format)},
                             {"n_spin_orbitals", bundle.part.n_spin_orbitals()},
                             {"auxiliary_terms", bundle.config.auxiliary.size()}};
        }
        if (reached(bundle, Stage::decompose)) root["census"] = census_json(bundle.decomposition);
        if (reached(bundle, Stage::solve)) {
            root["solve"] = {
                {"converged", bundle.solve_report.converged},
                {"iterations", bundle.solve_report.iterations},
                {"final_residual", bundle.solve_report.final_residual},
                {"amplitude_norm", bundle.solve_report.amplitude_norm},
                {"commutator_rank", bundle.solve_report.commutator_rank},
                {"smallest_denominator", bundle.solve_report.smallest_denominator},
                {"smallest_denominator_term", bundle.solve_report.smallest_denominator_term}};
            root["noncommutation"] = {{"applicable", bundle.noncommutation.applicable},
                                      {"nonzero", bundle.noncommutation.nonzero},
                                      {"commutator_norm", bundle.noncommutation.commutator_norm},
                                      {"threshold", bundle.noncommutation.threshold}};
        }
        if (reached(bundle, Stage::map)) {
            root["g"] = {{"terms", bundle.g.g.size()},
                         {"discarded_norm1", bundle.g.discarded_norm1},
                         {"discarded_norm2", bundle.g.discarded_norm2},
                         {"discarded_terms", bundle.g.discarded_terms},
                         {"series_rank", bundle.g.series_rank}};
            root["locality"] = locality_json(bundle.locality);
            root["schedule"] = {
                {"present", bundle.external_schedule.has_value()},
                {"entries",
                 bundle.external_schedule ? bundle.external_schedule->entries.size() : 0}};
        }
        if (reached(bundle, Stage::evolve)) {
            Json errors = Json::array();
            for (const auto& [r, err] : bundle.trotter_errors) errors.push_back({r, err});
            root["evolution"] = {{"t", bundle.t_used},
                                 {"window", {bundle.window.e_min, bundle.window.e_max}},
                                 {"r", bundle.config.evolution.r},
                                 {"m", bundle.config.evolution.m},
                                 {"symmetrized", bundle.config.evolution.symmetrized},
                                 {"trotter_errors", errors}};
        }
        if (reached(bundle, Stage::qpe)) {
            Json rows = Json::array();
            for (const auto& [sector, hist] : bundle.histograms) {
                const Eigen::Index y = hist.peak();
                rows.push_back({{"sector", sector},
                                {"peak", y},
                                {"peak_phase", hist.phase(y)},
                                {"peak_probability", hist.probabilities(y)},
                                {"decoded_energy", hist.energy(y, bundle.window.e_min)}});
            }
            root["qpe"] = rows;
        }
        if (reached(bundle, Stage::verify)) {
            root["verify"] = {{"residual_recorded", bundle.verify.residual_recorded},
                              {"residual_recomputed", bundle.verify.residual_recomputed},
                              {"residual_match", bundle.verify.residual_match},
                              {"spectra_deviation", bundle.verify.spectra_deviation},
                              {"ran_spectra", bundle.verify.ran_spectra}};
        }
        write_text_file(base / "bundle.json", root.dump(2) + "\n", written);

        if (reached(bundle, Stage::load)) {
            write_text_file(base / "hamiltonian.txt", bundle.h.to_text(), written);
            write_text_file(base / "h_effective.txt", bundle.h_effective.to_text(), written);
        }
        if (reached(bundle, Stage::solve))
            write_text_file(base / "b.txt", bundle.b.op.to_text(), written);
        if (reached(bundle, Stage::map)) {
            write_text_file(base / "g.txt", bundle.g.g.to_text(), written);
            write_text_file(base / "locality.txt", bundle.locality.to_text(), written);
            if (bundle.external_schedule)
                write_text_file(base / "schedule.txt", bundle.external_schedule->to_text(),
                                written);
        }
        return written;
    }

    // tabular: plot-ready columns, headers always present
    std::string residuals = "# sweep  residual\n";
    if (reached(bundle, Stage::solve))
        for (std::size_t i = 0; i < bundle.solve_report.residual_history.size(); ++i)
            residuals += std::to_string(i) + "  " +
                         format17(bundle.solve_report.residual_history[i]) + "\n";
    write_text_file(base / "residual_history.txt", residuals, written);

    std::string trotter = "# r  sup_error\n";
    for (const auto& [r, err] : bundle.trotter_errors)
        trotter += std::to_string(r) + "  " + format17(err) + "\n";
    write_text_file(base / "trotter_error.txt", trotter, written);

    std::string spectra = "# i  eig_h  eig_g  abs_diff\n";
    if (bundle.verify.ran_spectra)
        for (Eigen::Index i = 0; i < bundle.eig_h.size(); ++i)
            spectra += std::to_string(i) + "  " + format17(bundle.eig_h(i)) + "  " +
                       format17(bundle.eig_g(i)) + "  " +
                       format17(std::abs(bundle.eig_h(i) - bundle.eig_g(i))) + "\n";
    write_text_file(base / "spectra.txt", spectra, written);

    for (const auto& [sector, hist] : bundle.histograms)
        write_text_file(base / ("histogram_sector_" + std::to_string(sector) + ".txt"),
                        hist.to_text(), written);
    for (const auto& [sector, counts] : bundle.sampled_counts) {
        std::string text = "# y  count\n";
        for (std::size_t y = 0; y < counts.size(); ++y)
            text += std::to_string(y) + "  " + std::to_string(counts[y]) + "\n";
        write_text_file(base / ("sampled_sector_" + std::to_string(sector) + ".txt"), text,
                        written);
    }
    return written;
}

ResultBundle run_and_persist(const RunConfig& config, Stage last) {
    ResultBundle bundle = run_pipeline(config, last);
    emit_report(bundle, ReportFormat::structured, config.output_dir);
    emit_report(bundle, ReportFormat::tabular, config.output_dir);
    return bundle;
}

VerifyReport verify_persisted(const RunConfig& config) {
    const std::filesystem::path base(config.output_dir);
    auto read_file = [&](const char* name) {
        std::ifstream in(base / name, std::ios::binary);
        if (!in)
            throw ConfigError("missing artifact '" + (base / name).string() +
                              "'; run the solve stage first");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    };

    Json root;
    try {
        root = Json::parse(read_file("bundle.json"));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("cannot parse persisted bundle.json: ") + e.what());
    }
    if (root.value("config_hash", "") != config.hash())
        throw ConfigError("persisted artifacts were produced by a different config");
    if (!root.contains("solve") || root["solve"].is_null())
        throw ConfigError("persisted bundle has no solve stage; run solve first");

    const FermionOperator h = FermionOperator::from_text(read_file("h_effective.txt"));
    const FermionOperator b = FermionOperator::from_text(read_file("b.txt"));
    const std::vector<double> epsilons =
        config.h0.choice == "explicit"
            ? config.h0.epsilons
            : diagonal_epsilons(h, 2 * config.partition.n);
    const OrbitalPartition part =
        OrbitalPartition::make(config.partition.n, config.partition.k, epsilons);

    VerifyReport report;
    report.residual_recorded = root["solve"].value("final_residual", 0.0);
    report.residual_recomputed = recompute_residual(h, b, part, config.solver);
    report.residual_match =
        std::abs(report.residual_recorded - report.residual_recomputed) <= 1e-12;
    if (!report.residual_match)
        throw DivergenceError("verification failed: recomputed residual " +
                                  std::to_string(report.residual_recomputed) +
                                  " does not reproduce the recorded " +
                                  std::to_string(report.residual_recorded),
                              report.residual_recomputed);
    return report;
}

} // namespace swrrst
