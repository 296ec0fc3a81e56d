#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "swrrst/errors.hpp"
#include "swrrst/pipeline.hpp"

namespace {

using namespace swrrst;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCapacity = 4;

int exit_code_of(FailureKind kind) {
    switch (kind) {
        case FailureKind::none: return kExitOk;
        case FailureKind::config: return kExitConfig;
        case FailureKind::numerical: return kExitNumerical;
        case FailureKind::capacity: return kExitCapacity;
        case FailureKind::internal: return kExitInternal;
    }
    return kExitInternal;
}

constexpr Stage kStageOrder[] = {Stage::load,   Stage::decompose, Stage::solve, Stage::map,
                                 Stage::evolve, Stage::qpe,       Stage::verify};

int stage_rank(const std::string& name) {
    for (int i = 0; i < 7; ++i)
        if (to_string(kStageOrder[i]) == name) return i;
    return -1;
}

/// True when the output directory already holds an error-free bundle for
/// this exact config that reached at least the requested stage.
bool cache_hit(const RunConfig& config, Stage want) {
    std::ifstream in(config.output_dir + "/bundle.json", std::ios::binary);
    if (!in) return false;
    try {
        const nlohmann::json root = nlohmann::json::parse(in);
        if (root.value("config_hash", "") != config.hash()) return false;
        if (!root.contains("error") || !root["error"].is_null()) return false;
        return stage_rank(root.value("last_stage", "")) >= stage_rank(to_string(want));
    } catch (const std::exception&) {
        return false;
    }
}

void print_summary(const ResultBundle& bundle, Stage want, std::ostream& out) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    auto ran = [&](Stage s) {
        return stage_rank(to_string(bundle.last_stage)) >= stage_rank(to_string(s)) &&
               (bundle.failed_stage.empty() || bundle.failed_stage != to_string(s));
    };

    if (ran(Stage::load) && bundle.failed_stage != to_string(Stage::load))
        out << "loaded " << bundle.part.n_spin_orbitals() << " spin-orbitals from "
            << bundle.config.input.path << "\n";
    if (ran(Stage::decompose)) {
        out << "sector census:";
        for (int s = 0; s < 4; ++s)
            out << "  " << to_string(static_cast<SectorLabel>(s)) << "="
                << bundle.decomposition.census[static_cast<std::size_t>(s)].term_count;
        out << "\n";
    }
    if (ran(Stage::solve))
        out << "solve: " << (bundle.solve_report.converged ? "converged" : "not converged")
            << " after " << bundle.solve_report.iterations
            << " sweeps, residual " << num(bundle.solve_report.final_residual)
            << ", |B| = " << num(bundle.solve_report.amplitude_norm) << "\n";
    if (ran(Stage::map))
        out << "G: " << bundle.g.g.size() << " terms, discarded projection norm "
            << num(bundle.g.discarded_norm2) << "; locality: internal_active_only="
            << (bundle.locality.internal_active_only ? "yes" : "no")
            << " diagonal_z_only=" << (bundle.locality.diagonal_z_only ? "yes" : "no")
            << " ie_pair_confined=" << (bundle.locality.ie_pair_confined ? "yes" : "no") << "\n";
    if (ran(Stage::evolve)) {
        out << "evolution: t = " << num(bundle.t_used) << ", window ["
            << num(bundle.window.e_min) << ", " << num(bundle.window.e_max) << "]";
        if (!bundle.trotter_errors.empty())
            out << ", trotter error at r=" << bundle.trotter_errors.back().first << ": "
                << num(bundle.trotter_errors.back().second);
        out << "\n";
    }
    if (ran(Stage::qpe))
        for (const auto& [sector, hist] : bundle.histograms) {
            const Eigen::Index y = hist.peak();
            out << "qpe sector " << sector << ": peak outcome " << y << " (p = "
                << num(hist.probabilities(y)) << "), energy "
                << num(hist.energy(y, bundle.window.e_min)) << "\n";
        }
    if (ran(Stage::verify))
        out << "verify: residual " << (bundle.verify.residual_match ? "reproduced" : "MISMATCH")
            << (bundle.verify.ran_spectra
                    ? ", spectra deviation " + num(bundle.verify.spectra_deviation)
                    : "")
            << "\n";
    if (bundle.ok() && stage_rank(to_string(bundle.last_stage)) < stage_rank(to_string(want)))
        out << "stopped after stage " << to_string(bundle.last_stage) << "\n";
    out << "artifacts in " << bundle.config.output_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-reducing similarity transformation of second-quantized Hamiltonians"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string stage_cache = "off";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "override the configured output directory");
    CLI::Option* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--stage-cache", stage_cache,
                   "reuse persisted results for already-completed stages")
        ->check(CLI::IsMember({"on", "off"}));

    const std::pair<const char*, Stage> kSubcommands[] = {
        {"decompose", Stage::decompose}, {"solve", Stage::solve}, {"map", Stage::map},
        {"evolve", Stage::evolve},       {"qpe", Stage::qpe},     {"run", Stage::verify},
    };
    const char* kDescriptions[] = {
        "load integrals and census the four-sector decomposition",
        "iterate the generator equations to convergence",
        "build the transformed Hamiltonian and its qubit locality census",
        "factored product-formula evolution with error table",
        "simulated phase estimation over the configured sectors",
        "full pipeline through oracle verification",
    };
    for (int i = 0; i < 6; ++i)
        app.add_subcommand(kSubcommands[i].first, kDescriptions[i])->fallthrough();
    app.add_subcommand("verify",
                       "recompute the solve residual from persisted artifacts")
        ->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig config = RunConfig::load(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (seed_opt->count() > 0) config.seed = seed;

        if (app.get_subcommand("verify")->parsed()) {
            const VerifyReport report = verify_persisted(config);
            std::cout << "verify: residual reproduced (recorded "
                      << report.residual_recorded << ", recomputed "
                      << report.residual_recomputed << ")\n";
            return kExitOk;
        }

        Stage want = Stage::verify;
        for (const auto& [name, stage] : kSubcommands)
            if (app.get_subcommand(name)->parsed()) want = stage;

        if (stage_cache == "on" && cache_hit(config, want)) {
            std::cout << "stage cache hit: artifacts in " << config.output_dir
                      << " already cover stage " << to_string(want) << "\n";
            return kExitOk;
        }

        const ResultBundle bundle = run_and_persist(config, want);
        print_summary(bundle, want, std::cout);
        if (!bundle.ok()) {
            std::cerr << "error in stage " << bundle.failed_stage << " ("
                      << to_string(bundle.failure) << "): " << bundle.error_message << "\n";
            return exit_code_of(bundle.failure);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const SingularityError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const StructureError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
