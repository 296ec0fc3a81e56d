#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swrrst/config.hpp"
#include "swrrst/dynamics.hpp"
#include "swrrst/jw.hpp"
#include "swrrst/qpe.hpp"
#include "swrrst/schedule.hpp"
#include "swrrst/solver.hpp"

namespace swrrst {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Pipeline stages in execution order.  `map` covers building G and its
/// qubit-side locality census; `verify` re-derives the solve residual and
/// compares spectra against the dense oracle.
enum class Stage { load, decompose, solve, map, evolve, qpe, verify };

std::string to_string(Stage stage);

/// Failure category, mapped to process exit codes by the CLI.
enum class FailureKind { none, config, numerical, capacity, internal };

std::string to_string(FailureKind kind);

struct VerifyReport {
    double residual_recorded = 0.0;
    double residual_recomputed = 0.0;
    bool residual_match = false;
    double spectra_deviation = 0.0;
    bool ran_spectra = false;
};

/// Everything a run produces, populated stage by stage.  On a stage error
/// the bundle keeps all earlier products and records the failure.
struct ResultBundle {
    RunConfig config;
    std::string config_hash;
    std::string version = kLibraryVersion;
    Stage last_stage = Stage::load; ///< last stage that completed

    // load
    FermionOperator h;           ///< Hamiltonian as loaded
    FermionOperator h_effective; ///< after the optional auxiliary rotation
    OrbitalPartition part;

    // decompose
    Decomposition decomposition;

    // solve
    GeneratorB b;
    SolveReport solve_report;
    NoncommutationCheck noncommutation;

    // map
    BuildGResult g;
    LocalityReport locality;
    std::optional<RotationSchedule> external_schedule;

    // evolve / qpe
    double t_used = 0.0;
    SpectralWindow window;
    std::vector<std::pair<int, double>> trotter_errors; ///< (r, sup-norm error)
    std::vector<std::pair<int, PhaseHistogram>> histograms; ///< (sector, histogram)
    std::vector<std::pair<int, std::vector<std::uint64_t>>> sampled_counts;

    // verify
    VerifyReport verify;
    Eigen::VectorXd eig_h, eig_g; ///< sorted dense spectra when the oracle fits

    // failure record
    std::string failed_stage; ///< empty when all requested stages succeeded
    FailureKind failure = FailureKind::none;
    std::string error_message;

    bool ok() const { return failure == FailureKind::none; }
};

/// Runs the pipeline through `last` inclusive.  Stage errors do not
/// propagate: the bundle records the failing stage, the failure kind and
/// the message, and keeps every earlier product.
ResultBundle run_pipeline(const RunConfig& config, Stage last = Stage::verify);

enum class ReportFormat { structured, tabular };

/// Writes the bundle under `dir` (created if needed) and returns the paths
/// written.  `structured` emits the canonical config, the JSON summary and
/// the operator artifacts; `tabular` emits plot-ready columns.  Output is
/// deterministic byte-for-byte for identical bundles.
std::vector<std::string> emit_report(const ResultBundle& bundle, ReportFormat format,
                                     const std::string& dir);

/// run_pipeline followed by emit_report of both formats into the config's
/// output directory (partial bundles are persisted the same way).
ResultBundle run_and_persist(const RunConfig& config, Stage last = Stage::verify);

/// Stage-isolated verification: reloads the persisted Hamiltonian,
/// generator and solve report from the config's output directory,
/// recomputes the solve-stage residual with the configured truncations and
/// checks it reproduces the recorded value to 1e-12.  Throws
/// DivergenceError on mismatch, ConfigError when artifacts are missing.
VerifyReport verify_persisted(const RunConfig& config);

} // namespace swrrst
