#pragma once

#include <utility>
#include <vector>

#include "swrrst/fermion_operator.hpp"
#include "swrrst/partition.hpp"

namespace swrrst {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 100;
    /// Commutator rank l of the truncated equations; 0 = adaptive (extend
    /// the series until the increment norm falls below series_tol).
    int l = 2;
    Domain domain = Domain::eod;
    /// Max many-body rank of B amplitudes; 0 = unlimited (equations and
    /// unknowns then span every domain key the expansion reaches).
    int body_rank = 2;
    /// Rank cap on intermediate commutator results during iteration;
    /// 0 = unlimited.
    int bch_body_rank = 3;
    /// Opt-in level shift sigma applied to |D| < denom_floor denominators.
    double level_shift = 0.0;
    double denom_floor = 1e-8;
    bool acceleration = true;
    int diis_window = 6;
    double series_tol = 1e-12;
    std::size_t term_cap = limits::kTermCap;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    double final_residual = 0;
    double amplitude_norm = 0;
    int commutator_rank = 0;
    bool converged = false;
    double smallest_denominator = 0;
    std::string smallest_denominator_term;
};

struct GeneratorB {
    FermionOperator op;
    Domain domain = Domain::eod;
    int body_rank = 0;
};

struct H0Split {
    FermionOperator h0;
    FermionOperator w;
    std::vector<double> epsilons;
};

struct BuildGResult {
    FermionOperator g;
    /// Coefficient 1-norm of the discarded domain projection; an upper
    /// bound on the induced eigenvalue shift (each canonical string has
    /// unit spectral norm).
    double discarded_norm1 = 0;
    double discarded_norm2 = 0;
    std::size_t discarded_terms = 0;
    int series_rank = 0;
};

struct NoncommutationCheck {
    bool applicable = false;
    bool nonzero = false;
    double commutator_norm = 0;
    double threshold = 0;
};

/// H + sum_{i=1..l} ad_B^i(H)/i! with ad_B(X) = [B,X], the series of
/// e^B H e^{-B}; l = 0 extends until the increment norm < series_tol.
/// body_rank_cap > 0 truncates every intermediate to that many-body rank.
FermionOperator bch_transform(const FermionOperator& h, const FermionOperator& b, int l,
                              int body_rank_cap = 0, std::size_t term_cap = limits::kTermCap,
                              double series_tol = 1e-12, int* ranks_used = nullptr);

/// Drops every term whose many-body rank exceeds cap; cap <= 0 keeps all.
FermionOperator truncate_rank(const FermionOperator& a, int cap);

/// The quantity the solver drives to zero: project(bch(H,B,l), domain).
FermionOperator residual(const FermionOperator& h, const GeneratorB& b, int l,
                         const OrbitalPartition& part);

std::pair<GeneratorB, SolveReport> solve_swrrst(const FermionOperator& h,
                                                const OrbitalPartition& part,
                                                const SolverOptions& opts = {});

/// Transforms H by the converged generator using the full adaptive series,
/// then removes the residual domain projection, reporting its size.
BuildGResult build_G(const FermionOperator& h, const GeneratorB& bstar,
                     const OrbitalPartition& part,
                     std::size_t term_cap = limits::kTermCap);

NoncommutationCheck check_noncommutation(const FermionOperator& h, const GeneratorB& bstar);

/// H_C = e^C H e^{-C} for anti-Hermitian C; rank as in bch_transform.
FermionOperator apply_auxiliary(const FermionOperator& h, const FermionOperator& c, int rank = 0);

/// H0 = sum eps_p n_p from the given energies, W = H - H0.
H0Split split_h0_w(const FermionOperator& h, const std::vector<double>& epsilons);

/// Default H0 choice: the one-body diagonal entries h^p_p of H.
std::vector<double> diagonal_epsilons(const FermionOperator& h, int n_spin_orbitals);

/// The order-`order` component of the perturbative expansion of B
/// (order 0 is identically empty; order 1 is w_mu/D_mu; order 2 includes
/// the lowest three-body amplitudes).
GeneratorB perturbative_B(const FermionOperator& h, const OrbitalPartition& part, int order,
                          Domain domain = Domain::eod);

} // namespace swrrst
