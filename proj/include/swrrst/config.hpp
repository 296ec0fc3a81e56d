#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swrrst/fermion_operator.hpp"
#include "swrrst/integrals_io.hpp"
#include "swrrst/solver.hpp"

namespace swrrst {

struct InputConfig {
    std::string path;
    IntegralFormat format = IntegralFormat::fcidump;
};

struct PartitionConfig {
    int n = 0; ///< spatial orbitals
    int k = 0; ///< external spatial orbitals
};

/// Where the partition/preconditioner energies come from: the one-body
/// diagonal of the loaded Hamiltonian ("diagonal") or an explicit list.
struct H0Config {
    std::string choice = "diagonal"; ///< "diagonal" | "explicit"
    std::vector<double> epsilons;    ///< required for "explicit", length 2n
};

/// One term of the optional auxiliary generator; the assembled operator is
/// antihermitized (C - C^+)/2 before use so any term list yields a valid
/// similarity transformation.
struct AuxiliaryTermConfig {
    cplx coefficient;
    std::vector<int> creators;
    std::vector<int> annihilators;
};

struct EvolutionConfig {
    double t = 0.0; ///< evolution time; 0 = auto from the spectral window
    double pad = 0.1;
    int r = 64; ///< Trotter steps, even
    int m = 6;  ///< phase-estimation bits
    std::vector<int> sectors;
    bool symmetrized = true;
    std::uint64_t shots = 0; ///< 0 = exact probabilities
};

struct RunConfig {
    InputConfig input;
    PartitionConfig partition;
    H0Config h0;
    SolverOptions solver;
    std::vector<AuxiliaryTermConfig> auxiliary;
    EvolutionConfig evolution;
    std::string output_dir = "swrrst-out";
    std::uint64_t seed = 0;

    /// Parses and validates; rejects unknown keys, bad enum values and
    /// out-of-range parameters with a ConfigError naming the offender.
    static RunConfig from_json_text(const std::string& text);
    static RunConfig load(const std::string& path);

    /// Canonical serialization: fixed key order, every field explicit.
    /// from_json_text(to_json_text()) is the identity.
    std::string to_json_text() const;

    /// FNV-1a hash of the canonical serialization, as fixed-width hex.
    std::string hash() const;

    /// The antihermitized auxiliary operator (empty when no terms given).
    FermionOperator auxiliary_operator() const;
};

} // namespace swrrst
