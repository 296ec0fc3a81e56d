#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "swrrst/errors.hpp"
#include "swrrst/jw.hpp"
#include "swrrst/pauli.hpp"
#include "swrrst/schedule.hpp"
#include "swrrst/solver.hpp"
#include "testing.hpp"

using namespace swrrst;
using doctest::Approx;

namespace {

double pauli_defect(const PauliOperator& p, const DenseMatrix& want, int n) {
    return (p.to_dense(n) - want).cwiseAbs().maxCoeff();
}

PauliString random_string(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
    return {bits(rng), bits(rng)};
}

PauliOperator random_pauli(std::mt19937_64& rng, int n, int n_strings) {
    PauliOperator out;
    for (int i = 0; i < n_strings; ++i)
        out.add_string(random_string(rng, n), testing::random_coeff(rng));
    return out;
}

double unitary_defect(const Eigen::VectorXcd& diag, const DenseMatrix& want) {
    return (DenseMatrix(diag.asDiagonal()) - want).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("pauli string products") {
    SUBCASE("single-qubit multiplication table matches dense matrices") {
        const PauliString table[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; // I X Y Z
        for (const PauliString& a : table) {
            for (const PauliString& b : table) {
                const DenseMatrix da = PauliOperator::single(a).to_dense(1);
                const DenseMatrix db = PauliOperator::single(b).to_dense(1);
                const PauliOperator prod = PauliOperator::single(a) * PauliOperator::single(b);
                CHECK(prod.size() == 1);
                CHECK(pauli_defect(prod, da * db, 1) < 1e-15);
            }
        }
    }

    SUBCASE("random multi-qubit products match dense composition") {
        std::mt19937_64 rng(301);
        for (int trial = 0; trial < 40; ++trial) {
            const PauliString a = random_string(rng, 5);
            const PauliString b = random_string(rng, 5);
            const PauliOperator prod = PauliOperator::single(a) * PauliOperator::single(b);
            const DenseMatrix want = PauliOperator::single(a).to_dense(5) *
                                     PauliOperator::single(b).to_dense(5);
            CHECK(pauli_defect(prod, want, 5) < 1e-14);
        }
    }

    SUBCASE("letters and support") {
        PauliString s{bit_of(1), bit_of(3)};
        CHECK(s.letters(4) == "IZIX");
        CHECK(s.weight() == 2);
        CHECK(s.max_qubit() == 3);
        CHECK(s.min_qubit() == 1);
        CHECK(!s.z_only());
        PauliString id{};
        CHECK(id.is_identity());
        CHECK(id.letters(3) == "III");
        CHECK(id.max_qubit() == 0);
        PauliString zz{0, bit_of(2) | bit_of(4)};
        CHECK(zz.z_only());
        CHECK(zz.letters(4) == "ZIZI");
    }
}

TEST_CASE("pauli operator arithmetic") {
    std::mt19937_64 rng(307);
    SUBCASE("sum and product agree with dense oracles") {
        for (int trial = 0; trial < 12; ++trial) {
            const PauliOperator a = random_pauli(rng, 4, 6);
            const PauliOperator b = random_pauli(rng, 4, 6);
            const DenseMatrix da = a.to_dense(4);
            const DenseMatrix db = b.to_dense(4);
            CHECK(pauli_defect(a + b, da + db, 4) < 1e-13);
            CHECK(pauli_defect(a * b, da * db, 4) < 1e-13);
            CHECK(pauli_defect(a.adjoint(), da.adjoint(), 4) < 1e-13);
        }
    }

    SUBCASE("scalar scaling and cancellation") {
        PauliOperator a = random_pauli(rng, 3, 5);
        const DenseMatrix da = a.to_dense(3);
        CHECK(pauli_defect(a * cplx(0.0, 2.0), cplx(0.0, 2.0) * da, 3) < 1e-14);
        PauliOperator diff = a - a;
        CHECK(diff.empty());
    }

    SUBCASE("text round trip is bit-faithful") {
        const PauliOperator a = random_pauli(rng, 5, 9);
        const PauliOperator back = PauliOperator::from_text(a.to_text(5));
        REQUIRE(back.size() == a.size());
        for (const auto& [s, w] : a.weights()) CHECK(back.weight(s) == w);
    }

    SUBCASE("parser reports line numbers") {
        CHECK_THROWS_WITH_AS(PauliOperator::from_text("0.5 IXZ\n0.25 IQZ\n"),
                             doctest::Contains("line 2"), ValidationError);
        CHECK_THROWS_WITH_AS(PauliOperator::from_text("0.5 IXZ\n0.25 XZ\n"),
                             doctest::Contains("inconsistent"), ValidationError);
        CHECK_THROWS_WITH_AS(PauliOperator::from_text("zzz IXZ\n"),
                             doctest::Contains("weight"), ValidationError);
        CHECK_THROWS_WITH_AS(PauliOperator::from_text("0.5 IXZ junk\n"),
                             doctest::Contains("trailing"), ValidationError);
        CHECK(PauliOperator::from_text("# comment\n\n").empty());
    }

    SUBCASE("complex weights round trip") {
        PauliOperator a;
        a.add_string({bit_of(2), 0}, cplx(0.125, -0.75));
        const PauliOperator back = PauliOperator::from_text(a.to_text(2));
        CHECK(back.weight({bit_of(2), 0}) == cplx(0.125, -0.75));
    }

    SUBCASE("dense cap is enforced") {
        PauliOperator a = PauliOperator::identity();
        CHECK_THROWS_AS(static_cast<void>(a.to_dense(15)), CapacityError);
    }
}

TEST_CASE("jw_map reproduces canonical encodings") {
    SUBCASE("number operator becomes (1 - Z)/2") {
        const PauliOperator p = jw_map(FermionOperator::number(3), 4);
        REQUIRE(p.size() == 2);
        CHECK(p.weight({0, 0}) == cplx(0.5));
        CHECK(p.weight({0, bit_of(3)}) == cplx(-0.5));
    }

    SUBCASE("product of number operators becomes (1-Z)(1-Z)/4") {
        FermionOperator npq = FermionOperator::single(1.0, {bit_of(1) | bit_of(4), bit_of(1) | bit_of(4)});
        const PauliOperator p = jw_map(npq, 4);
        REQUIRE(p.size() == 4);
        CHECK(p.weight({0, 0}) == cplx(0.25));
        CHECK(p.weight({0, bit_of(1)}) == cplx(-0.25));
        CHECK(p.weight({0, bit_of(4)}) == cplx(-0.25));
        CHECK(p.weight({0, bit_of(1) | bit_of(4)}) == cplx(0.25));
    }

    SUBCASE("single creator at the bottom of the register") {
        const PauliOperator p = jw_map(FermionOperator::ladder(1, true), 1);
        DenseMatrix want(2, 2);
        want << 0, 0, 1, 0;
        CHECK(pauli_defect(p, want, 1) < 1e-15);
    }

    SUBCASE("adjacent-pair hop is a two-qubit operator with no trailing chain") {
        // a†_3 a_4 on the adjacent external pair (3,4): the Z chains cancel
        // below the pair, leaving the advertised local two-qubit action.
        FermionOperator hop = FermionOperator::single(1.0, {bit_of(3), bit_of(4)});
        const PauliOperator p = jw_map(hop, 4);
        CHECK(p.size() == 4);
        for (const auto& [s, w] : p.weights()) {
            CHECK((s.support() & (bit_of(1) | bit_of(2))) == 0);
            CHECK(s.max_qubit() <= 4);
            CHECK(s.min_qubit() >= 3);
        }
        CHECK(pauli_defect(p, to_dense(hop, 4).matrix, 4) < 1e-14);
    }

    SUBCASE("a non-adjacent hop does carry the chain") {
        FermionOperator hop = FermionOperator::single(1.0, {bit_of(1), bit_of(4)});
        const PauliOperator p = jw_map(hop, 4);
        for (const auto& [s, w] : p.weights())
            CHECK((s.support() & (bit_of(2) | bit_of(3))) == (bit_of(2) | bit_of(3)));
    }

    SUBCASE("index overflow is rejected") {
        CHECK_THROWS_AS(static_cast<void>(jw_map(FermionOperator::number(5), 4)),
                        ValidationError);
    }
}

TEST_CASE("jw_map round trip against the fermionic dense oracle") {
    std::mt19937_64 rng(311);
    SUBCASE("random operators up to eight spin-orbitals") {
        for (int n = 1; n <= 8; ++n) {
            for (int trial = 0; trial < 4; ++trial) {
                const FermionOperator a = testing::random_operator(rng, n, 2 * n, 3);
                const PauliOperator p = jw_map(a, n);
                CHECK(pauli_defect(p, to_dense(a, n).matrix, n) < 1e-12);
            }
        }
    }

    SUBCASE("scalar and empty operators") {
        CHECK(pauli_defect(jw_map(FermionOperator::identity(cplx(0.25, -1.0)), 2),
                           cplx(0.25, -1.0) * DenseMatrix::Identity(4, 4), 2) < 1e-15);
        CHECK(jw_map(FermionOperator{}, 3).empty());
    }

    SUBCASE("hermitian sources give real weights") {
        for (int trial = 0; trial < 6; ++trial) {
            const FermionOperator h = testing::random_hermitian(rng, 6, 12, 3);
            CHECK(jw_map(h, 6).max_imag_weight() < 1e-12);
        }
        testing::Toy toy = testing::toy_n3k2(rng);
        CHECK(jw_map(toy.h, 6).max_imag_weight() < 1e-12);
    }
}

TEST_CASE("support width under a partition") {
    std::mt19937_64 rng(313);
    testing::Toy toy = testing::toy_n2k1(rng);

    SUBCASE("identity string has width zero") {
        SupportInfo info = support_width({}, toy.part);
        CHECK(info.width == 0);
        CHECK(info.max_qubit == 0);
        CHECK(!info.touches_external);
    }

    SUBCASE("external number operator is one qubit wide") {
        const PauliOperator p = jw_map(FermionOperator::number(3), 4);
        for (const auto& [s, w] : p.weights()) {
            if (s.is_identity()) continue;
            SupportInfo info = support_width(s, toy.part);
            CHECK(info.width == 1);
            CHECK(info.max_qubit == 3);
            CHECK(info.touches_external);
        }
    }

    SUBCASE("active strings do not touch external qubits") {
        const PauliOperator p = jw_map(FermionOperator::single(1.0, {bit_of(1), bit_of(2)}), 4);
        for (const auto& [s, w] : p.weights())
            CHECK(!support_width(s, toy.part).touches_external);
    }

    SUBCASE("census totals") {
        const PauliOperator p = jw_map(FermionOperator::number(3), 4);
        PauliCensus census = pauli_census(p, toy.part);
        CHECK(census.strings == 2);
        CHECK(census.z_only == 2);
        CHECK(census.touching_external == 1);
        CHECK(census.width_histogram.at(0) == 1);
        CHECK(census.width_histogram.at(1) == 1);
    }
}

TEST_CASE("locality report") {
    SUBCASE("raw Hamiltonian census shows block-spanning eod strings") {
        std::mt19937_64 rng(317);
        testing::Toy toy = testing::toy_n3k2(rng);
        LocalityReport report = locality_report(toy.h, toy.part);
        const PauliCensus& eod = report.sector(SectorLabel::external_energetically_distinct);
        CHECK(eod.strings > 0);
        CHECK(eod.touching_external == eod.strings);
        CHECK(eod.max_width > 2); // strings bridging the active and external blocks
        // the structural invariants of the encoding hold even before solving
        CHECK(report.internal_active_only);
        CHECK(report.diagonal_z_only);
        CHECK(report.ie_pair_confined);
    }

    SUBCASE("transformed Hamiltonian from an eod solve satisfies the locality claims") {
        std::mt19937_64 rng(331);
        testing::Toy toy = testing::toy_n3k2(rng);
        SolverOptions opts;
        opts.l = 0;
        opts.body_rank = 0;
        opts.bch_body_rank = 0;
        opts.max_iter = 200;
        auto [b, rep] = solve_swrrst(toy.h, toy.part, opts);
        REQUIRE(rep.converged);
        BuildGResult gr = build_G(toy.h, b, toy.part);
        LocalityReport report = locality_report(gr.g, toy.part);
        CHECK(report.sector(SectorLabel::external_energetically_distinct).strings == 0);
        CHECK(report.internal_active_only);
        CHECK(report.sector(SectorLabel::internal).max_qubit <= toy.part.n_active());
        CHECK(report.diagonal_z_only);
        CHECK(report.ie_pair_confined);
        const PauliCensus& iso = report.sector(SectorLabel::external_isoenergetic);
        CHECK(iso.strings > 0); // the eod-domain solve leaves iso terms behind
        CHECK(!report.to_text().empty());
    }

    SUBCASE("full od solve leaves only Z/I strings on external qubits") {
        std::mt19937_64 rng(337);
        testing::Toy toy = testing::toy_n2k1_broken(rng);
        SolverOptions opts;
        opts.domain = Domain::od;
        opts.l = 0;
        opts.body_rank = 0;
        opts.bch_body_rank = 0;
        opts.max_iter = 200;
        auto [b, rep] = solve_swrrst(toy.h, toy.part, opts);
        REQUIRE(rep.converged);
        BuildGResult gr = build_G(toy.h, b, toy.part);
        LocalityReport report = locality_report(gr.g, toy.part);
        CHECK(report.sector(SectorLabel::external_isoenergetic).strings == 0);
        CHECK(report.sector(SectorLabel::external_energetically_distinct).strings == 0);
        CHECK(report.diagonal_z_only);
        // every string acting on an external qubit is Z/I-only
        const PauliOperator g = jw_map(gr.g, 4);
        for (const auto& [s, w] : g.weights())
            if (support_width(s, toy.part).touches_external) CHECK(s.z_only());
    }
}

TEST_CASE("rotation schedules") {
    SUBCASE("empty polynomial gives an empty schedule") {
        NumberPolynomial f;
        RotationSchedule sched = schedule_number_exponential(f, 1.7);
        CHECK(sched.empty());
        CHECK(schedule_phases(sched).size() == 1);
        CHECK(schedule_phases(sched)(0) == cplx(1.0));
    }

    SUBCASE("single number operator matches the closed form") {
        const double alpha = 0.37;
        const double t = 0.9;
        NumberPolynomial f;
        f.add(bit_of(2), alpha);
        RotationSchedule sched = schedule_number_exponential(f, t);
        REQUIRE(sched.entries.size() == 2);
        CHECK(sched.entries[0].qubits == 0);
        CHECK(sched.entries[0].angle == Approx(t * alpha));
        CHECK(sched.entries[1].qubits == bit_of(2));
        CHECK(sched.entries[1].angle == Approx(-t * alpha));
        // exp(-it·alpha·n_p) = e^{-it·alpha/2} · exp(+i(t·alpha/2)Z_p)
        Eigen::VectorXcd diag = schedule_phases(sched);
        const cplx global = std::exp(cplx(0, -0.5 * t * alpha));
        CHECK(std::abs(diag(0) - global * std::exp(cplx(0, 0.5 * t * alpha))) < 1e-15);
        const DenseMatrix want = expm_propagator(to_dense(f.expand(), 2).matrix, t);
        CHECK(unitary_defect(diag, want) < 1e-14);
    }

    SUBCASE("two-qubit monomial matches the dense exponential") {
        NumberPolynomial f;
        f.add(bit_of(1) | bit_of(3), -0.8);
        for (double t : {0.25, 2.0, -1.3}) {
            RotationSchedule sched = schedule_number_exponential(f, t);
            CHECK(sched.entries.size() == 4);
            const DenseMatrix want = expm_propagator(to_dense(f.expand(), 3).matrix, t);
            CHECK(unitary_defect(schedule_phases(sched), want) < 1e-12);
        }
    }

    SUBCASE("degree-three monomials are scheduled exactly") {
        NumberPolynomial f;
        f.add(bit_of(1) | bit_of(2) | bit_of(3), 0.6);
        f.add(bit_of(2), -0.2);
        RotationSchedule sched = schedule_number_exponential(f, 1.1);
        const DenseMatrix want = expm_propagator(to_dense(f.expand(), 3).matrix, 1.1);
        CHECK(unitary_defect(schedule_phases(sched), want) < 1e-12);
    }

    SUBCASE("random polynomials over six qubits") {
        std::mt19937_64 rng(347);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 6; ++trial) {
            NumberPolynomial f;
            f.add(0, u(rng));
            for (int m = 0; m < 6; ++m) f.add(testing::random_mask(rng, 6, 3), u(rng));
            for (double t : {0.4, -1.9}) {
                RotationSchedule sched = schedule_number_exponential(f, t, 6);
                const DenseMatrix want = expm_propagator(to_dense(f.expand(), 6).matrix, t);
                CHECK(unitary_defect(schedule_phases(sched), want) < 1e-12);
            }
        }
    }

    SUBCASE("schedule text round trip") {
        NumberPolynomial f;
        f.add(bit_of(1) | bit_of(4), 0.31);
        f.add(bit_of(2), -1.7);
        RotationSchedule sched = schedule_number_exponential(f, 0.77);
        RotationSchedule back = RotationSchedule::from_text(sched.to_text());
        REQUIRE(back.entries.size() == sched.entries.size());
        for (std::size_t i = 0; i < sched.entries.size(); ++i) {
            CHECK(back.entries[i].qubits == sched.entries[i].qubits);
            CHECK(back.entries[i].angle == sched.entries[i].angle);
        }
        CHECK(back.n_qubits == 4);
    }

    SUBCASE("schedule parser reports errors") {
        CHECK_THROWS_WITH_AS(RotationSchedule::from_text("abc z:1\n"), doctest::Contains("angle"),
                             ValidationError);
        CHECK_THROWS_WITH_AS(RotationSchedule::from_text("0.5 z:0\n"),
                             doctest::Contains("invalid qubit"), ValidationError);
        CHECK_THROWS_WITH_AS(RotationSchedule::from_text("0.5 z:2,2\n"),
                             doctest::Contains("repeated"), ValidationError);
        CHECK_THROWS_WITH_AS(RotationSchedule::from_text("0.5 z:1 junk\n"),
                             doctest::Contains("trailing"), ValidationError);
    }

    SUBCASE("external part of an od-solved G is scheduled exactly") {
        std::mt19937_64 rng(349);
        testing::Toy toy = testing::toy_n2k1_broken(rng);
        SolverOptions opts;
        opts.domain = Domain::od;
        opts.l = 0;
        opts.body_rank = 0;
        opts.bch_body_rank = 0;
        opts.max_iter = 200;
        auto [b, rep] = solve_swrrst(toy.h, toy.part, opts);
        REQUIRE(rep.converged);
        BuildGResult gr = build_G(toy.h, b, toy.part);
        FermionOperator dpart = project(gr.g, SectorLabel::external_diagonal, toy.part);
        NumberPolynomial f = to_number_polynomial(dpart, toy.part);
        for (double t : {0.5, 3.1}) {
            RotationSchedule sched = schedule_number_exponential(f, t, 4);
            const DenseMatrix want = expm_propagator(to_dense(f.expand(), 4).matrix, t);
            CHECK(unitary_defect(schedule_phases(sched), want) < 1e-12);
        }
    }
}
