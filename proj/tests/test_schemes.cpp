#include "qnet/schemes.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace qnet;

namespace {

const double kQs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
const double kPhis[] = {0.0, 1.0, M_PI / 3, M_PI};

ComplexMatrix phase_unitary(double phi) {
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, phi);
    return u;
}

ComplexVector random_ket(std::size_t d, std::mt19937_64& rng) { return qtest::ginibre(d, 1, rng).col(0).normalized(); }

}  // namespace

TEST_CASE("register circuit branch probabilities sum to one") {
    std::mt19937_64 rng(60);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto kind : {NoiseKind::DepolarizingMix, NoiseKind::PhaseDampingMix})
        for (std::size_t k = 1; k <= 3; ++k)
            for (int t = 0; t < 5; ++t) {
                const NoisySpec spec{kind, u(rng), 2 * M_PI * u(rng)};
                const auto psi = random_ket(2, rng);
                const auto br = vmc_run(spec, k, psi(0), psi(1));
                REQUIRE(br.size() == k + 1);
                double total = 0.0, succ = 0.0;
                for (const auto& b : br) {
                    CHECK(b.prob >= -1e-12);
                    CHECK(std::abs(b.prob - b.state.trace().real()) < 1e-12);
                    total += b.prob;
                    if (b.success) succ += b.prob;
                }
                CHECK(std::abs(total - 1.0) < 1e-10);
                const double N = double((std::size_t{1} << k) - 1);
                CHECK(std::abs(succ - N / (N + 1)) < 1e-9);
                CHECK_FALSE(br.back().success);
                CHECK(br.back().gates_used == static_cast<std::size_t>(N));
            }
}

TEST_CASE("one register: success applies the gate with dephasing noise on the data") {
    std::mt19937_64 rng(61);
    for (auto kind : {NoiseKind::DepolarizingMix, NoiseKind::PhaseDampingMix})
        for (double q : kQs) {
            const double phi = 0.9;
            const auto psi = random_ket(2, rng);
            const auto br = vmc_run({kind, q, phi}, 1, psi(0), psi(1));
            const ComplexMatrix rho = psi * psi.adjoint();
            const auto u = phase_unitary(phi);
            ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
            diag(0, 0) = rho(0, 0);
            diag(1, 1) = rho(1, 1);
            const ComplexMatrix want = 0.5 * (q * u * rho * u.adjoint() + (1 - q) * diag);
            CHECK(std::abs(br[0].prob - 0.5) < 1e-12);
            CHECK(max_abs(br[0].state - want) < 1e-12);
            CHECK(br[0].outcome_log == std::vector<int>{0});
            CHECK(br[1].outcome_log == std::vector<int>{1});
        }
}

TEST_CASE("register branches carry the expected gate, weight and recycled phase") {
    for (std::size_t k = 1; k <= 3; ++k)
        for (double q : kQs)
            for (double phi : kPhis) {
                const auto br = vmc_branch_chois({NoiseKind::DepolarizingMix, q, phi}, k);
                for (std::size_t r = 1; r <= k; ++r) {
                    const double nr = double((std::size_t{1} << r) - 1);
                    const double p = std::ldexp(1.0, -static_cast<int>(r));
                    CHECK(max_abs(br[r - 1].state - vmc_expected_choi(p, std::pow(q, nr), phi)) < 1e-12);
                }
                const double nk = double((std::size_t{1} << k) - 1);
                const double pk = std::ldexp(1.0, -static_cast<int>(k));
                CHECK(max_abs(br.back().state - vmc_expected_choi(pk, std::pow(q, nk), -nk * phi)) < 1e-12);
            }
}

TEST_CASE("register circuit gives identical branches for both noise kinds") {
    for (std::size_t k = 1; k <= 3; ++k)
        for (double q : kQs)
            for (double phi : kPhis) {
                const auto a = vmc_branch_chois({NoiseKind::DepolarizingMix, q, phi}, k);
                const auto b = vmc_branch_chois({NoiseKind::PhaseDampingMix, q, phi}, k);
                REQUIRE(a.size() == b.size());
                for (std::size_t i = 0; i < a.size(); ++i) {
                    CHECK(a[i].state == b[i].state);
                    CHECK(a[i].prob == b[i].prob);
                }
            }
}

TEST_CASE("register closed form") {
    CHECK(vmc_closed_form(3, 0.4).p_success == 0.75);
    CHECK(vmc_closed_form(7, 0.4).p_success == 0.875);
    const auto f = vmc_closed_form(7, 1.0);
    REQUIRE(f.branches.size() == 3);
    for (const auto& b : f.branches) CHECK(b.unitary_weight == 1.0);
    CHECK(f.p_unitary == f.p_success);
    const auto g = vmc_closed_form(3, 0.5);
    CHECK(std::abs(g.p_unitary - (0.5 * 0.5 + 0.25 * 0.125)) < 1e-15);
    CHECK_THROWS_AS(vmc_closed_form(4, 0.5), Error);
    CHECK_THROWS_AS(vmc_closed_form(0, 0.5), Error);
    CHECK(registers_for(15) == 4);
    // simulated success weight agrees with the closed form
    for (std::size_t k = 1; k <= 3; ++k) {
        const std::size_t N = (std::size_t{1} << k) - 1;
        const auto br = vmc_branch_chois({NoiseKind::PhaseDampingMix, 0.6, 0.3}, k);
        double pu = 0.0;
        for (const auto& b : br)
            if (b.success) pu += decompose(ChoiChannel(LabeledOperator(b.state, {{"D", 2}, {"C", 2}})), 0.3).alpha;
        CHECK(std::abs(pu - vmc_closed_form(N, 0.6).p_unitary) < 1e-12);
    }
}

TEST_CASE("shift-down is a permutation decrementing the irrep range modulo N+1") {
    for (std::size_t N = 1; N <= 5; ++N) {
        const auto s = shift_down(N);
        const std::size_t d = std::size_t{1} << N;
        CHECK(max_abs(s.adjoint() * s - identity(2 * d)) == 0.0);
        for (Eigen::Index c = 0; c < s.cols(); ++c) {
            int ones = 0;
            for (Eigen::Index r = 0; r < s.rows(); ++r) {
                CHECK((s(r, c) == cplx(0) || s(r, c) == cplx(1)));
                ones += s(r, c) == cplx(1);
            }
            CHECK(ones == 1);
        }
        CHECK(max_abs(s.topLeftCorner(d, d) - identity(d)) == 0.0);
        // control on: 0 -> N, t -> t-1 on irreps, fixed on multiplicity indices
        CHECK(s(static_cast<Eigen::Index>(d + N), static_cast<Eigen::Index>(d)) == cplx(1));
        for (std::size_t t = 1; t <= N; ++t)
            CHECK(s(static_cast<Eigen::Index>(d + t - 1), static_cast<Eigen::Index>(d + t)) == cplx(1));
        for (std::size_t t = N + 1; t < d; ++t)
            CHECK(s(static_cast<Eigen::Index>(d + t), static_cast<Eigen::Index>(d + t)) == cplx(1));
    }
    CHECK_THROWS_AS(shift_down(0), Error);
}

TEST_CASE("virtual qudit without noise: the first N outcomes apply the gate, the last undoes N of them") {
    for (std::size_t N = 1; N <= 4; ++N)
        for (double phi : kPhis) {
            const auto r = vq_run({N, {NoiseKind::DepolarizingMix, 1.0, phi}, 1.0, 0.0});
            CHECK(std::abs(r.p_success - double(N) / double(N + 1)) < 1e-12);
            for (std::size_t t = 0; t < N; ++t)
                CHECK(max_abs(r.outcome_chois[t] - phase_choi(phi) / double(N + 1)) < 1e-12);
            CHECK(max_abs(r.outcome_chois[N] - phase_choi(-double(N) * phi) / double(N + 1)) < 1e-12);
            for (std::size_t t = N + 1; t < r.outcome_chois.size(); ++t) CHECK(max_abs(r.outcome_chois[t]) < 1e-14);
            CHECK(std::abs(r.p_unitary - double(N) / double(N + 1)) < 1e-12);
        }
}

TEST_CASE("virtual qudit simulation follows the closed forms") {
    std::mt19937_64 rng(62);
    for (std::size_t N = 1; N <= 4; ++N)
        for (double q : kQs)
            for (double phi : {0.3, 2.0}) {
                const auto psi = random_ket(2, rng);
                const auto dep = vq_run({N, {NoiseKind::DepolarizingMix, q, phi}, psi(0), psi(1)});
                const auto fd = vq_dep_closed(N, q);
                CHECK(std::abs(dep.p_success - fd.p_success) < 1e-10);
                CHECK(std::abs(dep.p_unitary - fd.p_unitary) < 1e-10);
                CHECK(std::abs(dep.p_unitary - dep_closed_form(N, q).p_unitary) < 1e-10);
                CHECK(std::abs(dep.p_ab - fd.p_ab) < 1e-10);
                CHECK(dep.residual < 1e-10);

                const auto pd = vq_run({N, {NoiseKind::PhaseDampingMix, q, phi}, psi(0), psi(1)});
                const auto fp = vq_pd_closed(N, q);
                CHECK(std::abs(pd.p_success - fp.p_success) < 1e-10);
                CHECK(std::abs(pd.p_unitary - fp.p_unitary) < 1e-10);
                CHECK(std::abs(pd.p_ab - fp.p_ab) < 1e-10);
                // the data-specific success rate does not depend on the data state
                CHECK(std::abs(pd.p_success_data - pd.p_success) < 1e-10);
            }
    CHECK_THROWS_AS(vq_run({5, {NoiseKind::DepolarizingMix, 0.5, 0.1}, 1.0, 0.0}), BoundError);
    CHECK_THROWS_AS(vq_run({2, {NoiseKind::DepolarizingMix, 0.5, 0.1}, 1.0, 1.0}), Error);
}

TEST_CASE("permutation tallies for four uses") {
    CHECK(perm_counts(4, 3, 1).total() == 4);
    CHECK(perm_counts(4, 2, 2).total() == 3);
    CHECK(perm_counts(4, 2, 1).total() == 6);
    CHECK(perm_counts(4, 1, 1).total() == 2);
    CHECK(perm_counts(4, 1, 2).total() == 2);
    CHECK(perm_counts(4, 1, 3).total() == 2);
    CHECK(perm_counts(4, 1, 3).interior == 0);
    CHECK_THROWS_AS(perm_counts(4, 0, 1), Error);
    CHECK_THROWS_AS(perm_counts(4, 2, 3), Error);
}

TEST_CASE("permutation tallies agree with counting placements of a fenced run") {
    // a run of V contraction factors is fenced by a unitary on each side not at an end;
    // the other factors fill the left and right gaps freely
    for (std::size_t N = 2; N <= 9; ++N)
        for (std::size_t phi = 1; phi + 1 <= N; ++phi)
            for (std::size_t V = 1; V <= N - phi; ++V) {
                std::uint64_t boundary = 0, interior = 0;
                // place the run, then arrange the rest freely with a U fence on each open side
                for (std::size_t start = 0; start + V <= N; ++start) {
                    const bool left_end = start == 0, right_end = start + V == N;
                    if (left_end && right_end) continue;
                    const std::size_t fences = (left_end ? 0 : 1) + (right_end ? 0 : 1);
                    if (fences > phi) continue;
                    const std::size_t free_slots = N - V - fences;
                    const std::size_t free_u = phi - fences;
                    // remaining symbols split into the left and right of the fenced run
                    const std::size_t left = left_end ? 0 : start - 1;
                    std::uint64_t ways = 0;
                    for (std::size_t ul = 0; ul <= free_u; ++ul) {
                        if (ul > left || free_u - ul > free_slots - left) continue;
                        ways += binomial(left, ul) * binomial(free_slots - left, free_u - ul);
                    }
                    (left_end || right_end ? boundary : interior) += ways;
                }
                const auto c = perm_counts(N, phi, V);
                CHECK(c.boundary == boundary);
                CHECK(c.interior == interior);
            }
}

TEST_CASE("virtual-qudit closed forms reduce correctly at the ends of the noise range") {
    for (std::size_t N = 1; N <= 15; ++N) {
        const double n = double(N);
        CHECK(std::abs(vq_dep_closed(N, 1.0).p_success - n / (n + 1)) < 1e-14);
        CHECK(std::abs(vq_pd_closed(N, 0.0).p_unitary) == 0.0);
        CHECK(std::abs(vq_pd_closed(N, 0.0).p_ab - n / (n + 1)) < 1e-15);
    }
    const auto f = vq_pd_closed(15, 0.8);
    CHECK(std::abs(f.p_unitary - 0.8 * 15.0 / 16.0) < 1e-15);
    CHECK(std::abs(vq_dep_closed(3, 0.4).p_unitary - 3 * 0.4 / 4 * 0.7 * 0.7) < 1e-15);
}

TEST_CASE("comparison tables") {
    const auto qs = default_q_grid(11);
    REQUIRE(qs.size() == 11);
    CHECK(qs.front() == 0.0);
    CHECK(qs.back() == 1.0);
    for (const auto& kind : figure_kinds()) CHECK(figure_data(kind, qs).size() % (4 * qs.size()) == 0);

    const auto rows = figure_data("dep-vs-pd", qs);
    for (const auto& r : rows) {
        const double n = double(r.N);
        if (r.noise == "pd") CHECK(std::abs(r.p_suc - n / (n + 1)) < 1e-15);
        if (r.noise == "dep" && r.N == 1 && r.q == 1.0) CHECK(std::abs(r.p_suc - 0.5) < 1e-15);
    }
    for (std::size_t N : {1, 3, 7, 15})
        for (double q : qs) {
            const auto dep = scheme_row("psar", NoiseKind::DepolarizingMix, N, q);
            const auto pd = scheme_row("psar", NoiseKind::PhaseDampingMix, N, q);
            if (q < 1.0) CHECK(pd.p_suc > dep.p_suc);
            else CHECK(std::abs(pd.p_suc - dep.p_suc) < 1e-15);
            CHECK(scheme_row("vmc", NoiseKind::DepolarizingMix, N, q).p_suc ==
                  scheme_row("vmc", NoiseKind::PhaseDampingMix, N, q).p_suc);
        }
    CHECK_THROWS_AS(figure_data("nonsense"), Error);
    CHECK_THROWS_AS(figure_data("dep-vs-pd", {}), Error);
    CHECK_THROWS_AS(scheme_row("other", NoiseKind::DepolarizingMix, 1, 0.5), Error);
}
