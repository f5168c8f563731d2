#include "qnet/network.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace qnet;

namespace {

LabeledOperator labeled_choi(const KrausSet& k, const std::string& out, const std::string& in) {
    return kraus_to_choi(k, out, in).op;
}

// Choi of a map from in1 to (out1 (x) mem) followed by (mem (x) in2) -> out2, built from Kraus sets
struct TwoStep {
    KrausSet first;   // in1 -> out1 (x) mem
    KrausSet second;  // mem (x) in2 -> out2
    std::size_t d_in1, d_out1, d_mem, d_in2, d_out2;

    ComplexMatrix run(const ComplexMatrix& x) const {  // x on (in1, in2), output on (out1, out2)
        // first step on the in1 factor, then second step on (mem, in2)
        const std::size_t dx = d_in1 * d_in2;
        ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_out1 * d_out2),
                                                static_cast<Eigen::Index>(d_out1 * d_out2));
        for (std::size_t a = 0; a < dx; ++a)
            for (std::size_t b = 0; b < dx; ++b) {
                const cplx c = x(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (c == 0.0) continue;
                const std::size_t i1 = a / d_in2, i2 = a % d_in2, j1 = b / d_in2, j2 = b % d_in2;
                const ComplexMatrix mid = first.apply(ketbra(i1, j1, d_in1));  // (out1, mem)
                // (out1, mem, in2) -> (out1, out2)
                const ComplexMatrix full = kron(mid, ketbra(i2, j2, d_in2));
                for (const auto& k : second.operators) {
                    const ComplexMatrix op = kron(identity(d_out1), k);
                    out += c * op * full * op.adjoint();
                }
            }
        return out;
    }
};

}  // namespace

TEST_CASE("link of two channel Choi operators is the Choi operator of the composition") {
    std::mt19937_64 rng(20);
    for (int t = 0; t < 40; ++t) {
        const std::size_t d1 = 1 + rng() % 3, d2 = 1 + rng() % 3, d3 = 1 + rng() % 3;
        const auto ka = qtest::random_kraus(d1, d2, 1 + rng() % 3, rng);
        const auto kb = qtest::random_kraus(d2, d3, 1 + rng() % 3, rng);
        const auto l = link(labeled_choi(ka, "mid", "in"), labeled_choi(kb, "out", "mid"));
        REQUIRE(l.spaces.size() == 2);
        CHECK(l.spaces[0].name == "out");
        CHECK(l.spaces[1].name == "in");
        const auto oracle = qtest::brute_choi([&](const ComplexMatrix& x) { return kb.apply(ka.apply(x)); }, d1, d3);
        CHECK(max_abs(l.matrix - oracle) < 1e-10);
    }
}

TEST_CASE("link is commutative up to label order and associative") {
    std::mt19937_64 rng(21);
    const auto a = LabeledOperator(qtest::random_hermitian(4, rng), {{"x", 2}, {"y", 2}});
    const auto b = LabeledOperator(qtest::random_hermitian(6, rng), {{"y", 2}, {"z", 3}});
    const auto c = LabeledOperator(qtest::random_hermitian(6, rng), {{"z", 3}, {"w", 2}});
    const auto ab = link(a, b), ba = link(b, a);
    CHECK(max_abs(permute(ba, names_of(ab.spaces)).matrix - ab.matrix) < 1e-12);
    const auto left = link(link(a, b), c);
    const auto right = link(a, link(b, c));
    CHECK(max_abs(permute(right, names_of(left.spaces)).matrix - left.matrix) < 1e-10);
}

TEST_CASE("link without shared labels is the tensor product") {
    std::mt19937_64 rng(22);
    const auto a = LabeledOperator(qtest::ginibre(2, 2, rng), {{"x", 2}});
    const auto b = LabeledOperator(qtest::ginibre(3, 3, rng), {{"y", 3}});
    const auto l = link(a, b);
    CHECK(l.spaces[0].name == "y");
    CHECK(max_abs(l.matrix - kron(b.matrix, a.matrix)) < 1e-14);
}

TEST_CASE("link with a full contraction gives the trace pairing") {
    std::mt19937_64 rng(23);
    const auto a = qtest::ginibre(3, 3, rng), b = qtest::ginibre(3, 3, rng);
    const auto l = link(LabeledOperator(a, {{"x", 3}}), LabeledOperator(b, {{"x", 3}}));
    CHECK(std::abs(l.matrix(0, 0) - (a.transpose() * b).trace()) < 1e-12);
    CHECK_THROWS_AS(link(LabeledOperator(a, {{"x", 3}}), LabeledOperator(identity(2), {{"x", 2}})), Error);
}

TEST_CASE("two-step networks are valid combs and their isometry chain reproduces them") {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 10; ++t) {
        TwoStep s{qtest::random_kraus(2, 2 * 2, 2, rng), qtest::random_kraus(2 * 2, 2, 2, rng), 2, 2, 2, 2, 2};
        // Choi on (out1, mem, in1) and (out2, mem, in2)
        auto c1 = LabeledOperator(kraus_to_choi(s.first).matrix(), {{"out1", 2}, {"mem", 2}, {"in1", 2}});
        auto c2 = LabeledOperator(kraus_to_choi(s.second).matrix(), {{"out2", 2}, {"mem", 2}, {"in2", 2}});
        const auto r = link(c1, c2);
        NetworkChoi comb(r, {{"in1", "out1"}, {"in2", "out2"}});
        const auto rep = check_comb(comb);
        CHECK(rep.valid);
        CHECK(rep.level_residuals.size() == 2);

        const auto oracle = qtest::brute_choi([&](const ComplexMatrix& x) { return s.run(x); }, 4, 4);
        CHECK(max_abs(comb_as_channel(comb).matrix() - oracle) < 1e-10);

        const auto real = realize_comb(comb);
        for (const auto& v : real.isometries) CHECK(v.isometry_residual() < 1e-9);
        const auto w = chain_isometries(real.isometries);
        const std::size_t anc = static_cast<std::size_t>(w.rows()) / 4;
        const auto via_w = qtest::brute_choi(
            [&](const ComplexMatrix& x) {
                const ComplexMatrix big = w * x * w.adjoint();
                ComplexMatrix red = ComplexMatrix::Zero(4, 4);
                for (Eigen::Index o = 0; o < 4; ++o)
                    for (Eigen::Index p = 0; p < 4; ++p)
                        for (std::size_t a = 0; a < anc; ++a)
                            red(o, p) += big(o * static_cast<Eigen::Index>(anc) + static_cast<Eigen::Index>(a),
                                             p * static_cast<Eigen::Index>(anc) + static_cast<Eigen::Index>(a));
                return red;
            },
            4, 4);
        CHECK(max_abs(via_w - oracle) < 1e-9);
    }
}

TEST_CASE("signalling backwards in time breaks the comb conditions") {
    // identity from (in1, in2) to (out2, out1): out1 carries in2
    const auto k = KrausSet({identity(4)});
    auto c = LabeledOperator(kraus_to_choi(k).matrix(), {{"out2", 2}, {"out1", 2}, {"in1", 2}, {"in2", 2}});
    NetworkChoi comb(c, {{"in1", "out1"}, {"in2", "out2"}});
    CHECK_FALSE(check_comb(comb).valid);
    // the same operator with the teeth in causal order is fine
    NetworkChoi reordered(c, {{"in2", "out1"}, {"in1", "out2"}});
    CHECK(check_comb(reordered).valid);
    CHECK_THROWS_AS(realize_comb(comb), Error);
    CHECK_THROWS_AS(NetworkChoi(c, {{"in1", "out1"}}), Error);
}

TEST_CASE("tester built from a state and a POVM gives the Born probabilities") {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 20; ++t) {
        const auto rho = qtest::random_density(2, rng);
        const auto u = qtest::random_unitary(2, rng);
        std::vector<ComplexMatrix> povm{u * ketbra(0, 0, 2) * u.adjoint(), u * ketbra(1, 1, 2) * u.adjoint()};
        const LabeledOperator one(identity(1), {{"s", 1}});
        const LabeledOperator one_t(identity(1), {{"t", 1}});
        Tester tester;
        tester.teeth = {{"s", "x"}, {"y", "t"}};
        for (const auto& e : povm)
            // p = Tr[R T^T] with T = rho_x (x) E^T_y
            tester.elements.push_back(kron(kron(kron(one, LabeledOperator(rho, {{"x", 2}})),
                                                LabeledOperator(ComplexMatrix(e.transpose()), {{"y", 2}})),
                                           one_t));
        const auto rep = check_tester(tester);
        CHECK(rep.valid);
        CHECK(rep.boundary_dims_ok);

        const auto k = qtest::random_kraus(2, 2, 2, rng);
        auto chan = kron(kron(one, labeled_choi(k, "y", "x")), one_t);
        NetworkChoi net(chan, {{"s", "x"}, {"y", "t"}});
        double total = 0.0;
        for (std::size_t i = 0; i < povm.size(); ++i) {
            const double p = tester_probability(net, tester.elements[i]);
            const double born = (povm[i] * k.apply(rho)).trace().real();
            CHECK(std::abs(p - born) < 1e-12);
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);

        // a sub-normalized effect set is rejected
        Tester bad = tester;
        bad.elements.pop_back();
        CHECK_FALSE(check_tester(bad).valid);
    }
}

TEST_CASE("generalized instrument realization reproduces each element") {
    std::mt19937_64 rng(26);
    const auto k = qtest::random_kraus(2, 2, 3, rng);
    std::vector<LabeledOperator> elems;
    for (const auto& a : k.operators) elems.push_back(labeled_choi(KrausSet({a}), "out", "in"));
    const auto r = realize_gqi(elems, {{"in", "out"}});
    ComplexMatrix sum = ComplexMatrix::Zero(r.effects.front().rows(), r.effects.front().cols());
    for (const auto& e : r.effects) sum += e;
    CHECK(max_abs(sum - identity(static_cast<std::size_t>(sum.rows()))) < 1e-9);
    const auto& v = r.chain.isometries.front();
    const auto rho = qtest::random_density(2, rng);
    // V: (anc0 = 1, in) -> (out, anc1)
    Isometry iso{v.matrix, {v.out_spaces[0], v.out_spaces[1]}, {v.in_spaces[1]}};
    for (std::size_t i = 0; i < elems.size(); ++i)
        CHECK(max_abs(apply_dilation(iso, rho, r.effects[i]) - KrausSet({k.operators[i]}).apply(rho)) < 1e-9);
}
