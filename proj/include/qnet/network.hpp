#pragma once

// Link product, comb/tester normalization, and isometry-chain realization of networks.

#include "qnet/channel.hpp"
#include "qnet/tensor.hpp"

#include <string>
#include <vector>

namespace qnet {

// A * B = Tr_shared[(1 (x) A^{T_shared}) (B (x) 1)].
// Result labels: B-only labels in B's order, then A-only labels in A's order.
// result[(b,a),(b',a')] = sum_{t,s} A[(t,a),(s,a')] B[(b,t),(b',s)], done as one GEMM.
inline LabeledOperator link(const LabeledOperator& a, const LabeledOperator& b) {
    if (a.is_vector() || b.is_vector()) throw Error("link needs operators, not kets");
    std::vector<std::string> shared, a_only, b_only;
    for (const auto& l : a.spaces) {
        if (b.has(l.name)) {
            if (b.label(l.name).dim != l.dim) throw Error("link: dimension mismatch on shared label '" + l.name + "'");
            shared.push_back(l.name);
        } else {
            a_only.push_back(l.name);
        }
    }
    for (const auto& l : b.spaces)
        if (!a.has(l.name)) b_only.push_back(l.name);

    auto order_a = shared;
    order_a.insert(order_a.end(), a_only.begin(), a_only.end());
    auto order_b = b_only;
    order_b.insert(order_b.end(), shared.begin(), shared.end());
    const auto ap = permute(a, order_a);
    const auto bp = permute(b, order_b);

    Spaces out_spaces(bp.spaces.begin(), bp.spaces.begin() + static_cast<std::ptrdiff_t>(b_only.size()));
    out_spaces.insert(out_spaces.end(), ap.spaces.begin() + static_cast<std::ptrdiff_t>(shared.size()),
                      ap.spaces.end());
    const auto out_dim = total_dim(out_spaces);
    if (out_dim > kMaxTotalDim) throw Error("link: result exceeds dimension bound");

    const auto T = static_cast<Eigen::Index>(total_dim(Spaces(ap.spaces.begin(),
                                                             ap.spaces.begin() + static_cast<std::ptrdiff_t>(shared.size()))));
    const auto Da = static_cast<Eigen::Index>(ap.dim()) / T;
    const auto Db = static_cast<Eigen::Index>(bp.dim()) / T;

    ComplexMatrix at(Da * Da, T * T), bt(T * T, Db * Db);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index s = 0; s < T; ++s) {
            for (Eigen::Index x = 0; x < Da; ++x)
                for (Eigen::Index y = 0; y < Da; ++y) at(x * Da + y, t * T + s) = ap.matrix(t * Da + x, s * Da + y);
            for (Eigen::Index x = 0; x < Db; ++x)
                for (Eigen::Index y = 0; y < Db; ++y) bt(t * T + s, x * Db + y) = bp.matrix(x * T + t, y * T + s);
        }
    const ComplexMatrix c = at * bt;
    ComplexMatrix r(Db * Da, Db * Da);
    for (Eigen::Index x = 0; x < Db; ++x)
        for (Eigen::Index y = 0; y < Db; ++y)
            for (Eigen::Index u = 0; u < Da; ++u)
                for (Eigen::Index v = 0; v < Da; ++v) r(x * Da + u, y * Da + v) = c(u * Da + v, x * Db + y);
    return LabeledOperator(std::move(r), std::move(out_spaces));
}

struct Tooth {
    std::string in;
    std::string out;
};

// Choi operator of a network with a causal order given by its teeth.
struct NetworkChoi {
    LabeledOperator op;
    std::vector<Tooth> teeth;

    NetworkChoi() = default;
    NetworkChoi(LabeledOperator o, std::vector<Tooth> t) : op(std::move(o)), teeth(std::move(t)) { validate(); }

    std::vector<std::string> canonical_order() const {
        std::vector<std::string> n;
        for (const auto& t : teeth) {
            n.push_back(t.in);
            n.push_back(t.out);
        }
        return n;
    }

    void validate() const {
        if (teeth.empty()) throw Error("network needs at least one tooth");
        const auto n = canonical_order();
        if (n.size() != op.spaces.size()) throw Error("every label must sit in exactly one tooth slot");
        permute(op, n);  // throws on unknown or repeated labels
    }
};

struct CombReport {
    bool valid = false;
    std::vector<double> level_residuals;  // index k-1 for level k
    double psd_residual = 0.0;
};

namespace detail {

// R^k for k = 0..N, each on canonical labels of the first k teeth; R^0 is the 1x1 scalar.
inline std::vector<LabeledOperator> comb_levels(const NetworkChoi& r) {
    std::vector<LabeledOperator> lv(r.teeth.size() + 1);
    lv.back() = permute(r.op, r.canonical_order());
    for (std::size_t k = r.teeth.size(); k >= 1; --k) {
        const auto& t = r.teeth[k - 1];
        auto red = partial_trace(lv[k], {t.out, t.in});
        red.matrix /= static_cast<double>(lv[k].label(t.in).dim);
        lv[k - 1] = red;
    }
    return lv;
}

inline std::vector<double> chain_residuals(const NetworkChoi& r, const std::vector<LabeledOperator>& lv) {
    std::vector<double> res;
    for (std::size_t k = 1; k <= r.teeth.size(); ++k) {
        const auto& t = r.teeth[k - 1];
        auto lhs = partial_trace(lv[k], {t.out});
        const auto in_label = lv[k].label(t.in);
        auto rhs = permute(kron(lv[k - 1], identity(Spaces{in_label})), names_of(lhs.spaces));
        res.push_back(max_abs(lhs.matrix - rhs.matrix));
    }
    return res;
}

}  // namespace detail

// Tr_{out_k} R^k = 1_{in_k} (x) R^{k-1} for every k, with R^0 = 1.
inline CombReport check_comb(const NetworkChoi& r, const Tolerances& tol = {}) {
    CombReport rep;
    const auto lv = detail::comb_levels(r);
    rep.level_residuals = detail::chain_residuals(r, lv);
    rep.level_residuals.front() = std::max(rep.level_residuals.front(), std::abs(lv[0].matrix(0, 0) - 1.0));
    const double scale = 1.0 + max_abs(r.op.matrix);
    bool ok = hermiticity_residual(r.op.matrix) <= tol.herm * scale;
    if (ok) {
        rep.psd_residual = std::max(0.0, -min_eigenvalue(r.op.matrix, tol.herm));
        ok = rep.psd_residual <= tol.psd * scale;
    } else {
        rep.psd_residual = hermiticity_residual(r.op.matrix);
    }
    for (double x : rep.level_residuals) ok = ok && x <= tol.eq * scale;
    rep.valid = ok;
    return rep;
}

struct Tester {
    std::vector<LabeledOperator> elements;
    std::vector<Tooth> teeth;
};

struct TesterReport {
    bool valid = false;
    bool boundary_dims_ok = false;
    std::vector<double> element_psd_residuals;
    CombReport chain;
};

// Elements PSD, first input and last output one-dimensional, sum obeys the comb chain ending in trace one.
inline TesterReport check_tester(const Tester& t, const Tolerances& tol = {}) {
    TesterReport rep;
    if (t.elements.empty() || t.teeth.empty()) throw Error("tester needs elements and teeth");
    LabeledOperator sum = t.elements.front();
    sum.matrix.setZero();
    for (const auto& e : t.elements) {
        const auto ep = permute(e, names_of(sum.spaces));
        sum.matrix += ep.matrix;
        rep.element_psd_residuals.push_back(
            hermiticity_residual(ep.matrix) > tol.herm * (1.0 + max_abs(ep.matrix))
                ? hermiticity_residual(ep.matrix)
                : std::max(0.0, -min_eigenvalue(ep.matrix, tol.herm)));
    }
    NetworkChoi total(sum, t.teeth);
    rep.boundary_dims_ok =
        sum.label(t.teeth.front().in).dim == 1 && sum.label(t.teeth.back().out).dim == 1;
    rep.chain = check_comb(total, tol);
    bool ok = rep.boundary_dims_ok && rep.chain.valid;
    for (double x : rep.element_psd_residuals) ok = ok && x <= tol.psd * (1.0 + max_abs(sum.matrix));
    rep.valid = ok;
    return rep;
}

// p = Tr[R T^T] = sum_ij R_ij T_ij
inline double tester_probability(const NetworkChoi& r, const LabeledOperator& t_elem) {
    if (t_elem.spaces.size() != r.op.spaces.size()) throw Error("tester element labels do not match the network");
    const auto tp = permute(t_elem, names_of(r.op.spaces));
    if (tp.spaces != r.op.spaces) throw Error("tester element label dimensions do not match the network");
    return (r.op.matrix.array() * tp.matrix.array()).sum().real();
}

// Channel view of a comb: Choi with out = all outputs, in = all inputs.
inline ChoiChannel comb_as_channel(const NetworkChoi& r) {
    std::vector<std::string> order;
    std::size_t dout = 1, din = 1;
    for (const auto& t : r.teeth) {
        order.push_back(t.out);
        dout *= r.op.label(t.out).dim;
    }
    for (const auto& t : r.teeth) {
        order.push_back(t.in);
        din *= r.op.label(t.in).dim;
    }
    return make_choi(permute(r.op, order).matrix, dout, din, "outputs", "inputs");
}

// V_k: (anc_{k-1}, in_k) -> (out_k, anc_k).
// V_k[(n,m),(m',x)] = sqrt(l_m / l'_m') sum_p v_m[(p,x,n)] conj(v'_m'[p]),
// v / v' eigenvectors of R^k / R^{k-1} on their supports.
struct CombRealization {
    std::vector<Isometry> isometries;
    std::vector<Support> supports;  // support of R^k, k = 1..N
};

namespace detail {

inline CombRealization realize_levels(const NetworkChoi& r, const std::vector<LabeledOperator>& lv,
                                      const Tolerances& tol) {
    CombRealization out;
    Support prev{RealVector::Ones(1), ComplexMatrix::Ones(1, 1)};
    for (std::size_t k = 1; k <= r.teeth.size(); ++k) {
        const auto& t = r.teeth[k - 1];
        auto sup = psd_support(lv[k].matrix, tol);
        const auto din = static_cast<Eigen::Index>(lv[k].label(t.in).dim);
        const auto dout = static_cast<Eigen::Index>(lv[k].label(t.out).dim);
        const auto P = prev.vectors.rows();
        const auto ra = sup.values.size(), rp = prev.values.size();
        ComplexMatrix v = ComplexMatrix::Zero(dout * ra, rp * din);
        for (Eigen::Index m = 0; m < ra; ++m)
            for (Eigen::Index mp = 0; mp < rp; ++mp) {
                const double w = std::sqrt(sup.values(m) / prev.values(mp));
                for (Eigen::Index n = 0; n < dout; ++n)
                    for (Eigen::Index x = 0; x < din; ++x) {
                        cplx s = 0;
                        for (Eigen::Index p = 0; p < P; ++p)
                            s += sup.vectors((p * din + x) * dout + n, m) * std::conj(prev.vectors(p, mp));
                        v(n * ra + m, mp * din + x) = w * s;
                    }
            }
        Spaces in_sp{{"anc" + std::to_string(k - 1), static_cast<std::size_t>(rp)}, lv[k].label(t.in)};
        Spaces out_sp{lv[k].label(t.out), {"anc" + std::to_string(k), static_cast<std::size_t>(ra)}};
        out.isometries.push_back({std::move(v), std::move(out_sp), std::move(in_sp)});
        out.supports.push_back(sup);
        prev = std::move(sup);
    }
    return out;
}

}  // namespace detail

inline CombRealization realize_comb(const NetworkChoi& r, const Tolerances& tol = {}) {
    if (!check_comb(r, tol).valid) throw Error("realize_comb: not a valid comb");
    return detail::realize_levels(r, detail::comb_levels(r), tol);
}

// W = V_N ... V_1 : (in_1..in_N) -> (out_1..out_N, anc_N)
inline ComplexMatrix chain_isometries(const std::vector<Isometry>& isos) {
    ComplexMatrix w = ComplexMatrix::Identity(1, 1);
    std::size_t dout_so_far = 1;
    for (const auto& v : isos) {
        const auto din = v.in_spaces.back().dim;
        const ComplexMatrix lifted = kron(w, identity(din));
        const ComplexMatrix step = kron(identity(dout_so_far), v.matrix);
        w = step * lifted;
        dout_so_far *= v.out_spaces.front().dim;
    }
    return w;
}

// Effects on the final ancilla: S^{-1/2*} R_i^* S^{-1/2*} in the anc_N basis.
// For a generalized instrument S = sum R_i and the effects form a POVM on the support.
struct NetworkInstrumentRealization {
    CombRealization chain;
    std::vector<ComplexMatrix> effects;
};

inline NetworkInstrumentRealization realize_probabilistic(const std::vector<LabeledOperator>& elements,
                                                          const NetworkChoi& s, const Tolerances& tol = {}) {
    NetworkInstrumentRealization out{realize_comb(s, tol), {}};
    const auto order = s.canonical_order();
    for (const auto& e : elements) {
        auto ep = permute(e, order);
        out.effects.push_back(detail::ancilla_effect(ep.matrix, out.chain.supports.back()));
    }
    return out;
}

inline NetworkInstrumentRealization realize_gqi(const std::vector<LabeledOperator>& elements,
                                                const std::vector<Tooth>& teeth, const Tolerances& tol = {}) {
    if (elements.empty()) throw Error("realize_gqi: no elements");
    LabeledOperator sum = elements.front();
    sum.matrix.setZero();
    for (const auto& e : elements) sum.matrix += permute(e, names_of(sum.spaces)).matrix;
    return realize_probabilistic(elements, NetworkChoi(sum, teeth), tol);
}

}  // namespace qnet
