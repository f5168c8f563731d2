#pragma once

// Kraus and Choi forms of quantum operations, property checks, dilations, named channels.
// Choi convention: M = sum_i |A_i>><<A_i| with labels (out, in).

#include "qnet/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qnet {

struct KrausSet {
    std::vector<ComplexMatrix> operators;

    KrausSet() = default;
    explicit KrausSet(std::vector<ComplexMatrix> ops) : operators(std::move(ops)) { validate(); }

    Eigen::Index out_dim() const { return operators.front().rows(); }
    Eigen::Index in_dim() const { return operators.front().cols(); }

    void validate() const {
        if (operators.empty()) throw Error("Kraus set is empty");
        for (const auto& a : operators) {
            if (a.rows() != operators.front().rows() || a.cols() != operators.front().cols())
                throw Error("Kraus operators have non-uniform shapes");
            if (!all_finite(a)) throw Error("non-finite Kraus entry");
        }
    }

    ComplexMatrix apply(const ComplexMatrix& rho) const {
        if (rho.rows() != in_dim() || rho.cols() != in_dim()) throw Error("input state has wrong dimension");
        ComplexMatrix out = ComplexMatrix::Zero(out_dim(), out_dim());
        for (const auto& a : operators) out += a * rho * a.adjoint();
        return out;
    }

    ComplexMatrix completeness() const {
        ComplexMatrix s = ComplexMatrix::Zero(in_dim(), in_dim());
        for (const auto& a : operators) s += a.adjoint() * a;
        return s;
    }
};

struct ChoiChannel {
    LabeledOperator op;

    ChoiChannel() = default;
    explicit ChoiChannel(LabeledOperator o) : op(std::move(o)) {
        if (op.spaces.size() != 2 || op.is_vector()) throw Error("Choi operator needs exactly (out, in) labels");
    }

    const SpaceLabel& out() const { return op.spaces[0]; }
    const SpaceLabel& in() const { return op.spaces[1]; }
    const ComplexMatrix& matrix() const { return op.matrix; }
};

inline ChoiChannel make_choi(ComplexMatrix m, std::size_t d_out, std::size_t d_in, const std::string& out = "out",
                             const std::string& in = "in") {
    return ChoiChannel(LabeledOperator(std::move(m), {{out, d_out}, {in, d_in}}));
}

inline ChoiChannel kraus_to_choi(const KrausSet& k, const std::string& out = "out", const std::string& in = "in") {
    const SpaceLabel lo{out, static_cast<std::size_t>(k.out_dim())};
    const SpaceLabel li{in, static_cast<std::size_t>(k.in_dim())};
    const auto d = k.out_dim() * k.in_dim();
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (const auto& a : k.operators) {
        const auto v = double_ket(a, li, lo).matrix;
        m += v * v.adjoint();
    }
    return ChoiChannel(LabeledOperator(std::move(m), {lo, li}));
}

// M(X)[o,o'] = sum_{i,k} X[k,i] M[(o,k),(o',i)]
inline ComplexMatrix apply_choi(const ChoiChannel& c, const ComplexMatrix& x) {
    const auto dout = static_cast<Eigen::Index>(c.out().dim);
    const auto din = static_cast<Eigen::Index>(c.in().dim);
    if (x.rows() != din || x.cols() != din) throw Error("apply_choi: input has wrong dimension");
    const auto& m = c.matrix();
    ComplexMatrix r = ComplexMatrix::Zero(dout, dout);
    for (Eigen::Index o = 0; o < dout; ++o)
        for (Eigen::Index p = 0; p < dout; ++p) {
            cplx s = 0;
            for (Eigen::Index k = 0; k < din; ++k)
                for (Eigen::Index i = 0; i < din; ++i) s += x(k, i) * m(o * din + k, p * din + i);
            r(o, p) = s;
        }
    return r;
}

inline KrausSet choi_to_kraus(const ChoiChannel& c, const Tolerances& tol = {}) {
    const auto dout = static_cast<Eigen::Index>(c.out().dim);
    const auto din = static_cast<Eigen::Index>(c.in().dim);
    auto sup = psd_support(c.matrix(), tol);
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index k = 0; k < sup.values.size(); ++k) {
        ComplexMatrix a(dout, din);
        const double w = std::sqrt(sup.values(k));
        for (Eigen::Index o = 0; o < dout; ++o)
            for (Eigen::Index i = 0; i < din; ++i) a(o, i) = w * sup.vectors(o * din + i, k);
        ops.push_back(std::move(a));
    }
    if (ops.empty()) ops.push_back(ComplexMatrix::Zero(dout, din));
    return KrausSet(std::move(ops));
}

struct PropertyReport {
    bool holds = false;
    double residual = 0.0;
};

inline PropertyReport is_hermitian(const ChoiChannel& c, const Tolerances& tol = {}) {
    const double r = hermiticity_residual(c.matrix());
    return {r <= tol.herm * (1.0 + max_abs(c.matrix())), r};
}

inline PropertyReport is_trace_preserving(const ChoiChannel& c, const Tolerances& tol = {}) {
    auto t = partial_trace(c.op, {c.out().name});
    const double r = max_abs(t.matrix - identity(c.in().dim));
    return {r <= tol.eq * (1.0 + max_abs(t.matrix)), r};
}

// residual = how far the smallest eigenvalue sits below zero
inline PropertyReport is_cp(const ChoiChannel& c, const Tolerances& tol = {}) {
    if (!is_hermitian(c, tol).holds) return {false, hermiticity_residual(c.matrix())};
    const auto e = herm_eig(c.matrix(), tol.herm);
    const double lmin = e.values(0);
    const double scale = std::max(1.0, detail::spectral_scale(e.values));
    const double r = std::max(0.0, -lmin);
    return {r <= tol.psd * scale, r};
}

inline bool is_channel(const ChoiChannel& c, const Tolerances& tol = {}) {
    return is_trace_preserving(c, tol).holds && is_cp(c, tol).holds;
}

inline bool same_channel(const KrausSet& a, const KrausSet& b, const Tolerances& tol = {}) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) return false;
    return approx_equal(kraus_to_choi(a).matrix(), kraus_to_choi(b).matrix(), tol.eq);
}

// u with A_i = sum_j u_ij B_j, when the two sets describe the same operation
inline std::optional<ComplexMatrix> mixing_certificate(const KrausSet& a, const KrausSet& b,
                                                       const Tolerances& tol = {}) {
    if (!same_channel(a, b, tol)) return std::nullopt;
    const auto len = a.out_dim() * a.in_dim();
    ComplexMatrix av(len, static_cast<Eigen::Index>(a.operators.size()));
    ComplexMatrix bv(len, static_cast<Eigen::Index>(b.operators.size()));
    for (std::size_t i = 0; i < a.operators.size(); ++i)
        av.col(static_cast<Eigen::Index>(i)) = a.operators[i].reshaped<Eigen::RowMajor>();
    for (std::size_t j = 0; j < b.operators.size(); ++j)
        bv.col(static_cast<Eigen::Index>(j)) = b.operators[j].reshaped<Eigen::RowMajor>();
    ComplexMatrix x = bv.completeOrthogonalDecomposition().solve(av);
    if (max_abs(bv * x - av) > 1e-8 * (1.0 + max_abs(av))) return std::nullopt;
    return ComplexMatrix(x.transpose());
}

// Map V: in -> out (x) ancilla as a plain matrix with its factor labels.
struct Isometry {
    ComplexMatrix matrix;
    Spaces out_spaces;
    Spaces in_spaces;

    double isometry_residual() const {
        return max_abs(matrix.adjoint() * matrix - identity(static_cast<std::size_t>(matrix.cols())));
    }
};

namespace detail {

// Dilation built from the support of C*: ancilla basis = conj of C's eigenvectors,
// V[(n,m), i] = sqrt(l_m) v_m[(n,i)].
inline Isometry choi_root_dilation(const ChoiChannel& c, const Support& sup, const std::string& anc) {
    const auto dout = static_cast<Eigen::Index>(c.out().dim);
    const auto din = static_cast<Eigen::Index>(c.in().dim);
    const auto r = sup.values.size();
    ComplexMatrix v(dout * r, din);
    for (Eigen::Index n = 0; n < dout; ++n)
        for (Eigen::Index m = 0; m < r; ++m)
            for (Eigen::Index i = 0; i < din; ++i)
                v(n * r + m, i) = std::sqrt(sup.values(m)) * sup.vectors(n * din + i, m);
    return {std::move(v), {c.out(), {anc, static_cast<std::size_t>(r)}}, {c.in()}};
}

// C^{-1/2*} O^* C^{-1/2*} expressed in the ancilla basis
inline ComplexMatrix ancilla_effect(const ComplexMatrix& o, const Support& sup) {
    const auto r = sup.values.size();
    ComplexMatrix p(r, r);
    for (Eigen::Index m = 0; m < r; ++m)
        for (Eigen::Index k = 0; k < r; ++k) {
            const cplx e = sup.vectors.col(m).adjoint() * o * sup.vectors.col(k);
            p(m, k) = std::conj(e) / std::sqrt(sup.values(m) * sup.values(k));
        }
    return p;
}

}  // namespace detail

// Tr_anc[V rho V^dagger (1 (x) E)]
inline ComplexMatrix apply_dilation(const Isometry& v, const ComplexMatrix& rho,
                                    const std::optional<ComplexMatrix>& effect = std::nullopt) {
    const auto dout = static_cast<Eigen::Index>(v.out_spaces.front().dim);
    const auto da = v.matrix.rows() / dout;
    ComplexMatrix big = v.matrix * rho * v.matrix.adjoint();
    if (effect) big = big * kron(identity(static_cast<std::size_t>(dout)), *effect);
    ComplexMatrix r = ComplexMatrix::Zero(dout, dout);
    for (Eigen::Index o = 0; o < dout; ++o)
        for (Eigen::Index p = 0; p < dout; ++p)
            for (Eigen::Index a = 0; a < da; ++a) r(o, p) += big(o * da + a, p * da + a);
    return r;
}

inline Isometry stinespring(const ChoiChannel& c, const Tolerances& tol = {}, const std::string& anc = "anc") {
    if (!is_channel(c, tol)) throw Error("stinespring: input is not a channel");
    return detail::choi_root_dilation(c, psd_support(c.matrix(), tol), anc);
}

struct InstrumentRealization {
    ChoiChannel channel;
    Isometry dilation;
    std::vector<ComplexMatrix> povm;
};

inline InstrumentRealization realize_instrument(const std::vector<ChoiChannel>& ops, const Tolerances& tol = {}) {
    if (ops.empty()) throw Error("realize_instrument: empty instrument");
    ComplexMatrix sum = ComplexMatrix::Zero(ops.front().matrix().rows(), ops.front().matrix().cols());
    for (const auto& o : ops) {
        if (o.op.spaces != ops.front().op.spaces) throw Error("realize_instrument: mismatched labels");
        if (!is_cp(o, tol).holds) throw Error("realize_instrument: element is not CP");
        sum += o.matrix();
    }
    ChoiChannel c(LabeledOperator(sum, ops.front().op.spaces));
    if (!is_channel(c, tol)) throw Error("realize_instrument: elements do not sum to a channel");
    auto sup = psd_support(sum, tol);
    InstrumentRealization r{c, detail::choi_root_dilation(c, sup, "anc"), {}};
    for (const auto& o : ops) r.povm.push_back(detail::ancilla_effect(o.matrix(), sup));
    return r;
}

// ---- named channels ----

inline ComplexMatrix pauli(char which) {
    ComplexMatrix m(2, 2);
    switch (which) {
        case 'i': case 'I': m << 1, 0, 0, 1; break;
        case 'x': case 'X': m << 0, 1, 1, 0; break;
        case 'y': case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'z': case 'Z': m << 1, 0, 0, -1; break;
        default: throw Error(std::string("unknown Pauli '") + which + "'");
    }
    return m;
}

// U_phi = diag(1, e^{i phi})
inline ComplexMatrix phase_gate(double phi) {
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    u(0, 0) = 1.0;
    u(1, 1) = std::polar(1.0, phi);
    return u;
}

inline KrausSet unitary_channel(const ComplexMatrix& u) { return KrausSet({u}); }

// rho -> p 1/2 + (1-p) rho
inline KrausSet depolarizing(double p) {
    if (p < 0.0 || p > 4.0 / 3.0) throw Error("depolarizing: p out of range");
    return KrausSet({std::sqrt(1.0 - 0.75 * p) * pauli('i'), std::sqrt(p / 4) * pauli('x'),
                     std::sqrt(p / 4) * pauli('y'), std::sqrt(p / 4) * pauli('z')});
}

inline KrausSet phase_damping(double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw Error("phase_damping: lambda out of range");
    ComplexMatrix e0 = ComplexMatrix::Zero(2, 2), e1 = ComplexMatrix::Zero(2, 2);
    e0(0, 0) = 1.0;
    e0(1, 1) = std::sqrt(1.0 - lambda);
    e1(1, 1) = std::sqrt(lambda);
    return KrausSet({e0, e1});
}

// rho -> Tr(rho) 1/d
inline KrausSet contraction(std::size_t d = 2) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) ops.push_back(ketbra(i, j, d) / std::sqrt(double(d)));
    return KrausSet(std::move(ops));
}

// (I + sz . sz)/2
inline KrausSet dephasing() {
    return KrausSet({pauli('i') / std::sqrt(2.0), pauli('z') / std::sqrt(2.0)});
}

inline KrausSet make_named(const std::string& name, double param = 0.0) {
    if (name == "phase") return unitary_channel(phase_gate(param));
    if (name == "depolarizing") return depolarizing(param);
    if (name == "phase_damping") return phase_damping(param);
    if (name == "contraction") return contraction(2);
    if (name == "dephasing") return dephasing();
    if (name == "identity") return unitary_channel(pauli('i'));
    if (name == "x" || name == "y" || name == "z") return unitary_channel(pauli(name[0]));
    throw Error("unknown channel name '" + name + "'");
}

enum class NoiseKind { DepolarizingMix, PhaseDampingMix };

inline const char* to_string(NoiseKind k) { return k == NoiseKind::DepolarizingMix ? "dep" : "pd"; }

inline NoiseKind parse_noise(const std::string& s) {
    if (s == "dep" || s == "depolarizing") return NoiseKind::DepolarizingMix;
    if (s == "pd" || s == "phase-damping" || s == "phase_damping") return NoiseKind::PhaseDampingMix;
    throw Error("unknown noise kind '" + s + "'");
}

// dep: q U + (1-q) C_{1/2};  pd: q U + (1-q) (I + sz.sz)/2
struct NoisySpec {
    NoiseKind kind = NoiseKind::DepolarizingMix;
    double q = 1.0;
    double phi = 0.0;

    void validate() const {
        if (!(q >= 0.0 && q <= 1.0)) throw Error("noise parameter q must lie in [0,1]");
        if (!std::isfinite(phi)) throw Error("phase must be finite");
    }
};

inline KrausSet noisy_kraus(const NoisySpec& s) {
    s.validate();
    std::vector<ComplexMatrix> ops{std::sqrt(s.q) * phase_gate(s.phi)};
    const KrausSet noise = s.kind == NoiseKind::DepolarizingMix ? contraction(2) : dephasing();
    for (const auto& a : noise.operators) ops.push_back(std::sqrt(1.0 - s.q) * a);
    return KrausSet(std::move(ops));
}

inline ChoiChannel noisy_choi(const NoisySpec& s, const std::string& out = "out", const std::string& in = "in") {
    return kraus_to_choi(noisy_kraus(s), out, in);
}

}  // namespace qnet
