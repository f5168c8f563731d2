#pragma once

// Programmable processors G = sum_jk A_jk (x) |j><k| (data factor first, program second).

#include "qnet/channel.hpp"
#include "qnet/tensor.hpp"

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qnet {

struct ProcessorBlocks {
    std::size_t D = 0;
    std::size_t P = 0;
    std::vector<ComplexMatrix> blocks;  // row-major P x P grid

    const ComplexMatrix& at(std::size_t j, std::size_t k) const { return blocks[j * P + k]; }
    ComplexMatrix& at(std::size_t j, std::size_t k) { return blocks[j * P + k]; }

    // max deviation from sum_k A_jk A_j'k^dag = d_jj' 1 and sum_j A_jk^dag A_jk' = d_kk' 1
    double unitarity_residual() const {
        double r = 0.0;
        for (std::size_t j = 0; j < P; ++j)
            for (std::size_t jp = 0; jp < P; ++jp) {
                ComplexMatrix a = ComplexMatrix::Zero(D, D), b = ComplexMatrix::Zero(D, D);
                for (std::size_t k = 0; k < P; ++k) {
                    a += at(j, k) * at(jp, k).adjoint();
                    b += at(k, j).adjoint() * at(k, jp);
                }
                const ComplexMatrix want = j == jp ? identity(D) : ComplexMatrix::Zero(D, D);
                r = std::max({r, max_abs(a - want), max_abs(b - want)});
            }
        return r;
    }
};

inline ComplexMatrix to_unitary(const ProcessorBlocks& g) {
    ComplexMatrix u = ComplexMatrix::Zero(g.D * g.P, g.D * g.P);
    for (std::size_t j = 0; j < g.P; ++j)
        for (std::size_t k = 0; k < g.P; ++k) u += kron(g.at(j, k), ketbra(j, k, g.P));
    return u;
}

// A_jk = (1 (x) <j|) G (1 (x) |k>)
inline ProcessorBlocks from_unitary(const ComplexMatrix& g, std::size_t D, std::size_t P, double tol = 1e-9) {
    const auto n = static_cast<Eigen::Index>(D * P);
    if (D == 0 || P == 0 || g.rows() != n || g.cols() != n) throw Error("processor matrix does not match D*P");
    if (max_abs(g.adjoint() * g - identity(D * P)) > tol) throw Error("processor matrix is not unitary");
    ProcessorBlocks b{D, P, std::vector<ComplexMatrix>(P * P, ComplexMatrix::Zero(D, D))};
    for (std::size_t j = 0; j < P; ++j)
        for (std::size_t k = 0; k < P; ++k)
            for (std::size_t a = 0; a < D; ++a)
                for (std::size_t c = 0; c < D; ++c)
                    b.at(j, k)(a, c) = g(static_cast<Eigen::Index>(a * P + j), static_cast<Eigen::Index>(c * P + k));
    return b;
}

inline void check_program_state(const ComplexMatrix& xi, std::size_t P, const Tolerances& tol = {}) {
    if (static_cast<std::size_t>(xi.rows()) != P || static_cast<std::size_t>(xi.cols()) != P)
        throw Error("program state has wrong dimension");
    if (hermiticity_residual(xi) > tol.herm) throw Error("program state is not Hermitian");
    if (std::abs(xi.trace() - 1.0) > tol.eq) throw Error("program state does not have unit trace");
    if (min_eigenvalue(xi, tol.herm) < -tol.psd) throw Error("program state is not positive");
}

inline ComplexMatrix pure_program(const ComplexVector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw Error("zero program vector");
    return (psi / n) * (psi / n).adjoint();
}

// rho -> sum_{j,k,k'} xi_kk' A_jk rho A_jk'^dag
// linear in xi, no state check; used for operator-basis programs
inline ChoiChannel implement_det_linear(const ProcessorBlocks& g, const ComplexMatrix& xi) {
    const SpaceLabel in{"in", g.D}, out{"out", g.D};
    std::vector<ComplexVector> vecs;
    for (const auto& a : g.blocks) vecs.push_back(double_ket(a, in, out).matrix.col(0));
    ComplexMatrix m = ComplexMatrix::Zero(g.D * g.D, g.D * g.D);
    for (std::size_t j = 0; j < g.P; ++j)
        for (std::size_t k = 0; k < g.P; ++k)
            for (std::size_t kp = 0; kp < g.P; ++kp) {
                const cplx x = xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp));
                if (x != 0.0) m += x * vecs[j * g.P + k] * vecs[j * g.P + kp].adjoint();
            }
    return ChoiChannel(LabeledOperator(std::move(m), {out, in}));
}

inline ChoiChannel implement_det(const ProcessorBlocks& g, const ComplexMatrix& xi, const Tolerances& tol = {}) {
    check_program_state(xi, g.P, tol);
    return implement_det_linear(g, xi);
}

// Success outcome on the program register.
// Uniform: |chi> = P^{-1/2} sum_n |n>.
// Bell: |chi> = d^{-1/2} sum_m |m m> for a program made of two d-level halves (P = d^2).
enum class SuccessMeasurement { Uniform, Bell };

inline ComplexVector success_vector(std::size_t P, SuccessMeasurement m) {
    if (m == SuccessMeasurement::Uniform) return ComplexVector::Ones(static_cast<Eigen::Index>(P)) / std::sqrt(double(P));
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(double(P))));
    if (d * d != P) throw Error("Bell success measurement needs a square program dimension");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(P));
    for (std::size_t m2 = 0; m2 < d; ++m2) v(static_cast<Eigen::Index>(m2 * d + m2)) = 1.0 / std::sqrt(double(d));
    return v;
}

// cA_k = sum_j <chi|j> A_jk, so the success branch is rho -> sum_kk' xi_kk' cA_k rho cA_k'^dag
inline std::vector<ComplexMatrix> column_operators(const ProcessorBlocks& g,
                                                   SuccessMeasurement m = SuccessMeasurement::Uniform) {
    const auto chi = success_vector(g.P, m);
    std::vector<ComplexMatrix> out(g.P, ComplexMatrix::Zero(g.D, g.D));
    for (std::size_t k = 0; k < g.P; ++k)
        for (std::size_t j = 0; j < g.P; ++j) out[k] += std::conj(chi(static_cast<Eigen::Index>(j))) * g.at(j, k);
    return out;
}

inline LabeledOperator success_choi(const ProcessorBlocks& g, const ComplexMatrix& xi,
                                    SuccessMeasurement meas = SuccessMeasurement::Uniform) {
    const SpaceLabel in{"in", g.D}, out{"out", g.D};
    const auto cols = column_operators(g, meas);
    ComplexMatrix m = ComplexMatrix::Zero(g.D * g.D, g.D * g.D);
    for (std::size_t k = 0; k < g.P; ++k)
        for (std::size_t kp = 0; kp < g.P; ++kp) {
            const cplx x = xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp));
            if (x == 0.0) continue;
            m += x * double_ket(cols[k], in, out).matrix * double_ket(cols[kp], in, out).matrix.adjoint();
        }
    return LabeledOperator(std::move(m), {out, in});
}

struct ProbabilisticImplementation {
    LabeledOperator subnorm_choi;  // success branch, labels (out, in)
    double p = 0.0;                // success probability on the given data state
};

inline ProbabilisticImplementation implement_prob(const ProcessorBlocks& g, const ComplexMatrix& xi,
                                                  const ComplexMatrix& rho,
                                                  SuccessMeasurement meas = SuccessMeasurement::Uniform,
                                                  const Tolerances& tol = {}) {
    check_program_state(xi, g.P, tol);
    auto c = success_choi(g, xi, meas);
    const double p = apply_choi(ChoiChannel(c), rho).trace().real();
    return {std::move(c), p};
}

struct ChannelCondition {
    bool holds = false;
    cplx l = 0.0;          // the multiple of identity when it holds
    double residual = 0.0;
    double p = 0.0;        // (1 + l) / P for the uniform measurement when it holds
};

// sum_{j != j'} sum_kk' xi_kk' A_j'k'^dag A_jk = l 1
inline ChannelCondition channel_condition(const ProcessorBlocks& g, const ComplexMatrix& xi,
                                          const Tolerances& tol = {}) {
    check_program_state(xi, g.P, tol);
    ComplexMatrix x = ComplexMatrix::Zero(g.D, g.D);
    for (std::size_t j = 0; j < g.P; ++j)
        for (std::size_t jp = 0; jp < g.P; ++jp) {
            if (j == jp) continue;
            for (std::size_t k = 0; k < g.P; ++k)
                for (std::size_t kp = 0; kp < g.P; ++kp) {
                    const cplx c = xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(kp));
                    if (c != 0.0) x += c * g.at(jp, kp).adjoint() * g.at(j, k);
                }
        }
    ChannelCondition r;
    r.l = x.trace() / double(g.D);
    r.residual = max_abs(x - r.l * identity(g.D));
    r.holds = r.residual <= tol.eq * (1.0 + max_abs(x));
    r.p = r.holds ? (1.0 + r.l.real()) / double(g.P) : 0.0;
    return r;
}

enum class EquivalenceKind { Deterministic, Strong, Weak, Structural };

inline const char* to_string(EquivalenceKind k) {
    switch (k) {
        case EquivalenceKind::Deterministic: return "deterministic";
        case EquivalenceKind::Strong: return "strong";
        case EquivalenceKind::Weak: return "weak";
        case EquivalenceKind::Structural: return "structural";
    }
    return "?";
}

struct EquivalenceVerdict {
    EquivalenceKind kind = EquivalenceKind::Structural;
    bool holds = false;
    bool sampled = false;  // true when decided on a finite battery rather than exactly
    std::string detail;
    double residual = 0.0;
    std::optional<ComplexMatrix> witness;
};

namespace detail {

inline ComplexMatrix vectorize_columns(const std::vector<ComplexMatrix>& ops) {
    ComplexMatrix m(ops.front().size(), static_cast<Eigen::Index>(ops.size()));
    for (std::size_t i = 0; i < ops.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = ops[i].reshaped<Eigen::RowMajor>();
    return m;
}

// largest relative residual of projecting the columns of b onto span(a); index of the worst column
inline std::pair<double, Eigen::Index> span_gap(const ComplexMatrix& a, const ComplexMatrix& b) {
    auto cod = a.completeOrthogonalDecomposition();
    cod.setThreshold(1e-10);
    double worst = 0.0;
    Eigen::Index at = -1;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const ComplexVector col = b.col(c);
        const double n = col.norm();
        if (n == 0.0) continue;
        const ComplexVector fit = a * cod.solve(col);
        const double r = (fit - col).norm() / n;
        if (r > worst) {
            worst = r;
            at = c;
        }
    }
    return {worst, at};
}

}  // namespace detail

// Equal spans of the column operators cA_k and cB_n.
inline EquivalenceVerdict structural_equiv(const ProcessorBlocks& g, const ProcessorBlocks& h,
                                           SuccessMeasurement meas = SuccessMeasurement::Uniform,
                                           double tol = 1e-8) {
    EquivalenceVerdict v{EquivalenceKind::Structural, false, false, "", 0.0, std::nullopt};
    if (g.D != h.D) throw Error("structural_equiv: data dimensions differ");
    const auto ga = column_operators(g, meas), hb = column_operators(h, meas);
    const auto A = detail::vectorize_columns(ga), B = detail::vectorize_columns(hb);
    const auto [gb, ib] = detail::span_gap(A, B);
    const auto [ga_gap, ia] = detail::span_gap(B, A);
    v.residual = std::max(gb, ga_gap);
    v.holds = v.residual <= tol;
    if (!v.holds) {
        if (gb >= ga_gap) {
            v.detail = "column operator " + std::to_string(ib) + " of the second processor lies outside the first span";
            v.witness = hb[static_cast<std::size_t>(ib)];
        } else {
            v.detail = "column operator " + std::to_string(ia) + " of the first processor lies outside the second span";
            v.witness = ga[static_cast<std::size_t>(ia)];
        }
    }
    return v;
}

enum class Side { Left, Right };

// Blocks of a (D*P)x(D*P) operator in the same layout as a processor.
inline std::vector<ComplexMatrix> operator_blocks(const ComplexMatrix& u, std::size_t D, std::size_t P) {
    std::vector<ComplexMatrix> b(P * P, ComplexMatrix::Zero(D, D));
    for (std::size_t j = 0; j < P; ++j)
        for (std::size_t k = 0; k < P; ++k)
            for (std::size_t a = 0; a < D; ++a)
                for (std::size_t c = 0; c < D; ++c)
                    b[j * P + k](a, c) = u(static_cast<Eigen::Index>(a * P + j), static_cast<Eigen::Index>(c * P + k));
    return b;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-9) {
    return m.rows() == m.cols() && max_abs(m.adjoint() * m - identity(static_cast<std::size_t>(m.rows()))) <= tol;
}

struct CertificateCheck {
    bool accepted = false;
    double residual = 0.0;
};

// Left (G_L = U G):  sum_jk xi_k U_rj A_jk = sum_jkq w_rj y_kq xi_q A_jk   for every r
// Right (G_R = G V): sum_kq xi_q A_jk V_kq = sum_ikq w_ji y_kq xi_q A_ik   for every j
inline CertificateCheck verify_det_certificate(const ProcessorBlocks& g, const ComplexMatrix& u, Side side,
                                               const ComplexVector& xi, const ComplexMatrix& w,
                                               const ComplexMatrix& y, double tol = 1e-9) {
    const auto P = g.P, D = g.D;
    if (!is_unitary(w) || !is_unitary(y)) throw Error("certificate matrices w and y must be unitary");
    if (static_cast<std::size_t>(w.rows()) != P || static_cast<std::size_t>(y.rows()) != P ||
        static_cast<std::size_t>(xi.size()) != P)
        throw Error("certificate dimensions do not match the program dimension");
    const auto ub = operator_blocks(u, D, P);
    const ComplexVector yxi = y * xi;
    // Kraus operators of G with program y.xi
    std::vector<ComplexMatrix> aleph(P, ComplexMatrix::Zero(D, D));
    for (std::size_t j = 0; j < P; ++j)
        for (std::size_t k = 0; k < P; ++k) aleph[j] += yxi(static_cast<Eigen::Index>(k)) * g.at(j, k);
    double res = 0.0;
    for (std::size_t r = 0; r < P; ++r) {
        ComplexMatrix lhs = ComplexMatrix::Zero(D, D), rhs = ComplexMatrix::Zero(D, D);
        if (side == Side::Left) {
            for (std::size_t j = 0; j < P; ++j)
                for (std::size_t k = 0; k < P; ++k) lhs += xi(static_cast<Eigen::Index>(k)) * ub[r * P + j] * g.at(j, k);
        } else {
            for (std::size_t k = 0; k < P; ++k)
                for (std::size_t q = 0; q < P; ++q) lhs += xi(static_cast<Eigen::Index>(q)) * g.at(r, k) * ub[k * P + q];
        }
        for (std::size_t j = 0; j < P; ++j) rhs += w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * aleph[j];
        res = std::max(res, max_abs(lhs - rhs));
    }
    return {res <= tol, res};
}

struct StructuralCertificate {
    bool accepted = false;
    double K = 0.0;
    double phase = 0.0;
    double residual = 0.0;
};

// sum_k (v.xi)_k cA_k = e^{i phase} sqrt(K) sum_k xi_k cH_k with H = U G (left) or G V (right);
// the scale and phase are fitted by least squares.
inline StructuralCertificate verify_struct_certificate(const ProcessorBlocks& g, const ComplexMatrix& u, Side side,
                                                       const ComplexVector& xi, const ComplexMatrix& v,
                                                       SuccessMeasurement meas = SuccessMeasurement::Uniform,
                                                       double tol = 1e-9) {
    if (!is_unitary(u) || !is_unitary(v)) throw Error("certificate operators must be unitary");
    const ComplexMatrix gu = to_unitary(g);
    const ComplexMatrix hm = side == Side::Left ? ComplexMatrix(u * gu) : ComplexMatrix(gu * u);
    const auto h = from_unitary(hm, g.D, g.P);
    const auto ca = column_operators(g, meas), ch = column_operators(h, meas);
    const ComplexVector vx = v * xi;
    ComplexMatrix lhs = ComplexMatrix::Zero(g.D, g.D), rhs = ComplexMatrix::Zero(g.D, g.D);
    for (std::size_t k = 0; k < g.P; ++k) {
        lhs += vx(static_cast<Eigen::Index>(k)) * ca[k];
        rhs += xi(static_cast<Eigen::Index>(k)) * ch[k];
    }
    StructuralCertificate c;
    const double rn = rhs.squaredNorm();
    if (rn == 0.0) {
        c.residual = lhs.norm();
        return c;
    }
    const cplx coef = (rhs.adjoint() * lhs).trace() / rn;
    c.residual = max_abs(lhs - coef * rhs);
    c.K = std::norm(coef);
    c.phase = std::arg(coef);
    c.accepted = c.residual <= tol * (1.0 + max_abs(lhs)) && c.K > tol;
    return c;
}

struct ProgramPair {
    ComplexMatrix xi;
    ComplexMatrix xi_tilde;
};

// Channels compared after normalization; strong when every probability agrees, weak otherwise.
inline EquivalenceVerdict prob_equiv_compare(const ProcessorBlocks& g, const ProcessorBlocks& h,
                                             const std::vector<ProgramPair>& pairs,
                                             SuccessMeasurement meas = SuccessMeasurement::Uniform,
                                             double tol = 1e-9) {
    EquivalenceVerdict v{EquivalenceKind::Strong, false, true, "", 0.0, std::nullopt};
    if (!structural_equiv(g, h, meas).holds) {
        v.detail = "not comparable: processors are not structurally equivalent";
        return v;
    }
    bool all_p_equal = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        check_program_state(pairs[i].xi, g.P);
        check_program_state(pairs[i].xi_tilde, h.P);
        const auto a = success_choi(g, pairs[i].xi, meas).matrix;
        const auto b = success_choi(h, pairs[i].xi_tilde, meas).matrix;
        const double pa = a.trace().real() / double(g.D), pb = b.trace().real() / double(h.D);
        if (pa <= tol || pb <= tol) {
            v.kind = EquivalenceKind::Weak;
            v.detail = "program pair " + std::to_string(i) + " never succeeds";
            return v;
        }
        const double diff = max_abs(a / pa - b / pb);
        v.residual = std::max(v.residual, diff);
        if (diff > tol * (1.0 + max_abs(a / pa))) {
            v.kind = EquivalenceKind::Weak;
            v.detail = "channels differ for program pair " + std::to_string(i);
            v.witness = a / pa - b / pb;
            return v;
        }
        if (std::abs(pa - pb) > tol) all_p_equal = false;
    }
    v.holds = true;
    v.kind = all_p_equal ? EquivalenceKind::Strong : EquivalenceKind::Weak;
    v.detail = all_p_equal ? "same channels with equal probabilities" : "same channels, probabilities differ";
    return v;
}

namespace detail {

// Linear map xi -> Choi as a matrix acting on row-major vec(xi).
inline ComplexMatrix det_image_map(const ProcessorBlocks& g) {
    const auto d2 = static_cast<Eigen::Index>(g.D * g.D);
    ComplexMatrix L(d2 * d2, static_cast<Eigen::Index>(g.P * g.P));
    const SpaceLabel in{"in", g.D}, out{"out", g.D};
    for (std::size_t k = 0; k < g.P; ++k)
        for (std::size_t kp = 0; kp < g.P; ++kp) {
            ComplexMatrix m = ComplexMatrix::Zero(d2, d2);
            for (std::size_t j = 0; j < g.P; ++j)
                m += double_ket(g.at(j, k), in, out).matrix * double_ket(g.at(j, kp), in, out).matrix.adjoint();
            L.col(static_cast<Eigen::Index>(k * g.P + kp)) = m.reshaped<Eigen::RowMajor>();
        }
    return L;
}

// Nearest density matrix in Frobenius norm: clip the spectrum onto the probability simplex.
inline ComplexMatrix project_density(const ComplexMatrix& x) {
    const ComplexMatrix h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    RealVector l = es.eigenvalues();
    std::vector<double> s(l.data(), l.data() + l.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cum += s[i];
        const double t = (cum - 1.0) / double(i + 1);
        if (s[i] - t > 0) theta = t;
    }
    for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = std::max(0.0, l(i) - theta);
    return es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Is there a program state for h implementing the channel with this Choi matrix?
inline std::optional<ComplexMatrix> find_program(const ProcessorBlocks& h, const ComplexMatrix& target_choi,
                                                 int max_iter = 10000, double tol = 1e-8) {
    const ComplexMatrix L = detail::det_image_map(h);
    const ComplexVector t = target_choi.reshaped<Eigen::RowMajor>();
    auto cod = L.completeOrthogonalDecomposition();
    ComplexVector x = cod.solve(t);
    if ((L * x - t).norm() > tol * (1.0 + t.norm())) return std::nullopt;
    const auto P = static_cast<Eigen::Index>(h.P);
    ComplexMatrix xi = x.reshaped<Eigen::RowMajor>(P, P);
    for (int it = 0; it < max_iter; ++it) {
        xi = detail::project_density(xi);
        ComplexVector xv = xi.reshaped<Eigen::RowMajor>();
        const ComplexVector resid = L * xv - t;
        if (resid.norm() <= tol * (1.0 + t.norm())) return xi;
        xv -= cod.solve(resid);
        xi = xv.reshaped<Eigen::RowMajor>(P, P);
    }
    return std::nullopt;
}

inline ComplexVector random_ket(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexVector v(static_cast<Eigen::Index>(d));
    for (auto& c : v) c = cplx(n(rng), n(rng));
    return v / v.norm();
}

// Sampled decision: equal image spans of xi -> Choi plus preimage search for a battery of pure programs.
inline EquivalenceVerdict det_equiv_sampled(const ProcessorBlocks& g, const ProcessorBlocks& h, int programs = 20,
                                            std::uint64_t seed = 7, double tol = 1e-8) {
    EquivalenceVerdict v{EquivalenceKind::Deterministic, false, true, "", 0.0, std::nullopt};
    if (g.D != h.D) throw Error("det_equiv_sampled: data dimensions differ");
    const auto Lg = detail::det_image_map(g), Lh = detail::det_image_map(h);
    const double gap = std::max(detail::span_gap(Lg, Lh).first, detail::span_gap(Lh, Lg).first);
    v.residual = gap;
    if (gap > tol) {
        v.detail = "images of the program-to-channel maps span different spaces";
        return v;
    }
    std::mt19937_64 rng(seed);
    for (int dir = 0; dir < 2; ++dir) {
        const auto& a = dir == 0 ? g : h;
        const auto& b = dir == 0 ? h : g;
        for (int i = 0; i < programs; ++i) {
            const auto xi = pure_program(random_ket(a.P, rng));
            const auto c = implement_det(a, xi).matrix();
            if (!find_program(b, c)) {
                v.detail = "no program found for a sampled channel";
                v.witness = xi;
                return v;
            }
        }
    }
    v.holds = true;
    v.detail = "every sampled channel has a preimage";
    return v;
}

// Pairs a pure program x of g with the y solving sum_n y_n cB_n = sum_k x_k cA_k (basis states plus random ones).
inline std::vector<ProgramPair> derived_program_pairs(const ProcessorBlocks& g, const ProcessorBlocks& h,
                                                      SuccessMeasurement meas = SuccessMeasurement::Uniform,
                                                      int count = 8, std::uint64_t seed = 3) {
    if (g.D != h.D) throw Error("derived_program_pairs: data dimensions differ");
    const auto A = detail::vectorize_columns(column_operators(g, meas));
    const auto B = detail::vectorize_columns(column_operators(h, meas));
    auto cod = B.completeOrthogonalDecomposition();
    cod.setThreshold(1e-10);
    std::mt19937_64 rng(seed);
    std::vector<ProgramPair> pairs;
    for (int i = 0; i < count + static_cast<int>(g.P); ++i) {
        const ComplexVector x = i < static_cast<int>(g.P) ? ComplexVector(ComplexVector::Unit(static_cast<Eigen::Index>(g.P), i))
                                                           : random_ket(g.P, rng);
        const ComplexVector y = cod.solve(A * x);
        if (y.norm() < 1e-12) continue;
        pairs.push_back({pure_program(x), pure_program(y)});
    }
    return pairs;
}

// W = exp(i x XX) exp(i y YY) exp(i z ZZ)
inline ComplexMatrix swap_family(double x, double y, double z) {
    const ComplexMatrix I4 = identity(4);
    const cplx i(0, 1);
    const auto f = [&](double a, char p) {
        return ComplexMatrix(std::cos(a) * I4 + i * std::sin(a) * kron(pauli(p), pauli(p)));
    };
    return f(x, 'x') * f(y, 'y') * f(z, 'z');
}

struct SwapScanOptions {
    double residual = 1e-8;
    int battery = 6;
    std::uint64_t seed = 11;
};

// Points where the W processor implements the same set of channels as SWAP:
// output independent of the data state and a unitary image of the program.
inline std::vector<std::array<double, 3>> swap_equiv_scan(double step, const SwapScanOptions& opt = {}) {
    if (!(step > 0.0) || step > M_PI) throw Error("scan step must lie in (0, pi]");
    std::mt19937_64 rng(opt.seed);
    std::vector<ComplexMatrix> rhos;
    for (int i = 0; i < opt.battery; ++i) rhos.push_back(pure_program(random_ket(2, rng)));
    rhos.push_back(identity(2) / 2.0);
    const auto n = static_cast<int>(std::ceil(M_PI / step - 1e-9));
    std::vector<std::array<double, 3>> hits;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const double x = a * step, y = b * step, z = c * step;
                const auto g = from_unitary(swap_family(x, y, z), 2, 2);
                // program-side channel for each data state: xi -> Tr_data[W (rho (x) xi) W^dag]
                std::vector<ComplexMatrix> chois;
                for (const auto& rho : rhos) {
                    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
                    for (std::size_t k = 0; k < 2; ++k)
                        for (std::size_t kp = 0; kp < 2; ++kp) {
                            const ComplexMatrix xi = ketbra(k, kp, 2);
                            m += kron(apply_choi(implement_det_linear(g, xi), rho), xi);
                        }
                    chois.push_back(m);
                }
                bool ok = true;
                for (std::size_t r = 1; r < chois.size() && ok; ++r) ok = max_abs(chois[r] - chois[0]) <= opt.residual;
                if (ok) {
                    const auto e = herm_eig(chois[0]);
                    // a unitary channel has a Choi matrix of rank one with eigenvalue 2
                    ok = std::abs(e.values(3) - 2.0) <= opt.residual && std::abs(e.values(2)) <= opt.residual;
                }
                if (ok) hits.push_back({x, y, z});
            }
    return hits;
}

}  // namespace qnet
