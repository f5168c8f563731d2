#pragma once

// Probabilistic storage and retrieval of a noisy qubit phase gate used N times.

#include "qnet/channel.hpp"
#include "qnet/network.hpp"
#include "qnet/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace qnet {

// Largest N for the dense storage/retrieval pipeline; beyond it only closed forms are offered.
inline constexpr std::size_t kMaxPipelineN = 4;

// Index j <= N is the N-bit string with j trailing ones; the remaining strings follow in increasing order.
struct DictionaryMap {
    std::size_t N = 0;
    std::vector<std::uint32_t> fwd;

    explicit DictionaryMap(std::size_t n) : N(n) {
        if (n == 0 || n > 16) throw Error("dictionary size out of range");
        const std::uint32_t total = 1u << n;
        std::vector<bool> used(total, false);
        for (std::size_t j = 0; j <= n; ++j) {
            const std::uint32_t s = (1u << j) - 1u;
            fwd.push_back(s);
            used[s] = true;
        }
        for (std::uint32_t s = 0; s < total; ++s)
            if (!used[s]) fwd.push_back(s);
    }

    std::size_t dim() const { return fwd.size(); }
    bool is_irrep(std::size_t index) const { return index <= N; }

    // columns are the computational-basis images of the dictionary basis
    ComplexMatrix to_computational() const {
        ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        for (std::size_t j = 0; j < dim(); ++j) p(fwd[j], static_cast<Eigen::Index>(j)) = 1.0;
        return p;
    }
};

inline void check_pipeline_n(std::size_t N) {
    if (N < 1 || N > kMaxPipelineN)
        throw BoundError("N=" + std::to_string(N) + " exceeds the dense simulation bound of " +
                         std::to_string(kMaxPipelineN) + "; use the closed forms");
}

// (N+1)^{-1/2} sum_j |j>_A |j>_A'
inline LabeledOperator input_state(std::size_t N) {
    check_pipeline_n(N);
    const DictionaryMap dict(N);
    const auto d = dict.dim();
    ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(d * d), 1);
    for (std::size_t j = 0; j <= N; ++j) v(static_cast<Eigen::Index>(dict.fwd[j] * d + dict.fwd[j]), 0) = 1.0;
    v /= std::sqrt(double(N + 1));
    return LabeledOperator(std::move(v), {{"A", d}, {"A'", d}});
}

// Choi operator of the N-fold product channel, labels (B, A) with qubit k most significant first.
inline LabeledOperator product_channel_choi(const NoisySpec& spec, std::size_t N) {
    const auto single = noisy_choi(spec).op.matrix;
    LabeledOperator acc(single, {{"B0", 2}, {"A0", 2}});
    for (std::size_t k = 1; k < N; ++k)
        acc = kron(acc, LabeledOperator(single, {{"B" + std::to_string(k), 2}, {"A" + std::to_string(k), 2}}));
    std::vector<std::string> order;
    for (std::size_t k = 0; k < N; ++k) order.push_back("B" + std::to_string(k));
    for (std::size_t k = 0; k < N; ++k) order.push_back("A" + std::to_string(k));
    const std::size_t d = std::size_t{1} << N;
    return relabel(permute(acc, order), {{"B", d}, {"A", d}});
}

// rho_E on (B, A'): the product channel linked with the input state over A
inline LabeledOperator store(const NoisySpec& spec, std::size_t N) {
    spec.validate();
    const auto psi = input_state(N);
    return link(projector(psi), product_channel_choi(spec, N));
}

// R_s on (B, A', D, C): sum_J sum_{j,j' in {J,J+1}} |j j><j' j'|_{BA'} (x) |j-J, j-J><j'-J, j'-J|_{DC}
inline LabeledOperator retrieval_instrument(std::size_t N) {
    check_pipeline_n(N);
    const DictionaryMap dict(N);
    const auto d = dict.dim();
    const auto D = static_cast<Eigen::Index>(d * d * 4);
    ComplexMatrix r = ComplexMatrix::Zero(D, D);
    for (std::size_t J = 0; J < N; ++J) {
        ComplexVector v = ComplexVector::Zero(D);
        for (std::size_t c = 0; c < 2; ++c) {
            const std::size_t s = dict.fwd[J + c];
            v(static_cast<Eigen::Index>(((s * d + s) * 2 + c) * 2 + c)) = 1.0;
        }
        r += v * v.adjoint();
    }
    return LabeledOperator(std::move(r), {{"B", d}, {"A'", d}, {"D", 2}, {"C", 2}});
}

// Failure element completing R_s to a normalized instrument: (1 - Tr_D R_s) (x) 1_D / 2
inline LabeledOperator retrieval_failure(const LabeledOperator& rs) {
    const auto marg = partial_trace(rs, {"D"});  // (B, A', C)
    const ComplexMatrix rest = identity(marg.dim()) - marg.matrix;
    auto f = kron(LabeledOperator(rest, marg.spaces), LabeledOperator(identity(2) / 2.0, {{"D", 2}}));
    return permute(f, names_of(rs.spaces));
}

// Retrieved (subnormalized) Choi operator on (D out, C in).
inline ChoiChannel retrieve(const LabeledOperator& rho, std::size_t N) {
    check_pipeline_n(N);
    return ChoiChannel(link(rho, retrieval_instrument(N)));
}

inline ComplexMatrix phase_choi(double phi) {
    ComplexVector u = ComplexVector::Zero(4);
    u(0) = 1.0;
    u(3) = std::polar(1.0, phi);
    return u * u.adjoint();
}

inline ComplexMatrix dephasing_choi() {
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(0, 0) = p(3, 3) = 1.0;
    return p;
}

struct RetrievedChannel {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;
    double p_success = 0.0;

    double alpha_fraction() const { return p_success > 0 ? alpha / p_success : 0.0; }
    double beta_fraction() const { return p_success > 0 ? beta / p_success : 0.0; }
};

// Least-squares fit  c ~ alpha |U_phi>><<U_phi| + beta P
inline RetrievedChannel decompose(const ChoiChannel& c, double phi) {
    if (c.out().dim != 2 || c.in().dim != 2) throw Error("decompose expects a qubit channel");
    ComplexMatrix basis(16, 2);
    basis.col(0) = phase_choi(phi).reshaped();
    basis.col(1) = dephasing_choi().reshaped();
    const ComplexVector target = c.matrix().reshaped();
    const ComplexVector x = basis.colPivHouseholderQr().solve(target);
    RetrievedChannel r;
    r.alpha = x(0).real();
    r.beta = x(1).real();
    r.residual = std::max((basis * x - target).cwiseAbs().maxCoeff(), std::max(std::abs(x(0).imag()), std::abs(x(1).imag())));
    r.p_success = r.alpha + r.beta;
    return r;
}

struct ClosedForm {
    double p_success = 0.0;
    double alpha_fraction = 0.0;
    double beta_fraction = 0.0;
    double p_unitary = 0.0;  // alpha = p_success * alpha_fraction
};

inline void check_q(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error("q must lie in [0,1]");
}

inline ClosedForm dep_closed_form(std::size_t N, double q) {
    if (N < 1) throw Error("N must be positive");
    check_q(q);
    ClosedForm f;
    const double n = double(N);
    f.p_success = n * std::pow(1.0 + q, n) / (std::pow(2.0, n) * (n + 1.0));
    f.alpha_fraction = 2.0 * q / (1.0 + q);
    f.beta_fraction = (1.0 - q) / (1.0 + q);
    f.p_unitary = n * q / (n + 1.0) * std::pow((1.0 + q) / 2.0, n - 1.0);
    return f;
}

inline ClosedForm pd_closed_form(std::size_t N, double q) {
    if (N < 1) throw Error("N must be positive");
    check_q(q);
    const double p = double(N) / double(N + 1);
    return {p, q, 1.0 - q, q * p};
}

// Stationary point of N/(N+1) ((1+q)/2)^N in N.
inline double optimal_N(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw Error("optimal_N needs q in [0,1)");
    const double l = std::log(2.0 / (1.0 + q));
    return 0.5 * (-1.0 + std::sqrt((4.0 + l) / l));
}

inline double noise_map_dep(double q) {
    check_q(q);
    return 2.0 * q / (1.0 + q);
}

// Optimal retrieval probability of a d-dimensional unitary stored N times.
inline double general_d_success(std::size_t N, std::size_t d) {
    if (N < 1 || d < 1) throw Error("N and d must be positive");
    return double(N) / (double(N) - 1.0 + double(d * d));
}

struct PsarRecord {
    std::size_t N = 0;
    double q = 0.0;
    double phi = 0.0;
    RetrievedChannel retrieved;
};

inline PsarRecord psar_run(NoiseKind kind, std::size_t N, double q, double phi) {
    const NoisySpec spec{kind, q, phi};
    const auto rho = store(spec, N);
    return {N, q, phi, decompose(retrieve(rho, N), phi)};
}

}  // namespace qnet
