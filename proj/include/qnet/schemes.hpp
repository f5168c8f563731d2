#pragma once

// Circuit-level realizations of phase-gate storage: the recycling register circuit and the
// virtual-qudit circuit, plus their combinatorial closed forms and comparison tables.

#include "qnet/channel.hpp"
#include "qnet/psar.hpp"
#include "qnet/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace qnet {

struct Branch {
    ComplexMatrix state;  // unnormalized data operator
    double prob = 0.0;
    std::vector<int> outcome_log;
    bool success = false;
    std::size_t gates_used = 0;  // channel uses consumed up to this branch
};

namespace detail {

// q U rho U^dag + (1-q) noise(rho) on a qubit, entrywise
inline ComplexMatrix apply_noisy_qubit(const NoisySpec& s, const ComplexMatrix& rho) {
    ComplexMatrix noise = ComplexMatrix::Zero(2, 2);
    if (s.kind == NoiseKind::DepolarizingMix) {
        noise(0, 0) = noise(1, 1) = (rho(0, 0) + rho(1, 1)) / 2.0;
    } else {
        noise(0, 0) = rho(0, 0);
        noise(1, 1) = rho(1, 1);
    }
    const cplx e = std::polar(1.0, s.phi);
    ComplexMatrix u = rho;
    u(0, 1) *= std::conj(e);
    u(1, 0) *= e;
    return s.q * u + (1.0 - s.q) * noise;
}

inline ComplexMatrix apply_repeated(const NoisySpec& s, ComplexMatrix rho, std::size_t times) {
    for (std::size_t i = 0; i < times; ++i) rho = apply_noisy_qubit(s, rho);
    return rho;
}

// Runs the register circuit on a data operator whose first factor is the data qubit (dim 2*m).
inline std::vector<Branch> vmc_branches(const NoisySpec& spec, std::size_t k, const ComplexMatrix& data) {
    if (k < 1 || k > 10) throw Error("register count must lie in 1..10");
    spec.validate();
    const auto m = static_cast<std::size_t>(data.rows()) / 2;
    const ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
    const ComplexMatrix cnot = kron(ketbra(0, 0, 2), identity(2 * m)) +
                               kron(ketbra(1, 1, 2), kron(identity(m), pauli('x')));
    std::vector<Branch> out;
    ComplexMatrix carry = data;
    std::vector<int> log;
    std::size_t used = 0;
    for (std::size_t r = 1; r <= k; ++r) {
        const std::size_t uses = std::size_t{1} << (r - 1);
        used += uses;
        const ComplexMatrix prog = apply_repeated(spec, plus, uses);
        const ComplexMatrix joint = cnot * kron(carry, prog) * cnot.adjoint();
        ComplexMatrix on[2];
        for (int o = 0; o < 2; ++o) {
            on[o] = ComplexMatrix::Zero(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(2 * m));
            for (Eigen::Index a = 0; a < on[o].rows(); ++a)
                for (Eigen::Index b = 0; b < on[o].cols(); ++b) on[o](a, b) = joint(2 * a + o, 2 * b + o);
        }
        auto success_log = log;
        success_log.push_back(0);
        out.push_back({on[0], on[0].trace().real() / double(m), success_log, true, used});
        log.push_back(1);
        carry = on[1];
    }
    out.push_back({carry, carry.trace().real() / double(m), log, false, used});
    return out;
}

}  // namespace detail

inline std::size_t registers_for(std::size_t N) {
    std::size_t k = 0;
    while (((std::size_t{1} << k) - 1) < N) ++k;
    if (((std::size_t{1} << k) - 1) != N || k == 0) throw Error("N must be of the form 2^k - 1");
    return k;
}

// Data-qubit branches for input a|0> + b|1>; success branches first in register order, final failure last.
inline std::vector<Branch> vmc_run(const NoisySpec& spec, std::size_t k, cplx a, cplx b) {
    const double n = std::norm(a) + std::norm(b);
    if (std::abs(n - 1.0) > 1e-9) throw Error("data amplitudes must be normalized");
    ComplexVector v(2);
    v << a, b;
    return detail::vmc_branches(spec, k, v * v.adjoint());
}

// Same circuit with the data qubit maximally entangled to a reference: branch states are Choi operators.
inline std::vector<Branch> vmc_branch_chois(const NoisySpec& spec, std::size_t k) {
    const auto phi = double_ket(identity(2), {"in", 2}, {"out", 2}).matrix;
    return detail::vmc_branches(spec, k, phi * phi.adjoint());
}

struct VmcClosedBranch {
    std::size_t register_index = 0;
    double prob = 0.0;
    double unitary_weight = 0.0;  // q^{N_r}
    std::size_t gates_used = 0;
};

struct VmcClosedForm {
    double p_success = 0.0;
    double p_unitary = 0.0;  // sum over success branches of prob * unitary weight
    std::vector<VmcClosedBranch> branches;
};

inline VmcClosedForm vmc_closed_form(std::size_t N, double q) {
    check_q(q);
    const auto k = registers_for(N);
    VmcClosedForm f;
    for (std::size_t r = 1; r <= k; ++r) {
        const std::size_t nr = (std::size_t{1} << r) - 1;
        const double p = std::ldexp(1.0, -static_cast<int>(r));
        f.branches.push_back({r, p, std::pow(q, double(nr)), nr});
        f.p_success += p;
        f.p_unitary += p * std::pow(q, double(nr));
    }
    return f;
}

// Expected Choi of a branch: prob [w |U_s><<U_s| + (1-w) P] with s = phi on success, -N_r phi on the last failure.
inline ComplexMatrix vmc_expected_choi(double prob, double weight, double phase) {
    return prob * (weight * phase_choi(phase) + (1.0 - weight) * dephasing_choi());
}

// |c>|t> -> |c>|t - c mod (N+1)> on dictionary indices t <= N, identity on the others
inline ComplexMatrix shift_down(std::size_t N) {
    if (N < 1 || N > 12) throw Error("shift_down: N out of range");
    const std::size_t d = std::size_t{1} << N;
    ComplexMatrix s = ComplexMatrix::Zero(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(2 * d));
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t t = 0; t < d; ++t) {
            const std::size_t to = t <= N ? (t + (N + 1) - c) % (N + 1) : t;
            s(static_cast<Eigen::Index>(c * d + to), static_cast<Eigen::Index>(c * d + t)) = 1.0;
        }
    return s;
}

struct VQConfig {
    std::size_t N = 1;
    NoisySpec spec;
    cplx a = 1.0;
    cplx b = 0.0;
};

struct VQResult {
    std::size_t N = 0;
    std::vector<ComplexMatrix> outcome_chois;  // per qudit outcome, data map as Choi (out, in)
    ComplexMatrix success_choi;                // summed over outcomes 0..N-1
    ComplexMatrix fail_choi;                   // summed over the remaining outcomes
    double p_success = 0.0;                    // averaged over data states
    double p_success_data = 0.0;               // for the configured data state
    ComplexMatrix success_state;               // unnormalized data state after success
    double p_unitary = 0.0;                    // weight of U_phi . U_phi^dag in the success map
    double p_ab = 0.0;                         // weight of the diagonal (a^2, b^2) terms, data-averaged
    double a_weight = 0.0;                     // coefficient of |0><0| . |0><0|
    double b_weight = 0.0;                     // coefficient of |1><1| . |1><1|
    double residual = 0.0;                     // fit residual of the success map
};

inline VQResult vq_run(const VQConfig& cfg) {
    check_pipeline_n(cfg.N);
    cfg.spec.validate();
    if (std::abs(std::norm(cfg.a) + std::norm(cfg.b) - 1.0) > 1e-9) throw Error("data amplitudes must be normalized");
    const std::size_t N = cfg.N, d = std::size_t{1} << N;
    const DictionaryMap dict(N);
    ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j <= N; ++j) psi(dict.fwd[j]) = 1.0 / std::sqrt(double(N + 1));
    const auto channel = ChoiChannel(product_channel_choi(cfg.spec, N));
    const ComplexMatrix sigma_comp = apply_choi(channel, psi * psi.adjoint());
    const ComplexMatrix p = dict.to_computational();
    const ComplexMatrix sigma = p.adjoint() * sigma_comp * p;  // dictionary basis

    // data (x) reference (x) qudit, shift-down acting on data and qudit
    const ComplexVector bell = double_ket(identity(2), {"in", 2}, {"out", 2}).matrix.col(0);
    const ComplexMatrix joint = kron(ComplexMatrix(bell * bell.adjoint()), sigma);
    const ComplexMatrix sd = shift_down(N);
    ComplexMatrix op = ComplexMatrix::Zero(static_cast<Eigen::Index>(4 * d), static_cast<Eigen::Index>(4 * d));
    for (std::size_t c = 0; c < 2; ++c) {
        const ComplexMatrix block = sd.block(static_cast<Eigen::Index>(c * d), static_cast<Eigen::Index>(c * d),
                                             static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        op += kron(ketbra(c, c, 2), kron(identity(2), block));
    }
    const ComplexMatrix after = op * joint * op.adjoint();

    VQResult r;
    r.N = N;
    r.success_choi = ComplexMatrix::Zero(4, 4);
    r.fail_choi = ComplexMatrix::Zero(4, 4);
    for (std::size_t t = 0; t < d; ++t) {
        ComplexMatrix m(4, 4);
        for (Eigen::Index x = 0; x < 4; ++x)
            for (Eigen::Index y = 0; y < 4; ++y)
                m(x, y) = after(x * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(t),
                                y * static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(t));
        (t < N ? r.success_choi : r.fail_choi) += m;
        r.outcome_chois.push_back(std::move(m));
    }
    r.p_success = r.success_choi.trace().real() / 2.0;
    ComplexVector xi(2);
    xi << cfg.a, cfg.b;
    r.success_state = apply_choi(make_choi(r.success_choi, 2, 2), xi * xi.adjoint());
    r.p_success_data = r.success_state.trace().real();

    ComplexMatrix basis(16, 3);
    basis.col(0) = phase_choi(cfg.spec.phi).reshaped();
    basis.col(1) = ketbra(0, 0, 4).reshaped();
    basis.col(2) = ketbra(3, 3, 4).reshaped();
    const ComplexVector target = r.success_choi.reshaped();
    const ComplexVector x = basis.colPivHouseholderQr().solve(target);
    r.p_unitary = x(0).real();
    r.a_weight = x(1).real();
    r.b_weight = x(2).real();
    r.p_ab = 0.5 * (r.a_weight + r.b_weight);
    r.residual = (basis * x - target).cwiseAbs().maxCoeff();
    return r;
}

struct PermCounts {
    std::uint64_t boundary = 0;
    std::uint64_t interior = 0;
    std::uint64_t total() const { return boundary + interior; }
};

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Orderings of phi unitary and I = N - phi contraction factors containing a block of exactly V
// neighbouring contractions, split by whether the block touches an end.
inline PermCounts perm_counts(std::size_t N, std::size_t phi, std::size_t V) {
    if (N < 2 || phi < 1 || phi + 1 > N) throw Error("perm_counts needs 1 <= phi <= N-1");
    if (V < 1 || V > N - phi) throw Error("perm_counts needs 1 <= V <= N-phi");
    PermCounts c;
    // 2 (N-V-1)! / ((I-V)! (phi-1)!)
    c.boundary = 2 * binomial(N - V - 1, phi - 1);
    // (N-1-V) (N-V-2)! / ((I-V)! (phi-2)!)
    if (phi >= 2) c.interior = (N - 1 - V) * binomial(N - V - 2, phi - 2);
    return c;
}

struct VQClosed {
    double p_success = 0.0;
    double p_unitary = 0.0;
    double p_ab = 0.0;
};

inline double factorial(long n) {
    if (n < 0) throw Error("factorial of a negative number");
    double f = 1.0;
    for (long i = 2; i <= n; ++i) f *= double(i);
    return f;
}

inline double vq_unitary_share(std::size_t N, double q) {
    return double(N) * q / double(N + 1) * std::pow((1.0 + q) / 2.0, double(N) - 1.0);
}

// Triple sums for the depolarizing virtual-qudit scheme, evaluated term by term.
inline VQClosed vq_dep_closed(std::size_t N, double q) {
    if (N < 1) throw Error("N must be positive");
    check_q(q);
    const long n = static_cast<long>(N);
    const double dn = double(N);
    const auto weight = [&](long phi) {
        return std::pow(q, double(phi)) * std::pow(1.0 - q, double(n - phi)) /
               ((dn + 1.0) * std::pow(2.0, double(n - phi)));
    };
    double pab = std::pow(1.0 - q, dn) / std::pow(2.0, dn) * dn;
    double psuc = pab + dn / (dn + 1.0) * std::pow(q, dn);
    for (long phi = 1; phi <= n - 1; ++phi) {
        double s = 0.0;
        for (long V = 1; V <= n - phi; ++V)
            s += double(V) * (2.0 * V + 3.0) * factorial(n - V - 1) / (factorial(n - phi - V) * factorial(phi - 1));
        pab += weight(phi) * s;
        psuc += weight(phi) * (s + factorial(n) / (factorial(phi - 1) * factorial(n - phi)));
    }
    for (long phi = 2; phi <= n - 1; ++phi) {
        double s = 0.0;
        for (long V = 1; V <= n - phi; ++V)
            s += double(V) * (V + 2.0) * factorial(n - V - 1) / (factorial(n - phi - V) * factorial(phi - 2));
        pab += weight(phi) * s;
        psuc += weight(phi) * s;
    }
    return {psuc, vq_unitary_share(N, q), pab};
}

inline VQClosed vq_pd_closed(std::size_t N, double q) {
    if (N < 1) throw Error("N must be positive");
    check_q(q);
    const double p = double(N) / double(N + 1);
    return {p, q * p, (1.0 - q) * p};
}

struct FigureRow {
    std::string scheme;
    std::string noise;
    std::size_t N = 0;
    double q = 0.0;
    double p_suc = 0.0;
    double p_U = 0.0;
    double p_ab = 0.0;
};

inline const std::vector<std::string>& figure_kinds() {
    static const std::vector<std::string> k{"dep-vs-pd", "dep-schemes", "pd-schemes", "vq-dep-vs-pd"};
    return k;
}

inline FigureRow scheme_row(const std::string& scheme, NoiseKind noise, std::size_t N, double q) {
    FigureRow r{scheme, to_string(noise), N, q, 0, 0, 0};
    if (scheme == "psar") {
        const auto f = noise == NoiseKind::DepolarizingMix ? dep_closed_form(N, q) : pd_closed_form(N, q);
        r.p_suc = f.p_success;
        r.p_U = f.p_unitary;
        r.p_ab = f.p_success * f.beta_fraction;
    } else if (scheme == "vmc") {
        const auto f = vmc_closed_form(N, q);
        r.p_suc = f.p_success;
        r.p_U = f.p_unitary;
        r.p_ab = f.p_success - f.p_unitary;
    } else if (scheme == "vq") {
        const auto f = noise == NoiseKind::DepolarizingMix ? vq_dep_closed(N, q) : vq_pd_closed(N, q);
        r.p_suc = f.p_success;
        r.p_U = f.p_unitary;
        r.p_ab = f.p_ab;
    } else {
        throw Error("unknown scheme '" + scheme + "'");
    }
    return r;
}

inline std::vector<double> default_q_grid(std::size_t points = 21) {
    std::vector<double> g;
    for (std::size_t i = 0; i < points; ++i) g.push_back(double(i) / double(points - 1));
    return g;
}

// Comparison tables over N in {1, 3, 7, 15}, rows in (series, N, q) order.
inline std::vector<FigureRow> figure_data(const std::string& kind, const std::vector<double>& qs = default_q_grid()) {
    using NK = NoiseKind;
    std::vector<std::pair<std::string, NK>> series;
    if (kind == "dep-vs-pd") series = {{"psar", NK::DepolarizingMix}, {"psar", NK::PhaseDampingMix}};
    else if (kind == "dep-schemes") series = {{"psar", NK::DepolarizingMix}, {"vmc", NK::DepolarizingMix}, {"vq", NK::DepolarizingMix}};
    else if (kind == "pd-schemes") series = {{"psar", NK::PhaseDampingMix}, {"vmc", NK::PhaseDampingMix}, {"vq", NK::PhaseDampingMix}};
    else if (kind == "vq-dep-vs-pd") series = {{"vq", NK::DepolarizingMix}, {"vq", NK::PhaseDampingMix}};
    else throw Error("unknown figure kind '" + kind + "'");
    if (qs.empty()) throw Error("q grid is empty");
    std::vector<FigureRow> rows;
    for (const auto& [scheme, noise] : series)
        for (std::size_t N : {1, 3, 7, 15})
            for (double q : qs) rows.push_back(scheme_row(scheme, noise, N, q));
    return rows;
}

}  // namespace qnet
