#pragma once

// Small fixed processors used as reference cases by tests, fixtures and the CLI.

#include "qnet/channel.hpp"
#include "qnet/processor.hpp"
#include "qnet/tensor.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qnet::catalog {

namespace detail {

// sum of data_op (x) |j><k| terms on a P-level program
inline ProcessorBlocks from_terms(std::size_t D, std::size_t P,
                                  const std::vector<std::pair<ComplexMatrix, std::pair<std::size_t, std::size_t>>>& terms) {
    ProcessorBlocks g{D, P, std::vector<ComplexMatrix>(P * P, ComplexMatrix::Zero(D, D))};
    for (const auto& [a, jk] : terms) g.at(jk.first, jk.second) += a;
    if (g.unitarity_residual() > 1e-12) throw Error("catalog processor is not unitary");
    return g;
}

inline ComplexMatrix swap_gate(std::size_t d) {
    ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) s(b * d + a, a * d + b) = 1.0;
    return s;
}

// CNOT on n qubits, qubit 0 most significant
inline ComplexMatrix cnot(std::size_t control, std::size_t target, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix c = ComplexMatrix::Zero(dim, dim);
    for (std::size_t s = 0; s < dim; ++s) {
        const bool on = (s >> (n - 1 - control)) & 1u;
        const std::size_t t = on ? s ^ (std::size_t{1} << (n - 1 - target)) : s;
        c(t, s) = 1.0;
    }
    return c;
}

}  // namespace detail

// (1/sqrt2)(1 (x) |0><0| + Z (x) |1><0| + X (x) |0><1| - iY (x) |1><1|); success always depends on the data
inline ProcessorBlocks no_channel() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    return detail::from_terms(2, 2, {{s * identity(2), {0, 0}},
                                     {s * pauli('z'), {1, 0}},
                                     {s * pauli('x'), {0, 1}},
                                     {-i * s * pauli('y'), {1, 1}}});
}

// Deterministically equivalent to no_channel() but able to implement channels probabilistically.
inline ProcessorBlocks flip_routing() {
    return detail::from_terms(2, 2, {{ketbra(0, 0, 2), {0, 0}},
                                     {ketbra(1, 1, 2), {1, 0}},
                                     {ketbra(1, 0, 2), {0, 1}},
                                     {ketbra(0, 1, 2), {1, 1}}});
}

// 1 (x) |0><0| + Z (x) |1><1|
inline ProcessorBlocks phase_select() {
    return detail::from_terms(2, 2, {{identity(2), {0, 0}}, {pauli('z'), {1, 1}}});
}

// Z (x) |0><0| + 1 (x) |1><1|
inline ProcessorBlocks phase_select_swapped() {
    return detail::from_terms(2, 2, {{pauli('z'), {0, 0}}, {identity(2), {1, 1}}});
}

// 1 (x) (|0><0| + |1><1|) + Z (x) |2><2|
inline ProcessorBlocks phase_select_padded() {
    return detail::from_terms(2, 3, {{identity(2), {0, 0}}, {identity(2), {1, 1}}, {pauli('z'), {2, 2}}});
}

// 1 (x) (|0><0| + |2><2|) + Z (x) (|1><1| + |3><3|)
inline ProcessorBlocks phase_select_doubled() {
    return detail::from_terms(2, 4, {{identity(2), {0, 0}},
                                     {pauli('z'), {1, 1}},
                                     {identity(2), {2, 2}},
                                     {pauli('z'), {3, 3}}});
}

// 1 (x) 1_P
inline ProcessorBlocks identity_processor(std::size_t D, std::size_t P) {
    std::vector<std::pair<ComplexMatrix, std::pair<std::size_t, std::size_t>>> terms;
    for (std::size_t j = 0; j < P; ++j) terms.push_back({identity(D), {j, j}});
    return detail::from_terms(D, P, terms);
}

// no_channel() (+) Z (x) |2><2| on a three-level program; a channel only for xi = |2><2|
inline ProcessorBlocks no_channel_plus_phase() {
    auto base = no_channel();
    ProcessorBlocks g{2, 3, std::vector<ComplexMatrix>(9, ComplexMatrix::Zero(2, 2))};
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k) g.at(j, k) = base.at(j, k);
    g.at(2, 2) = pauli('z');
    return g;
}

// Three qubits (data, p1, p2): C02 C20 C02, i.e. the data exchanged with p2.
inline ProcessorBlocks teleport_swap() {
    const auto c02 = detail::cnot(0, 2, 3);
    return from_unitary(c02 * detail::cnot(2, 0, 3) * c02, 2, 4);
}

// Three qubits (data, p1, p2): swap of the data with p1.
inline ProcessorBlocks adjacent_swap() { return from_unitary(kron(detail::swap_gate(2), identity(2)), 2, 4); }

// 1 (x) SWAP on (data, p1, p2): conjugates teleport_swap() into adjacent_swap().
inline ComplexMatrix program_halves_swap() { return kron(identity(2), detail::swap_gate(2)); }

// Data and program qubits exchanged; any program is output as is.
inline ProcessorBlocks swap_processor() { return from_unitary(detail::swap_gate(2), 2, 2); }

inline const std::map<std::string, ProcessorBlocks (*)()>& named() {
    static const std::map<std::string, ProcessorBlocks (*)()> m{
        {"no-channel", &no_channel},
        {"flip-routing", &flip_routing},
        {"phase-select", &phase_select},
        {"phase-select-swapped", &phase_select_swapped},
        {"phase-select-padded", &phase_select_padded},
        {"phase-select-doubled", &phase_select_doubled},
        {"no-channel-plus-phase", &no_channel_plus_phase},
        {"teleport-swap", &teleport_swap},
        {"adjacent-swap", &adjacent_swap},
        {"swap", &swap_processor},
    };
    return m;
}

}  // namespace qnet::catalog
