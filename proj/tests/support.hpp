#pragma once

// Random objects and brute-force oracles shared by the test binaries.

#include "qnet/channel.hpp"
#include "qnet/tensor.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace qtest {

using namespace qnet;

inline ComplexMatrix ginibre(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(n(rng), n(rng));
    return m;
}

inline ComplexMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(d, d, rng));
    return qr.householderQ();
}

inline ComplexMatrix random_density(std::size_t d, std::mt19937_64& rng, std::size_t rank = 0) {
    const auto g = ginibre(d, rank == 0 ? d : rank, rng);
    ComplexMatrix r = g * g.adjoint();
    return r / r.trace().real();
}

inline ComplexMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
    const auto g = ginibre(d, d, rng);
    return g + g.adjoint();
}

// n Kraus operators d_out x d_in, normalized through S^{-1/2} with S = sum A^dag A.
// n is raised to ceil(d_in / d_out) when smaller, otherwise S would be singular.
inline KrausSet random_kraus(std::size_t d_in, std::size_t d_out, std::size_t n, std::mt19937_64& rng) {
    n = std::max(n, (d_in + d_out - 1) / d_out);
    std::vector<ComplexMatrix> ops;
    ComplexMatrix s = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_in), static_cast<Eigen::Index>(d_in));
    for (std::size_t i = 0; i < n; ++i) {
        ops.push_back(ginibre(d_out, d_in, rng));
        s += ops.back().adjoint() * ops.back();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s);
    const ComplexMatrix inv_sqrt =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() *
        es.eigenvectors().adjoint();
    for (auto& a : ops) a = a * inv_sqrt;
    return KrausSet(std::move(ops));
}

// sum_ij M(|i><j|) (x) |i><j|, with M given as a callable on matrices
template <typename Map>
inline ComplexMatrix brute_choi(Map m, std::size_t d_in, std::size_t d_out) {
    ComplexMatrix c = ComplexMatrix::Zero(static_cast<Eigen::Index>(d_out * d_in), static_cast<Eigen::Index>(d_out * d_in));
    for (std::size_t i = 0; i < d_in; ++i)
        for (std::size_t j = 0; j < d_in; ++j) {
            const ComplexMatrix img = m(ketbra(i, j, d_in));
            for (std::size_t a = 0; a < d_out; ++a)
                for (std::size_t b = 0; b < d_out; ++b)
                    c(static_cast<Eigen::Index>(a * d_in + i), static_cast<Eigen::Index>(b * d_in + j)) =
                        img(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    return c;
}

}  // namespace qtest
