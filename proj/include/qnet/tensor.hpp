#pragma once

// Dense complex operators with named tensor factors.
// Basis ordering is row-major: the leftmost label is the most significant factor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace qnet {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// request exceeds a size bound of the dense simulation
struct BoundError : Error {
    using Error::Error;
};

struct Tolerances {
    double herm = 1e-9;
    double psd = 1e-9;
    double rank = 1e-10;
    double eq = 1e-9;
};

inline constexpr std::size_t kMaxTotalDim = std::size_t{1} << 16;

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error("shape mismatch in comparison");
    return max_abs(a - b);
}

// max |a-b| <= tol * (1 + max(|a|max, |b|max))
inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-9) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    double scale = 1.0 + std::max(max_abs(a), max_abs(b));
    return max_abs(a - b) <= tol * scale;
}

inline bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
    return true;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    if (static_cast<std::size_t>(ar * br) > kMaxTotalDim || static_cast<std::size_t>(ac * bc) > kMaxTotalDim)
        throw Error("kron: result exceeds dimension bound");
    ComplexMatrix out(ar * br, ac * bc);
    for (Eigen::Index i = 0; i < ar; ++i)
        for (Eigen::Index j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    return out;
}

inline ComplexMatrix identity(std::size_t d) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

// |k> in dimension d, as a column
inline ComplexVector ket(std::size_t k, std::size_t d) {
    if (k >= d) throw Error("ket index out of range");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(k)) = 1.0;
    return v;
}

// |i><j| in dimension d
inline ComplexMatrix ketbra(std::size_t i, std::size_t j, std::size_t d) {
    return ket(i, d) * ket(j, d).adjoint();
}

struct SpaceLabel {
    std::string name;
    std::size_t dim = 1;
    bool operator==(const SpaceLabel&) const = default;
};

using Spaces = std::vector<SpaceLabel>;

inline std::size_t total_dim(const Spaces& s) {
    std::size_t d = 1;
    for (const auto& l : s) d *= l.dim;
    return d;
}

// Square operator on the listed spaces, or a column vector (cols == 1) for kets.
struct LabeledOperator {
    ComplexMatrix matrix;
    Spaces spaces;

    LabeledOperator() = default;
    LabeledOperator(ComplexMatrix m, Spaces s) : matrix(std::move(m)), spaces(std::move(s)) { validate(); }

    bool is_vector() const { return matrix.cols() == 1 && matrix.rows() != 1; }
    std::size_t dim() const { return total_dim(spaces); }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < spaces.size(); ++i)
            if (spaces[i].name == name) return i;
        throw Error("unknown label '" + name + "'");
    }
    bool has(const std::string& name) const {
        return std::any_of(spaces.begin(), spaces.end(), [&](const SpaceLabel& l) { return l.name == name; });
    }
    const SpaceLabel& label(const std::string& name) const { return spaces[index_of(name)]; }

    void validate() const {
        std::unordered_set<std::string> seen;
        for (const auto& l : spaces) {
            if (l.dim < 1) throw Error("label '" + l.name + "' has zero dimension");
            if (!seen.insert(l.name).second) throw Error("duplicate label '" + l.name + "'");
        }
        const std::size_t d = total_dim(spaces);
        if (d > kMaxTotalDim) throw Error("operator exceeds dimension bound");
        const auto rows = static_cast<std::size_t>(matrix.rows());
        const auto cols = static_cast<std::size_t>(matrix.cols());
        if (rows != d || (cols != d && cols != 1))
            throw Error("matrix shape does not match label dimensions");
        if (!all_finite(matrix)) throw Error("non-finite matrix entry");
    }
};

namespace detail {

inline std::vector<std::size_t> strides_of(const Spaces& s) {
    std::vector<std::size_t> st(s.size(), 1);
    for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i].dim;
    return st;
}

// perm[new_index] = old_index for reordering factors into `order`
inline std::vector<Eigen::Index> factor_permutation(const Spaces& from, const std::vector<std::size_t>& pos) {
    Spaces to;
    for (auto p : pos) to.push_back(from[p]);
    const auto old_st = strides_of(from);
    const std::size_t d = total_dim(from);
    std::vector<Eigen::Index> perm(d);
    std::vector<std::size_t> digit(to.size(), 0);
    for (std::size_t n = 0; n < d; ++n) {
        std::size_t old = 0;
        for (std::size_t f = 0; f < to.size(); ++f) old += digit[f] * old_st[pos[f]];
        perm[n] = static_cast<Eigen::Index>(old);
        for (std::size_t f = to.size(); f-- > 0;) {
            if (++digit[f] < to[f].dim) break;
            digit[f] = 0;
        }
    }
    return perm;
}

}  // namespace detail

inline LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
    if (a.is_vector() != b.is_vector()) throw Error("kron: cannot mix kets and operators");
    Spaces s = a.spaces;
    s.insert(s.end(), b.spaces.begin(), b.spaces.end());
    return LabeledOperator(kron(a.matrix, b.matrix), s);
}

inline LabeledOperator identity(const Spaces& s) { return LabeledOperator(identity(total_dim(s)), s); }

// Reorder tensor factors so that labels appear in `order` (must name every label).
inline LabeledOperator permute(const LabeledOperator& op, const std::vector<std::string>& order) {
    if (order.size() != op.spaces.size()) throw Error("permute: order must list every label");
    std::vector<std::size_t> pos;
    for (const auto& n : order) pos.push_back(op.index_of(n));
    {
        auto sorted = pos;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error("permute: repeated label");
    }
    Spaces to;
    for (auto p : pos) to.push_back(op.spaces[p]);
    bool trivial = true;
    for (std::size_t i = 0; i < pos.size(); ++i) trivial = trivial && pos[i] == i;
    if (trivial) return op;
    const auto perm = detail::factor_permutation(op.spaces, pos);
    const auto d = static_cast<Eigen::Index>(perm.size());
    ComplexMatrix m(d, op.matrix.cols());
    if (op.is_vector()) {
        for (Eigen::Index i = 0; i < d; ++i) m(i, 0) = op.matrix(perm[i], 0);
    } else {
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = 0; i < d; ++i) m(i, j) = op.matrix(perm[i], perm[j]);
    }
    return LabeledOperator(std::move(m), std::move(to));
}

inline std::vector<std::string> names_of(const Spaces& s) {
    std::vector<std::string> n;
    for (const auto& l : s) n.push_back(l.name);
    return n;
}

// Same matrix, new factor structure (total dims must agree).
inline LabeledOperator relabel(const LabeledOperator& op, Spaces s) {
    if (total_dim(s) != op.dim()) throw Error("relabel: dimension mismatch");
    return LabeledOperator(op.matrix, std::move(s));
}

inline LabeledOperator partial_trace(const LabeledOperator& op, const std::vector<std::string>& over) {
    if (op.is_vector()) throw Error("partial_trace needs an operator, not a ket");
    std::vector<std::string> keep, order;
    for (const auto& l : op.spaces)
        if (std::find(over.begin(), over.end(), l.name) == over.end()) keep.push_back(l.name);
    for (const auto& n : over) op.index_of(n);
    order = keep;
    order.insert(order.end(), over.begin(), over.end());
    auto p = permute(op, order);
    Spaces kept(p.spaces.begin(), p.spaces.begin() + static_cast<std::ptrdiff_t>(keep.size()));
    const auto dk = static_cast<Eigen::Index>(total_dim(kept));
    const auto dt = static_cast<Eigen::Index>(p.dim()) / dk;
    ComplexMatrix r = ComplexMatrix::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index j = 0; j < dk; ++j) {
            cplx s = 0;
            for (Eigen::Index t = 0; t < dt; ++t) s += p.matrix(i * dt + t, j * dt + t);
            r(i, j) = s;
        }
    return LabeledOperator(std::move(r), std::move(kept));
}

inline LabeledOperator partial_transpose(const LabeledOperator& op, const std::vector<std::string>& over) {
    if (op.is_vector()) throw Error("partial_transpose needs an operator, not a ket");
    std::vector<bool> sel(op.spaces.size(), false);
    for (const auto& n : over) sel[op.index_of(n)] = true;
    const auto st = detail::strides_of(op.spaces);
    const std::size_t d = op.dim();
    // split every index into its selected part and the rest
    std::vector<Eigen::Index> tpart(d), rest(d);
    for (std::size_t n = 0; n < d; ++n) {
        std::size_t t = 0;
        for (std::size_t f = 0; f < st.size(); ++f)
            if (sel[f]) t += ((n / st[f]) % op.spaces[f].dim) * st[f];
        tpart[n] = static_cast<Eigen::Index>(t);
        rest[n] = static_cast<Eigen::Index>(n - t);
    }
    const auto D = static_cast<Eigen::Index>(d);
    ComplexMatrix r(D, D);
    for (Eigen::Index j = 0; j < D; ++j)
        for (Eigen::Index i = 0; i < D; ++i) r(i, j) = op.matrix(rest[i] + tpart[j], rest[j] + tpart[i]);
    return LabeledOperator(std::move(r), op.spaces);
}

// |A>> = sum_nm A[n,m] |n>_out |m>_in
inline LabeledOperator double_ket(const ComplexMatrix& a, const SpaceLabel& in, const SpaceLabel& out) {
    if (static_cast<std::size_t>(a.rows()) != out.dim || static_cast<std::size_t>(a.cols()) != in.dim)
        throw Error("double_ket: matrix shape does not match labels");
    ComplexMatrix v(a.rows() * a.cols(), 1);
    for (Eigen::Index n = 0; n < a.rows(); ++n)
        for (Eigen::Index m = 0; m < a.cols(); ++m) v(n * a.cols() + m, 0) = a(n, m);
    return LabeledOperator(std::move(v), {out, in});
}

inline LabeledOperator projector(const LabeledOperator& ket_op) {
    if (!ket_op.is_vector()) throw Error("projector needs a ket");
    return LabeledOperator(ket_op.matrix * ket_op.matrix.adjoint(), ket_op.spaces);
}

inline double hermiticity_residual(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

struct EigenDecomposition {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns
};

inline EigenDecomposition herm_eig(const ComplexMatrix& m, double herm_tol = 1e-9) {
    if (m.rows() != m.cols()) throw Error("herm_eig: matrix not square");
    if (hermiticity_residual(m) > herm_tol * (1.0 + max_abs(m))) throw Error("herm_eig: matrix not Hermitian");
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) throw Error("herm_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

inline double spectral_scale(const RealVector& v) {
    return v.size() == 0 ? 0.0 : std::max(std::abs(v.minCoeff()), std::abs(v.maxCoeff()));
}

inline RealVector clamp_psd(const RealVector& v, double psd_tol) {
    const double scale = spectral_scale(v);
    RealVector c = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < -psd_tol * std::max(1.0, scale)) throw Error("matrix has a significantly negative eigenvalue");
        c(i) = std::max(0.0, v(i));
    }
    return c;
}

}  // namespace detail

inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol = {}) {
    auto e = herm_eig(m, tol.herm);
    RealVector s = detail::clamp_psd(e.values, tol.psd).cwiseSqrt();
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

// Inverts only eigenvalues above rank_tol * lambda_max.
inline ComplexMatrix psd_pinv_sqrt(const ComplexMatrix& m, const Tolerances& tol = {}) {
    auto e = herm_eig(m, tol.herm);
    RealVector v = detail::clamp_psd(e.values, tol.psd);
    const double cut = tol.rank * (v.size() ? v.maxCoeff() : 0.0);
    RealVector s(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) s(i) = v(i) > cut && v(i) > 0 ? 1.0 / std::sqrt(v(i)) : 0.0;
    return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

// Eigenpairs of a PSD matrix restricted to its support, largest first.
struct Support {
    RealVector values;
    ComplexMatrix vectors;
};

inline Support psd_support(const ComplexMatrix& m, const Tolerances& tol = {}) {
    auto e = herm_eig(m, tol.herm);
    RealVector v = detail::clamp_psd(e.values, tol.psd);
    const double cut = tol.rank * (v.size() ? v.maxCoeff() : 0.0);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = v.size(); i-- > 0;)
        if (v(i) > cut && v(i) > 0) keep.push_back(i);
    Support s{RealVector(static_cast<Eigen::Index>(keep.size())),
              ComplexMatrix(m.rows(), static_cast<Eigen::Index>(keep.size()))};
    for (std::size_t k = 0; k < keep.size(); ++k) {
        s.values(static_cast<Eigen::Index>(k)) = v(keep[k]);
        s.vectors.col(static_cast<Eigen::Index>(k)) = e.vectors.col(keep[k]);
    }
    return s;
}

inline double min_eigenvalue(const ComplexMatrix& m, double herm_tol = 1e-9) {
    auto e = herm_eig(m, herm_tol);
    return e.values.size() ? e.values(0) : 0.0;
}

}  // namespace qnet
