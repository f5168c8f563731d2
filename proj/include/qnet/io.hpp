#pragma once

// JSON and CSV encodings for matrices, channels and processors.
// Matrix: {"rows": r, "cols": c, "re": [...], "im": [...]}, entries row-major; "im" may be omitted.
// Nested row lists are read as well.

#include "qnet/catalog.hpp"
#include "qnet/channel.hpp"
#include "qnet/processor.hpp"
#include "qnet/tensor.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qnet::io {

using json = nlohmann::json;

// Malformed or inconsistent input, as opposed to a failed numerical check.
struct InputError : Error {
    using Error::Error;
};

// Shortest decimal that reads back to the same double; '.' separator regardless of locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
}

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline std::size_t positive_size(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw InputError(std::string("field '") + key + "' must be a positive integer");
    return v.get<std::size_t>();
}

inline void put(ComplexMatrix& m, Eigen::Index r, Eigen::Index c, const json& x, bool imag, const char* key) {
    if (!x.is_number()) throw InputError(std::string("'") + key + "' holds a non-numeric entry");
    if (imag) m(r, c) += cplx(0.0, x.get<double>());
    else m(r, c) += x.get<double>();
}

inline void fill_part(const json& v, ComplexMatrix& m, bool imag, const char* key) {
    if (!v.is_array()) throw InputError(std::string("'") + key + "' must be an array");
    const auto R = static_cast<std::size_t>(m.rows()), C = static_cast<std::size_t>(m.cols());
    if (!v.empty() && !v.front().is_array()) {
        if (v.size() != R * C) throw InputError(std::string("'") + key + "' does not hold rows*cols entries");
        for (std::size_t i = 0; i < v.size(); ++i)
            put(m, static_cast<Eigen::Index>(i / C), static_cast<Eigen::Index>(i % C), v[i], imag, key);
        return;
    }
    if (v.size() != R) throw InputError(std::string("'") + key + "' does not have the declared number of rows");
    for (std::size_t r = 0; r < R; ++r) {
        const auto& row = v[r];
        if (!row.is_array() || row.size() != C)
            throw InputError(std::string("'") + key + "' row " + std::to_string(r) + " has the wrong length");
        for (std::size_t c = 0; c < C; ++c)
            put(m, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), row[c], imag, key);
    }
}

}  // namespace detail

inline ComplexMatrix parse_matrix(const json& j) {
    const auto rows = detail::positive_size(j, "rows");
    const auto cols = detail::positive_size(j, "cols");
    if (rows * cols > kMaxTotalDim * 64) throw BoundError("matrix too large");
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    detail::fill_part(detail::field(j, "re"), m, false, "re");
    if (j.contains("im")) detail::fill_part(j.at("im"), m, true, "im");
    if (!all_finite(m)) throw InputError("matrix has non-finite entries");
    return m;
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

// {"kraus": [M...]} or {"choi": M, "d_out": n, "d_in": m}
inline ChoiChannel parse_channel(const json& j) {
    try {
        if (j.is_object() && j.contains("kraus")) {
            const auto& arr = j.at("kraus");
            if (!arr.is_array() || arr.empty()) throw InputError("'kraus' must be a nonempty array");
            std::vector<ComplexMatrix> ops;
            for (const auto& m : arr) ops.push_back(parse_matrix(m));
            return kraus_to_choi(KrausSet(std::move(ops)));
        }
        if (j.is_object() && j.contains("choi")) {
            auto m = parse_matrix(j.at("choi"));
            const auto dout = detail::positive_size(j, "d_out");
            const auto din = detail::positive_size(j, "d_in");
            if (static_cast<std::size_t>(m.rows()) != dout * din || m.rows() != m.cols())
                throw InputError("Choi matrix is not (d_out*d_in) square");
            return make_choi(std::move(m), dout, din);
        }
    } catch (const InputError&) {
        throw;
    } catch (const BoundError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(e.what());
    }
    throw InputError("channel file needs a 'kraus' or 'choi' field");
}

// {"catalog": name} | {"D","P","unitary": M} | {"D","P","blocks": [P*P matrices, row-major]}
inline ProcessorBlocks parse_processor(const json& j) {
    try {
        if (j.is_object() && j.contains("catalog")) {
            const auto name = j.at("catalog").get<std::string>();
            const auto& m = catalog::named();
            const auto it = m.find(name);
            if (it == m.end()) throw InputError("unknown catalog processor '" + name + "'");
            return it->second();
        }
        const auto D = detail::positive_size(j, "D");
        const auto P = detail::positive_size(j, "P");
        if (D * P > 4096) throw BoundError("processor dimension D*P exceeds 4096");
        if (j.contains("unitary")) return from_unitary(parse_matrix(j.at("unitary")), D, P);
        const auto& arr = detail::field(j, "blocks");
        if (!arr.is_array() || arr.size() != P * P) throw InputError("'blocks' must hold P*P matrices");
        ProcessorBlocks g{D, P, {}};
        for (const auto& b : arr) {
            auto m = parse_matrix(b);
            if (static_cast<std::size_t>(m.rows()) != D || static_cast<std::size_t>(m.cols()) != D)
                throw InputError("block is not D x D");
            g.blocks.push_back(std::move(m));
        }
        if (g.unitarity_residual() > 1e-9) throw InputError("blocks do not form a unitary processor");
        return g;
    } catch (const InputError&) {
        throw;
    } catch (const BoundError&) {
        throw;
    } catch (const json::exception& e) {
        throw InputError(e.what());
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

// Program state: a density matrix, or {"ket": {"re": [...], "im": [...]}}.
inline ComplexMatrix parse_program(const json& j) {
    if (j.is_object() && j.contains("ket")) {
        const auto& k = j.at("ket");
        const auto& re = detail::field(k, "re");
        if (!re.is_array() || re.empty()) throw InputError("'ket.re' must be a nonempty array");
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = re[i].get<double>();
        if (k.contains("im")) {
            const auto& im = k.at("im");
            if (!im.is_array() || im.size() != re.size()) throw InputError("'ket.im' length mismatch");
            for (std::size_t i = 0; i < im.size(); ++i) v(static_cast<Eigen::Index>(i)) += cplx(0, im[i].get<double>());
        }
        if (v.norm() == 0.0) throw InputError("zero program vector");
        return pure_program(v);
    }
    return parse_matrix(j);
}

// Joins cells with commas; numbers are shortest round-trip decimals.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((emit(cells, first)), ...);
        os_ << '\n';
    }

private:
    void row_strings(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << '\n';
    }
    void sep(bool& first) {
        if (!first) os_ << ',';
        first = false;
    }
    void emit(double x, bool& first) {
        sep(first);
        os_ << format_double(x);
    }
    void emit(const std::string& s, bool& first) {
        sep(first);
        os_ << s;
    }
    void emit(const char* s, bool& first) { emit(std::string(s), first); }
    template <typename T>
        requires std::is_integral_v<T>
    void emit(T x, bool& first) {
        sep(first);
        os_ << x;
    }

    std::ostream& os_;
};

}  // namespace qnet::io
