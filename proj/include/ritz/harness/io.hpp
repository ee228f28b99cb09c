#pragma once

// JSON serialization: matrices, instance specs, bound reports.
//
// Matrix files: {"d": n, "entries": [[re, im], ...]} row-major for square
// matrices, {"rows": r, "cols": c, "entries": ...} otherwise.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ritz/bounds.hpp"
#include "ritz/error.hpp"
#include "ritz/harness/generate.hpp"
#include "ritz/linalg.hpp"

namespace ritz::harness {

using nlohmann::json;

inline json matrix_to_json(const ComplexMatrix& m) {
    json j;
    if (m.rows() == m.cols()) {
        j["d"] = m.rows();
    } else {
        j["rows"] = m.rows();
        j["cols"] = m.cols();
    }
    json entries = json::array();
    for (const auto& z : m.entries()) entries.push_back(json::array({z.real(), z.imag()}));
    j["entries"] = std::move(entries);
    return j;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
    fail(ErrorCode::ParseError, where + ": " + what);
}

inline std::size_t read_count(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) parse_fail(where, std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) parse_fail(where + "." + key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

inline double read_number(const json& v, const std::string& where) {
    if (!v.is_number()) parse_fail(where, "expected a number, got " + std::string(v.type_name()));
    return v.get<double>();
}

}  // namespace detail

/// `where` prefixes diagnostics, e.g. the file name.
inline ComplexMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
    if (!j.is_object()) detail::parse_fail(where, "expected an object");
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (j.contains("d")) {
        rows = cols = detail::read_count(j, "d", where);
    } else {
        rows = detail::read_count(j, "rows", where);
        cols = detail::read_count(j, "cols", where);
    }
    if (!j.contains("entries")) detail::parse_fail(where, "missing field 'entries'");
    const auto& e = j.at("entries");
    if (!e.is_array()) detail::parse_fail(where + ".entries", "expected an array");
    if (e.size() != rows * cols)
        detail::parse_fail(where + ".entries",
                           "expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(e.size()));
    std::vector<cplx> data;
    data.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string at = where + ".entries[" + std::to_string(i) + "]";
        const auto& z = e[i];
        if (!z.is_array() || z.size() != 2) detail::parse_fail(at, "expected [re, im]");
        const double re = detail::read_number(z[0], at + "[0]");
        const double im = detail::read_number(z[1], at + "[1]");
        if (!std::isfinite(re) || !std::isfinite(im)) detail::parse_fail(at, "non-finite value");
        data.emplace_back(re, im);
    }
    return ComplexMatrix(rows, cols, std::move(data));
}

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        detail::parse_fail(where, e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::ParseError, path + ": cannot open file for writing");
    out << text;
}

inline ComplexMatrix load_matrix(const std::string& path) { return matrix_from_json(read_json_file(path), path); }

inline void save_matrix(const std::string& path, const ComplexMatrix& m) {
    write_text_file(path, matrix_to_json(m).dump(2) + "\n");
}

/// Loads a Hermitian matrix, rejecting inputs that are not conjugate-symmetric to 1e-12 relative.
inline HermitianMatrix load_hermitian(const std::string& path) {
    const ComplexMatrix m = load_matrix(path);
    if (m.rows() != m.cols()) fail(ErrorCode::ParseError, path + ": matrix must be square");
    const double asym = max_abs(m - adjoint(m));
    if (asym > 1e-12 * std::max(1.0, max_abs(m)))
        fail(ErrorCode::ParseError, path + ": matrix is not Hermitian (max |A - A*| = " + std::to_string(asym) + ")");
    return HermitianMatrix(m);
}

inline json to_json(const InstanceSpec& s) {
    json j{{"d", s.d},
           {"k", s.k},
           {"spectrum", to_string(s.spectrum.kind)},
           {"mode", to_string(s.mode)},
           {"seed", s.seed}};
    switch (s.spectrum.kind) {
        case SpectrumKind::explicit_values: j["values"] = s.spectrum.values; break;
        case SpectrumKind::uniform: j["range"] = {s.spectrum.lo, s.spectrum.hi}; break;
        case SpectrumKind::clustered: j["gap"] = s.spectrum.gap; break;
        default:
            j["params"] = s.spectrum.params;
            j["theta"] = s.spectrum.theta;
    }
    if (s.mode == SubspaceMode::invariant_plus_perturbation) {
        j["epsilon"] = s.epsilon;
        j["selection"] = to_string(s.selection);
    }
    return j;
}

inline const char* to_string(Relation r) {
    return r == Relation::submajorization ? "submajorization" : "norm_inequality_family";
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const BoundReport& r) {
    json meta{{"d", r.metadata.d},
              {"k", r.metadata.k},
              {"p", r.metadata.p},
              {"theta_max", r.metadata.theta_max},
              {"delta", optional_number(r.metadata.delta)},
              {"delta_prime", optional_number(r.metadata.delta_prime)}};
    if (r.metadata.seed) meta["seed"] = *r.metadata.seed;
    json j{{"theorem", r.theorem_id},
           {"relation", to_string(r.relation)},
           {"must_hold", r.must_hold},
           {"holds", r.verdict.holds},
           {"worst_margin", r.verdict.worst_margin()},
           {"tol", r.verdict.tol},
           {"lhs", r.lhs},
           {"rhs", r.rhs},
           {"margins", r.verdict.prefix_margins},
           {"metadata", std::move(meta)}};
    if (!r.flags.empty()) j["flags"] = r.flags;
    if (!r.extras.empty()) j["extras"] = r.extras;
    return j;
}

}  // namespace ritz::harness
