#pragma once

// Angle sweeps over the two worked example families.

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ritz/bounds.hpp"
#include "ritz/error.hpp"
#include "ritz/harness/generate.hpp"
#include "ritz/harness/io.hpp"

namespace ritz::harness {

enum class ExampleName { exa1, exa2 };

inline ExampleName parse_example_name(const std::string& s) {
    if (s == "exa1") return ExampleName::exa1;
    if (s == "exa2") return ExampleName::exa2;
    fail(ErrorCode::SpecInvalid, "unknown example '" + s + "' (expected exa1 or exa2)");
}

inline InstanceSpec example_spec(ExampleName name, double theta) {
    return name == ExampleName::exa1 ? exa1_spec(theta) : exa2_spec(theta);
}

/**
 * One row per angle.
 *
 * exa1: lhs = largest Ritz shift, classical_rhs / improved_rhs = leading
 * entries of the cos and tan mixed bounds, margin = smaller worst margin.
 * exa2: lhs = tan of the largest angle, classical_rhs = s_1(R_Y) / delta
 * (absent without separation), improved_rhs = s_1(P_{X+Y} R_Y) / delta',
 * margin = improved_rhs - lhs.
 */
struct SweepRow {
    double theta = 0.0;
    double lhs = 0.0;
    std::optional<double> classical_rhs;
    double improved_rhs = 0.0;
    std::optional<double> delta;
    std::optional<double> delta_prime;
    double margin = 0.0;
};

/// Comma-separated angles, or lo:hi:n for n evenly spaced points. Entries may be written as
/// multiples of pi, e.g. "pi/6" or "0.25pi".
inline std::vector<double> parse_grid(const std::string& text) {
    const auto bad = [&](const std::string& why) { fail(ErrorCode::GridInvalid, "grid '" + text + "': " + why); };
    const auto number = [&](std::string tok) {
        while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
        while (!tok.empty() && tok.back() == ' ') tok.pop_back();
        if (tok.empty()) bad("empty entry");
        double factor = 1.0;
        std::string body = tok;
        std::string denom;
        if (auto slash = tok.find('/'); slash != std::string::npos) {
            body = tok.substr(0, slash);
            denom = tok.substr(slash + 1);
        }
        if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
            factor = std::numbers::pi;
            body.erase(body.size() - 2);
            if (body.empty()) body = "1";
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(body, &used);
        } catch (...) {
            bad("cannot parse '" + tok + "'");
        }
        if (used != body.size()) bad("cannot parse '" + tok + "'");
        if (!denom.empty()) {
            std::size_t du = 0;
            double dv = 0.0;
            try {
                dv = std::stod(denom, &du);
            } catch (...) {
                bad("cannot parse '" + tok + "'");
            }
            if (du != denom.size() || dv == 0.0) bad("cannot parse '" + tok + "'");
            v /= dv;
        }
        return v * factor;
    };

    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) bad("range form is lo:hi:n");
        const double lo = number(parts[0]);
        const double hi = number(parts[1]);
        const double n = number(parts[2]);
        if (n < 1 || n != std::floor(n)) bad("point count must be a positive integer");
        const auto count = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < count; ++i)
            grid.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) grid.push_back(number(p));
    }
    if (grid.empty()) bad("no angles");
    return grid;
}

inline void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) fail(ErrorCode::GridInvalid, "grid is empty");
    for (double t : grid)
        if (!(t > 0.0 && t < std::numbers::pi / 2))
            fail(ErrorCode::GridInvalid, "angle " + std::to_string(t) + " is outside (0, pi/2)");
}

inline SweepRow sweep_row(ExampleName name, double theta) {
    const Instance inst = generate(example_spec(name, theta));
    SweepRow row;
    row.theta = theta;
    if (name == ExampleName::exa1) {
        const auto c = mixed_bound_cos(inst.a, inst.x, inst.y);
        const auto t = mixed_bound_tan(inst.a, inst.x, inst.y);
        row.lhs = c.lhs.front();
        row.classical_rhs = c.rhs.front();
        row.improved_rhs = t.rhs.front();
        row.margin = std::min(c.verdict.worst_margin(), t.verdict.worst_margin());
        if (const auto cert = dkn_certificate(inst.a, inst.x, inst.y)) row.delta = cert->delta;
        if (const auto cert = compressed_certificate(inst.a, inst.x, inst.y)) row.delta_prime = cert->delta;
        return row;
    }
    const auto res = tan_theta_improved(inst.a, inst.x, inst.y);
    row.lhs = principal_angles(inst.x, inst.y).tangents().front();
    row.improved_rhs = res.improved.extras.at("ratio");
    row.delta = res.delta;
    row.delta_prime = res.delta_prime;
    if (res.delta) row.classical_rhs = res.improved.extras.at("classical_ratio");
    row.margin = row.improved_rhs - row.lhs;
    return row;
}

inline std::vector<SweepRow> sweep_theta(ExampleName name, const std::vector<double>& grid) {
    validate_grid(grid);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double t : grid) rows.push_back(sweep_row(name, t));
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    const auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string();
        std::ostringstream os;
        os.precision(17);
        os << *v;
        return os.str();
    };
    std::ostringstream os;
    os.precision(17);
    os << "theta,lhs,classical_rhs,improved_rhs,delta,delta_prime,margin\n";
    for (const auto& r : rows)
        os << r.theta << ',' << r.lhs << ',' << cell(r.classical_rhs) << ',' << r.improved_rhs << ','
           << cell(r.delta) << ',' << cell(r.delta_prime) << ',' << r.margin << '\n';
    return os.str();
}

inline json sweep_json(const std::vector<SweepRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"theta", r.theta},
                       {"lhs", r.lhs},
                       {"classical_rhs", optional_number(r.classical_rhs)},
                       {"improved_rhs", r.improved_rhs},
                       {"delta", optional_number(r.delta)},
                       {"delta_prime", optional_number(r.delta_prime)},
                       {"margin", r.margin}});
    return out;
}

}  // namespace ritz::harness
