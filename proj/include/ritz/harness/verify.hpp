#pragma once

// Batch verification: every applicable bound on every generated instance,
// aggregated into a RunReport in trial order.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ritz/bounds.hpp"
#include "ritz/error.hpp"
#include "ritz/harness/generate.hpp"
#include "ritz/harness/io.hpp"
#include "ritz/harness/rng.hpp"

namespace ritz::harness {

enum class Status { pass, fail, skip };

struct Outcome {
    std::string theorem_id;
    Status status = Status::pass;
    bool must_hold = true;
    std::string skip_reason;  // ErrorCode name of the failed precondition, or AngleAboveQuarterPi
    double worst_margin = 0.0;
    double tol = 0.0;
    std::vector<std::string> flags;
    std::optional<BoundReport> report;
};

/// Theorem ids evaluated per instance, in report order.
inline const std::vector<std::string>& theorem_ids() {
    static const std::vector<std::string> ids{
        "eigenlist_distance",
        "positive_T_distance",
        "mixed_cos",
        "mixed_tan",
        "mixed_cos_squared",
        "mixed_tan_squared",
        "residual_projection",
        "spread_partial",
        "apriori_mixed",
        "proposition_sin_squared",
        "apriori_invariant",
        "corollary_constant",
        "corollary_root8",
        "corollary_constant_invariant",
        "corollary_root8_invariant",
        "reference_sin",
        "reference_sin_squared",
        "reference_top_k",
        "conjecture_spread_sin",
        "conjecture_spread_sin_squared",
        "tan_classical",
        "tan_improved",
        "tan_corollary",
        "quadratic_aposteriori",
        "consecutive_eigenvalues",
        "sin_squared_identity",
    };
    return ids;
}

/// Failure codes that mean "precondition not met" rather than "bound violated".
inline bool is_precondition(ErrorCode c) {
    switch (c) {
        case ErrorCode::AnglesTooLarge:
        case ErrorCode::NotInvariant:
        case ErrorCode::NotTopK:
        case ErrorCode::NoSeparation:
        case ErrorCode::HypothesisFailed:
        case ErrorCode::DegenerateCut:
        case ErrorCode::FullSpace:
        case ErrorCode::SingularT:
        case ErrorCode::NotPositiveDefinite:
            return true;
        default:
            return false;
    }
}

/**
 * Verdict at a caller tolerance. `rel_tol` replaces the 1e-9 factor in each
 * report's tolerance; failures forced by side conditions (sign checks,
 * delta monotonicity) stay failures.
 */
inline bool holds_at(const BoundReport& r, double rel_tol) {
    const double tol = r.verdict.tol * (rel_tol / 1e-9);
    const bool forced = !r.verdict.holds && r.verdict.worst_margin() >= -r.verdict.tol;
    return !forced && r.verdict.worst_margin() >= -tol;
}

namespace detail {

class OutcomeSink {
public:
    explicit OutcomeSink(double rel_tol) : rel_tol_(rel_tol) {}

    void add(BoundReport r) {
        Outcome o;
        o.theorem_id = r.theorem_id;
        o.must_hold = r.must_hold;
        o.status = holds_at(r, rel_tol_) ? Status::pass : Status::fail;
        o.worst_margin = r.verdict.worst_margin();
        o.tol = r.verdict.tol;
        o.flags = r.flags;
        o.report = std::move(r);
        put(std::move(o));
    }

    void skip(const std::string& id, const std::string& reason) {
        Outcome o;
        o.theorem_id = id;
        o.status = Status::skip;
        o.skip_reason = reason;
        put(std::move(o));
    }

    void error(const std::string& id, const Error& e) {
        Outcome o;
        o.theorem_id = id;
        o.status = Status::fail;
        o.worst_margin = -std::numeric_limits<double>::infinity();
        o.flags.push_back(e.what());
        put(std::move(o));
    }

    /// Runs `body`; a precondition failure skips every id in `ids` not yet recorded.
    void guarded(std::initializer_list<const char*> ids, const std::function<void()>& body) {
        try {
            body();
        } catch (const Error& e) {
            for (const char* id : ids) {
                if (seen(id)) continue;
                if (is_precondition(e.code()))
                    skip(id, std::string(to_string(e.code())));
                else
                    error(id, e);
            }
        }
    }

    bool seen(const std::string& id) const { return index_.count(id) > 0; }

    std::vector<Outcome> finish() {
        std::vector<Outcome> out;
        for (const auto& id : theorem_ids()) {
            auto it = index_.find(id);
            if (it == index_.end())
                fail(ErrorCode::PreconditionViolated, "theorem " + id + " was neither evaluated nor skipped");
            out.push_back(std::move(outcomes_[it->second]));
        }
        return out;
    }

private:
    void put(Outcome o) {
        index_[o.theorem_id] = outcomes_.size();
        outcomes_.push_back(std::move(o));
    }

    double rel_tol_;
    std::vector<Outcome> outcomes_;
    std::map<std::string, std::size_t> index_;
};

inline bool is_top_k(const HermitianMatrix& a, const RayleighData& rx) {
    const auto lam = eigenvalues(a);
    const double tol = 1e-9 * ritz::detail::scale_of(a);
    for (std::size_t i = 0; i < rx.ritz_values.size(); ++i)
        if (std::abs(lam[i] - rx.ritz_values[i]) > tol) return false;
    return true;
}

}  // namespace detail

/// Evaluates every theorem id on one instance; result order follows theorem_ids().
inline std::vector<Outcome> evaluate_instance(const Instance& inst, double rel_tol = 1e-9) {
    const auto& a = inst.a;
    const auto& x = inst.x;
    const auto& y = inst.y;
    detail::OutcomeSink sink(rel_tol);

    const bool invariant = is_invariant(a, x, kInvarianceTol);
    const auto rx = rayleigh(a, x);
    const auto ry = rayleigh(a, y);

    sink.guarded({"eigenlist_distance", "positive_T_distance"}, [&] {
        const ComplexMatrix t = adjoint(x.basis()) * y.basis();
        sink.guarded({"eigenlist_distance"}, [&] { sink.add(eigenlist_distance_bound(rx.rho, ry.rho, t)); });
        const HermitianMatrix pos(ComplexMatrix::identity(t.rows()) + t * adjoint(t));
        sink.guarded({"positive_T_distance"}, [&] { sink.add(positive_T_distance_bound(rx.rho, ry.rho, pos)); });
    });
    sink.guarded({"mixed_cos"}, [&] { sink.add(mixed_bound_cos(a, x, y)); });
    sink.guarded({"mixed_tan"}, [&] { sink.add(mixed_bound_tan(a, x, y)); });
    sink.guarded({"mixed_cos_squared", "mixed_tan_squared"}, [&] {
        auto [c, t] = squared_mixed_bounds(a, x, y);
        sink.add(std::move(c));
        sink.add(std::move(t));
    });
    sink.guarded({"residual_projection"}, [&] { sink.add(residual_projection_bound(a, x, y)); });
    sink.guarded({"spread_partial"}, [&] { sink.add(apriori_spread_partial(a, x, y)); });
    sink.guarded({"apriori_mixed"}, [&] { sink.add(apriori_mixed_theorem(a, x, y)); });
    sink.guarded({"proposition_sin_squared"}, [&] { sink.add(sin_squared_residual_bound(a, x, y)); });
    sink.guarded({"apriori_invariant"}, [&] { sink.add(apriori_invariant_quadratic(a, x, y).theorem); });

    sink.guarded({"corollary_constant", "corollary_root8", "corollary_constant_invariant", "corollary_root8_invariant"},
                 [&] {
                     for (auto& r : apriori_constant_corollary(a, x, y, invariant)) sink.add(std::move(r));
                     if (!sink.seen("corollary_root8")) sink.skip("corollary_root8", "AngleAboveQuarterPi");
                     if (!sink.seen("corollary_constant_invariant"))
                         sink.skip("corollary_constant_invariant", "NotInvariant");
                     if (!sink.seen("corollary_root8_invariant"))
                         sink.skip("corollary_root8_invariant", invariant ? "AngleAboveQuarterPi" : "NotInvariant");
                 });

    sink.guarded({"reference_sin", "reference_sin_squared", "reference_top_k", "conjecture_spread_sin",
                  "conjecture_spread_sin_squared"},
                 [&] {
                     const auto regime = !invariant                 ? ReferenceRegime::general
                                         : detail::is_top_k(a, rx) ? ReferenceRegime::top_k
                                                                   : ReferenceRegime::invariant;
                     for (auto& r : fem_reference_bounds(a, x, y, regime)) sink.add(std::move(r));
                     if (regime == ReferenceRegime::general)
                         for (const char* id : {"reference_sin_squared", "conjecture_spread_sin_squared"})
                             sink.skip(id, "NotInvariant");
                     if (regime != ReferenceRegime::top_k)
                         sink.skip("reference_top_k", invariant ? "NotTopK" : "NotInvariant");
                 });

    sink.guarded({"tan_classical"}, [&] {
        const auto cert = dkn_certificate(a, x, y);
        if (!cert) fail(ErrorCode::NoSeparation, "ambient problem has no DKN separation");
        sink.add(tan_theta_classical(a, x, y, *cert));
    });
    sink.guarded({"tan_improved", "tan_corollary", "quadratic_aposteriori"}, [&] {
        auto res = tan_theta_improved(a, x, y);
        sink.add(std::move(res.improved));
        if (res.corollary)
            sink.add(std::move(*res.corollary));
        else
            sink.skip("tan_corollary", "NoSeparation");
        sink.add(quadratic_aposteriori(a, x, y, res.delta_prime));
    });
    sink.guarded({"consecutive_eigenvalues"}, [&] { sink.add(consecutive_eigenvalue_bound(a, y)); });
    sink.guarded({"sin_squared_identity"}, [&] {
        BoundReport r;
        r.theorem_id = "sin_squared_identity";
        r.verdict = sin_squared_identity_check(x, y);
        r.lhs = zero_padded(principal_angles(x, y).sines_squared(), x.ambient_dim());
        r.rhs = eigenvalues(HermitianMatrix(projector(x).matrix() *
                                            (ComplexMatrix::identity(x.ambient_dim()) - projector(y).matrix()) *
                                            projector(x).matrix()))
                    .values();
        r.metadata.d = x.ambient_dim();
        r.metadata.k = x.dim();
        sink.add(std::move(r));
    });
    return sink.finish();
}

struct TheoremTally {
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::map<std::string, std::size_t> skipped;
    bool must_hold = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> worst_trial;

    std::size_t skipped_total() const {
        std::size_t n = 0;
        for (const auto& [_, c] : skipped) n += c;
        return n;
    }
    std::size_t total() const { return passed + failed + skipped_total(); }
};

struct FlaggedInstance {
    std::size_t trial = 0;
    InstanceSpec spec;  // seed included; generate(spec) replays the instance
    std::string theorem_id;
    double margin = 0.0;
    bool violation = false;
    std::vector<std::string> flags;
};

struct RunReport {
    std::size_t instances = 0;
    std::map<std::string, TheoremTally> theorems;
    std::vector<FlaggedInstance> flagged;
    std::size_t threads = 1;
    double seconds = 0.0;

    /// No must-hold bound failed.
    bool passed() const {
        return std::all_of(theorems.begin(), theorems.end(),
                           [](const auto& kv) { return !kv.second.must_hold || kv.second.failed == 0; });
    }

    std::size_t violations() const {
        std::size_t n = 0;
        for (const auto& [_, t] : theorems)
            if (t.must_hold) n += t.failed;
        return n;
    }
};

/// RITZ_BOUNDS_THREADS if set and positive, else hardware concurrency.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("RITZ_BOUNDS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Spec of trial `index`: the base spec with a derived seed.
inline InstanceSpec trial_spec(const InstanceSpec& base, std::size_t index) {
    InstanceSpec s = base;
    if (!is_example(base.spectrum.kind)) s.seed = trial_seed(base.seed, index);
    return s;
}

/// Runs `trials` instances produced by `make_spec(i)`; aggregation is in trial order.
inline RunReport verify_specs(const std::function<InstanceSpec(std::size_t)>& make_spec, std::size_t trials,
                              double rel_tol = 1e-9, std::size_t threads = thread_count()) {
    require(trials >= 1, ErrorCode::SpecInvalid, "trials must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    std::vector<InstanceSpec> specs(trials);
    for (std::size_t i = 0; i < trials; ++i) specs[i] = make_spec(i);
    for (const auto& s : specs) validate(s);

    std::vector<std::vector<Outcome>> results(trials);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < trials; i = next++) {
            try {
                results[i] = evaluate_instance(generate(specs[i]), rel_tol);
            } catch (const Error& e) {
                Outcome o;
                o.theorem_id = "instance";
                o.status = Status::fail;
                o.flags.push_back(e.what());
                results[i] = {o};
            }
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    RunReport report;
    report.instances = trials;
    report.threads = threads;
    for (std::size_t i = 0; i < trials; ++i) {
        for (const auto& o : results[i]) {
            auto& tally = report.theorems[o.theorem_id];
            tally.must_hold = o.must_hold;
            if (o.status == Status::skip) {
                ++tally.skipped[o.skip_reason];
                continue;
            }
            (o.status == Status::pass ? tally.passed : tally.failed)++;
            if (o.worst_margin < tally.worst_margin) {
                tally.worst_margin = o.worst_margin;
                tally.worst_trial = i;
            }
            const bool violation = o.status == Status::fail && o.must_hold;
            if (violation || !o.flags.empty())
                report.flagged.push_back({i, specs[i], o.theorem_id, o.worst_margin, violation, o.flags});
        }
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

inline RunReport verify_all(const InstanceSpec& spec, std::size_t trials, double rel_tol = 1e-9,
                            std::size_t threads = thread_count()) {
    return verify_specs([&](std::size_t i) { return trial_spec(spec, i); }, trials, rel_tol, threads);
}

inline json to_json(const Outcome& o) {
    json j{{"theorem", o.theorem_id}};
    switch (o.status) {
        case Status::pass: j["status"] = "pass"; break;
        case Status::fail: j["status"] = "fail"; break;
        case Status::skip: j["status"] = "skip"; j["reason"] = o.skip_reason; break;
    }
    if (o.report) j["report"] = to_json(*o.report);
    else if (!o.flags.empty()) j["flags"] = o.flags;
    return j;
}

/// With include_timing = false the output is identical across runs of the same spec.
inline json to_json(const RunReport& r, bool include_timing = true) {
    json theorems = json::object();
    for (const auto& [id, t] : r.theorems) {
        json tj{{"passed", t.passed}, {"failed", t.failed}, {"skipped", t.skipped}, {"must_hold", t.must_hold}};
        tj["worst_margin"] = t.worst_trial ? json(t.worst_margin) : json(nullptr);
        if (t.worst_trial) tj["worst_trial"] = *t.worst_trial;
        theorems[id] = std::move(tj);
    }
    json flagged = json::array();
    for (const auto& f : r.flagged)
        flagged.push_back({{"trial", f.trial},
                           {"theorem", f.theorem_id},
                           {"margin", f.margin},
                           {"violation", f.violation},
                           {"flags", f.flags},
                           {"spec", to_json(f.spec)}});
    json j{{"instances", r.instances},
           {"passed", r.passed()},
           {"violations", r.violations()},
           {"theorems", std::move(theorems)},
           {"flagged", std::move(flagged)}};
    if (include_timing) j["timing"] = {{"seconds", r.seconds}, {"threads", r.threads}};
    return j;
}

}  // namespace ritz::harness
