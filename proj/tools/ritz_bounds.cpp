// ritz_bounds: generate instances, verify bounds, reproduce the worked examples.
//
// Exit status: 0 all must-hold bounds pass, 1 a bound was violated, 2 bad input.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ritz/bounds.hpp"
#include "ritz/harness/generate.hpp"
#include "ritz/harness/io.hpp"
#include "ritz/harness/sweep.hpp"
#include "ritz/harness/verify.hpp"

namespace {

using namespace ritz;
using namespace ritz::harness;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kInputError = 2;

int emit_outcomes(const std::vector<Outcome>& outcomes, const std::string& label) {
    json j{{"instance", label}, {"results", json::array()}};
    bool ok = true;
    for (const auto& o : outcomes) {
        j["results"].push_back(to_json(o));
        if (o.status == Status::fail && o.must_hold) ok = false;
    }
    j["passed"] = ok;
    std::cout << j.dump(2) << '\n';
    return ok ? kPass : kViolation;
}

struct VerifyOptions {
    std::size_t d = 6;
    std::size_t k = 2;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::string mode = "random";
    double epsilon = 1e-2;
    std::string spectrum = "uniform";
    double gap = 1.0;
    bool timing = true;
};

InstanceSpec verify_spec(const VerifyOptions& o) {
    InstanceSpec s;
    s.d = o.d;
    s.k = o.k;
    s.seed = o.seed;
    s.epsilon = o.epsilon;
    if (o.mode == "random") s.mode = SubspaceMode::random_pair;
    else if (o.mode == "perturbed") s.mode = SubspaceMode::invariant_plus_perturbation;
    else if (o.mode == "orthogonal") s.mode = SubspaceMode::orthogonal_pair;
    else fail(ErrorCode::SpecInvalid, "unknown mode '" + o.mode + "'");
    if (o.spectrum == "uniform") {
        s.spectrum.kind = SpectrumKind::uniform;
        s.spectrum.lo = -1.0;
        s.spectrum.hi = 1.0;
    } else if (o.spectrum == "clustered") {
        s.spectrum.kind = SpectrumKind::clustered;
        s.spectrum.gap = o.gap;
    } else {
        fail(ErrorCode::SpecInvalid, "unknown spectrum '" + o.spectrum + "'");
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ritz value perturbation bounds: verification harness"};
    app.require_subcommand(1);

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Run every bound on seeded random instances");
    verify->add_option("--d", vo.d, "Ambient dimension")->capture_default_str();
    verify->add_option("--k", vo.k, "Subspace dimension")->capture_default_str();
    verify->add_option("--trials", vo.trials, "Number of instances")->capture_default_str();
    verify->add_option("--seed", vo.seed, "Base seed")->capture_default_str();
    verify->add_option("--tol", vo.tol, "Relative tolerance factor")->capture_default_str();
    verify->add_option("--mode", vo.mode, "random | perturbed | orthogonal")->capture_default_str();
    verify->add_option("--epsilon", vo.epsilon, "Perturbation size for perturbed mode")->capture_default_str();
    verify->add_option("--spectrum", vo.spectrum, "uniform | clustered")->capture_default_str();
    verify->add_option("--gap", vo.gap, "Cluster gap for clustered spectra")->capture_default_str();
    verify->add_flag("!--no-timing", vo.timing, "Omit timing fields for byte-stable output");

    std::string example_name = "exa1";
    std::string example_theta = "pi/3";
    auto* example = app.add_subcommand("example", "Evaluate every bound on a worked example");
    example->add_option("--name", example_name, "exa1 | exa2")->capture_default_str();
    example->add_option("--theta", example_theta, "Angle in radians, e.g. 0.5 or pi/6")->capture_default_str();

    std::string sweep_name = "exa2";
    std::string sweep_grid = "pi/12,pi/6,pi/4";
    std::string sweep_format = "csv";
    auto* sweep = app.add_subcommand("sweep", "Tabulate bounds over an angle grid");
    sweep->add_option("--name", sweep_name, "exa1 | exa2")->capture_default_str();
    sweep->add_option("--grid", sweep_grid, "Comma list or lo:hi:n; entries may use pi")->capture_default_str();
    sweep->add_option("--format", sweep_format, "csv | json")->capture_default_str();

    std::string matrix_path, x_path, y_path;
    auto* check = app.add_subcommand("check-file", "Evaluate every bound on (A, X, Y) read from JSON files");
    check->add_option("--matrix", matrix_path, "Hermitian A")->required();
    check->add_option("--x", x_path, "Orthonormal basis of X")->required();
    check->add_option("--y", y_path, "Orthonormal basis of Y")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    try {
        if (*verify) {
            const auto report = verify_all(verify_spec(vo), vo.trials, vo.tol);
            std::cout << to_json(report, vo.timing).dump(2) << '\n';
            return report.passed() ? kPass : kViolation;
        }
        if (*example) {
            const auto name = parse_example_name(example_name);
            const auto theta = parse_grid(example_theta);
            if (theta.size() != 1) fail(ErrorCode::SpecInvalid, "--theta takes a single angle");
            return emit_outcomes(evaluate_instance(generate(example_spec(name, theta.front()))),
                                 example_name + " theta=" + std::to_string(theta.front()));
        }
        if (*sweep) {
            const auto rows = sweep_theta(parse_example_name(sweep_name), parse_grid(sweep_grid));
            if (sweep_format == "csv") std::cout << sweep_csv(rows);
            else if (sweep_format == "json") std::cout << sweep_json(rows).dump(2) << '\n';
            else fail(ErrorCode::SpecInvalid, "unknown format '" + sweep_format + "'");
            return kPass;
        }
        if (*check) {
            const auto a = load_hermitian(matrix_path);
            const SubspaceBasis x(load_matrix(x_path));
            const SubspaceBasis y(load_matrix(y_path));
            return emit_outcomes(evaluate_instance({a, x, y}), matrix_path);
        }
    } catch (const ritz::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}
