// awf: analytic bounds and Monte Carlo estimates for boundary non-crossing
// probabilities of additive Wiener fields with piecewise-linear trends.
//
// Subcommands: project | bounds | simulate | sweep.  JSON goes to stdout
// (CSV for sweep), diagnostics to stderr.  Exit codes: 0 success, 1 runtime
// or convergence failure, 2 usage or validation failure.  AWF_THREADS caps
// the worker count; all randomness comes from the instance file's seed.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "awf/bounds.hpp"
#include "awf/cone.hpp"
#include "awf/json_io.hpp"
#include "awf/normal.hpp"
#include "awf/simulate.hpp"

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

awf::SimConfig require_sim(const awf::Instance& inst, const char* why) {
    if (!inst.sim)
        throw UsageError(std::string("instance has no \"sim\" section, required ") + why);
    return *inst.sim;
}

double single_gamma(const awf::Instance& inst) {
    if (inst.gammas.empty()) return 1.0;
    if (inst.gammas.size() > 1)
        throw UsageError("this command needs a scalar gamma, not a list");
    return inst.gammas.front();
}

// "<number>" or "mc" -> (value, stderr, source); mc runs the plain estimator
// with the supplied trend.
std::tuple<double, double, std::string> resolve_probability(
    const std::string& spec, const awf::Instance& inst, const awf::AdditiveFn& trend,
    const char* what) {
    if (spec == "mc") {
        const awf::SimConfig cfg = require_sim(inst, "to estimate probabilities");
        const awf::MCEstimate est = awf::noncross_mc(trend, inst.boundary, cfg);
        return {est.p_hat, est.stderr_value, "mc"};
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(spec, &used);
    } catch (const std::exception&) {
        throw UsageError(std::string(what) + " must be a number or \"mc\"");
    }
    if (used != spec.size())
        throw UsageError(std::string(what) + " must be a number or \"mc\"");
    if (!(value > 0.0 && value < 1.0))
        throw UsageError(std::string(what) + " must lie strictly inside (0,1)");
    return {value, 0.0, "explicit"};
}

int cmd_project(const std::string& path) {
    const awf::Instance inst = awf::parse_instance_file(path);
    const awf::ConeDecomposition dec = awf::project_additive(inst.trend);
    std::cout << awf::cone_decomposition_to_json(dec).dump(2) << "\n";
    return 0;
}

int cmd_bounds(const std::string& path, const std::string& p0_spec,
               const std::string& p_polar_spec) {
    const awf::Instance inst = awf::parse_instance_file(path);
    const double gamma = single_gamma(inst);
    const awf::AdditiveFn scaled =
        gamma == 1.0 ? inst.trend : awf::scale(inst.trend, gamma);

    const auto [p0, p0_se, p0_src] =
        resolve_probability(p0_spec, inst, awf::zero_like(inst.trend), "--p0");

    double pp = 0.0, pp_se = 0.0;
    std::string pp_src;
    if (p_polar_spec.empty()) {
        // P(f - majorant) equals P0 exactly when the polar part vanishes.
        const awf::ConeDecomposition dec = awf::project_additive(scaled);
        if (dec.norm_polar > 1e-12)
            throw UsageError(
                "--p-polar is required when the trend has a nonzero polar part");
        pp = p0;
        pp_se = p0_se;
        pp_src = p0_src;
    } else {
        const awf::ConeDecomposition dec = awf::project_additive(scaled);
        std::tie(pp, pp_se, pp_src) =
            resolve_probability(p_polar_spec, inst, dec.polar, "--p-polar");
    }

    const awf::BoundsReport rep = awf::make_bounds_report(
        inst.trend, inst.boundary, gamma, p0, p0_se, p0_src, pp, pp_se, pp_src);
    std::cout << awf::bounds_report_to_json(rep).dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& path, const std::string& method) {
    const awf::Instance inst = awf::parse_instance_file(path);
    const awf::SimConfig cfg = require_sim(inst, "to simulate");
    const double gamma = single_gamma(inst);
    const awf::AdditiveFn trend =
        gamma == 1.0 ? inst.trend : awf::scale(inst.trend, gamma);
    awf::MCEstimate est;
    if (method == "plain") {
        est = awf::noncross_mc(trend, inst.boundary, cfg);
    } else if (method == "girsanov") {
        est = awf::girsanov_estimator(trend, inst.boundary, cfg);
    } else {
        throw UsageError("--method must be plain or girsanov");
    }
    std::cout << awf::mc_estimate_to_json(est).dump() << "\n";
    return 0;
}

int cmd_sweep(const std::string& path, std::vector<double> gammas,
              const std::string& estimator) {
    const awf::Instance inst = awf::parse_instance_file(path);
    if (gammas.empty()) gammas = inst.gammas;
    if (gammas.empty())
        throw UsageError("sweep needs --gammas or a gamma list in the instance");

    awf::PEstimator est;
    if (estimator == "mc" || estimator == "girsanov") {
        const awf::SimConfig cfg = require_sim(inst, "to estimate probabilities");
        const bool plain = estimator == "mc";
        est = [cfg, plain](const awf::AdditiveFn& f, const awf::Boundary& u) {
            const awf::MCEstimate e = plain ? awf::noncross_mc(f, u, cfg)
                                            : awf::girsanov_estimator(f, u, cfg);
            return std::make_pair(e.p_hat, e.stderr_value);
        };
    } else if (estimator == "oracle") {
        if (inst.trend.dim() != 1 ||
            inst.boundary.kind != awf::Boundary::Kind::Constant)
            throw UsageError(
                "the oracle estimator needs d=1 and a constant boundary");
        const awf::ScalarPLF& comp = inst.trend.components.front();
        const awf::StepFunction st = awf::derivative_steps(comp);
        const double slope = st.slopes.front();
        for (std::size_t j = 0; j + 1 < st.slopes.size(); ++j)
            if (std::abs(st.slopes[j] - slope) > 1e-12)
                throw UsageError("the oracle estimator needs a linear trend");
        const double level = inst.boundary.c;
        const double T = comp.horizon();
        est = [level, T](const awf::AdditiveFn& f, const awf::Boundary&) {
            // f arrives pre-scaled; recover its slope from the first cell.
            const awf::StepFunction s = awf::derivative_steps(f.components.front());
            return std::make_pair(awf::oracle_drifted_noncross(level, s.slopes.front(), T),
                                  0.0);
        };
    } else {
        throw UsageError("--estimator must be mc, girsanov, or oracle");
    }

    const auto rows = awf::gamma_sweep(inst.trend, inst.boundary, gammas, est);
    for (const auto& row : rows)
        if (!row.flag.empty())
            std::cerr << "warning: gamma=" << row.gamma << " flagged " << row.flag
                      << (row.flag == "underflow"
                              ? " - use the closed form or importance sampling"
                              : "")
                      << "\n";
    std::cout << awf::sweep_csv(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "boundary non-crossing probabilities of additive Wiener fields: cone "
        "projections, analytic bounds, and Monte Carlo validation"};
    app.require_subcommand(1);

    std::string path, p0_spec = "mc", p_polar_spec, method = "plain";
    std::string gammas_csv, estimator = "mc";

    CLI::App* project = app.add_subcommand("project", "print the cone decomposition");
    project->add_option("instance", path, "instance JSON file")->required();

    CLI::App* bounds = app.add_subcommand("bounds", "print the analytic bound report");
    bounds->add_option("instance", path, "instance JSON file")->required();
    bounds->add_option("--p0", p0_spec, "baseline probability: a number or \"mc\"");
    bounds->add_option("--p-polar", p_polar_spec,
                       "polar-part probability: a number or \"mc\"");

    CLI::App* simulate = app.add_subcommand("simulate", "print a Monte Carlo estimate");
    simulate->add_option("instance", path, "instance JSON file")->required();
    simulate->add_option("--method", method, "plain or girsanov");

    CLI::App* sweep = app.add_subcommand("sweep", "gamma sweep as CSV");
    sweep->add_option("instance", path, "instance JSON file")->required();
    sweep->add_option("--gammas", gammas_csv, "comma-separated gamma list");
    sweep->add_option("--estimator", estimator, "mc, girsanov, or oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (project->parsed()) return cmd_project(path);
        if (bounds->parsed()) return cmd_bounds(path, p0_spec, p_polar_spec);
        if (simulate->parsed()) return cmd_simulate(path, method);
        if (sweep->parsed()) {
            std::vector<double> gammas;
            if (!gammas_csv.empty()) {
                std::istringstream ss(gammas_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (tok.empty()) throw UsageError("empty entry in --gammas");
                    std::size_t used = 0;
                    gammas.push_back(std::stod(tok, &used));
                    if (used != tok.size())
                        throw UsageError("--gammas must be a comma-separated number list");
                }
            }
            return cmd_sweep(path, std::move(gammas), estimator);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
