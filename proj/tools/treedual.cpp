#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treedual/cones.hpp"
#include "treedual/dual.hpp"
#include "treedual/errors.hpp"
#include "treedual/io.hpp"
#include "treedual/polytope.hpp"
#include "treedual/primal.hpp"
#include "treedual/report.hpp"
#include "treedual/verify.hpp"

namespace {

using namespace treedual;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(12);
    for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

std::vector<double> geometric_grid(int n, double lo, double hi) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, n > 1 ? double(i) / (n - 1) : 0.5));
    return out;
}

struct Context {
    ScenarioFile file;
    MeasurePolytope polytope;
    ConePair cones;
    NumericPolicy policy;
};

int run(int argc, char** argv) {
    CLI::App app{
        "Utility-maximization duality on finite event-tree markets: solves the "
        "consumption problem u(x,q), its conjugate dual v(y,r), and verifies "
        "the duality relations between them."};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string format = "text";
    double x = 1.0, y = 1.0;
    std::vector<double> q, r;
    bool x_set = false, y_set = false;
    int grid = 0;
    NumericPolicy policy;

    app.add_option("--scenario", scenario_path, "scenario file (JSON)")
        ->required();
    app.add_option("--format", format, "text, json, or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--seed", policy.seed, "probe seed");
    app.add_option("--grid", grid, "grid size for w/wtilde and probe grids");
    app.add_option("--tol-feasibility", policy.feasibility_tol);
    app.add_option("--tol-stationarity", policy.stationarity_tol);
    app.add_option("--tol-gap", policy.gap_tol);
    app.add_option("--tol-membership", policy.membership_tol);
    app.add_flag("--serial,!--parallel", [&](std::int64_t) {},
                 "disable probe-level parallelism")
        ->each([&](const std::string&) { policy.parallel = false; });

    CLI::App* cmd_validate = app.add_subcommand("validate", "check scenario invariants");
    CLI::App* cmd_cones = app.add_subcommand("cones", "vertex measures and the cone pair");
    CLI::App* cmd_primal = app.add_subcommand("solve-primal", "u(x,q) and the optimal plan");
    CLI::App* cmd_dual = app.add_subcommand("solve-dual", "v(y,r) and the optimal deflator");
    CLI::App* cmd_w = app.add_subcommand("w", "value function w(x) = u(x,0) on a grid");
    CLI::App* cmd_wtilde = app.add_subcommand("wtilde", "dual value function on a grid");
    CLI::App* cmd_verify = app.add_subcommand("verify", "full duality verification suite");

    // let top-level options appear after the subcommand name
    for (CLI::App* sub : {cmd_validate, cmd_cones, cmd_primal, cmd_dual, cmd_w,
                          cmd_wtilde, cmd_verify})
        sub->fallthrough();

    cmd_primal->add_option("--x", x)->each([&](const std::string&) { x_set = true; });
    cmd_primal->add_option("--q", q, "claim quantities");
    cmd_dual->add_option("--y", y)->each([&](const std::string&) { y_set = true; });
    cmd_dual->add_option("--r", r, "claim dual variables");

    CLI11_PARSE(app, argc, argv);

    if (grid > 0) policy.grid_density = grid;
    try {
        policy.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    RunReport report;
    report.seed = policy.seed;
    auto t0 = std::chrono::steady_clock::now();

    Context ctx;
    ctx.policy = policy;
    try {
        ctx.file = load_scenario(scenario_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    report.digest = scenario_digest(ctx.file);
    report.violations = validate_scenario(ctx.file.scenario);
    auto field_violations = validate_field(ctx.file.field, ctx.file.scenario);
    report.violations.insert(report.violations.end(), field_violations.begin(),
                             field_violations.end());
    report.timings.emplace_back("load", seconds_since(t0));

    if (cmd_validate->parsed()) {
        report.command = "validate";
        std::cout << format_report(report, format);
        return report.ok() ? 0 : 1;
    }
    if (!report.violations.empty()) {
        std::cout << format_report(report, format);
        std::cerr << "error: scenario invariants violated\n";
        return 2;
    }

    t0 = std::chrono::steady_clock::now();
    try {
        ctx.polytope = enumerate_martingale_vertices(ctx.file.scenario, policy);
        ctx.cones = build_cones(ctx.polytope, policy);
    } catch (const ArbitrageError& e) {
        std::cerr << "error: the set of equivalent martingale measures is "
                     "empty; the no-arbitrage hypothesis fails ("
                  << e.what() << ")\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    report.vertex_count = ctx.polytope.count();
    report.has_equivalent = ctx.polytope.has_equivalent;
    report.L_open = ctx.cones.L_open;
    report.timings.emplace_back("geometry", seconds_since(t0));

    const auto& sc = ctx.file.scenario;
    const auto& field = ctx.file.field;
    const size_t N = static_cast<size_t>(sc.n_claims);

    t0 = std::chrono::steady_clock::now();
    try {
        if (cmd_cones->parsed()) {
            report.command = "cones";
            for (int j = 0; j < ctx.polytope.count(); ++j) {
                std::ostringstream os;
                os << "vertex measure " << j << ": leaves ("
                   << join(ctx.polytope.vertices[static_cast<size_t>(j)])
                   << "), claim prices ("
                   << join(ctx.polytope.claim_expectations[static_cast<size_t>(j)])
                   << ")";
                report.info.push_back(os.str());
            }
            for (const auto& ray : ctx.cones.K_rays)
                report.info.push_back("extreme ray of cl K: (" + join(ray) + ")");
            for (const auto& lin : ctx.cones.lineality)
                report.info.push_back("lineality direction: (" + join(lin) + ")");
            for (const auto& ray : ctx.cones.L_rays)
                report.info.push_back("extreme ray of cl L: (" + join(ray) + ")");
            report.checks.push_back(
                verify_geometry(sc, ctx.polytope, ctx.cones, 200, policy));
        } else if (cmd_primal->parsed()) {
            report.command = "solve-primal";
            std::vector<std::pair<double, std::vector<double>>> points;
            if (x_set || !q.empty() || ctx.file.query_x.empty()) {
                q.resize(N, 0.0);
                points.emplace_back(x, q);
            } else {
                for (size_t i = 0; i < ctx.file.query_x.size(); ++i) {
                    std::vector<double> qi =
                        i < ctx.file.query_q.size() ? ctx.file.query_q[i]
                                                    : std::vector<double>(N, 0.0);
                    points.emplace_back(ctx.file.query_x[i], qi);
                }
            }
            for (const auto& [px, pq] : points) {
                SolveRecord rec;
                rec.kind = "primal";
                rec.point.push_back(px);
                rec.point.insert(rec.point.end(), pq.begin(), pq.end());
                try {
                    auto sol = solve_primal(sc, ctx.polytope, field, px, pq, policy);
                    rec.value = sol.value;
                    rec.status = to_string(sol.status);
                    std::ostringstream os;
                    os << "optimal consumption at (" << join(rec.point) << "): ("
                       << join(sol.consumption.values) << "), supergradient y="
                       << sol.subgrad_y << " r=(" << join(sol.subgrad_r) << ")";
                    report.info.push_back(os.str());
                } catch (const DomainError&) {
                    rec.value = -std::numeric_limits<double>::infinity();
                    rec.status = "outside cl K: u = -inf by convention";
                }
                report.solves.push_back(rec);
            }
        } else if (cmd_dual->parsed()) {
            report.command = "solve-dual";
            std::vector<std::pair<double, std::vector<double>>> points;
            if (y_set || !r.empty() || ctx.file.query_y.empty()) {
                r.resize(N, 0.0);
                points.emplace_back(y, r);
            } else {
                for (size_t i = 0; i < ctx.file.query_y.size(); ++i) {
                    std::vector<double> ri =
                        i < ctx.file.query_r.size() ? ctx.file.query_r[i]
                                                    : std::vector<double>(N, 0.0);
                    points.emplace_back(ctx.file.query_y[i], ri);
                }
            }
            for (const auto& [py, pr] : points) {
                SolveRecord rec;
                rec.kind = "dual";
                rec.point.push_back(py);
                rec.point.insert(rec.point.end(), pr.begin(), pr.end());
                try {
                    auto sol = solve_dual(sc, ctx.polytope, ctx.cones, field, py,
                                          pr, policy);
                    rec.value = sol.value;
                    rec.status = to_string(sol.status);
                    std::ostringstream os;
                    os << "optimal deflator at (" << join(rec.point) << "): ("
                       << join(sol.deflator.values) << "), vertex weights ("
                       << join(sol.weights) << ")";
                    report.info.push_back(os.str());
                } catch (const DomainError&) {
                    rec.value = std::numeric_limits<double>::infinity();
                    rec.status = "outside cl L: v = +inf by convention";
                }
                report.solves.push_back(rec);
            }
        } else if (cmd_w->parsed() || cmd_wtilde->parsed()) {
            const bool primal_side = cmd_w->parsed();
            report.command = primal_side ? "w" : "wtilde";
            std::vector<double> pts = primal_side ? ctx.file.query_x : ctx.file.query_y;
            if (pts.empty())
                pts = geometric_grid(grid > 0 ? grid : policy.grid_density, 0.1, 10.0);
            for (double p : pts) {
                SolveRecord rec;
                rec.kind = report.command;
                rec.point.push_back(p);
                try {
                    rec.value = primal_side
                                    ? value_w(sc, ctx.polytope, field, p, policy)
                                    : value_wtilde(sc, ctx.polytope, field, p, policy);
                    rec.status = "optimal";
                } catch (const DomainError& e) {
                    rec.value = std::numeric_limits<double>::quiet_NaN();
                    rec.status = e.what();
                }
                report.solves.push_back(rec);
            }
        } else if (cmd_verify->parsed()) {
            report.command = "verify";
            auto suite = run_verification(sc, ctx.polytope, ctx.cones, field, policy);
            report.checks = suite.checks;
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.residual
                  << ")\n";
        return 2;
    }
    report.timings.emplace_back("solve", seconds_since(t0));

    std::cout << format_report(report, format);
    return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
