// Command-line driver: delay bounds, quanta optimization, DRR simulation,
// feasibility sweeps, and the minimum-bandwidth check, over JSON scenario
// files. All output is tab-separated text with full precision so external
// tools can replot traces and regions directly.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drrq/delay_bounds.hpp"
#include "drrq/geometry.hpp"
#include "drrq/model.hpp"
#include "drrq/optimize.hpp"
#include "drrq/scenario.hpp"
#include "drrq/simulate.hpp"
#include "drrq/sweep.hpp"

namespace {

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitValidation = 4;
constexpr int kExitInfeasible = 5;
constexpr int kExitNoConvergence = 6;

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

drrq::Scenario read_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw drrq::ParseError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return drrq::load_scenario(ss.str());
}

drrq::QuantaVector parse_quanta(const std::string& list)
{
    drrq::QuantaVector q;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            q.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw drrq::ParseError("bad quanta entry: '" + tok + "'");
        }
    }
    return q;
}

std::ostream& open_out(std::ofstream& file, const std::string& path)
{
    if (path.empty())
        return std::cout;
    file.open(path);
    if (!file)
        throw drrq::Error("cannot open output file: " + path);
    return file;
}

drrq::OptimizeResult run_optimizer(const drrq::SystemSpec& spec, const std::string& algorithm,
                                   std::optional<double> start, double tol, bool verify)
{
    std::string algo = algorithm;
    if (algo == "auto")
        algo = spec.size() == 2 ? "two-flow" : "n-flow";

    drrq::OptimizeResult res;
    if (algo == "two-flow")
        res = drrq::two_flow_optimize(spec, start.value_or(1.0), tol);
    else
        res = drrq::n_flow_optimize(spec, start.value_or(0.5), tol);

    if (verify && spec.size() == 2) {
        const drrq::OptimizeResult other = algo == "two-flow"
                                               ? drrq::n_flow_optimize(spec, 0.5, tol)
                                               : drrq::two_flow_optimize(spec, 1.0, tol);
        for (std::size_t i = 0; i < 2; ++i) {
            const double rel = std::abs(res.quanta[i] - other.quanta[i]) /
                               std::max(1.0, std::abs(res.quanta[i]));
            if (rel > 1e-6)
                throw drrq::NoConvergence("verification mismatch on flow " +
                                          std::to_string(i) + ": " + fmt(res.quanta[i]) +
                                          " vs " + fmt(other.quanta[i]));
        }
        std::cerr << "# verify: both algorithms agree within 1e-6\n";
    }
    return res;
}

void cmd_bound(const drrq::Scenario& sc, const drrq::QuantaVector& q, std::ostream& out)
{
    drrq::require_quanta(sc.spec, q);
    const bool fe = drrq::is_feasible_exact(sc.spec, q);
    const bool fm = drrq::is_feasible_modified(sc.spec, q);
    out << "flow\tquantum\tD\tD_hat\tf\tfeasible_exact\tfeasible_modified\n";
    for (std::size_t i = 0; i < sc.spec.size(); ++i) {
        const drrq::BoundReport rep = drrq::make_bound_report(sc.spec, q, i);
        out << i << '\t' << fmt(q[i]) << '\t' << fmt(rep.exact_bound) << '\t'
            << fmt(rep.modified_bound) << '\t' << fmt(rep.deviation) << '\t'
            << (fe ? "true" : "false") << '\t' << (fm ? "true" : "false") << '\n';
    }
}

void cmd_optimize(const drrq::Scenario& sc, const std::string& algorithm,
                  std::optional<double> start, double tol, bool verify,
                  const std::string& trace_path, std::ostream& out)
{
    const drrq::OptimizeResult res = run_optimizer(sc.spec, algorithm, start, tol, verify);
    out << "flow\tquantum\n";
    for (std::size_t i = 0; i < res.quanta.size(); ++i)
        out << i << '\t' << fmt(res.quanta[i]) << '\n';
    out << "objective\t" << fmt(res.objective) << '\n';
    out << "iterations\t" << res.trace.iterations << '\n';
    out << "residual\t" << fmt(res.trace.final_residual) << '\n';

    if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf)
            throw drrq::Error("cannot open trace file: " + trace_path);
        tf << "iteration\tvalue\n";
        for (std::size_t k = 0; k < res.trace.iterates.size(); ++k)
            tf << k << '\t' << fmt(res.trace.iterates[k]) << '\n';
    }
}

void cmd_simulate(const drrq::Scenario& sc, const std::string& quanta_list,
                  const std::string& algorithm, double tol, double horizon,
                  std::ostream& out)
{
    drrq::QuantaVector q;
    if (!quanta_list.empty()) {
        q = parse_quanta(quanta_list);
        drrq::require_quanta(sc.spec, q);
    } else {
        q = run_optimizer(sc.spec, algorithm, std::nullopt, tol, false).quanta;
    }
    const drrq::QuantaValidation val = drrq::validate_quanta(sc.spec, q, horizon);
    out << "flow\tquantum_used\tdeadline\tworst_delay\tmet\n";
    for (std::size_t i = 0; i < val.flows.size(); ++i) {
        const drrq::FlowValidation& fv = val.flows[i];
        out << i << '\t' << fv.quantum << '\t' << fmt(fv.deadline) << '\t'
            << fmt(fv.worst_delay) << '\t' << (fv.met_deadline ? "true" : "false") << '\n';
    }
    out << "rounds\t" << val.report.rounds << '\n';
    out << "flow_switches\t" << val.report.flow_switches << '\n';
    if (val.report.horizon_too_short)
        out << "warning\thorizon_too_short\n";
}

// Grid syntax: "I,J,IMIN:IMAX:ISTEP,JMIN:JMAX:JSTEP"; --fixed supplies the
// non-swept quanta for n > 2.
drrq::SweepGrid parse_grid(const std::string& text, const std::string& fixed_list)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        parts.push_back(tok);
    if (parts.size() != 4)
        throw drrq::ParseError("grid must be I,J,IMIN:IMAX:ISTEP,JMIN:JMAX:JSTEP");

    auto parse_range = [](const std::string& r, double& lo, double& hi, double& step) {
        std::stringstream rs(r);
        std::string a, b, c;
        if (!std::getline(rs, a, ':') || !std::getline(rs, b, ':') || !std::getline(rs, c))
            throw drrq::ParseError("bad grid range: '" + r + "'");
        lo = std::stod(a);
        hi = std::stod(b);
        step = std::stod(c);
    };

    drrq::SweepGrid grid;
    grid.flow_i = static_cast<std::size_t>(std::stoul(parts[0]));
    grid.flow_j = static_cast<std::size_t>(std::stoul(parts[1]));
    parse_range(parts[2], grid.i_min, grid.i_max, grid.i_step);
    parse_range(parts[3], grid.j_min, grid.j_max, grid.j_step);
    if (!fixed_list.empty())
        grid.fixed = parse_quanta(fixed_list);
    return grid;
}

void cmd_sweep(const drrq::Scenario& sc, const drrq::SweepGrid& grid, std::ostream& out)
{
    const drrq::SweepResult res = drrq::run_sweep(sc.spec, grid);
    out << "q_i\tq_j\texact_feasible\tmodified_feasible\tlinear_term_sign\tactive_branch\n";
    for (const drrq::SweepCell& cell : res.cells)
        out << fmt(cell.q_i) << '\t' << fmt(cell.q_j) << '\t'
            << (cell.exact_feasible ? "true" : "false") << '\t'
            << (cell.modified_feasible ? "true" : "false") << '\t'
            << cell.linear_term_sign << '\t' << "h" << cell.active_branch << '\n';
    out << "# midpoint_audit_exact\tviolations=" << res.exact_midpoint_violations
        << "\tpairs=" << res.exact_pairs_checked << '\n';
    out << "# midpoint_audit_modified\tviolations=" << res.modified_midpoint_violations
        << "\tpairs=" << res.modified_pairs_checked << '\n';
}

void cmd_check(const drrq::Scenario& sc, std::ostream& out, int& exit_code)
{
    const double required = drrq::required_capacity(sc.spec);
    const bool ok = drrq::necessary_condition(sc.spec);
    out << "required_capacity\t" << fmt(required) << '\n';
    out << "capacity\t" << fmt(sc.spec.capacity) << '\n';
    out << "feasible_necessary\t" << (ok ? "true" : "false") << '\n';
    if (!ok)
        exit_code = kExitInfeasible;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Worst-case delay bounds and optimal quanta for DRR scheduling"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string quanta_list;
    std::string out_path;
    std::string trace_path;
    std::string grid_text;
    std::string fixed_list;
    std::string algorithm = "auto";
    double tol = 1e-9;
    std::optional<double> start;
    double horizon = 0;
    bool verify = false;

    auto add_scenario = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_path, "output file (default stdout)");
    };

    CLI::App* bound = app.add_subcommand("bound", "delay bounds at given quanta");
    add_scenario(bound);
    bound->add_option("--quanta", quanta_list, "comma-separated quanta in bits")->required();

    CLI::App* optimize = app.add_subcommand("optimize", "maximum-sum quanta meeting deadlines");
    add_scenario(optimize);
    optimize->add_option("--algorithm", algorithm, "auto|two-flow|n-flow")
        ->check(CLI::IsMember({"auto", "two-flow", "n-flow"}));
    optimize->add_option("--start", start, "initial iterate");
    optimize->add_option("--tol", tol, "convergence tolerance");
    optimize->add_option("--trace", trace_path, "write iterate trace to this file");
    optimize->add_flag("--verify", verify, "cross-check both solvers (n = 2)");

    CLI::App* simulate = app.add_subcommand("simulate", "packet-level DRR validation");
    add_scenario(simulate);
    simulate->add_option("--quanta", quanta_list,
                         "comma-separated quanta; optimized when omitted");
    simulate->add_option("--algorithm", algorithm, "auto|two-flow|n-flow")
        ->check(CLI::IsMember({"auto", "two-flow", "n-flow"}));
    simulate->add_option("--tol", tol, "optimizer tolerance");
    simulate->add_option("--horizon", horizon, "simulation horizon in seconds");

    CLI::App* sweep = app.add_subcommand("sweep", "feasibility classification over a quanta grid");
    add_scenario(sweep);
    sweep->add_option("--grid", grid_text, "I,J,IMIN:IMAX:ISTEP,JMIN:JMAX:JSTEP")->required();
    sweep->add_option("--fixed", fixed_list, "fixed quanta for non-swept flows");

    CLI::App* check = app.add_subcommand("check", "minimum-bandwidth necessary condition");
    add_scenario(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    int exit_code = kExitOk;
    try {
        const drrq::Scenario sc = read_scenario(scenario_path);
        std::ofstream file;
        std::ostream& out = open_out(file, out_path);
        if (bound->parsed())
            cmd_bound(sc, parse_quanta(quanta_list), out);
        else if (optimize->parsed())
            cmd_optimize(sc, algorithm, start, tol, verify, trace_path, out);
        else if (simulate->parsed())
            cmd_simulate(sc, quanta_list, algorithm, tol, horizon, out);
        else if (sweep->parsed())
            cmd_sweep(sc, parse_grid(grid_text, fixed_list), out);
        else if (check->parsed())
            cmd_check(sc, out, exit_code);
    } catch (const drrq::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const drrq::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const drrq::InfeasibleSystem& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const drrq::NoConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const drrq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return exit_code;
}
