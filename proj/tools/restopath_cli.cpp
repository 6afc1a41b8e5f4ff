// restopath: solve, evaluate and serve energising-path scenarios.
//
// Exit codes: 0 when at least one valid scheme was found, 2 when none, 1 on
// any error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "restopath/restopath.h"
#include "service/server.hpp"
#include "service/store.hpp"

namespace {

struct CliError {
    std::string message;
};

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{std::string("cannot read ") + what + " file '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{"cannot write '" + path + "'"};
    out << text;
    if (!out) throw CliError{"cannot write '" + path + "'"};
}

void check(rp_status s) {
    if (s != RP_OK) throw CliError{std::string(rp_status_string(s)) + ": " + rp_last_error()};
}

struct Scenario {
    rp_scenario* p = nullptr;
    ~Scenario() { rp_scenario_free(p); }
};

struct Text {
    char* p = nullptr;
    ~Text() { rp_string_free(p); }
};

struct SolveFlags {
    std::string scenario;
    std::vector<int> targets;
    int k = 0;
    int dmax = 0;
    double k1 = 0.0;
    double lambda = 0.0;
    std::vector<double> weights;
    bool no_voltage = false;
    long node_limit = 2000000;
    std::string out;
    std::string dump_lp;
    bool json = false;
    bool quiet = false;
};

rp_solve_options make_options(const SolveFlags& f) {
    rp_solve_options o;
    rp_solve_options_init(&o);
    o.max_schemes = f.k;
    o.d_max = f.dmax;
    o.k1 = f.k1;
    o.lambda = f.lambda;
    if (!f.weights.empty()) {
        if (f.weights.size() != 5) throw CliError{"--weights needs exactly 5 values"};
        o.has_weights = 1;
        for (int i = 0; i < 5; ++i) o.weights[i] = f.weights[static_cast<std::size_t>(i)];
    }
    if (!f.targets.empty()) {
        o.has_targets = 1;
        o.targets = f.targets.data();
        o.n_targets = f.targets.size();
    }
    o.check_voltage = f.no_voltage ? 0 : 1;
    o.node_limit = f.node_limit;
    return o;
}

int progress_line(const rp_progress* p, void*) {
    std::fprintf(stderr, "  scheme %d/%d  %.2f MVar  (%d valid)\n", p->schemes_found, p->max_schemes,
                 p->last_objective_mvar, p->valid_found);
    return 0;
}

int finish(const SolveFlags& f, const std::string& report, int valid) {
    if (!f.out.empty()) write_file(f.out, report);
    if (f.json) {
        std::cout << report;
    } else {
        Text table;
        check(rp_report_table(report.c_str(), &table.p));
        std::cout << table.p;
    }
    return valid > 0 ? 0 : 2;
}

int run_solve(const SolveFlags& f) {
    Scenario sc;
    check(rp_scenario_from_json(read_file(f.scenario, "scenario").c_str(), &sc.p));
    rp_solve_options o = make_options(f);
    if (!f.dump_lp.empty()) {
        Text lp;
        check(rp_export_lp(sc.p, &o, &lp.p));
        write_file(f.dump_lp, lp.p);
    }
    if (!f.quiet) {
        o.progress = progress_line;
    }
    Text report;
    int valid = 0;
    check(rp_solve(sc.p, &o, &report.p, &valid));
    return finish(f, report.p, valid);
}

int run_evaluate(const SolveFlags& f, const std::string& trace_path) {
    Scenario sc;
    check(rp_scenario_from_json(read_file(f.scenario, "scenario").c_str(), &sc.p));
    const rp_solve_options o = make_options(f);
    Text report;
    int valid = 0;
    check(rp_evaluate(sc.p, read_file(trace_path, "trace").c_str(), &o, &report.p, &valid));
    return finish(f, report.p, valid);
}

void add_common(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--scenario", f.scenario, "Scenario document")->required();
    cmd->add_option("--targets", f.targets, "Target buses, e.g. 6,15,17")->delimiter(',');
    cmd->add_option("--dmax", f.dmax, "Radial depth limit")->check(CLI::PositiveNumber);
    cmd->add_option("--k1", f.k1, "Reactive margin factor")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--weights", f.weights, "Five index weights")->delimiter(',');
    cmd->add_option("--lambda", f.lambda, "Distinguishing coefficient")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", f.out, "Write the JSON report here");
    cmd->add_flag("--json", f.json, "Print the JSON report instead of the table");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energising-path search and ranking for power system restoration"};
    app.set_version_flag("--version", std::string(rp_version()));
    app.require_subcommand(1);

    SolveFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "Enumerate, check and rank energising paths");
    add_common(solve, solve_flags);
    solve->add_option("--k", solve_flags.k, "Number of schemes (M_S)")->check(CLI::PositiveNumber);
    solve->add_flag("--no-voltage-check", solve_flags.no_voltage, "Skip the power-flow voltage check");
    solve->add_option("--node-limit", solve_flags.node_limit, "Branch-and-bound node limit per solve")
        ->check(CLI::PositiveNumber);
    solve->add_option("--dump-lp", solve_flags.dump_lp, "Write the first path model in LP format");
    solve->add_flag("--quiet", solve_flags.quiet, "No progress lines on stderr");

    SolveFlags eval_flags;
    std::string trace_path;
    auto* evaluate = app.add_subcommand("evaluate", "Rank the schemes of an earlier trace or report");
    add_common(evaluate, eval_flags);
    evaluate->add_option("--trace", trace_path, "Trace or report document")->required();

    int port = 8080;
    std::string host = "127.0.0.1";
    std::string data_dir = "restopath-data";
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--data-dir", data_dir, "Persistence directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve) return run_solve(solve_flags);
        if (*evaluate) return run_evaluate(eval_flags, trace_path);
        if (*serve) {
            restopath::service::SessionStore store(data_dir);
            return restopath::service::serve(store, host, port) ? 0 : 1;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
