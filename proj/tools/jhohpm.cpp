#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jhohpm/errors.hpp"
#include "jhohpm/oracle.hpp"
#include "jhohpm/paper_data.hpp"
#include "jhohpm/report.hpp"
#include "jhohpm/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace jhohpm;

namespace {

struct CaseArgs {
    std::string case_id;
    std::string case_file;
    std::string mode;
    std::string alpha;  // ad-hoc case instead of --case
    double H = 0.0;
};

struct RunArgs {
    bool paper_params = false;
    bool fit = false;
    double h = 1e-4;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::string optimizer = "lm";
    std::string quadrature = "gauss-legendre";
    int nodes = 30;
    int starts = 5;
    bool no_thermal = false;
};

// "pi/24", "0.1309", "pi" all accepted.
double parse_angle(const std::string& s) {
    const auto slash = s.find('/');
    const std::string head = s.substr(0, slash);
    double v = 0.0;
    try {
        v = (head == "pi") ? std::numbers::pi : std::stod(head);
        if (slash != std::string::npos) v /= std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParams, "cannot parse angle '" + s + "'");
    }
    return v;
}

void add_case_options(CLI::App* sub, CaseArgs& a, bool allow_adhoc) {
    sub->add_option("--case", a.case_id, "bundled case id (5.1 .. 5.8)");
    sub->add_option("--case-file", a.case_file, "case-file JSON");
    sub->add_option("--mode", a.mode, "thermal decomposition: paper | scale-consistent");
    if (allow_adhoc) {
        sub->add_option("--alpha", a.alpha, "ad-hoc case: channel half-angle (e.g. pi/24)");
        sub->add_option("--H", a.H, "ad-hoc case: Hartmann number");
    }
}

void add_run_options(CLI::App* sub, RunArgs& r) {
    sub->add_flag("--paper-params", r.paper_params, "plug in the paper's printed parameters/polynomials");
    sub->add_flag("--fit", r.fit, "fit the parameters (default)");
    sub->add_option("--h", r.h, "oracle RK4 step, 1/n");
    sub->add_option("--seed", r.seed, "seed for the random starts");
    sub->add_option("--out", r.out, "output directory");
    sub->add_option("--format", r.format, "comparison output: csv | json");
    sub->add_option("--optimizer", r.optimizer, "lm | nm");
    sub->add_option("--quadrature", r.quadrature, "gauss-legendre | collocation");
    sub->add_option("--nodes", r.nodes, "quadrature nodes");
    sub->add_option("--starts", r.starts, "number of random starts");
    sub->add_flag("--no-thermal", r.no_thermal, "velocity only");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot read " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, path + ": " + e.what());
    }
}

CaseDefinition resolve_case(const CaseArgs& a) {
    const int given = !a.case_id.empty() + !a.case_file.empty() + !a.alpha.empty();
    if (given != 1) throw Error(ErrorCode::InvalidParams, "give exactly one of --case, --case-file, --alpha");
    CaseDefinition c;
    if (!a.case_id.empty()) {
        c = bundled_case(a.case_id);
    } else if (!a.case_file.empty()) {
        c = case_from_json(read_json_file(a.case_file));
        // a file describing a bundled case still gets the bundled table columns
        for (const auto& b : bundled_cases())
            if (b.id == c.id && b.params.alpha == c.params.alpha && b.params.H == c.params.H) {
                c.velocity_table = b.velocity_table;
                c.thermal_table = b.thermal_table;
            }
    } else {
        const CommonParams cp = paper_common_params();
        c.id = "custom";
        c.params = {parse_angle(a.alpha), cp.Re, a.H, cp.Pr, cp.beta};
        c.params.validate();
    }
    if (!a.mode.empty()) c.mode = thermal_mode_from_string(a.mode);
    return c;
}

RunCaseOptions run_options(const RunArgs& r, ThermalMode mode) {
    if (r.paper_params && r.fit) throw Error(ErrorCode::InvalidParams, "--paper-params and --fit are exclusive");
    RunCaseOptions o;
    o.paper_params = r.paper_params;
    o.thermal = !r.no_thermal;
    o.h = r.h;
    steps_for(r.h);
    o.fit.seed = r.seed;
    o.fit.quadrature = quadrature_kind_from_string(r.quadrature);
    o.fit.quadrature_nodes = r.nodes;
    if (r.starts < 0) throw Error(ErrorCode::InvalidParams, "--starts must be >= 0");
    o.fit.random_starts = r.starts;
    if (r.optimizer == "lm") o.fit.optimizer = Optimizer::LevenbergMarquardt;
    else if (r.optimizer == "nm") o.fit.optimizer = Optimizer::NelderMead;
    else throw Error(ErrorCode::InvalidParams, "unknown optimizer '" + r.optimizer + "'");
    o.fit.thermal_mode = mode;
    if (r.format == "csv") o.format = OutputFormat::Csv;
    else if (r.format == "json") o.format = OutputFormat::Json;
    else throw Error(ErrorCode::InvalidParams, "unknown format '" + r.format + "'");
    return o;
}

std::pair<int, int> parse_range(const std::string& s) {
    try {
        const auto dash = s.find('-');
        if (dash == std::string::npos) {
            const int n = std::stoi(s);
            return {n, n};
        }
        return {std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParams, "cannot parse table range '" + s + "'");
    }
}

nlohmann::json run_summary(const RunCaseResult& r) {
    nlohmann::json j;
    j["case"] = r.definition.id;
    j["velocitySource"] = r.velocity_source;
    j["maxVelocityError"] = r.max_velocity_error;
    if (!r.thermal_source.empty()) {
        j["thermalSource"] = r.thermal_source;
        j["maxThermalError"] = r.max_thermal_error;
    }
    return j;
}

void emit_error(const std::string& code, const std::string& message) {
    nlohmann::json j{{"error", code}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OHPM solver for MHD Jeffery-Hamel flow and heat transfer"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");  // -h would clash with --h

    CaseArgs ca;
    RunArgs ra;

    auto* run = app.add_subcommand("run-case", "oracle, fit (or plug-in) and comparison for one case");
    add_case_options(run, ca, true);
    add_run_options(run, ra);

    std::string problem = "both";
    auto* fitc = app.add_subcommand("fit", "fit OHPM parameters and print the fit records");
    add_case_options(fitc, ca, true);
    add_run_options(fitc, ra);
    fitc->add_option("--problem", problem, "velocity | thermal | both");

    std::string quantity = "velocity";
    auto* orc = app.add_subcommand("oracle", "RK4 shooting solution on the full grid");
    add_case_options(orc, ca, true);
    orc->add_option("--h", ra.h, "RK4 step, 1/n");
    orc->add_option("--out", ra.out, "output directory (default: stdout)");
    orc->add_option("--quantity", quantity, "velocity | thermal");

    std::string tables = "1-16";
    auto* rep = app.add_subcommand("reproduce-tables", "regenerate the published tables and write findings.md");
    rep->add_option("--tables", tables, "table range, e.g. 1-16 or 3");
    rep->add_option("--h", ra.h, "oracle RK4 step");
    rep->add_option("--out", ra.out, "output directory (default: tables)");

    std::vector<std::string> alphas{"pi/24", "pi/36"};
    std::vector<double> Hs{0, 250, 500, 1000};
    SweepOptions so;
    auto* sw = app.add_subcommand("sweep", "run a grid of (alpha, H) cases");
    sw->add_option("--alpha", alphas, "channel half-angles")->delimiter(',');
    sw->add_option("--H", Hs, "Hartmann numbers")->delimiter(',');
    sw->add_option("--Re", so.Re);
    sw->add_option("--Pr", so.Pr);
    sw->add_option("--beta", so.beta);
    sw->add_option("--threads", so.threads, "worker threads (0 = all cores)");
    sw->add_option("--mode", ca.mode, "thermal decomposition: paper | scale-consistent");
    add_run_options(sw, ra);

    auto* plot = app.add_subcommand("export-plot-data", "101-point plot data for the bundled cases");
    add_case_options(plot, ca, false);
    add_run_options(plot, ra);

    auto* cf = app.add_subcommand("case-file", "print a bundled case as case-file JSON");
    cf->add_option("--case", ca.case_id)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("InvalidArguments", e.what());
        return 2;
    }

    try {
        if (run->parsed()) {
            const CaseDefinition c = resolve_case(ca);
            const RunCaseOptions o = run_options(ra, c.mode);
            const RunCaseResult r = run_case(c, o);
            write_case_outputs(r, o, ra.out.empty() ? fs::path(".") : fs::path(ra.out));
            std::cout << run_summary(r).dump(2) << '\n';
        } else if (fitc->parsed()) {
            if (ra.paper_params) throw Error(ErrorCode::InvalidParams, "fit does not take --paper-params");
            if (problem != "velocity" && problem != "thermal" && problem != "both")
                throw Error(ErrorCode::InvalidParams, "unknown problem '" + problem + "'");
            const CaseDefinition c = resolve_case(ca);
            RunCaseOptions o = run_options(ra, c.mode);
            o.thermal = problem != "velocity";
            const RunCaseResult r = run_case(c, o);
            nlohmann::json records = nlohmann::json::array();
            if (problem != "thermal")
                records.push_back(fit_record_json(c.id, Problem::Velocity, *r.velocity_fit, r.max_velocity_error));
            if (r.thermal_fit)
                records.push_back(fit_record_json(c.id, Problem::Thermal, *r.thermal_fit, r.max_thermal_error));
            if (!ra.out.empty()) write_case_outputs(r, o, ra.out);
            std::cout << records.dump(2) << '\n';
        } else if (orc->parsed()) {
            if (quantity != "velocity" && quantity != "thermal")
                throw Error(ErrorCode::InvalidParams, "unknown quantity '" + quantity + "'");
            const CaseDefinition c = resolve_case(ca);
            const OracleSolution v = shoot_velocity(c.params, ra.h);
            const OracleSolution s = quantity == "velocity" ? v : shoot_thermal(c.params, v, ra.h);
            if (ra.out.empty()) {
                write_oracle_csv(std::cout, s);
            } else {
                fs::create_directories(ra.out);
                std::ofstream os(fs::path(ra.out) / (c.id + "_oracle_" + quantity + ".csv"), std::ios::binary);
                if (!os) throw Error(ErrorCode::Io, "cannot write to " + ra.out);
                write_oracle_csv(os, s);
            }
        } else if (rep->parsed()) {
            steps_for(ra.h);
            const auto [first, last] = parse_range(tables);
            const fs::path dir = ra.out.empty() ? fs::path("tables") : fs::path(ra.out);
            const auto res = reproduce_tables(first, last, ra.h, dir);
            std::cout << "table,case,quantity,max_dev_numeric,max_dev_ohpm,numeric_flagged\n";
            for (const auto& t : res)
                std::cout << t.number << ',' << t.case_id << ',' << (t.quantity == TableQuantity::Velocity ? "F" : "theta")
                          << ',' << sci_number(t.max_dev_numeric) << ',' << sci_number(t.max_dev_ohpm) << ','
                          << (t.numeric_flagged ? "yes" : "no") << '\n';
        } else if (sw->parsed()) {
            std::vector<SweepPoint> grid;
            for (const auto& a : alphas)
                for (double H : Hs) grid.push_back({parse_angle(a), H});
            so.run = run_options(ra, ca.mode.empty() ? ThermalMode::ScaleConsistent : thermal_mode_from_string(ca.mode));
            if (ra.out.empty()) {
                sweep(grid, so, std::cout);
            } else {
                // the aggregated file is written only after every case has finished
                std::ostringstream agg;
                sweep(grid, so, agg, fs::path(ra.out) / "cases");
                std::ofstream os(fs::path(ra.out) / "sweep.csv", std::ios::binary);
                if (!os) throw Error(ErrorCode::Io, "cannot write to " + ra.out);
                os << agg.str();
            }
        } else if (plot->parsed()) {
            std::vector<CaseDefinition> cases;
            if (ca.case_id.empty() && ca.case_file.empty()) cases = bundled_cases();
            else cases.push_back(resolve_case(ca));
            const fs::path dir = ra.out.empty() ? fs::path("plots") : fs::path(ra.out);
            fs::create_directories(dir);
            for (auto c : cases) {
                if (!ca.mode.empty()) c.mode = thermal_mode_from_string(ca.mode);
                const RunCaseOptions o = run_options(ra, c.mode);
                const RunCaseResult r = run_case(c, o);
                std::ofstream fv(dir / (c.id + "_plot_velocity.csv"), std::ios::binary);
                if (!fv) throw Error(ErrorCode::Io, "cannot write to " + dir.string());
                write_plot_csv(fv, "F", r.F, r.velocity_oracle);
                if (!r.thermal_source.empty()) {
                    std::ofstream ft(dir / (c.id + "_plot_thermal.csv"), std::ios::binary);
                    write_plot_csv(ft, "theta", r.theta, r.thermal_oracle);
                }
            }
        } else if (cf->parsed()) {
            std::cout << case_to_json(bundled_case(ca.case_id)).dump(2) << '\n';
        }
    } catch (const Error& e) {
        emit_error(std::string(to_string(e.code())), e.what());
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        emit_error("Io", e.what());
        return exit_code_for(ErrorCode::Io);
    } catch (const std::exception& e) {
        emit_error("Internal", e.what());
        return 1;
    }
    return 0;
}
