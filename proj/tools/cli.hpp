#pragma once

// Command-line front end. `run` is kept separate from main() so the tests can
// drive it with in-memory streams.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hestonlaw/density.hpp"
#include "hestonlaw/domain.hpp"
#include "hestonlaw/factorize.hpp"
#include "hestonlaw/io.hpp"
#include "hestonlaw/mgf.hpp"
#include "hestonlaw/oracle.hpp"
#include "hestonlaw/validation.hpp"
#include "hestonlaw/wings.hpp"

namespace hestonlaw::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kConsistencyError = 2 };

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
};

struct RunReport {
    std::string command;
    json inputs = json::object();
    json outputs = json::object();
    std::vector<CheckRow> checks;
    std::optional<Table> table;  // tabular payload for --csv

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckRow& r) { return r.pass; });
    }

    json to_json() const {
        json j{{"command", command}, {"inputs", inputs}, {"outputs", outputs}};
        json rows = json::array();
        for (const auto& c : checks) {
            json row{{"name", c.name}, {"pass", c.pass}, {"measured", number(c.measured)}, {"tolerance", number(c.tolerance)}};
            if (!c.note.empty()) row["note"] = c.note;
            rows.push_back(row);
        }
        j["checks"] = rows;
        return j;
    }
};

namespace detail {

inline std::vector<double> parse_grid(const std::string& spec, const char* field) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ValidationError(field, "expected a:b:n, got '" + spec + "'");
    double a = 0, b = 0;
    long n = 0;
    try {
        std::size_t pos = 0;
        a = std::stod(parts[0], &pos);
        if (pos != parts[0].size()) throw std::invalid_argument(parts[0]);
        b = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument(parts[1]);
        n = std::stol(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::logic_error&) {
        throw ValidationError(field, "expected a:b:n with numeric entries, got '" + spec + "'");
    }
    if (n < 1) throw ValidationError(field, "point count must be >= 1");
    if (n > 1 && !(b > a)) throw ValidationError(field, "need a < b");
    return hestonlaw::detail::linspace(a, b, static_cast<int>(n));
}

inline std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(17) << v.get<double>();
        return os.str();
    }
    return v.dump();
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
}

// Flat key,value rendering for non-tabular reports under --csv.
inline Table key_value_table(const json& outputs) {
    Table t{{"key", "value"}, {}};
    for (const auto& [k, v] : outputs.flatten().items()) t.rows.push_back({json(k), v});
    return t;
}

inline json domain_json(const DomainReport& d) {
    return json{{"u_minus", number(d.u_minus)},
                {"u_plus", number(d.u_plus)},
                {"t0", d.t0 ? number(*d.t0) : json(nullptr)},
                {"u_star_minus", number(d.u_star_minus)},
                {"u_star_plus", number(d.u_star_plus)},
                {"case_label", to_string(d.case_label)}};
}

} // namespace detail

struct Options {
    std::string params_path;
    std::uint64_t seed = 20240611;
    double tol = SeriesTolerance{}.eps;
    bool csv = false;
    std::string out_path;

    // subcommand arguments
    std::vector<double> u_values;
    std::string grid;
    std::string form = "new";
    bool imag = false;
    std::string t_grid;
    double moment_n = 0.0;
    std::string deal_type;
    double df = 1.0;
    double delta = 0.25;
    double notional = 1.0;
    int n_terms = 200;
    int factors = 10;
    bool reference = false;
    long paths = 100000;
    int steps = 256;
    unsigned threads = 0;
    std::string level = "quick";
};

inline EvalContext load_context(const Options& o) {
    if (o.params_path.empty()) throw ValidationError("params", "--params <file.json> is required");
    const auto pf = load_params(o.params_path);
    SeriesTolerance tol;
    tol.eps = o.tol;
    return EvalContext(pf.params, pf.horizon, tol);
}

inline std::vector<double> u_list(const Options& o) {
    if (!o.grid.empty() && !o.u_values.empty()) throw ValidationError("u", "give either --u or --grid, not both");
    if (!o.grid.empty()) return detail::parse_grid(o.grid, "grid");
    if (o.u_values.empty()) throw ValidationError("u", "--u or --grid is required");
    return o.u_values;
}

inline RunReport cmd_cf(const Options& o) {
    if (o.form != "new" && o.form != "albrecher") throw ValidationError("form", "must be 'new' or 'albrecher'");
    const auto ctx = load_context(o);
    const auto us = u_list(o);
    RunReport r{"cf"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"form", o.form}, {"u", us}};
    std::vector<cplx> logs;
    if (o.form == "new") {
        logs = log_charfn_new_grid(ctx, us);
    } else {
        for (double u : us) logs.push_back(log_charfn_albrecher(ctx, u));
    }
    Table t{{"u", "re", "im"}, {}};
    if (o.imag) t.header.insert(t.header.end(), {"log_re", "log_im"});
    json rows = json::array();
    for (std::size_t i = 0; i < us.size(); ++i) {
        const cplx v = std::exp(logs[i]);
        json row{{"u", us[i]}, {"re", v.real()}, {"im", v.imag()}};
        std::vector<json> cells{us[i], v.real(), v.imag()};
        if (o.imag) {
            row["log_re"] = logs[i].real();
            row["log_im"] = logs[i].imag();
            cells.insert(cells.end(), {logs[i].real(), logs[i].imag()});
        }
        rows.push_back(row);
        t.rows.push_back(cells);
    }
    r.outputs["rows"] = rows;
    r.table = t;
    return r;
}

inline RunReport cmd_mgf(const Options& o) {
    const auto ctx = load_context(o);
    const auto us = u_list(o);
    const MgfEvaluator ev(ctx);
    RunReport r{"mgf"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"u", us}};
    Table t{{"u", "value"}, {}};
    json rows = json::array();
    for (double u : us) {
        const double v = ev(u);
        rows.push_back({{"u", u}, {"value", number(v)}});
        t.rows.push_back({u, number(v)});
    }
    r.outputs["rows"] = rows;
    r.table = t;
    return r;
}

inline RunReport cmd_domain(const Options& o) {
    const auto ctx = load_context(o);
    RunReport r{"domain"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}};
    if (o.t_grid.empty()) {
        r.outputs = detail::domain_json(abscissae(ctx));
        return r;
    }
    const auto ts = detail::parse_grid(o.t_grid, "t_grid");
    r.inputs["t_grid"] = ts;
    abscissa_curve(ctx, ts);  // validates the grid and checks monotonicity
    json reports = json::array();
    Table t{{"t", "u_minus", "u_plus", "t0", "u_star_minus", "u_star_plus", "case_label"}, {}};
    for (double tt : ts) {
        const auto d = abscissae(EvalContext(ctx.params, Horizon{tt}, ctx.tol));
        auto j = detail::domain_json(d);
        j["t"] = tt;
        reports.push_back(j);
        t.rows.push_back({tt, j["u_minus"], j["u_plus"], d.t0 ? number(*d.t0) : json(""), j["u_star_minus"],
                          j["u_star_plus"], j["case_label"]});
    }
    r.outputs["reports"] = reports;
    r.table = t;
    return r;
}

inline RunReport cmd_wings(const Options& o) {
    const auto ctx = load_context(o);
    const auto w = wing_report(ctx);
    RunReport r{"wings"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}};
    r.outputs = {{"beta_R", w.beta_R},
                 {"beta_L", w.beta_L},
                 {"u_star_plus", number(w.u_star_plus)},
                 {"u_star_minus", number(w.u_star_minus)},
                 {"omega", w.omega}};
    return r;
}

inline RunReport cmd_moment(const Options& o) {
    const auto ctx = load_context(o);
    RunReport r{"moment"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"n", o.moment_n}};
    r.outputs = {{"n", o.moment_n}, {"value", number(spot_moment(ctx, o.moment_n))}};
    return r;
}

inline RunReport cmd_deal(const Options& o) {
    const auto ctx = load_context(o);
    RunReport r{"deal"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"type", o.deal_type}};
    if (o.deal_type == "perf-note") {
        r.inputs["df"] = o.df;
        r.inputs["notional"] = o.notional;
        r.outputs = {{"price", number(performance_note_price(ctx, o.notional, o.df))}};
    } else if (o.deal_type == "in-arrears") {
        r.inputs["delta"] = o.delta;
        r.outputs = {{"fair_strike", number(inarrears_fair_strike(ctx, o.delta))}};
    } else {
        throw ValidationError("type", "must be 'perf-note' or 'in-arrears'");
    }
    return r;
}

inline RunReport cmd_factorize(const Options& o) {
    const auto ctx = load_context(o);
    const auto fz = build_factorization(ctx, o.n_terms);
    RunReport r{"factorize"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"n", o.n_terms}};
    r.outputs = {{"roots", fz.roots}, {"residues", fz.residues}, {"nu", fz.nu}, {"d", fz.d_shift},
                 {"xi", fz.xi},       {"c", fz.c_shift},        {"g", fz.g_coef}};
    Table t{{"n", "a_n", "b_n", "c_n", "g_n"}, {}};
    for (int i = 0; i < fz.n_terms; ++i)
        t.rows.push_back({i + 1, fz.roots[i], fz.residues[i], fz.c_shift[i], fz.g_coef[i]});
    r.table = t;
    return r;
}

inline RunReport cmd_density(const Options& o) {
    const auto ctx = load_context(o);
    if (o.grid.empty()) throw ValidationError("grid", "--grid xmin:xmax:npts is required");
    const auto xs = detail::parse_grid(o.grid, "grid");
    const GridSpec spec{xs.front(), xs.back(), static_cast<int>(xs.size())};
    validate(spec);
    if (o.factors < 1) throw ValidationError("factors", "must be >= 1");
    const auto fz = build_factorization(ctx, o.factors);
    const auto approx = approx_law(ctx, fz, o.factors, spec);
    RunReport r{"density"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"factors", o.factors}, {"grid", o.grid}};
    Table t{{"x", "approx"}, {}};
    std::optional<DensityGrid> ref;
    if (o.reference) {
        ref = reference_density(ctx, spec);
        t.header.push_back("reference");
    }
    for (int i = 0; i < spec.npts; ++i) {
        std::vector<json> row{approx.x_at(i), approx.values[i]};
        if (ref) row.push_back(ref->values[i]);
        t.rows.push_back(row);
    }
    r.outputs = {{"mass", approx.mass}, {"warnings", approx.warnings}};
    if (ref) {
        r.outputs["reference_mass"] = ref->mass;
        r.outputs["l1_distance"] = l1_distance(approx, *ref);
    }
    r.table = t;
    return r;
}

inline RunReport cmd_oracle(const Options& o) {
    const auto ctx = load_context(o);
    if (o.u_values.empty()) throw ValidationError("u", "--u is required");
    McConfig mc;
    mc.paths = o.paths;
    mc.steps_per_unit_time = o.steps;
    mc.seed = o.seed;
    mc.threads = o.threads;
    RunReport r{"oracle"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)},
                {"paths", o.paths},
                {"steps", o.steps},
                {"seed", o.seed},
                {"u", o.u_values},
                {"rng", kRngIdentity}};
    Table t{{"u", "estimate", "se"}, {}};
    json rows = json::array();
    for (const auto& e : mc_mgf(ctx, mc, o.u_values)) {
        rows.push_back({{"u", e.u}, {"estimate", number(e.estimate)}, {"se", number(e.se)}});
        t.rows.push_back({e.u, number(e.estimate), number(e.se)});
    }
    r.outputs["rows"] = rows;
    r.table = t;
    return r;
}

inline RunReport cmd_check(const Options& o) {
    if (o.level != "quick" && o.level != "full") throw ValidationError("level", "must be 'quick' or 'full'");
    const auto ctx = load_context(o);
    RunReport r{"check"};
    r.inputs = {{"params", params_to_json(ctx.params, ctx.horizon)}, {"level", o.level}, {"seed", o.seed}};
    r.checks = run_invariant_checks(ctx, o.level == "full", o.seed);
    const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckRow& c) { return c.pass; });
    r.outputs = {{"passed", passed}, {"total", r.checks.size()}};
    Table t{{"name", "pass", "measured", "tolerance"}, {}};
    for (const auto& c : r.checks) t.rows.push_back({c.name, c.pass, number(c.measured), number(c.tolerance)});
    r.table = t;
    return r;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heston log-spot law: MGF, domain, wings, factorization, densities"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--params", o.params_path, "parameter file (JSON)");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--tol", o.tol, "series tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--csv", o.csv, "write tabular output as CSV");
    app.add_option("--out", o.out_path, "write output to this file");

    auto add_u = [&](CLI::App* sub) {
        sub->add_option("--u", o.u_values, "evaluation points")->delimiter(',');
        sub->add_option("--grid", o.grid, "a:b:n");
    };
    auto* cf = app.add_subcommand("cf", "characteristic function");
    add_u(cf);
    cf->add_option("--form", o.form, "new|albrecher");
    cf->add_flag("--imag", o.imag, "also report the continuous log");
    auto* mg = app.add_subcommand("mgf", "moment generating function");
    add_u(mg);
    auto* dom = app.add_subcommand("domain", "abscissae of convergence");
    dom->add_option("--t-grid", o.t_grid, "a:b:n horizons");
    app.add_subcommand("wings", "Lee wing coefficients");
    auto* mom = app.add_subcommand("moment", "spot moment E[S_t^n]");
    mom->add_option("--n", o.moment_n, "moment order")->required();
    auto* deal = app.add_subcommand("deal", "second-moment deals");
    deal->add_option("--type", o.deal_type, "perf-note|in-arrears")->required();
    deal->add_option("--df", o.df, "discount factor");
    deal->add_option("--delta", o.delta, "year fraction");
    deal->add_option("--notional", o.notional, "notional");
    auto* fac = app.add_subcommand("factorize", "roots and residues of F");
    fac->add_option("--n", o.n_terms, "number of roots")->check(CLI::Range(1, 100000));
    auto* den = app.add_subcommand("density", "factor-convolution density");
    den->add_option("--factors", o.factors, "number of factors")->check(CLI::Range(1, 100000));
    den->add_option("--grid", o.grid, "xmin:xmax:npts")->required();
    den->add_flag("--reference", o.reference, "add the Fourier reference density");
    auto* ora = app.add_subcommand("oracle", "Monte Carlo MGF estimates");
    ora->add_option("--paths", o.paths, "paths")->check(CLI::PositiveNumber);
    ora->add_option("--steps", o.steps, "steps per unit time");
    ora->add_option("--threads", o.threads, "worker threads (0: all cores)");
    ora->add_option("--u", o.u_values, "evaluation points")->delimiter(',')->required();
    auto* chk = app.add_subcommand("check", "invariant suite");
    chk->add_option("--level", o.level, "quick|full");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUserError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        RunReport report;
        if (name == "cf") report = cmd_cf(o);
        else if (name == "mgf") report = cmd_mgf(o);
        else if (name == "domain") report = cmd_domain(o);
        else if (name == "wings") report = cmd_wings(o);
        else if (name == "moment") report = cmd_moment(o);
        else if (name == "deal") report = cmd_deal(o);
        else if (name == "factorize") report = cmd_factorize(o);
        else if (name == "density") report = cmd_density(o);
        else if (name == "oracle") report = cmd_oracle(o);
        else report = cmd_check(o);

        std::ofstream file;
        if (!o.out_path.empty()) {
            file.open(o.out_path);
            if (!file) throw ValidationError("out", "cannot open " + o.out_path);
        }
        std::ostream& sink = o.out_path.empty() ? out : file;
        if (name == "density" || o.csv) {
            detail::write_csv(sink, report.table ? *report.table : detail::key_value_table(report.outputs));
        } else {
            sink << std::setprecision(17) << report.to_json().dump(2) << "\n";
        }
        if (!report.all_pass()) {
            err << "check: " << report.checks.size() - report.outputs.value("passed", 0) << " invariant(s) failed\n";
            return kConsistencyError;
        }
        return kOk;
    } catch (const ConsistencyError& e) {
        err << "internal consistency error: " << e.what() << "\n";
        if (!e.diagnostics().empty()) err << e.diagnostics() << "\n";
        return kConsistencyError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kConsistencyError;
    }
}

} // namespace hestonlaw::cli
