#pragma once

// Command-line driver. Every subcommand reads JSON inputs, runs one engine
// operation, and emits a deterministic report (JSON by default; CSV for the
// tabular commands). Exit codes: 0 success, 2 validation/usage error,
// 3 numeric non-convergence; verify-all exits 1 when any invariant fails.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "errors.hpp"
#include "info_geom.hpp"
#include "involution.hpp"
#include "io.hpp"
#include "maxent.hpp"
#include "measure.hpp"
#include "second_law.hpp"
#include "transfer.hpp"
#include "verify.hpp"
#include "version.hpp"

namespace thermoform {
namespace cli {

struct Opts {
    std::string potential, jacobian, jacobian2, measure, measure2, matrix, family;
    std::string out, format, theta_grid, beta_grid, target, z;
    std::uint64_t seed = 0;
    unsigned n_push = 1, n_orbit = 5, n_fisher = 0, probe = 2;
    unsigned index = 0;
    double step = 1e-3, tol = 1e-12, v0 = 0;
};

namespace detail {

inline void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

inline json new_report(const Opts& o) {
    json j;
    j["engine"] = engine_version;
    j["seed"] = o.seed;
    return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// accept exactly one of --measure (measure file) or --matrix (column-
// stochastic chain, turned into its stationary measure)
inline SuitableMeasure primary_measure(const Opts& o) {
    require(!o.measure.empty() || !o.matrix.empty(),
            "need --measure or --matrix to supply the input measure");
    require(o.measure.empty() || o.matrix.empty(),
            "give only one of --measure / --matrix");
    if (!o.matrix.empty()) {
        auto [p, d] = load_matrix(o.matrix);
        return markov_invariant(p, d);
    }
    return load_measure(o.measure);
}

inline std::string resolved_format(const Opts& o, const std::string& fallback) {
    std::string f = o.format.empty() ? fallback : o.format;
    require(f == "json" || f == "csv", "--format must be json or csv");
    return f;
}

inline int run_pressure(const Opts& o) {
    emit(format_double(pressure(load_potential(o.potential))) + "\n", o.out);
    return 0;
}

inline int run_equilibrium(const Opts& o) {
    FiniteMemoryFn a = load_potential(o.potential);
    PerronData pd = perron(a);
    json j = measure_to_json(equilibrium_with(a, pd));
    j["pressure"] = std::log(pd.lambda);
    j["engine"] = engine_version;
    j["seed"] = o.seed;
    emit(dump(j), o.out);
    return 0;
}

inline int run_entropy(const Opts& o) {
    SuitableMeasure mu = primary_measure(o);
    json j = new_report(o);
    j["entropy"] = entropy(mu);
    j["non_invariant"] = !is_invariant(mu);
    emit(dump(j), o.out);
    return 0;
}

inline int run_kl(const Opts& o) {
    SuitableMeasure mu1 = primary_measure(o);
    SuitableMeasure mu2 = load_measure(o.measure2);
    json j = new_report(o);
    j["kl"] = kl(mu1, mu2);
    emit(dump(j), o.out);
    return 0;
}

inline int run_push(const Opts& o) {
    FiniteMemoryFn log_j = load_potential(o.jacobian);
    SuitableMeasure mu = iterate_push(log_j, primary_measure(o), o.n_push);
    json j = measure_to_json(mu);
    j["engine"] = engine_version;
    j["seed"] = o.seed;
    emit(dump(j), o.out);
    return 0;
}

inline int run_orbit(const Opts& o) {
    FiniteMemoryFn log_j = load_potential(o.jacobian);
    std::vector<TraceRow> rows =
        weak_convergence_trace(log_j, primary_measure(o), o.n_orbit, o.probe);
    if (resolved_format(o, "json") == "csv") {
        std::string text = "n,deviation,kl_to_equilibrium\n";
        for (const TraceRow& r : rows)
            text += std::to_string(r.n) + "," + format_double(r.deviation) + "," +
                    format_double(r.kl_to_equilibrium) + "\n";
        emit(text, o.out);
        return 0;
    }
    json j = new_report(o);
    j["probe_depth"] = o.probe;
    j["rows"] = json::array();
    for (const TraceRow& r : rows)
        j["rows"].push_back({{"n", r.n},
                             {"deviation", r.deviation},
                             {"kl_to_equilibrium", r.kl_to_equilibrium}});
    emit(dump(j), o.out);
    return 0;
}

inline int run_second_law(const Opts& o) {
    FiniteMemoryFn log_j = load_potential(o.jacobian);
    SecondLawReport rep = second_law_v1(log_j, primary_measure(o));
    json j = new_report(o);
    j["h1"] = rep.h1;
    j["h3"] = rep.h3;
    j["pressure_log_j2"] = rep.pressure_log_j2;
    j["ac_residual"] = rep.ac_residual;
    j["cross_entropy_residual"] = rep.cross_entropy_residual;
    j["entropy_pass"] = rep.h3 >= rep.h1 - 1e-12;
    j["pressure_pass"] = std::abs(rep.pressure_log_j2) < 1e-10;
    j["absolute_continuity_pass"] = rep.ac_residual < 1e-10;
    j["cross_entropy_pass"] = rep.cross_entropy_residual < 1e-10;
    j["pass"] = j["entropy_pass"].get<bool>() && j["pressure_pass"].get<bool>() &&
                j["absolute_continuity_pass"].get<bool>() &&
                j["cross_entropy_pass"].get<bool>();
    j["tolerances"] = {{"entropy", 1e-12},
                       {"pressure", 1e-10},
                       {"absolute_continuity", 1e-10},
                       {"cross_entropy", 1e-10}};
    emit(dump(j), o.out);
    return 0;
}

inline int run_rrty(const Opts& o) {
    FiniteMemoryFn log_j = load_potential(o.jacobian);
    SuitableMeasure mu = primary_measure(o);
    double margin = rrty_margin(log_j, mu);
    double dh = entropy_change(log_j, mu);
    json j = new_report(o);
    j["margin"] = margin;
    j["entropy_change"] = dh;
    j["margin_nonnegative"] = margin >= 0;
    j["entropy_nondecreasing"] = dh >= -1e-12;
    j["tolerances"] = {{"entropy_change", 1e-12}};
    emit(dump(j), o.out);
    return 0;
}

inline int run_fisher(const Opts& o) {
    SuitableMeasure mu = primary_measure(o);
    FiniteMemoryFn eta = load_potential(o.potential);
    TangentVector t = tangent_project(mu, eta);
    json j = new_report(o);
    j["fisher"] = fisher_information(t);
    j["asymptotic_variance"] = asymptotic_variance(mu, t.xi);
    j["pressure_curvature"] = pressure_derivatives(mu.log_irn, t.xi, o.step).second;
    if (o.n_fisher > 0) {
        j["n"] = o.n_fisher;
        j["fisher_at_time_n"] = fisher_at_time_n(mu, t.xi, o.n_fisher, o.step);
    }
    emit(dump(j), o.out);
    return 0;
}

inline int run_kl_taylor(const Opts& o) {
    SuitableMeasure mu1 = primary_measure(o);
    SuitableMeasure mu2 = load_measure(o.measure2);
    FiniteMemoryFn eta = load_potential(o.potential);
    TangentVector t = tangent_project(mu2, eta);
    std::vector<double> thetas =
        parse_grid(o.theta_grid.empty() ? "-0.01,-0.005,0.005,0.01" : o.theta_grid);
    KlTaylorTable table = kl_taylor(mu1, mu2, t.xi, thetas);
    if (resolved_format(o, "csv") == "csv") {
        std::string text = "theta,kl,slope_pred,curvature_pred\n";
        for (const KlTaylorRow& r : table.rows)
            text += format_double(r.theta) + "," + format_double(r.kl) + "," +
                    format_double(r.slope_pred) + "," + format_double(r.curvature_pred) +
                    "\n";
        emit(text, o.out);
        return 0;
    }
    json j = new_report(o);
    j["slope"] = table.slope;
    j["curvature"] = table.curvature;
    j["strongly_relaxing"] = table.strongly_relaxing;
    j["rows"] = json::array();
    for (const KlTaylorRow& r : table.rows)
        j["rows"].push_back({{"theta", r.theta},
                             {"kl", r.kl},
                             {"slope_pred", r.slope_pred},
                             {"curvature_pred", r.curvature_pred}});
    emit(dump(j), o.out);
    return 0;
}

inline int run_maxent(const Opts& o) {
    PotentialFamily fam = load_family(o.family);
    require(!o.target.empty(), "need --target with one value per constraint");
    std::vector<double> x = parse_grid(o.target);
    std::vector<double> zs = maxent_solve(fam, x, o.tol);
    double pres = pressure_surface(fam, zs);
    double alpha = pres;
    for (std::size_t i = 0; i < x.size(); ++i) alpha -= x[i] * zs[i];
    json j = new_report(o);
    j["z"] = zs;
    j["pressure"] = pres;
    j["alpha"] = alpha;
    j["tolerances"] = {{"gradient", o.tol}};
    emit(dump(j), o.out);
    return 0;
}

inline int run_susceptibility(const Opts& o) {
    PotentialFamily fam = load_family(o.family);
    std::vector<double> zs;
    if (o.z.empty())
        zs = std::vector<double>(fam.constraints.size(), 0.0);
    else
        zs = parse_grid(o.z);
    SusceptibilityPair s = susceptibility(fam, zs, o.step);
    std::size_t m = s.m;
    json j = new_report(o);
    auto nested = [m](const std::vector<double>& flat) {
        json rows = json::array();
        for (std::size_t r = 0; r < m; ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < m; ++c) row.push_back(flat[r * m + c]);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["sp"] = nested(s.sp);
    j["se"] = nested(s.se);
    j["inverse_residual"] = s.inverse_residual;
    emit(dump(j), o.out);
    return 0;
}

inline int run_gibbs(const Opts& o) {
    FiniteMemoryFn h = load_potential(o.potential);
    std::vector<double> grid =
        parse_grid(o.beta_grid.empty() ? "logspace:0.1:10:20" : o.beta_grid);
    std::vector<GibbsRow> rows = gibbs_equation(h, grid, o.step);
    if (resolved_format(o, "csv") == "csv") {
        std::string text = "beta,energy,entropy,dh_de\n";
        for (const GibbsRow& r : rows)
            text += format_double(r.beta) + "," + format_double(r.energy) + "," +
                    format_double(r.entropy_v) + "," + format_double(r.dh_de) + "\n";
        emit(text, o.out);
        return 0;
    }
    json j = new_report(o);
    j["rows"] = json::array();
    for (const GibbsRow& r : rows)
        j["rows"].push_back({{"beta", r.beta},
                             {"energy", r.energy},
                             {"entropy", r.entropy_v},
                             {"dh_de", r.dh_de}});
    emit(dump(j), o.out);
    return 0;
}

inline int run_thermo_op(const Opts& o) {
    FiniteMemoryFn j1 = load_potential(o.jacobian);
    FiniteMemoryFn j2 = load_potential(o.jacobian2);
    ThermoAccount acc = thermo_operation_accounting(j1, j2, primary_measure(o));
    json j = new_report(o);
    j["E1"] = acc.E1;
    j["E3"] = acc.E3;
    j["dQ"] = acc.dQ;
    j["dW"] = acc.dW;
    j["dU"] = acc.dU;
    j["first_law_residual"] = std::abs(acc.dW + acc.dQ - acc.dU);
    j["tolerances"] = {{"first_law", 1e-12}};
    emit(dump(j), o.out);
    return 0;
}

inline int run_energy_rate(const Opts& o) {
    PotentialFamily fam = load_family(o.family);
    require(!o.target.empty() || !o.z.empty(),
            "need --target (solve for coefficients) or --z (fixed coefficients)");
    require(o.target.empty() || o.z.empty(), "give only one of --target / --z");
    std::optional<std::vector<double>> x;
    std::vector<double> zs;
    if (!o.target.empty())
        x = parse_grid(o.target);
    else
        zs = parse_grid(o.z);
    EnergyRate rate = energy_rate_decomposition(fam, o.index, x, zs, o.v0, o.step);
    json j = new_report(o);
    j["dW"] = rate.dW;
    j["dQ"] = rate.dQ;
    j["dU"] = rate.dU;
    j["pressure_p"] = rate.pressure_p;
    j["first_law_residual"] = std::abs(rate.dW + rate.dQ - rate.dU);
    j["tolerances"] = {{"first_law", 1e-8}};
    emit(dump(j), o.out);
    return 0;
}

inline int run_entropy_production(const Opts& o) {
    FiniteMemoryFn a = load_potential(o.potential);
    json j;
    j["e_p"] = entropy_production(a);
    j["symmetric_detected"] = is_symmetric_potential(a);
    j["depth"] = a.depth;
    j["engine"] = engine_version;
    j["seed"] = o.seed;
    emit(dump(j), o.out);
    return 0;
}

inline int run_verify(const Opts& o) {
    std::vector<CheckRow> rows = verify_all(o.seed);
    bool all_pass = true;
    for (const CheckRow& r : rows) all_pass = all_pass && r.pass;
    if (resolved_format(o, "json") == "csv") {
        std::string text = "check,residual,inputs,tolerance,pass\n";
        for (const CheckRow& r : rows)
            text += r.check + "," + format_double(r.residual) + "," +
                    csv_escape(r.inputs) + "," + format_double(r.tolerance) + "," +
                    (r.pass ? "true" : "false") + "\n";
        emit(text, o.out);
    } else {
        json j = new_report(o);
        j["all_pass"] = all_pass;
        j["checks"] = json::array();
        for (const CheckRow& r : rows)
            j["checks"].push_back({{"check", r.check},
                                   {"residual", r.residual},
                                   {"inputs", r.inputs},
                                   {"tolerance", r.tolerance},
                                   {"pass", r.pass}});
        emit(dump(j), o.out);
    }
    return all_pass ? 0 : 1;
}

} // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"thermoform: thermodynamic formalism on finite-memory shift spaces"};
    app.require_subcommand(1);
    Opts o;

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "write the report to this file instead of stdout");
        sub->add_option("--format", o.format, "output format: json or csv");
        sub->add_option("--seed", o.seed, "seed recorded in the report");
    };
    auto add_measure_input = [&](CLI::App* sub) {
        sub->add_option("--measure", o.measure, "measure file (JSON)");
        sub->add_option("--matrix", o.matrix,
                        "column-stochastic chain file; uses its stationary measure");
    };

    CLI::App* c_pressure = app.add_subcommand("pressure", "log of the leading eigenvalue");
    c_pressure->add_option("--potential", o.potential, "potential file")->required();
    add_output(c_pressure);

    CLI::App* c_eq = app.add_subcommand("equilibrium", "equilibrium measure of a potential");
    c_eq->add_option("--potential", o.potential, "potential file")->required();
    add_output(c_eq);

    CLI::App* c_entropy = app.add_subcommand("entropy", "entropy of a measure");
    add_measure_input(c_entropy);
    add_output(c_entropy);

    CLI::App* c_kl = app.add_subcommand("kl", "divergence rate between two measures");
    add_measure_input(c_kl);
    c_kl->add_option("--measure2", o.measure2, "second measure file")->required();
    add_output(c_kl);

    CLI::App* c_push = app.add_subcommand("push", "dual evolution of a measure");
    c_push->add_option("--jacobian", o.jacobian, "driving kernel file")->required();
    add_measure_input(c_push);
    c_push->add_option("--n", o.n_push, "number of steps (default 1)");
    add_output(c_push);

    CLI::App* c_orbit = app.add_subcommand("orbit", "convergence trace along the push orbit");
    c_orbit->add_option("--jacobian", o.jacobian, "driving kernel file")->required();
    add_measure_input(c_orbit);
    c_orbit->add_option("--n", o.n_orbit, "number of steps (default 5)");
    c_orbit->add_option("--depth", o.probe, "probe cylinder depth (default 2, max 4)");
    add_output(c_orbit);

    CLI::App* c_second = app.add_subcommand("second-law", "entropy growth report for one push");
    c_second->add_option("--jacobian", o.jacobian, "driving kernel file")->required();
    add_measure_input(c_second);
    add_output(c_second);

    CLI::App* c_rrty = app.add_subcommand("rrty", "sufficient margin and entropy change");
    c_rrty->add_option("--jacobian", o.jacobian, "driving kernel file")->required();
    add_measure_input(c_rrty);
    add_output(c_rrty);

    CLI::App* c_fisher = app.add_subcommand("fisher", "information metric along a direction");
    add_measure_input(c_fisher);
    c_fisher->add_option("--potential", o.potential, "direction file, projected to a tangent")
        ->required();
    c_fisher->add_option("--n", o.n_fisher, "also report the finite-time value at this n (1..8)");
    c_fisher->add_option("--step", o.step, "finite-difference step (default 1e-3)");
    add_output(c_fisher);

    CLI::App* c_taylor = app.add_subcommand("kl-taylor", "divergence along a potential line");
    add_measure_input(c_taylor);
    c_taylor->add_option("--measure2", o.measure2, "invariant base point file")->required();
    c_taylor->add_option("--potential", o.potential, "direction file")->required();
    c_taylor->add_option("--theta-grid", o.theta_grid,
                         "comma list in [-0.1, 0.1] (default -0.01,-0.005,0.005,0.01)");
    add_output(c_taylor);

    CLI::App* c_maxent = app.add_subcommand("maxent", "solve for coefficients matching targets");
    c_maxent->add_option("--family", o.family, "constraint family file")->required();
    c_maxent->add_option("--target", o.target, "comma list of target averages")->required();
    c_maxent->add_option("--tol", o.tol, "gradient tolerance (default 1e-12)");
    add_output(c_maxent);

    CLI::App* c_susc = app.add_subcommand("susceptibility", "response matrices at a point");
    c_susc->add_option("--family", o.family, "constraint family file")->required();
    c_susc->add_option("--z", o.z, "comma list of coefficients (default all zero)");
    c_susc->add_option("--step", o.step, "finite-difference step (default 1e-3)");
    add_output(c_susc);

    CLI::App* c_gibbs = app.add_subcommand("gibbs-eq", "energy/entropy sweep over beta");
    c_gibbs->add_option("--potential", o.potential, "energy observable file")->required();
    c_gibbs->add_option("--beta-grid", o.beta_grid,
                        "comma list or logspace:lo:hi:count in [0.1, 10]");
    c_gibbs->add_option("--step", o.step, "beta step for the slopes (default 1e-3)");
    add_output(c_gibbs);

    CLI::App* c_thermo = app.add_subcommand("thermo-op", "heat/work balance of one operation");
    c_thermo->add_option("--jacobian", o.jacobian, "starting kernel file")->required();
    c_thermo->add_option("--jacobian2", o.jacobian2, "operating kernel file")->required();
    add_measure_input(c_thermo);
    add_output(c_thermo);

    CLI::App* c_rate = app.add_subcommand("energy-rate", "quasi-static heat/work rates");
    c_rate->add_option("--family", o.family, "constraint family file with a generator")
        ->required();
    c_rate->add_option("--index", o.index, "which constraint the generator varies (default 0)");
    c_rate->add_option("--v0", o.v0, "expansion point of the control parameter")->required();
    c_rate->add_option("--target", o.target, "comma list: hold these averages fixed");
    c_rate->add_option("--z", o.z, "comma list: hold these coefficients fixed");
    c_rate->add_option("--step", o.step, "control-parameter step (default 1e-3)");
    add_output(c_rate);

    CLI::App* c_ep = app.add_subcommand("entropy-production", "time-reversal defect rate");
    c_ep->add_option("--potential", o.potential, "potential file")->required();
    add_output(c_ep);

    CLI::App* c_verify = app.add_subcommand("verify-all", "run the full invariant battery");
    c_verify->add_option("--seed", o.seed, "base seed for the randomized trials");
    c_verify->add_option("--out", o.out, "write the report to this file instead of stdout");
    c_verify->add_option("--format", o.format, "output format: json or csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(c_pressure)) return detail::run_pressure(o);
        if (app.got_subcommand(c_eq)) return detail::run_equilibrium(o);
        if (app.got_subcommand(c_entropy)) return detail::run_entropy(o);
        if (app.got_subcommand(c_kl)) return detail::run_kl(o);
        if (app.got_subcommand(c_push)) return detail::run_push(o);
        if (app.got_subcommand(c_orbit)) return detail::run_orbit(o);
        if (app.got_subcommand(c_second)) return detail::run_second_law(o);
        if (app.got_subcommand(c_rrty)) return detail::run_rrty(o);
        if (app.got_subcommand(c_fisher)) return detail::run_fisher(o);
        if (app.got_subcommand(c_taylor)) return detail::run_kl_taylor(o);
        if (app.got_subcommand(c_maxent)) return detail::run_maxent(o);
        if (app.got_subcommand(c_susc)) return detail::run_susceptibility(o);
        if (app.got_subcommand(c_gibbs)) return detail::run_gibbs(o);
        if (app.got_subcommand(c_thermo)) return detail::run_thermo_op(o);
        if (app.got_subcommand(c_rate)) return detail::run_energy_rate(o);
        if (app.got_subcommand(c_ep)) return detail::run_entropy_production(o);
        if (app.got_subcommand(c_verify)) return detail::run_verify(o);
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no subcommand given\n";
    return 2;
}

} // namespace cli
} // namespace thermoform
