// Command-line driver: model validation, graph generation, Monte Carlo
// ensembles, analytic reports and parameter sweeps.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "banknet/experiments.hpp"
#include "banknet/io.hpp"
#include "banknet/stability.hpp"

namespace {

using namespace banknet;

std::vector<double> parse_values(const std::string& text, const char* what) {
    // Accepts a single value, a comma list, or an inclusive range lo:hi:step.
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double lo, hi, step;
        char c1, c2;
        std::istringstream is(text);
        if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0))
            throw Error(ErrorKind::invalid_argument,
                        std::string(what) + ": range must be lo:hi:step with step > 0");
        for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(std::min(v, hi));
        return values;
    }
    std::stringstream is(text);
    std::string item;
    while (std::getline(is, item, ','))
        if (!item.empty()) values.push_back(parse_probability(item));
    if (values.empty()) throw Error(ErrorKind::invalid_argument, std::string(what) + ": no values");
    return values;
}

std::array<double, 4> parse_simplex(const std::string& text) {
    const std::vector<double> v = parse_values(text, "--q");
    if (v.size() != 4)
        throw Error(ErrorKind::invalid_argument, "--q needs four comma-separated weights");
    return {v[0], v[1], v[2], v[3]};
}

struct ModelOptions {
    std::string model_file;
    std::string builtin;
    std::string a_text = "0.5";
    std::string b_text = "0.16";
    std::string q_text = "1,0,0,0";

    void attach(CLI::App* cmd) {
        cmd->add_option("--model", model_file, "model JSON file");
        cmd->add_option("--builtin", builtin, "builtin model family: sec61 or sec62")
            ->check(CLI::IsMember({"sec61", "sec62"}));
        cmd->add_option("--a", a_text, "sec61 node coupling a in [0,1/2]");
        cmd->add_option("--b", b_text, "sec61 edge coupling b in [0,1/5]");
        cmd->add_option("--q", q_text, "sec62 simplex weights q1,q2,q3,q4");
    }

    DegreeModel build() const {
        if (!model_file.empty()) return load_model_file(model_file);
        if (builtin == "sec61")
            return builtin_sec61(parse_probability(a_text), parse_probability(b_text));
        if (builtin == "sec62") return builtin_sec62(parse_simplex(q_text));
        throw Error(ErrorKind::invalid_argument, "specify --model FILE or --builtin sec61|sec62");
    }
};

std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    if (const char* dir = std::getenv("BANKNET_OUT_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / p).string();
    return path;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io_error, "cannot open output file '" + path + "'");
    return out;
}

int cmd_validate(const ModelOptions& opts, const std::string& accounting_file) {
    const DegreeModel model = opts.build();
    const auto violations = validate_consistency(model);
    std::cout << "mean degree z = " << format_double(model.mean_degree()) << "\n";
    for (const auto& v : violations) {
        std::cout << "violation: " << (v.side == '+' ? "Q+_" : "Q-_") << v.degree << " = "
                  << format_double(v.actual) << ", consistency requires " << format_double(v.expected)
                  << " (residual " << format_double(v.residual()) << ")\n";
    }
    if (!accounting_file.empty()) {
        load_accounting_file(accounting_file, model.support());
        std::cout << "accounting file ok\n";
    }
    if (violations.empty()) {
        std::cout << "model consistent\n";
        return 0;
    }
    std::cout << violations.size() << " violation(s)\n";
    return 1;
}

int cmd_generate(const ModelOptions& opts, int n, std::uint64_t seed, bool no_self_loops,
                 bool no_multi_edges, const std::string& out_path) {
    const DegreeModel model = opts.build();
    GenerationConfig config;
    config.seed = seed;
    config.allow_self_loops = !no_self_loops;
    config.allow_multi_edges = !no_multi_edges;
    const SkeletonGraph graph = generate(n, model, config);
    std::cerr << "generated " << graph.n_nodes << " nodes, " << graph.edges.size() << " edges ("
              << graph.gen_stats.attempts << " attempt(s), " << graph.gen_stats.type_redraws
              << " type redraws, " << graph.gen_stats.stub_relabels << " stub relabels)\n";
    if (out_path.empty()) {
        write_graph(std::cout, graph);
    } else {
        auto out = open_out(resolve_out(out_path));
        write_graph(out, graph);
    }
    return 0;
}

int cmd_simulate(const ModelOptions& opts, double gamma, const std::string& accounting_file, int n,
                 int realizations, std::uint64_t seed, const std::string& shock_mode, double rho0,
                 double threshold, bool fixed_graph, bool serial, const std::string& out_path) {
    const DegreeModel model = opts.build();
    const ReducedAccounting acct = accounting_file.empty()
                                       ? gk_specification(gamma, model.support())
                                       : load_accounting_file(accounting_file, model.support());
    EnsembleConfig config;
    config.n_nodes = n;
    config.n_realizations = realizations;
    config.master_seed = seed;
    config.global_threshold = threshold;
    config.fresh_graph_per_run = !fixed_graph;
    if (shock_mode == "single") {
        config.shock.mode = ShockConfig::Mode::single_node;
    } else if (shock_mode == "uniform") {
        config.shock.mode = ShockConfig::Mode::fractional;
        config.shock.rho0 = ShockSpec::uniform(rho0, model.support());
    } else {
        throw Error(ErrorKind::invalid_argument, "--shock must be single or uniform");
    }
    const EnsembleStats stats =
        serial ? run_ensemble_serial(model, acct, config) : run_ensemble(model, acct, config);
    std::cerr << "global frequency " << format_double(stats.global_frequency) << ", mean global size "
              << format_double(stats.mean_global_size) << " (" << stats.n_global << "/"
              << stats.n_realizations << " global, " << stats.n_failures << " failures)\n";
    if (out_path.empty()) {
        write_ensemble_csv(std::cout, stats, n, gamma);
    } else {
        auto out = open_out(resolve_out(out_path));
        write_ensemble_csv(out, stats, n, gamma);
    }
    return 0;
}

int cmd_analyze(const ModelOptions& opts, double gamma, const std::string& accounting_file, double rho0,
                const std::string& format, const std::string& out_path,
                const std::string& trajectory_path) {
    const DegreeModel model = opts.build();
    const ReducedAccounting acct = accounting_file.empty()
                                       ? gk_specification(gamma, model.support())
                                       : load_accounting_file(accounting_file, model.support());

    ResultTable table;
    table.meta.push_back(std::string("tool: ") + kToolVersion);
    table.columns = {"gamma", "z",   "radius", "cascade_condition", "gamma_c",
                     "size",  "frequency", "r_q",    "r",                 "error"};
    std::vector<std::string> row(table.columns.size());
    row[0] = format_double(gamma);
    std::string error;
    auto fill = [&](std::size_t idx, auto&& fn) {
        try {
            row[idx] = format_double(fn());
        } catch (const Error& e) {
            if (!error.empty()) error += "; ";
            error += e.what();
        }
    };
    fill(1, [&] { return model.mean_degree(); });
    const auto condition = cascade_condition(model, acct);
    row[2] = format_double(condition.second);
    row[3] = condition.first ? "1" : "0";
    fill(4, [&] {
        double w_max = 0;
        for (const auto& [j, w] : acct.weights()) w_max = std::max(w_max, w);
        return critical_gamma(model, acct.weights(), 1e-9, w_max * (1 + 1e-9));
    });
    const ShockSpec shock = ShockSpec::uniform(rho0, model.support());
    const CascadeTrajectory trajectory = solve_cascade(model, acct, shock);
    row[5] = format_double(trajectory.expected_cascade_size);
    fill(6, [&] { return cascade_frequency(model, acct).f; });
    fill(7, [&] { return edge_assortativity(model.edge_dist()); });
    fill(8, [&] { return graph_assortativity(model); });
    row[9] = error;
    table.rows.push_back(row);

    if (!trajectory_path.empty()) {
        auto tout = open_out(resolve_out(trajectory_path));
        write_trajectory_csv(tout, trajectory, model);
    }

    auto write = [&](std::ostream& out) {
        if (format == "json")
            write_table_json(out, table);
        else
            write_table_csv(out, table);
    };
    if (out_path.empty()) {
        write(std::cout);
    } else {
        auto out = open_out(resolve_out(out_path));
        write(out);
    }
    return 0;
}

int cmd_sweep(const ModelOptions& opts, const std::string& gamma_range, const std::string& outputs_text,
              int q_face, int q_resolution, int n, int realizations, std::uint64_t seed, double rho0,
              const std::string& shock_mode, const std::string& format, bool split,
              const std::string& out_path, bool serial) {
    ExperimentSpec spec;
    if (!opts.model_file.empty()) {
        spec.source = ExperimentSpec::Source::model_file;
        spec.model_file = opts.model_file;
    } else if (opts.builtin == "sec61") {
        spec.source = ExperimentSpec::Source::sec61;
        spec.a_values = parse_values(opts.a_text, "--a");
        spec.b_values = parse_values(opts.b_text, "--b");
    } else if (opts.builtin == "sec62") {
        spec.source = ExperimentSpec::Source::sec62;
        if (q_face > 0)
            spec.q_points = simplex_face(q_face - 1, q_resolution);
        else
            spec.q_points = {parse_simplex(opts.q_text)};
    } else {
        throw Error(ErrorKind::invalid_argument, "specify --model FILE or --builtin sec61|sec62");
    }
    spec.gamma_values = parse_values(gamma_range, "--gamma-range");
    spec.outputs.clear();
    std::stringstream os(outputs_text);
    std::string item;
    while (std::getline(os, item, ','))
        if (!item.empty()) spec.outputs.insert(item);
    spec.n = n;
    spec.realizations = realizations;
    spec.seed = seed;
    spec.rho0 = rho0;
    spec.single_node_shock = shock_mode == "single";
    spec.format = format;

    const ResultTable table = serial ? run_experiment_serial(spec) : run_experiment(spec);

    auto write_one = [&](std::ostream& out, const ResultTable& t) {
        if (format == "json")
            write_table_json(out, t);
        else
            write_table_csv(out, t);
    };
    if (split && !out_path.empty()) {
        // One file per requested quantity: the point columns plus that column.
        const std::size_t n_point_cols = table.columns.size() - spec.outputs.size() - 1;
        for (std::size_t c = n_point_cols; c + 1 < table.columns.size(); ++c) {
            ResultTable part;
            part.meta = table.meta;
            part.columns.assign(table.columns.begin(), table.columns.begin() + n_point_cols);
            part.columns.push_back(table.columns[c]);
            for (const auto& row : table.rows) {
                std::vector<std::string> r(row.begin(), row.begin() + n_point_cols);
                r.push_back(row[c]);
                part.rows.push_back(std::move(r));
            }
            const std::string path = resolve_out(out_path + "." + table.columns[c]);
            auto out = open_out(path);
            write_one(out, part);
        }
        return 0;
    }
    if (out_path.empty()) {
        write_one(std::cout, table);
    } else {
        auto out = open_out(resolve_out(out_path));
        write_one(out, table);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"banknet: default cascades on degree-correlated random banking networks"};
    app.require_subcommand(1);

    ModelOptions model_opts;
    std::string accounting_file;
    std::string out_path;
    std::string format = "csv";
    double gamma = 0.035;
    double rho0 = 1e-4;
    double threshold = 0.05;
    int n = 10000;
    int realizations = 500;
    std::uint64_t seed = 1;
    std::string shock_mode = "single";
    std::string gamma_range;
    std::string outputs_text = "size,frequency,gamma_c,radius,r,r_q";
    std::string trajectory_path;
    int q_face = 0, q_resolution = 21;
    bool no_self_loops = false, no_multi_edges = false, fixed_graph = false, serial = false,
         split = false;

    auto* validate = app.add_subcommand("validate", "check a model's consistency constraints");
    model_opts.attach(validate);
    validate->add_option("--accounting", accounting_file, "accounting JSON file");

    auto* generate = app.add_subcommand("generate", "draw a finite random graph from a model");
    model_opts.attach(generate);
    generate->add_option("--n", n, "number of nodes");
    generate->add_option("--seed", seed, "generation seed");
    generate->add_flag("--no-self-loops", no_self_loops, "reject graphs with self-loops");
    generate->add_flag("--no-multi-edges", no_multi_edges, "reject graphs with parallel edges");
    generate->add_option("--out", out_path, "output graph file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo cascade ensemble");
    model_opts.attach(simulate);
    simulate->add_option("--gamma", gamma, "uniform buffer (GK weights)");
    simulate->add_option("--accounting", accounting_file, "accounting JSON file");
    simulate->add_option("--n", n, "nodes per realization");
    simulate->add_option("--realizations", realizations, "number of realizations");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--shock", shock_mode, "single | uniform")
        ->check(CLI::IsMember({"single", "uniform"}));
    simulate->add_option("--rho0", rho0, "per-type shock probability for uniform mode");
    simulate->add_option("--threshold", threshold, "global cascade threshold (strict fraction)");
    simulate->add_flag("--fixed-graph", fixed_graph, "reuse one graph across realizations");
    simulate->add_flag("--serial", serial, "use the serial reference path");
    simulate->add_option("--out", out_path, "output CSV (default stdout)");

    auto* analyze = app.add_subcommand("analyze", "analytic report for one parameter point");
    model_opts.attach(analyze);
    analyze->add_option("--gamma", gamma, "uniform buffer (GK weights)");
    analyze->add_option("--accounting", accounting_file, "accounting JSON file");
    analyze->add_option("--rho0", rho0, "uniform shock probability");
    analyze->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--out", out_path, "output file (default stdout)");
    analyze->add_option("--trajectory", trajectory_path, "also write the iteration trajectory CSV");

    auto* sweep = app.add_subcommand("sweep", "evaluate quantities over a parameter grid");
    model_opts.attach(sweep);
    sweep->add_option("--gamma-range", gamma_range, "buffer values: lo:hi:step or comma list")
        ->required();
    sweep->add_option("--outputs", outputs_text, "comma list: size,frequency,gamma_c,radius,r,r_q,z,sim_size,sim_frequency");
    sweep->add_option("--q-face", q_face, "sec62: scan the simplex face with this q (1-4) fixed to 0");
    sweep->add_option("--q-resolution", q_resolution, "sec62 face scan: points per edge");
    sweep->add_option("--n", n, "nodes per realization (sim outputs)");
    sweep->add_option("--realizations", realizations, "realizations per point (sim outputs)");
    sweep->add_option("--seed", seed, "master seed");
    sweep->add_option("--rho0", rho0, "uniform analytic shock probability");
    sweep->add_option("--shock", shock_mode, "single | uniform (sim outputs)")
        ->check(CLI::IsMember({"single", "uniform"}));
    sweep->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_flag("--split", split, "write one file per quantity");
    sweep->add_flag("--serial", serial, "disable parallel evaluation");
    sweep->add_option("--out", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(model_opts, accounting_file);
        if (generate->parsed())
            return cmd_generate(model_opts, n, seed, no_self_loops, no_multi_edges, out_path);
        if (simulate->parsed())
            return cmd_simulate(model_opts, gamma, accounting_file, n, realizations, seed, shock_mode,
                                rho0, threshold, fixed_graph, serial, out_path);
        if (analyze->parsed())
            return cmd_analyze(model_opts, gamma, accounting_file, rho0, format, out_path,
                               trajectory_path);
        if (sweep->parsed())
            return cmd_sweep(model_opts, gamma_range, outputs_text, q_face, q_resolution, n,
                             realizations, seed, rho0, shock_mode, format, split, out_path, serial);
    } catch (const banknet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
