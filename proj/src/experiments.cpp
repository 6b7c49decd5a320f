#include "banknet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "banknet/io.hpp"
#include "banknet/stability.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace banknet {

DegreeModel builtin_sec61(double a, double b) {
    const double eps = 1e-12;
    if (a < -eps || a > 0.5 + eps)
        throw Error(ErrorKind::parameter_out_of_range, "a must lie in [0, 1/2]");
    if (b < -eps || b > 0.2 + eps)
        throw Error(ErrorKind::parameter_out_of_range, "b must lie in [0, 1/5]");
    a = std::clamp(a, 0.0, 0.5);
    b = std::clamp(b, 0.0, 0.2);

    std::map<NodeType, double> p;
    auto put_p = [&](int j, int k, double v) {
        if (v > 0) p[NodeType{j, k}] = v;
    };
    put_p(3, 3, 0.5 - a);
    put_p(3, 12, a);
    put_p(12, 3, a);
    put_p(12, 12, 0.5 - a);

    std::map<EdgeType, double> q;
    auto put_q = [&](int k, int j, double v) {
        if (v > 0) q[EdgeType{k, j}] = v;
    };
    put_q(3, 3, 0.2 - b);
    put_q(3, 12, b);
    put_q(12, 3, b);
    put_q(12, 12, 0.8 - b);

    return DegreeModel(DegreeSupport::make({3, 12}, {3, 12}), NodeTypeDist(std::move(p)),
                       EdgeTypeDist(std::move(q)));
}

DegreeModel builtin_sec62(const std::array<double, 4>& q) {
    const double eps = 1e-9;
    double sum = 0;
    for (double v : q) {
        if (v < -eps) throw Error(ErrorKind::simplex_violation, "simplex weights must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > eps)
        throw Error(ErrorKind::simplex_violation, "simplex weights must sum to 1");

    const std::array<int, 4> degrees{2, 4, 8, 16};
    std::map<NodeType, double> p;
    const std::array<double, 4> node_mass{8.0 / 15, 4.0 / 15, 2.0 / 15, 1.0 / 15};
    for (int i = 0; i < 4; ++i) p[NodeType{degrees[i], degrees[i]}] = node_mass[i];

    // The four permutation edge laws, as (row, column) index pairs.
    const std::array<std::array<int, 4>, 4> perm{{
        {0, 1, 2, 3},  // fully assortative
        {1, 0, 3, 2},
        {2, 3, 0, 1},
        {3, 2, 1, 0},  // fully disassortative
    }};
    std::map<EdgeType, double> edge;
    for (int which = 0; which < 4; ++which) {
        const double weight = std::max(q[which], 0.0) / 4.0;
        if (weight == 0) continue;
        for (int row = 0; row < 4; ++row)
            edge[EdgeType{degrees[row], degrees[perm[which][row]]}] += weight;
    }

    return DegreeModel(DegreeSupport::make({2, 4, 8, 16}, {2, 4, 8, 16}), NodeTypeDist(std::move(p)),
                       EdgeTypeDist(std::move(edge)));
}

std::vector<std::array<double, 4>> simplex_face(int zero_index, int resolution) {
    if (zero_index < 0 || zero_index > 3)
        throw Error(ErrorKind::invalid_argument, "simplex face index must be 0..3");
    if (resolution < 2) throw Error(ErrorKind::invalid_argument, "resolution must be >= 2");
    std::array<int, 3> live{};
    int pos = 0;
    for (int i = 0; i < 4; ++i)
        if (i != zero_index) live[pos++] = i;
    std::vector<std::array<double, 4>> points;
    const int m = resolution - 1;
    for (int i = 0; i <= m; ++i) {
        for (int jj = 0; jj + i <= m; ++jj) {
            std::array<double, 4> q{0, 0, 0, 0};
            q[live[0]] = static_cast<double>(i) / m;
            q[live[1]] = static_cast<double>(jj) / m;
            q[live[2]] = static_cast<double>(m - i - jj) / m;
            points.push_back(q);
        }
    }
    return points;
}

std::string ExperimentSpec::describe() const {
    std::ostringstream os;
    os << "source=";
    switch (source) {
        case Source::model_file: os << "file:" << model_file; break;
        case Source::sec61: os << "sec61"; break;
        case Source::sec62: os << "sec62"; break;
    }
    os << ";a=";
    for (double v : a_values) os << format_double(v) << " ";
    os << ";b=";
    for (double v : b_values) os << format_double(v) << " ";
    os << ";q=";
    for (const auto& q : q_points)
        os << format_double(q[0]) << "," << format_double(q[1]) << "," << format_double(q[2]) << ","
           << format_double(q[3]) << " ";
    os << ";gamma=";
    for (double v : gamma_values) os << format_double(v) << " ";
    os << ";acct=" << accounting_file << ";rho0=" << format_double(rho0) << ";outputs=";
    for (const auto& o : outputs) os << o << " ";
    os << ";n=" << n << ";realizations=" << realizations << ";seed=" << seed
       << ";threshold=" << format_double(global_threshold)
       << ";shock=" << (single_node_shock ? "single" : "uniform");
    return os.str();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    const std::string text = spec.describe();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct GridPoint {
    std::optional<double> a, b;
    std::optional<std::array<double, 4>> q;
    double gamma = 0;
    std::size_t index = 0;
};

DegreeModel point_model(const ExperimentSpec& spec, const GridPoint& pt) {
    switch (spec.source) {
        case ExperimentSpec::Source::sec61: return builtin_sec61(*pt.a, *pt.b);
        case ExperimentSpec::Source::sec62: return builtin_sec62(*pt.q);
        case ExperimentSpec::Source::model_file: return load_model_file(spec.model_file);
    }
    throw Error(ErrorKind::invalid_argument, "unknown model source");
}

std::vector<std::string> point_columns(const ExperimentSpec& spec) {
    std::vector<std::string> cols;
    if (spec.source == ExperimentSpec::Source::sec61) {
        cols.push_back("a");
        cols.push_back("b");
    } else if (spec.source == ExperimentSpec::Source::sec62) {
        cols.insert(cols.end(), {"q1", "q2", "q3", "q4"});
    }
    cols.push_back("gamma");
    return cols;
}

// The output columns, in a fixed canonical order.
const std::vector<std::string> kKnownOutputs = {"radius",   "gamma_c", "size", "frequency",
                                                "r",        "r_q",     "z",    "sim_size",
                                                "sim_frequency"};

std::vector<std::string> evaluate_point(const ExperimentSpec& spec, const GridPoint& pt,
                                        const std::vector<std::string>& requested,
                                        bool parallel_ensemble) {
    std::vector<std::string> values(requested.size() + 1);  // + error column
    std::string error;
    try {
        const DegreeModel model = point_model(spec, pt);
        ReducedAccounting acct = spec.accounting_file.empty()
                                     ? gk_specification(pt.gamma, model.support())
                                     : load_accounting_file(spec.accounting_file, model.support());

        for (std::size_t i = 0; i < requested.size(); ++i) {
            const std::string& what = requested[i];
            try {
                if (what == "radius") {
                    values[i] = format_double(cascade_condition(model, acct).second);
                } else if (what == "gamma_c") {
                    if (acct.weights().empty())
                        throw Error(ErrorKind::no_bracket, "no exposure weights to bracket");
                    const double w_max =
                        std::max_element(acct.weights().begin(), acct.weights().end(),
                                         [](auto& x, auto& y) { return x.second < y.second; })
                            ->second;
                    values[i] = format_double(
                        critical_gamma(model, acct.weights(), 1e-9, w_max * (1 + 1e-9)));
                } else if (what == "size") {
                    const ShockSpec shock = ShockSpec::uniform(spec.rho0, model.support());
                    values[i] = format_double(solve_cascade(model, acct, shock).expected_cascade_size);
                } else if (what == "frequency") {
                    values[i] = format_double(cascade_frequency(model, acct).f);
                } else if (what == "r") {
                    values[i] = format_double(graph_assortativity(model));
                } else if (what == "r_q") {
                    values[i] = format_double(edge_assortativity(model.edge_dist()));
                } else if (what == "z") {
                    values[i] = format_double(model.mean_degree());
                } else if (what == "sim_size" || what == "sim_frequency") {
                    if (!values[i].empty()) continue;
                    EnsembleConfig config;
                    config.n_nodes = spec.n;
                    config.n_realizations = spec.realizations;
                    config.master_seed = spec.seed + 0x9e3779b97f4a7c15ULL * pt.index;
                    config.global_threshold = spec.global_threshold;
                    config.shock.mode = spec.single_node_shock ? ShockConfig::Mode::single_node
                                                               : ShockConfig::Mode::fractional;
                    if (!spec.single_node_shock)
                        config.shock.rho0 = ShockSpec::uniform(spec.rho0, model.support());
                    const EnsembleStats stats = parallel_ensemble ? run_ensemble(model, acct, config)
                                                                  : run_ensemble_serial(model, acct, config);
                    for (std::size_t s = 0; s < requested.size(); ++s) {
                        if (requested[s] == "sim_size") values[s] = format_double(stats.mean_global_size);
                        if (requested[s] == "sim_frequency")
                            values[s] = format_double(stats.global_frequency);
                    }
                }
            } catch (const std::exception& e) {
                // Per-quantity failures (e.g. no bracket for gamma_c) leave
                // the cell empty and are noted once. Points evaluate on
                // worker threads, so nothing may escape.
                if (!error.empty()) error += "; ";
                error += what;
                error += ": ";
                error += e.what();
            }
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    values.back() = error;
    return values;
}

ResultTable run_experiment_impl(const ExperimentSpec& spec, bool parallel) {
    std::vector<GridPoint> grid;
    auto add_gammas = [&](GridPoint base) {
        for (double g : spec.gamma_values) {
            base.gamma = g;
            base.index = grid.size();
            grid.push_back(base);
        }
    };
    if (spec.source == ExperimentSpec::Source::sec61) {
        for (double a : spec.a_values)
            for (double b : spec.b_values) {
                GridPoint pt;
                pt.a = a;
                pt.b = b;
                add_gammas(pt);
            }
    } else if (spec.source == ExperimentSpec::Source::sec62) {
        for (const auto& q : spec.q_points) {
            GridPoint pt;
            pt.q = q;
            add_gammas(pt);
        }
    } else {
        add_gammas(GridPoint{});
    }

    std::vector<std::string> requested;
    for (const std::string& o : kKnownOutputs)
        if (spec.outputs.count(o)) requested.push_back(o);
    for (const std::string& o : spec.outputs)
        if (std::find(kKnownOutputs.begin(), kKnownOutputs.end(), o) == kKnownOutputs.end())
            throw Error(ErrorKind::invalid_argument, "unknown output '" + o + "'");

    ResultTable table;
    {
        std::ostringstream os;
        os << "tool: " << kToolVersion;
        table.meta.push_back(os.str());
    }
    {
        std::ostringstream os;
        os << "spec_hash: 0x" << std::hex << spec_hash(spec);
        table.meta.push_back(os.str());
    }
    table.meta.push_back("seed: " + std::to_string(spec.seed));
    table.columns = point_columns(spec);
    table.columns.insert(table.columns.end(), requested.begin(), requested.end());
    table.columns.push_back("error");

    std::vector<std::vector<std::string>> outputs(grid.size());
    const bool ensemble_inside =
        spec.outputs.count("sim_size") > 0 || spec.outputs.count("sim_frequency") > 0;
    const bool parallel_ensemble = parallel && ensemble_inside;
#ifdef _OPENMP
    // Ensemble-bearing points parallelize internally; everything else
    // parallelizes across the grid.
#pragma omp parallel for schedule(dynamic) if (parallel && !ensemble_inside)
#endif
    for (std::size_t i = 0; i < grid.size(); ++i)
        outputs[i] = evaluate_point(spec, grid[i], requested, parallel_ensemble);
    (void)parallel;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row;
        const GridPoint& pt = grid[i];
        if (spec.source == ExperimentSpec::Source::sec61) {
            row.push_back(format_double(*pt.a));
            row.push_back(format_double(*pt.b));
        } else if (spec.source == ExperimentSpec::Source::sec62) {
            for (double v : *pt.q) row.push_back(format_double(v));
        }
        row.push_back(format_double(pt.gamma));
        row.insert(row.end(), outputs[i].begin(), outputs[i].end());
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) { return run_experiment_impl(spec, true); }

ResultTable run_experiment_serial(const ExperimentSpec& spec) { return run_experiment_impl(spec, false); }

void write_table_csv(std::ostream& out, const ResultTable& table) {
    for (const std::string& line : table.meta) out << "# " << line << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 < row.size() ? "," : "\n");
}

void write_table_json(std::ostream& out, const ResultTable& table) {
    out << "{\n  \"meta\": [";
    for (std::size_t i = 0; i < table.meta.size(); ++i)
        out << "\"" << table.meta[i] << "\"" << (i + 1 < table.meta.size() ? ", " : "");
    out << "],\n  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out << "    {";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << "\"" << table.columns[c] << "\": \"" << table.rows[r][c] << "\"";
            if (c + 1 < table.columns.size()) out << ", ";
        }
        out << "}" << (r + 1 < table.rows.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

}  // namespace banknet
