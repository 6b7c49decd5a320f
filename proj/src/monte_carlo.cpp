#include "banknet/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace banknet {

std::vector<int> apply_shock(const SkeletonGraph& graph, const ShockConfig& shock, Rng& rng) {
    std::vector<int> seed;
    if (shock.mode == ShockConfig::Mode::single_node) {
        if (graph.n_nodes == 0) throw Error(ErrorKind::invalid_argument, "cannot shock an empty graph");
        seed.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(graph.n_nodes))));
        return seed;
    }
    for (int v = 0; v < graph.n_nodes; ++v) {
        const NodeType& t = graph.node_type[v];
        const double p = shock.rho0.at(t.in_deg, t.out_deg);
        if (p >= 1.0 || (p > 0.0 && rng.uniform() < p)) seed.push_back(v);
    }
    return seed;
}

std::vector<int> edge_update_set(const SkeletonGraph& graph, const std::vector<int>& nodes) {
    std::vector<int> edges;
    for (int v : nodes) edges.insert(edges.end(), graph.out_edges[v].begin(), graph.out_edges[v].end());
    std::sort(edges.begin(), edges.end());
    return edges;
}

std::vector<int> node_update_set(const SkeletonGraph& graph, const std::vector<int>& edges,
                                 const ThresholdTable& thresholds, const std::vector<int>& seed_nodes) {
    std::vector<std::int64_t> hit(graph.n_nodes, 0);
    for (int e : edges) hit[graph.edges[e].dst] += 1;
    std::vector<char> is_seed(graph.n_nodes, 0);
    for (int v : seed_nodes) is_seed[v] = 1;

    std::vector<int> result;
    for (int v = 0; v < graph.n_nodes; ++v) {
        if (is_seed[v] || hit[v] == 0) continue;
        const NodeType& t = graph.node_type[v];
        if (hit[v] >= thresholds.threshold(t.in_deg, t.out_deg)) result.push_back(v);
    }
    return result;
}

CascadeRunResult run_cascade(const SkeletonGraph& graph, const std::vector<int>& seed_nodes,
                             const ThresholdTable& thresholds, double global_threshold) {
    CascadeRunResult result;
    std::vector<char> defaulted(graph.n_nodes, 0);
    std::vector<std::int64_t> hit(graph.n_nodes, 0);  // defaulted in-edges per node

    // Per-node thresholds resolved once; lookups by type inside the loop
    // would dominate on large graphs.
    std::vector<std::int64_t> threshold(graph.n_nodes, kNeverTriggered);
    for (int v = 0; v < graph.n_nodes; ++v) {
        const NodeType& t = graph.node_type[v];
        if (t.in_deg >= 1) threshold[v] = thresholds.threshold(t.in_deg, t.out_deg);
    }

    std::vector<int> frontier;  // nodes defaulted in the current round
    for (int v : seed_nodes) {
        if (v < 0 || v >= graph.n_nodes) throw Error(ErrorKind::invalid_argument, "seed node out of range");
        if (!defaulted[v]) {
            defaulted[v] = 1;
            frontier.push_back(v);
        }
    }

    int rounds = 0;
    std::size_t n_defaulted = frontier.size();
    std::vector<char> edge_defaulted(graph.edges.size(), 0);
    while (!frontier.empty()) {
        // Edge update: the frontier's out-edges transmit full losses.
        std::vector<int> next;
        bool new_edges = false;
        for (int v : frontier) {
            for (int e : graph.out_edges[v]) {
                if (!edge_defaulted[e]) {
                    edge_defaulted[e] = 1;
                    new_edges = true;
                }
                const int target = graph.edges[e].dst;
                hit[target] += 1;  // parallel edges each transmit their own loss
                if (!defaulted[target] && hit[target] >= threshold[target]) {
                    defaulted[target] = 1;
                    next.push_back(target);
                }
            }
        }
        if (new_edges || !next.empty()) ++rounds;  // a round that changed something
        n_defaulted += next.size();
        frontier = std::move(next);
    }

    result.n_rounds = rounds;
    result.defaulted_nodes.reserve(n_defaulted);
    for (int v = 0; v < graph.n_nodes; ++v)
        if (defaulted[v]) result.defaulted_nodes.push_back(v);
    for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e)
        if (edge_defaulted[e]) result.defaulted_edges.push_back(e);
    result.default_fraction =
        graph.n_nodes == 0 ? 0.0 : static_cast<double>(result.defaulted_nodes.size()) / graph.n_nodes;
    result.is_global = result.default_fraction > global_threshold;
    return result;
}

namespace {

RealizationRecord run_one(const DegreeModel& model, const ThresholdTable& thresholds,
                          const EnsembleConfig& config, const SkeletonGraph* shared_graph, int index) {
    RealizationRecord rec;
    rec.index = index;
    Rng rng = Rng::stream(config.master_seed, static_cast<std::uint64_t>(index));
    rec.seed = config.master_seed ^ static_cast<std::uint64_t>(index);
    try {
        SkeletonGraph fresh;
        const SkeletonGraph* graph = shared_graph;
        if (graph == nullptr) {
            GenerationConfig gen = config.generation;
            gen.seed = config.master_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
            fresh = generate(config.n_nodes, model, gen);
            graph = &fresh;
        }
        const std::vector<int> seed_nodes = apply_shock(*graph, config.shock, rng);
        const CascadeRunResult run = run_cascade(*graph, seed_nodes, thresholds, config.global_threshold);
        rec.default_fraction = run.default_fraction;
        rec.n_rounds = run.n_rounds;
        rec.is_global = run.is_global;
    } catch (const std::exception&) {
        // Realizations run on worker threads; a failure is recorded, never
        // rethrown across the parallel region.
        rec.failed = true;
    }
    return rec;
}

EnsembleStats aggregate(std::vector<RealizationRecord> runs, const EnsembleConfig& config) {
    EnsembleStats stats;
    stats.n_realizations = static_cast<int>(runs.size());
    stats.master_seed = config.master_seed;
    double global_size_sum = 0;
    for (const RealizationRecord& rec : runs) {
        if (rec.failed) {
            ++stats.n_failures;
            continue;
        }
        if (rec.is_global) {
            ++stats.n_global;
            global_size_sum += rec.default_fraction;
        }
    }
    // Frequency is per requested realization; failures are visible through
    // n_failures rather than renormalized away.
    stats.global_frequency =
        stats.n_realizations == 0 ? 0.0 : static_cast<double>(stats.n_global) / stats.n_realizations;
    stats.mean_global_size = stats.n_global == 0 ? 0.0 : global_size_sum / stats.n_global;
    stats.runs = std::move(runs);
    return stats;
}

}  // namespace

EnsembleStats run_ensemble_serial(const DegreeModel& model, const ReducedAccounting& acct,
                                  const EnsembleConfig& config) {
    if (config.n_realizations < 1) throw Error(ErrorKind::invalid_argument, "need at least one realization");
    const ThresholdTable thr = thresholds(acct);
    SkeletonGraph shared;
    const SkeletonGraph* shared_ptr = nullptr;
    if (!config.fresh_graph_per_run) {
        GenerationConfig gen = config.generation;
        gen.seed = config.master_seed;
        shared = generate(config.n_nodes, model, gen);
        shared_ptr = &shared;
    }
    std::vector<RealizationRecord> runs(config.n_realizations);
    for (int i = 0; i < config.n_realizations; ++i) runs[i] = run_one(model, thr, config, shared_ptr, i);
    return aggregate(std::move(runs), config);
}

EnsembleStats run_ensemble(const DegreeModel& model, const ReducedAccounting& acct,
                           const EnsembleConfig& config) {
    if (config.n_realizations < 1) throw Error(ErrorKind::invalid_argument, "need at least one realization");
    const ThresholdTable thr = thresholds(acct);
    SkeletonGraph shared;
    const SkeletonGraph* shared_ptr = nullptr;
    if (!config.fresh_graph_per_run) {
        GenerationConfig gen = config.generation;
        gen.seed = config.master_seed;
        shared = generate(config.n_nodes, model, gen);
        shared_ptr = &shared;
    }
    std::vector<RealizationRecord> runs(config.n_realizations);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < config.n_realizations; ++i) runs[i] = run_one(model, thr, config, shared_ptr, i);
    return aggregate(std::move(runs), config);
}

}  // namespace banknet
