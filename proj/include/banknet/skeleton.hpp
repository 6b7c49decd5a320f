#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <variant>
#include <vector>

#include "banknet/degree_model.hpp"
#include "banknet/rng.hpp"
#include "banknet/types.hpp"

namespace banknet {

struct GenerationConfig {
    std::uint64_t seed = 0;
    int max_attempts = 100;
    std::int64_t max_clip_swaps = -1;  // -1: max(1000, total in-stubs / 10)
    bool allow_self_loops = true;
    bool allow_multi_edges = true;
};

struct Edge {
    int src = 0;
    int dst = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A concrete finite directed multigraph with typed nodes. The recorded
/// type of every node matches its realized degrees.
struct SkeletonGraph {
    int n_nodes = 0;
    std::vector<NodeType> node_type;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out_edges;  // edge ids per source node
    std::vector<std::vector<int>> in_edges;   // edge ids per target node

    struct GenStats {
        int attempts = 0;
        std::int64_t type_redraws = 0;   // node types redrawn to balance stub totals
        std::int64_t stub_relabels = 0;  // in-stub labels changed by clipping
        std::int64_t in_stub_count = 0;
    };
    GenStats gen_stats;

    /// Builds a graph from an explicit edge list; node types are the
    /// realized degrees.
    static SkeletonGraph from_edges(int n_nodes, std::vector<Edge> edges);
};

/// Independent node-type draws from P. Each node carries its in- and
/// out-stub counts.
std::vector<NodeType> draw_node_types(int n, const DegreeModel& model, Rng& rng);

/// The stub-matching step needs equal totals of in- and out-stubs, which
/// independent draws only achieve with vanishing probability. Redraws
/// uniformly chosen nodes from P until the totals agree; returns the number
/// of redraws. Throws generation_failed when the budget is exhausted (in
/// particular when no type sequence of length n can balance).
std::int64_t balance_node_types(std::vector<NodeType>& types, const DegreeModel& model, Rng& rng,
                                std::int64_t max_redraws);

/// One in-stub of a node, labeled with the out-degree class it wants to
/// attach to.
struct InStub {
    int node = 0;
    int label = 0;  // out-degree class k'
};

/// Labels every in-stub of an in-degree-j node with an out-degree class
/// drawn from Q conditioned on j. Labels are mutually independent.
std::vector<InStub> assign_in_stub_types(const std::vector<NodeType>& types, const DegreeModel& model,
                                         Rng& rng);

/// Per-class imbalance when the labeled in-stubs cannot be matched:
/// (in-stubs labeled k) - (out-stubs of class k) for every affected class.
struct WiringFailure {
    std::map<int, std::int64_t> surplus;
};

/// Matches every in-stub to a uniformly random unpaired out-stub of its
/// labeled class. Returns the graph when all stubs pair, otherwise the
/// imbalance report for clip to consume.
std::variant<SkeletonGraph, WiringFailure> wire(const std::vector<NodeType>& types,
                                                const std::vector<InStub>& stubs,
                                                const GenerationConfig& config, Rng& rng);

/// Repairs a wiring failure by relabeling a minimal random subset of
/// in-stubs: repeatedly pick a uniform in-stub in a surplus class and move
/// it to a deficit class chosen with probability proportional to the
/// remaining deficit. Returns the number of relabeled stubs.
std::int64_t clip(const std::vector<NodeType>& types, std::vector<InStub>& stubs,
                  const WiringFailure& failure, const GenerationConfig& config, Rng& rng);

/// Full construction: draw types, balance totals, label stubs, clip, wire.
/// Deterministic in (n, model, config.seed).
SkeletonGraph generate(int n, const DegreeModel& model, const GenerationConfig& config);

// --- empirical statistics -------------------------------------------------

std::map<NodeType, double> empirical_node_dist(const SkeletonGraph& graph);
std::map<EdgeType, double> empirical_edge_dist(const SkeletonGraph& graph);

/// Pearson correlation of (source out-degree, target in-degree) over edges.
double empirical_edge_assortativity(const SkeletonGraph& graph);

/// Pearson correlation of (source in-degree, target in-degree) over edges.
double empirical_graph_assortativity(const SkeletonGraph& graph);

// --- canonical text serialization ------------------------------------------
//
//   nodes <n>
//   node <id> <in-degree> <out-degree>
//   edge <src> <dst>

void write_graph(std::ostream& out, const SkeletonGraph& graph);
SkeletonGraph read_graph(std::istream& in);

}  // namespace banknet
