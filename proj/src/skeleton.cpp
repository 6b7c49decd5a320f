#include "banknet/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace banknet {

namespace {

/// Cumulative sampler over the entries of a sparse distribution.
class TypeSampler {
public:
    TypeSampler(std::vector<NodeType> types, std::vector<double> weights)
        : types_(std::move(types)), cdf_(weights.size()) {
        double acc = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            cdf_[i] = acc;
        }
        total_ = acc;
    }

    const NodeType& draw(Rng& rng) const {
        const double u = rng.uniform() * total_;
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t idx = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
        return types_[idx];
    }

private:
    std::vector<NodeType> types_;
    std::vector<double> cdf_;
    double total_ = 0;
};

TypeSampler node_type_sampler(const DegreeModel& model) {
    std::vector<NodeType> types;
    std::vector<double> weights;
    for (const auto& [type, p] : model.node_dist().entries()) {
        if (p > 0) {
            types.push_back(type);
            weights.push_back(p);
        }
    }
    if (types.empty()) throw Error(ErrorKind::invalid_distribution, "node-type law has no mass");
    return TypeSampler(std::move(types), std::move(weights));
}

std::int64_t stub_imbalance(const std::vector<NodeType>& types) {
    std::int64_t d = 0;
    for (const auto& t : types) d += t.in_deg - t.out_deg;
    return d;
}

void build_adjacency(SkeletonGraph& g) {
    g.out_edges.assign(g.n_nodes, {});
    g.in_edges.assign(g.n_nodes, {});
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        g.out_edges[g.edges[e].src].push_back(e);
        g.in_edges[g.edges[e].dst].push_back(e);
    }
}

// Removes self-loops / parallel edges by swapping targets between edges
// whose sources share an out-degree class, which preserves every degree and
// every (out-class, in-stub label) pairing. The expected number of
// conflicts in a fresh matching is O(1), so whole-graph rejection would
// almost never accept; a few local swaps fix it instead.
void repair_edge_conflicts(SkeletonGraph& g, const GenerationConfig& config, Rng& rng) {
    if (g.edges.size() < 2) {
        if (!config.allow_self_loops)
            for (const Edge& e : g.edges)
                if (e.src == e.dst) throw Error(ErrorKind::generation_failed, "unremovable self-loop");
        return;
    }
    std::map<int, std::vector<int>> edges_by_class;  // source out-degree -> edge ids
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        edges_by_class[g.node_type[g.edges[e].src].out_deg].push_back(e);

    auto count_multiplicity = [&](int src, int dst) {
        // Parallel-edge checks are rare enough that a scan over the class
        // bucket is acceptable; a full multimap would dominate generation.
        std::int64_t n = 0;
        for (int e : edges_by_class[g.node_type[src].out_deg])
            if (g.edges[e].src == src && g.edges[e].dst == dst) ++n;
        return n;
    };
    auto violates = [&](int src, int dst, std::int64_t multiplicity) {
        if (!config.allow_self_loops && src == dst) return true;
        if (!config.allow_multi_edges && multiplicity > 1) return true;
        return false;
    };

    std::vector<int> offending;
    std::set<std::pair<int, int>> seen;
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        const Edge& edge = g.edges[e];
        if (!config.allow_self_loops && edge.src == edge.dst) {
            offending.push_back(e);
            continue;
        }
        if (!config.allow_multi_edges && !seen.insert({edge.src, edge.dst}).second) offending.push_back(e);
    }

    const std::int64_t budget = 200 + 20 * static_cast<std::int64_t>(offending.size());
    std::int64_t swaps = 0;
    while (!offending.empty()) {
        if (swaps++ > budget)
            throw Error(ErrorKind::generation_failed, "edge conflicts persisted through swap repair");
        const int e = offending.back();
        const auto& bucket = edges_by_class[g.node_type[g.edges[e].src].out_deg];
        const int partner = bucket[rng.below(bucket.size())];
        if (partner == e) continue;
        Edge& a = g.edges[e];
        Edge& b = g.edges[partner];
        std::swap(a.dst, b.dst);
        // Only re-examine the two touched edges; earlier clean edges stay
        // clean because their endpoints did not change.
        offending.pop_back();
        for (int touched : {e, partner}) {
            const Edge& t = g.edges[touched];
            if (violates(t.src, t.dst, config.allow_multi_edges ? 1 : count_multiplicity(t.src, t.dst)))
                offending.push_back(touched);
        }
    }
}

}  // namespace

SkeletonGraph SkeletonGraph::from_edges(int n_nodes, std::vector<Edge> edges) {
    SkeletonGraph g;
    g.n_nodes = n_nodes;
    g.edges = std::move(edges);
    for (const Edge& e : g.edges)
        if (e.src < 0 || e.src >= n_nodes || e.dst < 0 || e.dst >= n_nodes)
            throw Error(ErrorKind::invalid_argument, "edge endpoint out of range");
    build_adjacency(g);
    g.node_type.resize(n_nodes);
    for (int v = 0; v < n_nodes; ++v)
        g.node_type[v] = NodeType{static_cast<int>(g.in_edges[v].size()),
                                  static_cast<int>(g.out_edges[v].size())};
    return g;
}

std::vector<NodeType> draw_node_types(int n, const DegreeModel& model, Rng& rng) {
    if (n < 0) throw Error(ErrorKind::invalid_argument, "node count must be non-negative");
    std::vector<NodeType> types;
    types.reserve(n);
    if (n == 0) return types;
    const TypeSampler sampler = node_type_sampler(model);
    for (int i = 0; i < n; ++i) types.push_back(sampler.draw(rng));
    return types;
}

std::int64_t balance_node_types(std::vector<NodeType>& types, const DegreeModel& model, Rng& rng,
                                std::int64_t max_redraws) {
    if (types.empty()) return 0;
    const TypeSampler sampler = node_type_sampler(model);
    std::int64_t imbalance = stub_imbalance(types);
    std::int64_t redraws = 0;
    std::int64_t proposals = 0;
    // Fresh draws are only committed when they do not worsen the imbalance,
    // which drives it to zero in O(sqrt(n)) committed redraws. The residual
    // conditioning this puts on the type counts vanishes as n grows, like
    // the stub relabeling done by clip.
    while (imbalance != 0) {
        if (redraws >= max_redraws || proposals >= 64 * std::max<std::int64_t>(max_redraws, 1))
            throw Error(ErrorKind::generation_failed,
                        "could not balance in-/out-stub totals within the redraw budget");
        ++proposals;
        const std::size_t v = static_cast<std::size_t>(rng.below(types.size()));
        const NodeType fresh = sampler.draw(rng);
        const std::int64_t shifted =
            imbalance + (fresh.in_deg - fresh.out_deg) - (types[v].in_deg - types[v].out_deg);
        if (std::abs(shifted) > std::abs(imbalance)) continue;
        if (fresh != types[v]) ++redraws;
        imbalance = shifted;
        types[v] = fresh;
    }
    return redraws;
}

std::vector<InStub> assign_in_stub_types(const std::vector<NodeType>& types, const DegreeModel& model,
                                         Rng& rng) {
    const auto& q = model.edge_dist();

    // Conditional label law per in-degree, materialized once.
    std::map<int, TypeSampler> samplers;
    std::set<int> in_degrees;
    for (const auto& t : types)
        if (t.in_deg >= 1) in_degrees.insert(t.in_deg);
    for (int j : in_degrees) {
        if (!(q.minus_at(j) > 0)) {
            std::ostringstream os;
            os << "realized in-degree " << j << " has no edge mass (Q-_" << j << " = 0)";
            throw Error(ErrorKind::missing_in_degree_mass, os.str());
        }
        std::vector<NodeType> labels;
        std::vector<double> weights;
        for (const auto& [type, qv] : q.entries()) {
            if (type.in_deg != j || qv == 0) continue;
            labels.push_back(NodeType{j, type.out_deg});
            weights.push_back(qv);
        }
        samplers.emplace(j, TypeSampler(std::move(labels), std::move(weights)));
    }

    std::vector<InStub> stubs;
    for (int v = 0; v < static_cast<int>(types.size()); ++v) {
        const int j = types[v].in_deg;
        if (j < 1) continue;
        const TypeSampler& sampler = samplers.at(j);
        for (int s = 0; s < j; ++s) stubs.push_back(InStub{v, sampler.draw(rng).out_deg});
    }
    return stubs;
}

std::variant<SkeletonGraph, WiringFailure> wire(const std::vector<NodeType>& types,
                                                const std::vector<InStub>& stubs,
                                                const GenerationConfig& config, Rng& rng) {
    // Out-stub inventory per class: class k holds k stubs of every
    // out-degree-k node.
    std::map<int, std::vector<int>> out_stubs;  // class -> owning node, repeated
    for (int v = 0; v < static_cast<int>(types.size()); ++v) {
        const int k = types[v].out_deg;
        if (k < 1) continue;
        auto& bucket = out_stubs[k];
        bucket.insert(bucket.end(), k, v);
    }

    std::map<int, std::int64_t> demand;
    for (const InStub& s : stubs) demand[s.label] += 1;

    WiringFailure failure;
    for (const auto& [k, need] : demand) {
        const auto it = out_stubs.find(k);
        const std::int64_t have = it == out_stubs.end() ? 0 : static_cast<std::int64_t>(it->second.size());
        if (need != have) failure.surplus[k] = need - have;
    }
    for (const auto& [k, bucket] : out_stubs)
        if (demand.find(k) == demand.end() && !bucket.empty())
            failure.surplus[k] = -static_cast<std::int64_t>(bucket.size());
    if (!failure.surplus.empty()) return failure;

    // Fisher-Yates per class, then sequential pairing: each in-stub gets a
    // uniform draw from the remaining out-stubs of its class.
    for (auto& [k, bucket] : out_stubs) {
        for (std::size_t i = bucket.size(); i > 1; --i)
            std::swap(bucket[i - 1], bucket[rng.below(i)]);
    }

    SkeletonGraph g;
    g.n_nodes = static_cast<int>(types.size());
    g.node_type = types;
    g.edges.reserve(stubs.size());
    std::map<int, std::size_t> cursor;
    for (const InStub& s : stubs) {
        auto& bucket = out_stubs.at(s.label);
        const int src = bucket[cursor[s.label]++];
        g.edges.push_back(Edge{src, s.node});
    }

    if (!config.allow_self_loops || !config.allow_multi_edges) repair_edge_conflicts(g, config, rng);

    build_adjacency(g);
    return g;
}

std::int64_t clip(const std::vector<NodeType>& types, std::vector<InStub>& stubs,
                  const WiringFailure& failure, const GenerationConfig& config, Rng& rng) {
    (void)types;
    std::map<int, std::int64_t> surplus = failure.surplus;
    std::int64_t total_surplus = 0, total_deficit = 0;
    for (const auto& [k, s] : surplus) {
        if (s > 0) total_surplus += s;
        if (s < 0) total_deficit -= s;
    }
    if (total_surplus != total_deficit)
        throw Error(ErrorKind::generation_failed,
                    "stub totals are unbalanced; label relabeling cannot repair this");
    if (total_surplus == 0) return 0;

    std::int64_t budget = config.max_clip_swaps;
    if (budget < 0) budget = std::max<std::int64_t>(1000, static_cast<std::int64_t>(stubs.size()) / 10);
    if (total_surplus > budget)
        throw Error(ErrorKind::clip_budget_exceeded,
                    "clipping needs " + std::to_string(total_surplus) + " relabels, budget " +
                        std::to_string(budget));

    // Index stubs by label for the surplus classes only.
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < stubs.size(); ++i)
        if (surplus.count(stubs[i].label) && surplus[stubs[i].label] > 0) by_label[stubs[i].label].push_back(i);

    std::int64_t relabeled = 0;
    while (total_surplus > 0) {
        // Uniform in-stub among all stubs currently labeled with a surplus class.
        std::int64_t pool = 0;
        for (const auto& [k, s] : surplus)
            if (s > 0) pool += static_cast<std::int64_t>(by_label[k].size());
        std::int64_t pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(pool)));
        int from_class = 0;
        for (const auto& [k, s] : surplus) {
            if (s <= 0) continue;
            const std::int64_t size = static_cast<std::int64_t>(by_label[k].size());
            if (pick < size) {
                from_class = k;
                break;
            }
            pick -= size;
        }
        auto& bucket = by_label[from_class];
        const std::size_t stub_idx = bucket[static_cast<std::size_t>(pick)];

        // Deficit class weighted by remaining deficit.
        std::vector<int> deficit_classes;
        std::vector<double> deficit_weights;
        for (const auto& [k, s] : surplus)
            if (s < 0) {
                deficit_classes.push_back(k);
                deficit_weights.push_back(static_cast<double>(-s));
            }
        const int to_class = deficit_classes[rng.weighted_index(deficit_weights)];

        stubs[stub_idx].label = to_class;
        bucket[static_cast<std::size_t>(pick)] = bucket.back();
        bucket.pop_back();
        surplus[from_class] -= 1;
        surplus[to_class] += 1;
        total_surplus -= 1;
        ++relabeled;
    }
    return relabeled;
}

SkeletonGraph generate(int n, const DegreeModel& model, const GenerationConfig& config) {
    if (config.max_attempts < 1) throw Error(ErrorKind::invalid_argument, "max_attempts must be >= 1");
    std::string last_failure = "no attempt made";
    for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
        Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(attempt));
        try {
            std::vector<NodeType> types = draw_node_types(n, model, rng);
            const std::int64_t redraws =
                balance_node_types(types, model, rng, std::max<std::int64_t>(1000, 100LL * std::max(n, 1)));
            std::vector<InStub> stubs = assign_in_stub_types(types, model, rng);

            auto attempt_wire = wire(types, stubs, config, rng);
            std::int64_t relabels = 0;
            if (std::holds_alternative<WiringFailure>(attempt_wire)) {
                relabels = clip(types, stubs, std::get<WiringFailure>(attempt_wire), config, rng);
                attempt_wire = wire(types, stubs, config, rng);
            }
            if (std::holds_alternative<WiringFailure>(attempt_wire))
                throw Error(ErrorKind::generation_failed, "wiring still unbalanced after clipping");

            SkeletonGraph g = std::get<SkeletonGraph>(std::move(attempt_wire));
            g.gen_stats.attempts = attempt;
            g.gen_stats.type_redraws = redraws;
            g.gen_stats.stub_relabels = relabels;
            g.gen_stats.in_stub_count = static_cast<std::int64_t>(stubs.size());
            return g;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::generation_failed && e.kind() != ErrorKind::clip_budget_exceeded)
                throw;
            last_failure = e.what();
        }
    }
    throw Error(ErrorKind::generation_failed,
                "no acceptable graph in " + std::to_string(config.max_attempts) +
                    " attempts; last failure: " + last_failure);
}

std::map<NodeType, double> empirical_node_dist(const SkeletonGraph& graph) {
    std::map<NodeType, double> freq;
    for (const auto& t : graph.node_type) freq[t] += 1.0;
    for (auto& [t, f] : freq) f /= std::max(graph.n_nodes, 1);
    return freq;
}

std::map<EdgeType, double> empirical_edge_dist(const SkeletonGraph& graph) {
    std::map<EdgeType, double> freq;
    for (const Edge& e : graph.edges)
        freq[EdgeType{graph.node_type[e.src].out_deg, graph.node_type[e.dst].in_deg}] += 1.0;
    const double total = std::max<std::size_t>(graph.edges.size(), 1);
    for (auto& [t, f] : freq) f /= total;
    return freq;
}

namespace {

double pearson_over_edges(const SkeletonGraph& graph, bool source_out_degree) {
    if (graph.edges.empty()) throw Error(ErrorKind::invalid_argument, "graph has no edges");
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double n = static_cast<double>(graph.edges.size());
    for (const Edge& e : graph.edges) {
        const double x = source_out_degree ? graph.node_type[e.src].out_deg : graph.node_type[e.src].in_deg;
        const double y = graph.node_type[e.dst].in_deg;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    if (!(vx > 0) || !(vy > 0))
        throw Error(ErrorKind::degenerate_degree_variance, "degree sequence has zero variance over edges");
    return (sxy / n - (sx / n) * (sy / n)) / std::sqrt(vx * vy);
}

}  // namespace

double empirical_edge_assortativity(const SkeletonGraph& graph) { return pearson_over_edges(graph, true); }

double empirical_graph_assortativity(const SkeletonGraph& graph) { return pearson_over_edges(graph, false); }

void write_graph(std::ostream& out, const SkeletonGraph& graph) {
    out << "nodes " << graph.n_nodes << "\n";
    for (int v = 0; v < graph.n_nodes; ++v)
        out << "node " << v << " " << graph.node_type[v].in_deg << " " << graph.node_type[v].out_deg << "\n";
    for (const Edge& e : graph.edges) out << "edge " << e.src << " " << e.dst << "\n";
}

SkeletonGraph read_graph(std::istream& in) {
    std::string tag;
    int n = -1;
    if (!(in >> tag >> n) || tag != "nodes" || n < 0)
        throw Error(ErrorKind::io_error, "graph file must start with 'nodes <n>'");
    std::vector<NodeType> declared(n);
    std::vector<Edge> edges;
    while (in >> tag) {
        if (tag == "node") {
            int id, j, k;
            if (!(in >> id >> j >> k) || id < 0 || id >= n)
                throw Error(ErrorKind::io_error, "bad 'node' line");
            declared[id] = NodeType{j, k};
        } else if (tag == "edge") {
            int src, dst;
            if (!(in >> src >> dst)) throw Error(ErrorKind::io_error, "bad 'edge' line");
            edges.push_back(Edge{src, dst});
        } else {
            throw Error(ErrorKind::io_error, "unknown line tag '" + tag + "'");
        }
    }
    SkeletonGraph g = SkeletonGraph::from_edges(n, std::move(edges));
    for (int v = 0; v < n; ++v) {
        if (g.node_type[v] != declared[v]) {
            std::ostringstream os;
            os << "node " << v << " declares type (" << declared[v].in_deg << "," << declared[v].out_deg
               << ") but realizes (" << g.node_type[v].in_deg << "," << g.node_type[v].out_deg << ")";
            throw Error(ErrorKind::io_error, os.str());
        }
    }
    return g;
}

}  // namespace banknet
