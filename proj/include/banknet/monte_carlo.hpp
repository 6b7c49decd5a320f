#pragma once

#include <cstdint>
#include <vector>

#include "banknet/balance_sheets.hpp"
#include "banknet/cascade_analytic.hpp"
#include "banknet/rng.hpp"
#include "banknet/skeleton.hpp"
#include "banknet/types.hpp"

namespace banknet {

/// Seed-set selection: one uniformly random bank, or each bank
/// independently with its type's shock probability.
struct ShockConfig {
    enum class Mode { single_node, fractional };
    Mode mode = Mode::single_node;
    ShockSpec rho0;  // used in fractional mode
};

/// Nodes insolvent before any contagion. Fractional mode includes each
/// type-(j,k) node independently with probability rho0_{jk}.
std::vector<int> apply_shock(const SkeletonGraph& graph, const ShockConfig& shock, Rng& rng);

/// All out-edges of a defaulted node set (zero recovery: every exposure to
/// a defaulted bank is written off in full).
std::vector<int> edge_update_set(const SkeletonGraph& graph, const std::vector<int>& nodes);

/// Nodes outside the seed set whose defaulted in-edge count reaches their
/// threshold.
std::vector<int> node_update_set(const SkeletonGraph& graph, const std::vector<int>& edges,
                                 const ThresholdTable& thresholds, const std::vector<int>& seed_nodes);

struct CascadeRunResult {
    std::vector<int> defaulted_nodes;  // sorted ids, seed included
    std::vector<int> defaulted_edges;  // sorted edge ids
    int n_rounds = 0;
    double default_fraction = 0;
    bool is_global = false;
};

/// Synchronous alternating node/edge updates to the fixed point. The final
/// defaulted set does not depend on scheduling; the round structure does.
CascadeRunResult run_cascade(const SkeletonGraph& graph, const std::vector<int>& seed_nodes,
                             const ThresholdTable& thresholds, double global_threshold = 0.05);

struct EnsembleConfig {
    int n_nodes = 10000;
    int n_realizations = 500;
    std::uint64_t master_seed = 1;
    double global_threshold = 0.05;   // strict: global means fraction > threshold
    bool fresh_graph_per_run = true;  // false: one graph, fresh shocks
    GenerationConfig generation;      // seed field is ignored; streams derive from master_seed
    ShockConfig shock;
};

struct RealizationRecord {
    int index = 0;
    std::uint64_t seed = 0;
    double default_fraction = 0;
    int n_rounds = 0;
    bool is_global = false;
    bool failed = false;  // graph generation failed; excluded from statistics
};

struct EnsembleStats {
    int n_realizations = 0;
    std::uint64_t master_seed = 0;
    double global_frequency = 0;  // global runs / successful runs
    double mean_global_size = 0;  // mean fraction over global runs only
    int n_global = 0;
    int n_failures = 0;
    std::vector<RealizationRecord> runs;
};

/// Ensemble over independent realizations, one derived RNG stream per
/// index. The parallel version runs realizations on OpenMP threads and is
/// bit-identical to the serial reference for any thread count.
EnsembleStats run_ensemble(const DegreeModel& model, const ReducedAccounting& acct,
                           const EnsembleConfig& config);
EnsembleStats run_ensemble_serial(const DegreeModel& model, const ReducedAccounting& acct,
                                  const EnsembleConfig& config);

}  // namespace banknet
