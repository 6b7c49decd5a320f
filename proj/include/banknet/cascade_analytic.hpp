#pragma once

#include <map>
#include <vector>

#include "banknet/balance_sheets.hpp"
#include "banknet/degree_model.hpp"
#include "banknet/types.hpp"

namespace banknet {

/// Initial default probability per node type.
struct ShockSpec {
    std::map<NodeType, double> rho0;

    double at(int j, int k) const {
        auto it = rho0.find(NodeType{j, k});
        return it == rho0.end() ? 0.0 : it->second;
    }

    /// Same probability for every type in the support.
    static ShockSpec uniform(double value, const DegreeSupport& support);
};

/// Probability that an edge with the given in-degree is defaulted.
/// Indexed by in-degree; only in-degrees with edge mass appear.
using EdgeDefaultVector = std::map<int, double>;

/// Defaulted-edge probability per out-degree class. The conditional edge
/// default probability does not depend on the in-degree of the edge, so one
/// value per out-degree is the full state; (out-degree, in-degree) views
/// are a presentation layer on top of this.
using SigmaByOutDegree = std::map<int, double>;

/// P[Bin(n, p) >= m_min], computed by an upward term recurrence in extended
/// precision so degree counts of a few hundred stay finite.
double binomial_tail(int n, std::int64_t m_min, double p);

/// Probability that an out-edge of a class-k node is defaulted, given the
/// per-type node default probabilities.
SigmaByOutDegree edge_update(const std::map<NodeType, double>& rho, const NodeTypeDist& node_dist);

/// Per-in-degree edge default probability: the Q-weighted average of sigma
/// over out-degree classes.
EdgeDefaultVector aggregate_a(const SigmaByOutDegree& sigma, const EdgeTypeDist& edge_dist);

/// Probability that a non-seed node of each type has at least its threshold
/// of defaulted in-edges: the binomial upper tail scaled by (1 - rho0).
std::map<NodeType, double> node_update(const EdgeDefaultVector& a, const ShockSpec& shock,
                                       const ThresholdTable& thresholds);

struct InitialState {
    SigmaByOutDegree sigma0;
    EdgeDefaultVector a0;
};

/// Edge default probabilities produced directly by the seed set.
InitialState initial_state(const ShockSpec& shock, const DegreeModel& model);

struct StepResult {
    std::map<NodeType, double> rho;
    SigmaByOutDegree sigma;
    EdgeDefaultVector a;
};

/// One application of the cascade map: node update from a_prev, edge update,
/// then aggregation with the seed contribution sigma0 added back in.
StepResult cascade_step(const EdgeDefaultVector& a_prev, const SigmaByOutDegree& sigma0,
                        const ShockSpec& shock, const ThresholdTable& thresholds,
                        const DegreeModel& model);

struct CascadeStepRecord {
    int n = 0;
    std::map<NodeType, double> rho;  // newly triggered nodes (excludes the seed set)
    SigmaByOutDegree sigma;          // newly triggered edges
    EdgeDefaultVector a;             // cumulative edge default probability
};

struct CascadeTrajectory {
    std::vector<CascadeStepRecord> steps;  // step 0 holds sigma0 / a0 and zero rho
    bool converged = false;
    int n_steps = 0;
    std::map<NodeType, double> final_default_prob;  // rho0 + rho_inf per type
    double expected_cascade_size = 0;               // sum over types of (rho0 + rho_inf) P
};

/// Iterates the cascade map from the seed state until the edge default
/// vector moves less than tol in sup norm or max_iter is reached; a
/// non-converged run is returned flagged, not thrown.
CascadeTrajectory solve_cascade(const DegreeModel& model, const ReducedAccounting& acct,
                                const ShockSpec& shock, double tol = 1e-10, int max_iter = 100000);

}  // namespace banknet
