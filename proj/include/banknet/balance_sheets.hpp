#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "banknet/degree_model.hpp"
#include "banknet/types.hpp"

namespace banknet {

/// Full accounting data of a single bank. Edge weights are listed per
/// incident exposure; all weights must be strictly positive.
struct FullBalanceSheet {
    double external_assets = 0;
    double external_liabilities = 0;
    std::vector<double> in_edge_weights;
    std::vector<double> out_edge_weights;
};

/// Net worth (buffer): external assets plus interbank assets minus external
/// liabilities minus interbank liabilities. May be negative; initial
/// equilibrium requires it positive at every node.
double net_worth(const FullBalanceSheet& sheet);

/// The reduced accounting data the cascade dynamics depend on: a buffer per
/// node type and an exposure weight per in-degree.
class ReducedAccounting {
public:
    ReducedAccounting(std::map<NodeType, double> gamma, std::map<int, double> weights);

    double gamma(int j, int k) const;
    double weight(int j) const;
    bool has_weight(int j) const;

    const std::map<NodeType, double>& gamma_table() const { return gamma_; }
    const std::map<int, double>& weights() const { return weights_; }

    /// Same buffers with every gamma entry replaced by a scalar (used by
    /// buffer sweeps).
    ReducedAccounting with_uniform_gamma(double gamma_scalar) const;

private:
    std::map<NodeType, double> gamma_;  // buffer per node type, > 0
    std::map<int, double> weights_;     // exposure weight per in-degree j >= 1, > 0
};

/// Uniform buffer gamma for every type in the support and weights 1/(5j)
/// for every in-degree j >= 1. In-degree 0 gets no weight entry.
ReducedAccounting gk_specification(double gamma_scalar, const DegreeSupport& support);

/// Sentinel threshold for nodes that cannot be triggered by in-edge
/// defaults (in-degree 0).
inline constexpr std::int64_t kNeverTriggered = std::numeric_limits<std::int64_t>::max();

/// Per-type default thresholds M = ceil(gamma / w) and the vulnerability
/// indicator (default from a single in-edge loss, i.e. M == 1).
class ThresholdTable {
public:
    ThresholdTable(std::map<NodeType, std::int64_t> thresholds);

    std::int64_t threshold(int j, int k) const;
    bool vulnerable(int j, int k) const;  // gamma <= w, equivalently M == 1

    const std::map<NodeType, std::int64_t>& table() const { return m_; }

private:
    std::map<NodeType, std::int64_t> m_;
};

ThresholdTable thresholds(const ReducedAccounting& acct);

/// ceil(gamma/w) with a relative snap tolerance: a quotient within 1e-9 of
/// an integer is treated as that integer, so buffers supplied as rounded
/// decimals (0.05 vs 1/20) land on the intended threshold. A loss exactly
/// equal to the buffer defaults the node, which this ceiling encodes.
std::int64_t default_threshold(double gamma, double weight);

}  // namespace banknet
