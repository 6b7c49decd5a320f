#include "banknet/balance_sheets.hpp"

#include <cmath>
#include <sstream>

namespace banknet {

double net_worth(const FullBalanceSheet& sheet) {
    double worth = sheet.external_assets - sheet.external_liabilities;
    for (double w : sheet.in_edge_weights) {
        if (!(w > 0)) throw Error(ErrorKind::invalid_argument, "in-edge weight must be positive");
        worth += w;
    }
    for (double w : sheet.out_edge_weights) {
        if (!(w > 0)) throw Error(ErrorKind::invalid_argument, "out-edge weight must be positive");
        worth -= w;
    }
    return worth;
}

ReducedAccounting::ReducedAccounting(std::map<NodeType, double> gamma, std::map<int, double> weights)
    : gamma_(std::move(gamma)), weights_(std::move(weights)) {
    for (const auto& [type, g] : gamma_) {
        if (!(g > 0)) {
            std::ostringstream os;
            os << "buffer for type (" << type.in_deg << "," << type.out_deg
               << ") must be positive (initial equilibrium)";
            throw Error(ErrorKind::invalid_argument, os.str());
        }
    }
    for (const auto& [j, w] : weights_) {
        if (j < 1) throw Error(ErrorKind::invalid_argument, "exposure weights are defined for in-degree >= 1");
        if (!(w > 0)) throw Error(ErrorKind::invalid_argument, "exposure weight must be positive");
    }
}

double ReducedAccounting::gamma(int j, int k) const {
    auto it = gamma_.find(NodeType{j, k});
    if (it == gamma_.end()) {
        std::ostringstream os;
        os << "no buffer entry for type (" << j << "," << k << ")";
        throw Error(ErrorKind::invalid_argument, os.str());
    }
    return it->second;
}

double ReducedAccounting::weight(int j) const {
    auto it = weights_.find(j);
    if (it == weights_.end()) {
        std::ostringstream os;
        os << "no exposure weight for in-degree " << j;
        throw Error(ErrorKind::invalid_argument, os.str());
    }
    return it->second;
}

bool ReducedAccounting::has_weight(int j) const { return weights_.count(j) > 0; }

ReducedAccounting ReducedAccounting::with_uniform_gamma(double gamma_scalar) const {
    std::map<NodeType, double> gamma;
    for (const auto& [type, g] : gamma_) gamma[type] = gamma_scalar;
    return ReducedAccounting(std::move(gamma), weights_);
}

ReducedAccounting gk_specification(double gamma_scalar, const DegreeSupport& support) {
    if (!(gamma_scalar > 0)) throw Error(ErrorKind::invalid_argument, "buffer must be positive");
    std::map<NodeType, double> gamma;
    for (int j : support.in_degrees)
        for (int k : support.out_degrees) gamma[NodeType{j, k}] = gamma_scalar;
    std::map<int, double> weights;
    for (int j : support.in_degrees)
        if (j >= 1) weights[j] = 1.0 / (5.0 * j);
    return ReducedAccounting(std::move(gamma), std::move(weights));
}

std::int64_t default_threshold(double gamma, double weight) {
    const double q = gamma / weight;
    const double snapped = std::nearbyint(q);
    std::int64_t m;
    if (std::abs(q - snapped) <= 1e-9 * std::max(1.0, std::abs(q)))
        m = static_cast<std::int64_t>(snapped);
    else
        m = static_cast<std::int64_t>(std::ceil(q));
    return std::max<std::int64_t>(m, 1);  // a positive buffer always survives zero losses
}

ThresholdTable::ThresholdTable(std::map<NodeType, std::int64_t> thresholds) : m_(std::move(thresholds)) {}

std::int64_t ThresholdTable::threshold(int j, int k) const {
    auto it = m_.find(NodeType{j, k});
    if (it == m_.end()) {
        std::ostringstream os;
        os << "no threshold entry for type (" << j << "," << k << ")";
        throw Error(ErrorKind::invalid_argument, os.str());
    }
    return it->second;
}

bool ThresholdTable::vulnerable(int j, int k) const { return threshold(j, k) == 1; }

ThresholdTable thresholds(const ReducedAccounting& acct) {
    std::map<NodeType, std::int64_t> m;
    for (const auto& [type, gamma] : acct.gamma_table()) {
        if (type.in_deg == 0) {
            m[type] = kNeverTriggered;
        } else {
            m[type] = default_threshold(gamma, acct.weight(type.in_deg));
        }
    }
    return ThresholdTable(std::move(m));
}

}  // namespace banknet
