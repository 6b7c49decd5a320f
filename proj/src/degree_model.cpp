#include "banknet/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banknet {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_distribution: return "invalid_distribution";
        case ErrorKind::inconsistent_mean_degree: return "inconsistent_mean_degree";
        case ErrorKind::zero_mean_degree: return "zero_mean_degree";
        case ErrorKind::degenerate_degree_variance: return "degenerate_degree_variance";
        case ErrorKind::missing_out_degree_mass: return "missing_out_degree_mass";
        case ErrorKind::missing_in_degree_mass: return "missing_in_degree_mass";
        case ErrorKind::missing_mass: return "missing_mass";
        case ErrorKind::clip_budget_exceeded: return "clip_budget_exceeded";
        case ErrorKind::generation_failed: return "generation_failed";
        case ErrorKind::parameter_out_of_range: return "parameter_out_of_range";
        case ErrorKind::simplex_violation: return "simplex_violation";
        case ErrorKind::no_bracket: return "no_bracket";
        case ErrorKind::not_converged: return "not_converged";
        case ErrorKind::io_error: return "io_error";
        case ErrorKind::invalid_argument: return "invalid_argument";
    }
    return "unknown_error";
}

namespace {

// Entries may come from user files with rounded decimals; reject anything
// clearly outside [0,1] but forgive representation-level noise.
constexpr double kEntryGrace = 1e-15;

void check_probability_entries(double sum, const char* what) {
    if (std::abs(sum - 1.0) > kProbSumTol) {
        std::ostringstream os;
        os << what << " entries sum to " << sum << ", expected 1 within " << kProbSumTol;
        throw Error(ErrorKind::invalid_distribution, os.str());
    }
}

double checked_entry(double v, const char* what) {
    if (v < -kEntryGrace || v > 1.0 + kEntryGrace)
        throw Error(ErrorKind::invalid_distribution, std::string(what) + " entry outside [0,1]");
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace

DegreeSupport DegreeSupport::make(std::vector<int> in_degrees, std::vector<int> out_degrees) {
    auto prepare = [](std::vector<int>& v, const char* what) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        if (v.empty()) throw Error(ErrorKind::invalid_argument, std::string(what) + " support is empty");
        if (v.front() < 0) throw Error(ErrorKind::invalid_argument, std::string(what) + " support has negative degree");
    };
    prepare(in_degrees, "in-degree");
    prepare(out_degrees, "out-degree");
    return DegreeSupport{std::move(in_degrees), std::move(out_degrees)};
}

bool DegreeSupport::has_in(int j) const {
    return std::binary_search(in_degrees.begin(), in_degrees.end(), j);
}

bool DegreeSupport::has_out(int k) const {
    return std::binary_search(out_degrees.begin(), out_degrees.end(), k);
}

NodeTypeDist::NodeTypeDist(std::map<NodeType, double> entries) : entries_(std::move(entries)) {
    double sum = 0;
    for (auto& [type, p] : entries_) {
        p = checked_entry(p, "node-type");
        sum += p;
        plus_[type.out_deg] += p;
        minus_[type.in_deg] += p;
    }
    check_probability_entries(sum, "node-type");
}

double NodeTypeDist::at(int j, int k) const {
    auto it = entries_.find(NodeType{j, k});
    return it == entries_.end() ? 0.0 : it->second;
}

double NodeTypeDist::plus_at(int k) const {
    auto it = plus_.find(k);
    return it == plus_.end() ? 0.0 : it->second;
}

double NodeTypeDist::minus_at(int j) const {
    auto it = minus_.find(j);
    return it == minus_.end() ? 0.0 : it->second;
}

EdgeTypeDist::EdgeTypeDist(std::map<EdgeType, double> entries) : entries_(std::move(entries)) {
    double sum = 0;
    for (auto& [type, q] : entries_) {
        q = checked_entry(q, "edge-type");
        if (q > 0 && (type.out_deg < 1 || type.in_deg < 1))
            throw Error(ErrorKind::invalid_distribution,
                        "edge-type mass at degree 0: an edge needs an out-stub and an in-stub");
        sum += q;
        plus_[type.out_deg] += q;
        minus_[type.in_deg] += q;
    }
    check_probability_entries(sum, "edge-type");
}

double EdgeTypeDist::at(int k, int j) const {
    auto it = entries_.find(EdgeType{k, j});
    return it == entries_.end() ? 0.0 : it->second;
}

double EdgeTypeDist::plus_at(int k) const {
    auto it = plus_.find(k);
    return it == plus_.end() ? 0.0 : it->second;
}

double EdgeTypeDist::minus_at(int j) const {
    auto it = minus_.find(j);
    return it == minus_.end() ? 0.0 : it->second;
}

DegreeModel::DegreeModel(DegreeSupport support, NodeTypeDist node_dist, EdgeTypeDist edge_dist)
    : support_(std::move(support)), node_dist_(std::move(node_dist)), edge_dist_(std::move(edge_dist)) {
    for (const auto& [type, p] : node_dist_.entries()) {
        if (!support_.has_in(type.in_deg) || !support_.has_out(type.out_deg)) {
            std::ostringstream os;
            os << "node type (" << type.in_deg << "," << type.out_deg << ") outside support";
            throw Error(ErrorKind::invalid_argument, os.str());
        }
    }
    for (const auto& [type, q] : edge_dist_.entries()) {
        if (!support_.has_out(type.out_deg) || !support_.has_in(type.in_deg)) {
            std::ostringstream os;
            os << "edge type (" << type.out_deg << "," << type.in_deg << ") outside support";
            throw Error(ErrorKind::invalid_argument, os.str());
        }
    }
    z_ = banknet::mean_degree(node_dist_);
}

Marginals marginals(const NodeTypeDist& dist) { return Marginals{dist.plus(), dist.minus()}; }
Marginals marginals(const EdgeTypeDist& dist) { return Marginals{dist.plus(), dist.minus()}; }

double mean_degree(const NodeTypeDist& node_dist) {
    double out_mean = 0, in_mean = 0;
    for (const auto& [k, p] : node_dist.plus()) out_mean += k * p;
    for (const auto& [j, p] : node_dist.minus()) in_mean += j * p;
    if (std::abs(out_mean - in_mean) > kMeanDegreeTol * std::max(1.0, out_mean)) {
        std::ostringstream os;
        os << "mean out-degree " << out_mean << " != mean in-degree " << in_mean;
        throw Error(ErrorKind::inconsistent_mean_degree, os.str());
    }
    if (!(out_mean > 0)) throw Error(ErrorKind::zero_mean_degree, "mean degree is zero");
    return out_mean;
}

std::vector<ConsistencyViolation> validate_consistency(const DegreeModel& model) {
    std::vector<ConsistencyViolation> violations;
    const double z = model.mean_degree();
    for (int k : model.support().out_degrees) {
        const double expected = k * model.node_dist().plus_at(k) / z;
        const double actual = model.edge_dist().plus_at(k);
        if (std::abs(actual - expected) > kConsistencyTol)
            violations.push_back({'+', k, expected, actual});
    }
    for (int j : model.support().in_degrees) {
        const double expected = j * model.node_dist().minus_at(j) / z;
        const double actual = model.edge_dist().minus_at(j);
        if (std::abs(actual - expected) > kConsistencyTol)
            violations.push_back({'-', j, expected, actual});
    }
    return violations;
}

namespace {

// Mean and variance of a degree marginal (finite discrete law).
struct MarginalMoments {
    double mean = 0, var = 0;
};

MarginalMoments moments(const std::map<int, double>& marginal) {
    MarginalMoments m;
    double second = 0;
    for (const auto& [d, p] : marginal) {
        m.mean += d * p;
        second += static_cast<double>(d) * d * p;
    }
    m.var = second - m.mean * m.mean;
    return m;
}

double pearson_from_joint(const std::map<std::pair<int, int>, double>& joint,
                          const std::map<int, double>& row_marginal,
                          const std::map<int, double>& col_marginal) {
    const MarginalMoments row = moments(row_marginal);
    const MarginalMoments col = moments(col_marginal);
    if (!(row.var > 0) || !(col.var > 0))
        throw Error(ErrorKind::degenerate_degree_variance, "a degree marginal has zero variance");
    double cross = 0;
    for (const auto& [dd, p] : joint) cross += static_cast<double>(dd.first) * dd.second * p;
    return (cross - row.mean * col.mean) / std::sqrt(row.var * col.var);
}

}  // namespace

double edge_assortativity(const EdgeTypeDist& edge_dist) {
    std::map<std::pair<int, int>, double> joint;
    for (const auto& [type, q] : edge_dist.entries()) joint[{type.in_deg, type.out_deg}] = q;
    // rows: in-degree marginal Q-, cols: out-degree marginal Q+
    return pearson_from_joint(joint, edge_dist.minus(), edge_dist.plus());
}

std::map<std::pair<int, int>, double> in_degree_joint(const DegreeModel& model) {
    const auto& p = model.node_dist();
    const auto& q = model.edge_dist();
    for (const auto& [k, qk] : q.plus()) {
        if (qk > 0 && !(p.plus_at(k) > 0)) {
            std::ostringstream os;
            os << "edge mass at out-degree " << k << " but P+_" << k << " = 0";
            throw Error(ErrorKind::missing_out_degree_mass, os.str());
        }
    }
    std::map<std::pair<int, int>, double> joint;
    for (const auto& [ptype, pj] : p.entries()) {
        if (pj == 0) continue;
        const double pk = p.plus_at(ptype.out_deg);
        for (const auto& [qtype, qv] : q.entries()) {
            if (qtype.out_deg != ptype.out_deg || qv == 0) continue;
            joint[{ptype.in_deg, qtype.in_deg}] += pj * qv / pk;
        }
    }
    return joint;
}

double graph_assortativity(const DegreeModel& model) {
    const auto joint = in_degree_joint(model);
    std::map<int, double> row, col;
    for (const auto& [dd, p] : joint) {
        row[dd.first] += p;
        col[dd.second] += p;
    }
    return pearson_from_joint(joint, row, col);
}

}  // namespace banknet
