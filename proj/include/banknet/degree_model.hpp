#pragma once

#include <map>
#include <utility>
#include <vector>

#include "banknet/types.hpp"

namespace banknet {

/// Finite sets of admissible in- and out-degrees. Every degree referenced by
/// a node or edge distribution must be listed here.
struct DegreeSupport {
    std::vector<int> in_degrees;   // sorted, unique, non-negative
    std::vector<int> out_degrees;  // sorted, unique, non-negative

    static DegreeSupport make(std::vector<int> in_degrees, std::vector<int> out_degrees);

    bool has_in(int j) const;
    bool has_out(int k) const;
};

struct Marginals {
    std::map<int, double> plus;   // by out-degree
    std::map<int, double> minus;  // by in-degree
};

/// Joint probability of a node having in-degree j and out-degree k.
/// Stored sparsely: absent types have probability zero.
class NodeTypeDist {
public:
    explicit NodeTypeDist(std::map<NodeType, double> entries);

    double at(int j, int k) const;
    const std::map<NodeType, double>& entries() const { return entries_; }
    const std::map<int, double>& plus() const { return plus_; }    // P+_k
    const std::map<int, double>& minus() const { return minus_; }  // P-_j

    double plus_at(int k) const;
    double minus_at(int j) const;

private:
    std::map<NodeType, double> entries_;
    std::map<int, double> plus_, minus_;
};

/// Joint probability of an edge leaving a node of out-degree k and entering
/// a node of in-degree j. Any positive entry requires k >= 1 and j >= 1.
class EdgeTypeDist {
public:
    explicit EdgeTypeDist(std::map<EdgeType, double> entries);

    double at(int k, int j) const;
    const std::map<EdgeType, double>& entries() const { return entries_; }
    const std::map<int, double>& plus() const { return plus_; }    // Q+_k
    const std::map<int, double>& minus() const { return minus_; }  // Q-_j

    double plus_at(int k) const;
    double minus_at(int j) const;

private:
    std::map<EdgeType, double> entries_;
    std::map<int, double> plus_, minus_;
};

/// The probabilistic description of the infinite network: node-type law P,
/// edge-type law Q and mean degree z. Construction checks that the support
/// covers the distributions and that the in- and out-degree means agree;
/// the P/Q marginal consistency constraints are checked separately by
/// validate_consistency so invalid inputs can be diagnosed rather than
/// rejected wholesale.
class DegreeModel {
public:
    DegreeModel(DegreeSupport support, NodeTypeDist node_dist, EdgeTypeDist edge_dist);

    const DegreeSupport& support() const { return support_; }
    const NodeTypeDist& node_dist() const { return node_dist_; }
    const EdgeTypeDist& edge_dist() const { return edge_dist_; }
    double mean_degree() const { return z_; }

private:
    DegreeSupport support_;
    NodeTypeDist node_dist_;
    EdgeTypeDist edge_dist_;
    double z_;
};

Marginals marginals(const NodeTypeDist& dist);
Marginals marginals(const EdgeTypeDist& dist);

/// Mean degree z = sum_k k P+_k. Throws if the in- and out-degree means
/// disagree beyond kMeanDegreeTol or if z == 0.
double mean_degree(const NodeTypeDist& node_dist);

struct ConsistencyViolation {
    char side;        // '+' for the out-degree constraint, '-' for the in-degree one
    int degree;
    double expected;  // k P+_k / z  (resp. j P-_j / z)
    double actual;    // Q+_k        (resp. Q-_j)
    double residual() const { return actual - expected; }
};

/// Checks Q+_k = k P+_k / z and Q-_j = j P-_j / z for every degree in the
/// support, to kConsistencyTol. Violations are returned, not thrown.
std::vector<ConsistencyViolation> validate_consistency(const DegreeModel& model);

/// Degree correlation across edges: Pearson correlation of (out-degree,
/// in-degree) under Q. Zero exactly when Q factorizes into its marginals.
double edge_assortativity(const EdgeTypeDist& edge_dist);

/// Joint law B of the in-degrees of the two endpoints of a random edge,
/// keyed (source in-degree, target in-degree).
std::map<std::pair<int, int>, double> in_degree_joint(const DegreeModel& model);

/// Pearson correlation of the endpoint in-degrees under B.
double graph_assortativity(const DegreeModel& model);

}  // namespace banknet
