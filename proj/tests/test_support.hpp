#pragma once

// Shared generators and independent oracles for the unit and acceptance
// suites. Everything here deliberately avoids the library's own solution
// paths: eigenvalues come from the characteristic polynomial or norm
// growth, binomial tails from subset enumeration, cascades from an
// asynchronous scheduler.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "banknet/balance_sheets.hpp"
#include "banknet/degree_model.hpp"
#include "banknet/matrix.hpp"
#include "banknet/monte_carlo.hpp"
#include "banknet/rng.hpp"
#include "banknet/skeleton.hpp"

namespace testsupport {

using banknet::DegreeModel;
using banknet::DegreeSupport;
using banknet::EdgeType;
using banknet::EdgeTypeDist;
using banknet::Matrix;
using banknet::NodeType;
using banknet::NodeTypeDist;
using banknet::ReducedAccounting;
using banknet::Rng;
using banknet::SkeletonGraph;

// --- random consistent models ----------------------------------------------

/// Random (P, Q) pair satisfying the marginal consistency constraints.
/// P starts symmetric (which equalizes the in- and out-degree means), gets
/// optional mean-preserving asymmetric transfers, and Q starts at the
/// product of its forced marginals and is decorated with random
/// marginal-preserving rotations.
inline DegreeModel random_consistent_model(Rng& rng, int min_degrees = 3, int max_degrees = 5,
                                           bool allow_zero_degree = false) {
    const int nd = min_degrees + static_cast<int>(rng.below(max_degrees - min_degrees + 1));
    std::vector<int> degrees;
    while (static_cast<int>(degrees.size()) < nd) {
        const int d = 1 + static_cast<int>(rng.below(12));
        if (std::find(degrees.begin(), degrees.end(), d) == degrees.end()) degrees.push_back(d);
    }
    if (allow_zero_degree && rng.uniform() < 0.5) degrees.push_back(0);
    std::sort(degrees.begin(), degrees.end());
    const int m = static_cast<int>(degrees.size());

    // Symmetric P with full positive diagonal, then normalize.
    std::vector<std::vector<double>> p(m, std::vector<double>(m, 0.0));
    double total = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            if (i != j && rng.uniform() < 0.35) continue;
            const double w = 0.05 + rng.uniform();
            p[i][j] += w;
            total += w;
            if (i != j) {
                p[j][i] += w;
                total += w;
            }
        }
    }
    for (auto& row : p)
        for (double& v : row) v /= total;

    // Mean-preserving asymmetric transfers: move mass between entries whose
    // in-degree change equals their out-degree change.
    for (int attempt = 0; attempt < 4 * m; ++attempt) {
        const int a = static_cast<int>(rng.below(m)), b = static_cast<int>(rng.below(m));
        const int c = static_cast<int>(rng.below(m)), d = static_cast<int>(rng.below(m));
        if (a == c || degrees[c] - degrees[a] != degrees[d] - degrees[b]) continue;
        const double delta = rng.uniform() * 0.5 * p[a][b];
        p[a][b] -= delta;
        p[c][d] += delta;
    }

    std::map<NodeType, double> p_entries;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (p[i][j] > 0) p_entries[NodeType{degrees[i], degrees[j]}] += p[i][j];

    // Forced Q marginals, then the independent product, then rotations.
    std::map<int, double> p_plus, p_minus;
    for (const auto& [t, v] : p_entries) {
        p_plus[t.out_deg] += v;
        p_minus[t.in_deg] += v;
    }
    double z = 0;
    for (const auto& [k, v] : p_plus) z += k * v;

    std::vector<int> qdeg;
    for (int d : degrees)
        if (d >= 1) qdeg.push_back(d);
    const int mq = static_cast<int>(qdeg.size());
    std::vector<double> q_plus(mq, 0.0), q_minus(mq, 0.0);
    for (int i = 0; i < mq; ++i) {
        q_plus[i] = qdeg[i] * (p_plus.count(qdeg[i]) ? p_plus[qdeg[i]] : 0.0) / z;
        q_minus[i] = qdeg[i] * (p_minus.count(qdeg[i]) ? p_minus[qdeg[i]] : 0.0) / z;
    }
    std::vector<std::vector<double>> q(mq, std::vector<double>(mq, 0.0));
    for (int k = 0; k < mq; ++k)
        for (int j = 0; j < mq; ++j) q[k][j] = q_plus[k] * q_minus[j];
    for (int rot = 0; rot < 6 * mq * mq; ++rot) {
        const int k1 = static_cast<int>(rng.below(mq)), k2 = static_cast<int>(rng.below(mq));
        const int j1 = static_cast<int>(rng.below(mq)), j2 = static_cast<int>(rng.below(mq));
        if (k1 == k2 || j1 == j2) continue;
        const double cap = std::min(q[k1][j2], q[k2][j1]);
        if (!(cap > 0)) continue;
        const double delta = rng.uniform() * cap;
        q[k1][j1] += delta;
        q[k2][j2] += delta;
        q[k1][j2] -= delta;
        q[k2][j1] -= delta;
    }

    std::map<EdgeType, double> q_entries;
    for (int k = 0; k < mq; ++k)
        for (int j = 0; j < mq; ++j)
            if (q[k][j] > 0) q_entries[EdgeType{qdeg[k], qdeg[j]}] = q[k][j];

    return DegreeModel(DegreeSupport::make(degrees, degrees), NodeTypeDist(std::move(p_entries)),
                       EdgeTypeDist(std::move(q_entries)));
}

/// Accounting with a random vulnerability pattern: each type's buffer is
/// either half or double its exposure weight.
inline ReducedAccounting random_vulnerability_accounting(const DegreeModel& model, Rng& rng) {
    std::map<int, double> weights;
    for (int j : model.support().in_degrees)
        if (j >= 1) weights[j] = 1.0 / (5.0 * j);
    std::map<NodeType, double> gamma;
    for (int j : model.support().in_degrees)
        for (int k : model.support().out_degrees) {
            const double w = j >= 1 ? weights[j] : 0.1;
            gamma[NodeType{j, k}] = (rng.uniform() < 0.5 ? 0.5 : 2.0) * w;
        }
    return ReducedAccounting(std::move(gamma), std::move(weights));
}

// --- spectral radius oracles -------------------------------------------------

/// Exact closed form for 1x1 and 2x2 matrices.
inline double radius_closed_form(const Matrix& m) {
    if (m.rows() == 1) return std::abs(m(0, 0));
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double half_trace = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + b * c;
    if (disc >= 0) {
        const double root = std::sqrt(disc);
        return std::max(std::abs(half_trace + root), std::abs(half_trace - root));
    }
    return std::sqrt(half_trace * half_trace - disc);
}

/// Norm-growth estimate ||A^(2^t)||^(1/2^t); independent of any eigenvector
/// iteration, robust for periodic and defective spectra.
inline double radius_norm_growth(const Matrix& m) {
    const int n = m.rows();
    auto norm_inf = [n](const Matrix& x) {
        double best = 0;
        for (int r = 0; r < n; ++r) {
            double row = 0;
            for (int c = 0; c < n; ++c) row += std::abs(x(r, c));
            best = std::max(best, row);
        }
        return best;
    };
    Matrix c = m;
    double s = norm_inf(c);
    if (s == 0) return 0;
    for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) c(r, col) /= s;
    double log_norm = std::log(s);
    double exponent = 1;
    for (int t = 0; t < 60; ++t) {
        Matrix d = c * c;
        const double sd = norm_inf(d);
        if (sd == 0) return 0;
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col) d(r, col) /= sd;
        c = std::move(d);
        exponent *= 2;
        log_norm = 2 * log_norm + std::log(sd);
    }
    return std::exp(log_norm / exponent);
}

/// Characteristic polynomial coefficients via the Faddeev-LeVerrier
/// recursion: p(x) = x^n + coeff[0] x^(n-1) + ... + coeff[n-1].
inline std::vector<double> char_poly(const Matrix& a) {
    const int n = a.rows();
    Matrix m(n, n);
    std::vector<double> coeff(n, 0.0);
    Matrix prev(n, n);
    for (int step = 1; step <= n; ++step) {
        if (step == 1) {
            m = a;
        } else {
            Matrix shifted = prev;
            for (int i = 0; i < n; ++i) shifted(i, i) += coeff[step - 2];
            m = a * shifted;
        }
        double trace = 0;
        for (int i = 0; i < n; ++i) trace += m(i, i);
        coeff[step - 1] = -trace / step;
        prev = m;
    }
    return coeff;
}

/// All roots of the characteristic polynomial by Durand-Kerner; returns the
/// largest magnitude. Repeated roots limit the attainable accuracy, so this
/// oracle is asserted loosely and paired with radius_norm_growth.
inline double radius_char_poly(const Matrix& a, int iterations = 2000) {
    const int n = a.rows();
    if (n == 0) return 0;
    if (n <= 2) return radius_closed_form(a);
    const std::vector<double> coeff = char_poly(a);
    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc(1, 0);
        for (int i = 0; i < n; ++i) acc = acc * x + coeff[i];
        return acc;
    };
    double bound = 1;
    for (double c : coeff) bound = std::max(bound, 1 + std::abs(c));
    std::vector<std::complex<double>> roots(n);
    const std::complex<double> seed(0.4, 0.9);
    std::complex<double> power(1, 0);
    for (int i = 0; i < n; ++i) {
        power *= seed;
        roots[i] = power * bound / std::abs(power);
    }
    for (int it = 0; it < iterations; ++it) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> denom(1, 0);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            if (std::abs(denom) < 1e-300) continue;
            const std::complex<double> delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14 * bound) break;
    }
    double radius = 0;
    for (const auto& r : roots) radius = std::max(radius, std::abs(r));
    return radius;
}

// --- binomial tail oracle ----------------------------------------------------

/// P[at least m_min of j independent events with probability p] by explicit
/// enumeration of all 2^j outcomes.
inline double binomial_tail_enum(int j, std::int64_t m_min, double p) {
    double total = 0;
    for (unsigned mask = 0; mask < (1u << j); ++mask) {
        const int bits = __builtin_popcount(mask);
        if (bits < m_min) continue;
        total += std::pow(p, bits) * std::pow(1 - p, j - bits);
    }
    return total;
}

// --- independent cascade scheduler -------------------------------------------

/// Asynchronous cascade: process one defaulted node at a time in random
/// order, propagating each out-edge loss immediately. Returns the final
/// defaulted node set (sorted). Used as the scheduling-independence oracle
/// against the synchronous implementation.
inline std::vector<int> async_cascade(const SkeletonGraph& g, const std::vector<int>& seed,
                                      const banknet::ThresholdTable& thresholds, Rng& rng) {
    std::vector<char> defaulted(g.n_nodes, 0);
    std::vector<std::int64_t> hit(g.n_nodes, 0);
    std::vector<int> active;
    for (int v : seed)
        if (!defaulted[v]) {
            defaulted[v] = 1;
            active.push_back(v);
        }
    while (!active.empty()) {
        const std::size_t pick = static_cast<std::size_t>(rng.below(active.size()));
        const int v = active[pick];
        active[pick] = active.back();
        active.pop_back();
        for (int e : g.out_edges[v]) {
            const int target = g.edges[e].dst;
            hit[target] += 1;
            if (defaulted[target]) continue;
            const NodeType& t = g.node_type[target];
            if (t.in_deg >= 1 && hit[target] >= thresholds.threshold(t.in_deg, t.out_deg)) {
                defaulted[target] = 1;
                active.push_back(target);
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < g.n_nodes; ++v)
        if (defaulted[v]) out.push_back(v);
    return out;
}

/// Random directed multigraph (self-loops and parallel edges allowed) with
/// thresholds drawn per realized type.
struct RandomGraphCase {
    SkeletonGraph graph;
    banknet::ThresholdTable thresholds;
};

inline RandomGraphCase random_graph_case(Rng& rng, int max_nodes = 200) {
    const int n = 2 + static_cast<int>(rng.below(max_nodes - 1));
    const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(4 * n) + 1));
    std::vector<banknet::Edge> edges;
    edges.reserve(m);
    for (int e = 0; e < m; ++e)
        edges.push_back({static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n))});
    SkeletonGraph g = SkeletonGraph::from_edges(n, std::move(edges));

    std::map<NodeType, std::int64_t> table;
    for (const NodeType& t : g.node_type) {
        if (table.count(t)) continue;
        if (t.in_deg == 0)
            table[t] = banknet::kNeverTriggered;
        else
            table[t] = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(t.in_deg) + 1));
    }
    return RandomGraphCase{std::move(g), banknet::ThresholdTable(std::move(table))};
}

}  // namespace testsupport
