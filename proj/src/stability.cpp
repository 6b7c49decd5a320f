#include "banknet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace banknet {

namespace {

// In-degrees that can carry defaulted edges: j >= 1 with node or edge mass.
std::vector<int> active_in_degrees(const DegreeModel& model) {
    std::set<int> degrees;
    for (const auto& [j, q] : model.edge_dist().minus())
        if (j >= 1 && q > 0) degrees.insert(j);
    for (const auto& [j, p] : model.node_dist().minus())
        if (j >= 1 && p > 0) {
            if (!(model.edge_dist().minus_at(j) > 0)) {
                std::ostringstream os;
                os << "populated in-degree " << j << " has no edge mass";
                throw Error(ErrorKind::missing_mass, os.str());
            }
            degrees.insert(j);
        }
    return {degrees.begin(), degrees.end()};
}

// Out-degree classes that can carry edges: k >= 1 with edge mass.
std::vector<int> active_out_degrees(const DegreeModel& model) {
    std::set<int> degrees;
    for (const auto& [k, q] : model.edge_dist().plus())
        if (k >= 1 && q > 0) {
            if (!(model.node_dist().plus_at(k) > 0)) {
                std::ostringstream os;
                os << "edge mass at out-degree " << k << " but no node mass";
                throw Error(ErrorKind::missing_mass, os.str());
            }
            degrees.insert(k);
        }
    return {degrees.begin(), degrees.end()};
}

// Callers guard on node mass, so a missing entry means the accounting data
// does not cover a populated type.
int vulnerability(const ThresholdTable& thresholds, int j, int k) {
    auto it = thresholds.table().find(NodeType{j, k});
    if (it == thresholds.table().end()) {
        std::ostringstream os;
        os << "no buffer/threshold entry for populated type (" << j << "," << k << ")";
        throw Error(ErrorKind::missing_mass, os.str());
    }
    return it->second == 1 ? 1 : 0;
}

double infinity_norm(const Matrix& m) {
    double best = 0;
    for (int r = 0; r < m.rows(); ++r) {
        double row = 0;
        for (int c = 0; c < m.cols(); ++c) row += std::abs(m(r, c));
        best = std::max(best, row);
    }
    return best;
}

// Gelfand bound by repeated squaring with log-scale tracking:
// ||A^(2^t)||^(1/2^t) -> radius. Robust for defective and periodic spectra.
double radius_by_squaring(const Matrix& m) {
    const int n = m.rows();
    Matrix c = m;
    double log_scale = 0;    // log of the accumulated normalization of c
    double exponent = 1;     // c ~ A^exponent / exp(log_scale * ...)
    const double s0 = infinity_norm(c);
    if (s0 == 0) return 0;
    for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) c(r, col) /= s0;
    log_scale = std::log(s0);
    for (int t = 0; t < 64; ++t) {
        Matrix d = c * c;
        const double s = infinity_norm(d);
        if (s == 0) return 0;  // nilpotent
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col) d(r, col) = d(r, col) / s;
        c = std::move(d);
        exponent *= 2;
        log_scale = 2 * log_scale + std::log(s);
    }
    return std::exp(log_scale / exponent);
}

}  // namespace

double spectral_radius(const Matrix& m, double tol, int max_iter) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::invalid_argument, "spectral radius needs a square matrix");
    const int n = m.rows();
    if (n == 0) return 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (m(r, c) < 0) throw Error(ErrorKind::invalid_argument, "matrix must be non-negative");

    // Work on M + I: the Perron root shifts by exactly one and the positive
    // diagonal removes oscillation on periodic structures.
    std::vector<double> x(n, 1.0), y(n, 0.0);
    double lo_prev = 0, hi_prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        for (int r = 0; r < n; ++r) {
            double acc = x[r];
            for (int c = 0; c < n; ++c) acc += m(r, c) * x[c];
            y[r] = acc;
        }
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (int r = 0; r < n; ++r) {
            const double ratio = y[r] / x[r];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        if (hi - lo <= tol * std::max(1.0, lo)) return 0.5 * (lo + hi) - 1.0;

        double norm = 0;
        for (double v : y) norm = std::max(norm, v);
        for (int r = 0; r < n; ++r) x[r] = y[r] / norm;

        // A defective dominant eigenvalue closes the Collatz-Wielandt
        // bracket only like 1/iter; once that is detected, squaring
        // finishes the job.
        const bool stalled = iter > 50 && (hi_prev - lo_prev) - (hi - lo) < 1e-3 * (hi - lo);
        lo_prev = lo;
        hi_prev = hi;
        if (stalled || iter == max_iter - 1) {
            Matrix shifted = m;
            for (int r = 0; r < n; ++r) shifted(r, r) += 1.0;
            return radius_by_squaring(shifted) - 1.0;
        }
    }
    throw Error(ErrorKind::not_converged, "spectral radius iteration did not converge");
}

TriggerMatrix trigger_matrix(const DegreeModel& model, const ThresholdTable& thresholds) {
    TriggerMatrix result;
    result.in_degrees = active_in_degrees(model);
    const auto& in_degs = result.in_degrees;
    const int nj = static_cast<int>(in_degs.size());
    result.matrix = Matrix(nj, nj);

    const auto& p = model.node_dist();
    const auto& q = model.edge_dist();
    for (int row = 0; row < nj; ++row) {
        const int j = in_degs[row];
        const double qj = q.minus_at(j);
        for (int col = 0; col < nj; ++col) {
            const int jp = in_degs[col];
            double acc = 0;
            for (const auto& [k, pk] : p.plus()) {
                if (!(pk > 0)) continue;
                const double qkj = q.at(k, j);
                if (qkj == 0) continue;
                const double pjk = p.at(jp, k);
                if (pjk == 0) continue;
                acc += jp * qkj * pjk * vulnerability(thresholds, jp, k) / (qj * pk);
            }
            result.matrix(row, col) = acc;
        }
    }
    result.radius = spectral_radius(result.matrix);
    return result;
}

std::pair<bool, double> cascade_condition(const DegreeModel& model, const ReducedAccounting& acct) {
    const TriggerMatrix d = trigger_matrix(model, thresholds(acct));
    return {d.radius > 1.0, d.radius};
}

double critical_gamma(const DegreeModel& model, const std::map<int, double>& weights,
                      double gamma_lo, double gamma_hi, double tol) {
    if (!(gamma_lo > 0) || !(gamma_hi > gamma_lo))
        throw Error(ErrorKind::invalid_argument, "need 0 < gamma_lo < gamma_hi");
    if (tol < 0) throw Error(ErrorKind::invalid_argument, "tolerance must be non-negative");

    auto radius_at = [&](double gamma) {
        std::map<NodeType, double> g;
        for (int j : model.support().in_degrees)
            for (int k : model.support().out_degrees) g[NodeType{j, k}] = gamma;
        ReducedAccounting acct(std::move(g), weights);
        return trigger_matrix(model, thresholds(acct)).radius;
    };

    if (!(radius_at(gamma_lo) > 1.0) || radius_at(gamma_hi) > 1.0)
        throw Error(ErrorKind::no_bracket, "spectral radius does not cross 1 inside the bracket");

    // The vulnerability indicators, and hence the radius, change only when
    // gamma passes an exposure weight. Bisect over those candidate values;
    // the radius still exceeds 1 at the crossing weight itself (a buffer
    // equal to the weight leaves the node vulnerable).
    std::vector<double> candidates;
    for (const auto& [j, w] : weights)
        if (w >= gamma_lo && w <= gamma_hi) candidates.push_back(w);
    candidates.push_back(gamma_lo);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0, hi = candidates.size();  // invariant: radius(candidates[lo]) > 1
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (radius_at(candidates[mid]) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return candidates[lo];
}

std::map<int, double> frequency_map(const std::map<int, double>& c, const DegreeModel& model,
                                    const ThresholdTable& thresholds) {
    const auto& p = model.node_dist();
    const auto& q = model.edge_dist();
    std::map<int, double> out;
    for (const auto& [k, qk] : q.plus()) {
        if (!(qk > 0)) continue;
        double acc = 0;
        for (const auto& [type, pv] : p.entries()) {
            if (pv == 0) continue;
            const int jp = type.in_deg;
            const int kp = type.out_deg;
            const double qkj = q.at(k, jp);
            if (qkj == 0) continue;
            const double pj = p.minus_at(jp);
            double blocked;  // P[child does not open a route to the cluster]
            if (vulnerability(thresholds, jp, kp)) {
                double b = 1.0;  // c_{k'}^{k'}; an empty product for k' = 0
                if (kp > 0) {
                    auto it = c.find(kp);
                    const double ck = it == c.end() ? 1.0 : it->second;
                    b = std::pow(ck, kp);
                }
                blocked = b;
            } else {
                blocked = 1.0;
            }
            acc += blocked * pv * qkj / (pj * qk);
        }
        out[k] = std::min(acc, 1.0);
    }
    return out;
}

FrequencyResult cascade_frequency(const DegreeModel& model, const ReducedAccounting& acct,
                                  double tol, int max_iter) {
    const ThresholdTable thr = thresholds(acct);
    FrequencyResult result;

    const auto [holds, radius] = cascade_condition(model, acct);
    if (!holds) {
        // Below the cascade threshold the in-component has zero fraction;
        // report the trivial fixed point.
        for (int k : active_out_degrees(model)) result.c[k] = 1.0;
        result.f = 0;
        result.trivial = true;
        return result;
    }

    std::map<int, double> c;
    for (int k : active_out_degrees(model)) c[k] = 0.0;
    bool converged = false;
    for (int iter = 1; iter <= max_iter; ++iter) {
        std::map<int, double> next = frequency_map(c, model, thr);
        double delta = 0;
        for (const auto& [k, v] : next) delta = std::max(delta, std::abs(v - c.at(k)));
        c = std::move(next);
        result.iterations = iter;
        if (delta < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw Error(ErrorKind::not_converged, "in-component fixed point did not converge");

    // f = P[node belongs to the in-component] = sum_k (1 - c_k^k) P+_k.
    // Out-degree-0 nodes contribute nothing: with no out-edges they cannot
    // reach the vulnerable cluster.
    double f = 0;
    bool trivial = true;
    for (const auto& [k, pk] : model.node_dist().plus()) {
        if (!(pk > 0) || k == 0) continue;
        auto it = c.find(k);
        const double ck = it == c.end() ? 1.0 : it->second;
        if (ck < 1.0 - 1e-9) trivial = false;
        f += (1.0 - std::pow(ck, k)) * pk;
    }
    result.c = std::move(c);
    result.f = f;
    result.trivial = trivial;
    if (trivial) result.f = 0;
    return result;
}

SimilarityReport similarity_check(const DegreeModel& model, const ThresholdTable& thresholds) {
    SimilarityReport report;
    const std::vector<int> in_degs = active_in_degrees(model);
    const std::vector<int> out_degs = active_out_degrees(model);
    const int nj = static_cast<int>(in_degs.size());
    const int nk = static_cast<int>(out_degs.size());
    const auto& p = model.node_dist();
    const auto& q = model.edge_dist();

    SimilarityFactors factors;
    factors.in_degrees = in_degs;
    factors.out_degrees = out_degs;
    factors.A = Matrix(nj, nk);
    factors.Bf = Matrix(nk, nj);
    factors.lambda.resize(nk);

    for (int row = 0; row < nj; ++row) {
        const int j = in_degs[row];
        const double qj = q.minus_at(j);
        for (int col = 0; col < nk; ++col) factors.A(row, col) = q.at(out_degs[col], j) / qj;
    }
    for (int row = 0; row < nk; ++row) {
        const int k = out_degs[row];
        const double pk = p.plus_at(k);
        factors.lambda[row] = k * pk;
        for (int col = 0; col < nj; ++col) {
            const int jp = in_degs[col];
            const double pjk = p.at(jp, k);
            factors.Bf(row, col) = pjk == 0 ? 0.0 : jp * pjk * vulnerability(thresholds, jp, k) / pk;
        }
    }

    // Direct entrywise construction of Dtilde.
    report.dtilde_direct = Matrix(nk, nk);
    for (int row = 0; row < nk; ++row) {
        const int k = out_degs[row];
        const double qk = q.plus_at(k);
        for (int col = 0; col < nk; ++col) {
            const int kp = out_degs[col];
            double acc = 0;
            for (int i = 0; i < nj; ++i) {
                const int jp = in_degs[i];
                const double qkj = q.at(k, jp);
                const double pjk = p.at(jp, kp);
                if (qkj == 0 || pjk == 0) continue;
                const double pj = p.minus_at(jp);
                acc += kp * qkj * pjk * vulnerability(thresholds, jp, kp) / (qk * pj);
            }
            report.dtilde_direct(row, col) = acc;
        }
    }

    // Via the similarity identity (Lambda Bf A Lambda^-1)^T.
    Matrix lam_bf = factors.Bf;
    for (int row = 0; row < nk; ++row)
        for (int col = 0; col < nj; ++col) lam_bf(row, col) *= factors.lambda[row];
    Matrix prod = lam_bf * factors.A;  // nk x nk
    for (int row = 0; row < nk; ++row)
        for (int col = 0; col < nk; ++col) prod(row, col) /= factors.lambda[col];
    report.dtilde_similarity = prod.transposed();

    report.dtilde_radius = spectral_radius(report.dtilde_direct);
    report.d_radius = spectral_radius(factors.A * factors.Bf);
    report.factors = std::move(factors);
    return report;
}

}  // namespace banknet
