#include "banknet/cascade_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banknet {

ShockSpec ShockSpec::uniform(double value, const DegreeSupport& support) {
    if (value < 0 || value > 1)
        throw Error(ErrorKind::invalid_argument, "shock probability outside [0,1]");
    ShockSpec shock;
    for (int j : support.in_degrees)
        for (int k : support.out_degrees) shock.rho0[NodeType{j, k}] = value;
    return shock;
}

double binomial_tail(int n, std::int64_t m_min, double p) {
    if (m_min <= 0) return 1.0;
    if (m_min > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;

    const long double lp = p;
    const long double lq = 1.0L - lp;
    const long double ratio = lp / lq;
    long double term = std::pow(lq, static_cast<long double>(n));  // m = 0
    long double tail = (m_min == 0) ? term : 0.0L;
    for (int m = 1; m <= n; ++m) {
        term *= ratio * static_cast<long double>(n - m + 1) / static_cast<long double>(m);
        if (m >= m_min) tail += term;
    }
    return static_cast<double>(std::min(tail, 1.0L));
}

SigmaByOutDegree edge_update(const std::map<NodeType, double>& rho, const NodeTypeDist& node_dist) {
    SigmaByOutDegree sigma;
    for (const auto& [k, pk] : node_dist.plus()) {
        if (!(pk > 0)) continue;  // out-degree present only through explicit zero entries
        double acc = 0;
        for (const auto& [type, p] : node_dist.entries()) {
            if (type.out_deg != k || p == 0) continue;
            auto it = rho.find(type);
            if (it != rho.end()) acc += it->second * p;
        }
        sigma[k] = acc / pk;
    }
    return sigma;
}

EdgeDefaultVector aggregate_a(const SigmaByOutDegree& sigma, const EdgeTypeDist& edge_dist) {
    EdgeDefaultVector a;
    for (const auto& [j, qj] : edge_dist.minus()) {
        if (!(qj > 0)) continue;  // in-degree present only through explicit zero entries
        double acc = 0;
        for (const auto& [type, q] : edge_dist.entries()) {
            if (type.in_deg != j || q == 0) continue;
            auto it = sigma.find(type.out_deg);
            if (it == sigma.end()) {
                std::ostringstream os;
                os << "no sigma entry for out-degree " << type.out_deg;
                throw Error(ErrorKind::missing_out_degree_mass, os.str());
            }
            acc += q * it->second;
        }
        a[j] = acc / qj;
    }
    return a;
}

std::map<NodeType, double> node_update(const EdgeDefaultVector& a, const ShockSpec& shock,
                                       const ThresholdTable& thresholds) {
    std::map<NodeType, double> rho;
    for (const auto& [type, m] : thresholds.table()) {
        if (type.in_deg == 0 || m == kNeverTriggered) {
            rho[type] = 0.0;
            continue;
        }
        auto it = a.find(type.in_deg);
        const double aj = it == a.end() ? 0.0 : it->second;
        rho[type] = (1.0 - shock.at(type.in_deg, type.out_deg)) * binomial_tail(type.in_deg, m, aj);
    }
    return rho;
}

InitialState initial_state(const ShockSpec& shock, const DegreeModel& model) {
    std::map<NodeType, double> rho0;
    for (const auto& [type, p] : model.node_dist().entries()) rho0[type] = shock.at(type.in_deg, type.out_deg);
    InitialState state;
    state.sigma0 = edge_update(rho0, model.node_dist());
    state.a0 = aggregate_a(state.sigma0, model.edge_dist());
    return state;
}

StepResult cascade_step(const EdgeDefaultVector& a_prev, const SigmaByOutDegree& sigma0,
                        const ShockSpec& shock, const ThresholdTable& thresholds,
                        const DegreeModel& model) {
    StepResult result;
    result.rho = node_update(a_prev, shock, thresholds);
    result.sigma = edge_update(result.rho, model.node_dist());
    SigmaByOutDegree total = result.sigma;
    for (auto& [k, s] : total) {
        auto it = sigma0.find(k);
        if (it != sigma0.end()) s = std::min(s + it->second, 1.0);
    }
    result.a = aggregate_a(total, model.edge_dist());
    return result;
}

namespace {

double sup_distance(const EdgeDefaultVector& x, const EdgeDefaultVector& y) {
    double d = 0;
    for (const auto& [j, xv] : x) {
        auto it = y.find(j);
        const double yv = it == y.end() ? 0.0 : it->second;
        d = std::max(d, std::abs(xv - yv));
    }
    return d;
}

}  // namespace

CascadeTrajectory solve_cascade(const DegreeModel& model, const ReducedAccounting& acct,
                                const ShockSpec& shock, double tol, int max_iter) {
    if (!(tol > 0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
    const ThresholdTable thr = thresholds(acct);
    for (const auto& [type, p] : model.node_dist().entries()) {
        if (!(p > 0)) continue;
        if (thr.table().find(type) == thr.table().end()) {
            std::ostringstream os;
            os << "no buffer/threshold for populated type (" << type.in_deg << "," << type.out_deg << ")";
            throw Error(ErrorKind::missing_mass, os.str());
        }
        if (type.in_deg >= 1 && !(model.edge_dist().minus_at(type.in_deg) > 0)) {
            std::ostringstream os;
            os << "populated in-degree " << type.in_deg << " has no edge mass (Q-_" << type.in_deg << " = 0)";
            throw Error(ErrorKind::missing_in_degree_mass, os.str());
        }
    }
    const InitialState init = initial_state(shock, model);

    CascadeTrajectory traj;
    CascadeStepRecord step0;
    step0.n = 0;
    step0.sigma = init.sigma0;
    step0.a = init.a0;
    for (const auto& [type, m] : thr.table()) step0.rho[type] = 0.0;
    traj.steps.push_back(std::move(step0));

    EdgeDefaultVector a = init.a0;
    std::map<NodeType, double> rho_last;
    for (int n = 1; n <= max_iter; ++n) {
        StepResult next = cascade_step(a, init.sigma0, shock, thr, model);
        const double delta = sup_distance(next.a, a);
        rho_last = next.rho;
        a = next.a;
        traj.steps.push_back(CascadeStepRecord{n, std::move(next.rho), std::move(next.sigma), a});
        traj.n_steps = n;
        if (delta < tol) {
            traj.converged = true;
            break;
        }
    }

    double size = 0;
    for (const auto& [type, p] : model.node_dist().entries()) {
        const double rho0 = shock.at(type.in_deg, type.out_deg);
        auto it = rho_last.find(type);
        const double rho_inf = it == rho_last.end() ? 0.0 : it->second;
        traj.final_default_prob[type] = std::min(rho0 + rho_inf, 1.0);
        size += traj.final_default_prob[type] * p;
    }
    traj.expected_cascade_size = size;
    return traj;
}

}  // namespace banknet
