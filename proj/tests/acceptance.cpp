// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "banknet/cascade_analytic.hpp"
#include "banknet/experiments.hpp"
#include "banknet/monte_carlo.hpp"
#include "banknet/stability.hpp"
#include "test_support.hpp"

using namespace banknet;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

double two_class_radius(double b, bool both_classes) {
    if (!both_classes) return 15 * b;
    return 15 * b + std::sqrt((12 - 60 * b) * (3 - 15 * b / 4));
}

// 1. critical buffer values for the two-class family, exact to 1e-12, < 1 s
bool criterion_critical_buffer(std::string& detail) {
    const auto start = clock_type::now();
    const auto weights = gk_specification(0.035, DegreeSupport::make({3, 12}, {3, 12})).weights();
    bool ok = true;
    for (double b : {0.16, 0.19}) {
        const double gc = critical_gamma(builtin_sec61(0.5, b), weights, 1e-6, 0.2);
        ok = ok && std::abs(gc - 1.0 / 15) <= 1e-12;
    }
    const double gc_low = critical_gamma(builtin_sec61(0.5, 0.01), weights, 1e-6, 0.2);
    ok = ok && std::abs(gc_low - 1.0 / 60) <= 1e-12;
    const double elapsed = seconds_since(start);
    ok = ok && elapsed < 1.0;
    std::ostringstream os;
    os << "gamma_c(b=0.16,0.19)=1/15, gamma_c(b=0.01)=1/60, " << elapsed << " s";
    detail = os.str();
    return ok;
}

// 2. closed-form spectral radius across b, 1e-8
bool criterion_closed_form_radius(std::string& detail) {
    bool ok = true;
    double worst = 0;
    for (double b : {0.01, 0.05, 0.10, 0.16, 0.19}) {
        const DegreeModel model = builtin_sec61(0.5, b);
        // one vulnerable class: w_12 < gamma <= w_3
        const double r1 =
            trigger_matrix(model, thresholds(gk_specification(0.05, model.support()))).radius;
        worst = std::max(worst, std::abs(r1 - two_class_radius(b, false)));
        // two vulnerable classes: gamma <= w_12
        const double r2 =
            trigger_matrix(model, thresholds(gk_specification(0.01, model.support()))).radius;
        worst = std::max(worst, std::abs(r2 - two_class_radius(b, true)));
    }
    ok = worst < 1e-8;
    std::ostringstream os;
    os << "max |radius - closed form| = " << worst;
    detail = os.str();
    return ok;
}

// 3. D / Dtilde radius equality over randomized consistent models, < 10 s
bool criterion_similarity(std::string& detail) {
    const auto start = clock_type::now();
    Rng rng(987654321);
    double worst_radius = 0, worst_entry = 0;
    const int cases = 120;
    for (int i = 0; i < cases; ++i) {
        const DegreeModel model = testsupport::random_consistent_model(rng, 3, 5);
        const ReducedAccounting acct = testsupport::random_vulnerability_accounting(model, rng);
        const ThresholdTable thr = thresholds(acct);
        const SimilarityReport rep = similarity_check(model, thr);
        worst_entry = std::max(worst_entry, rep.dtilde_direct.max_abs_diff(rep.dtilde_similarity));
        worst_radius = std::max(worst_radius, std::abs(rep.d_radius - rep.dtilde_radius));
    }
    const double elapsed = seconds_since(start);
    const bool ok = worst_radius < 1e-8 && worst_entry < 1e-10 && elapsed < 10.0;
    std::ostringstream os;
    os << cases << " models, max radius gap " << worst_radius << ", max entry gap " << worst_entry
       << ", " << elapsed << " s";
    detail = os.str();
    return ok;
}

// 4. binomial tail vs exhaustive subset enumeration, 1e-12
bool criterion_binomial_tail(std::string& detail) {
    double worst = 0;
    for (int j = 0; j <= 6; ++j)
        for (std::int64_t m = 0; m <= j; ++m)
            for (int ai = 0; ai <= 10; ++ai) {
                const double a = ai / 10.0;
                worst = std::max(worst,
                                 std::abs(binomial_tail(j, m, a) - testsupport::binomial_tail_enum(j, m, a)));
            }
    std::ostringstream os;
    os << "max |tail - enumeration| = " << worst;
    detail = os.str();
    return worst < 1e-12;
}

EnsembleStats two_class_ensemble(double gamma, std::uint64_t seed, int realizations) {
    const DegreeModel model = builtin_sec61(0.5, 0.16);
    const ReducedAccounting acct = gk_specification(gamma, model.support());
    EnsembleConfig config;
    config.n_nodes = 10000;
    config.n_realizations = realizations;
    config.master_seed = seed;
    config.shock.mode = ShockConfig::Mode::single_node;
    return run_ensemble(model, acct, config);
}

// 5. analytic cascade size vs Monte Carlo across the buffer sweep
bool criterion_size_vs_simulation(std::string& detail) {
    const DegreeModel model = builtin_sec61(0.5, 0.16);
    const double gamma_c = 1.0 / 15;
    bool ok = true;
    std::ostringstream os;
    for (double gamma : {0.02, 0.04, 0.06, 0.08}) {
        const EnsembleStats stats = two_class_ensemble(gamma, 5150 + static_cast<int>(1000 * gamma), 500);
        if (gamma < gamma_c) {
            const ReducedAccounting acct = gk_specification(gamma, model.support());
            const double theory =
                solve_cascade(model, acct, ShockSpec::uniform(1e-4, model.support()))
                    .expected_cascade_size;
            const double gap = std::abs(stats.mean_global_size - theory);
            ok = ok && gap < 0.05 && stats.n_global > 0;
            os << "gamma " << gamma << ": |sim - theory| = " << gap << "; ";
        } else {
            ok = ok && stats.global_frequency < 0.02;
            os << "gamma " << gamma << ": frequency " << stats.global_frequency << " < 0.02; ";
        }
    }
    detail = os.str();
    return ok;
}

// 6. in-component frequency vs Monte Carlo global-cascade frequency
bool criterion_frequency_vs_simulation(std::string& detail) {
    const DegreeModel model = builtin_sec61(0.5, 0.16);
    const ReducedAccounting acct = gk_specification(0.05, model.support());
    const FrequencyResult theory = cascade_frequency(model, acct);
    const EnsembleStats stats = two_class_ensemble(0.05, 424242, 500);
    const double gap = std::abs(stats.global_frequency - theory.f);
    std::ostringstream os;
    os << "f = " << theory.f << ", empirical " << stats.global_frequency << ", gap " << gap;
    detail = os.str();
    return gap < 0.05;
}

// 7. assortativity fixtures, analytic and on generated graphs
bool criterion_assortativity(std::string& detail) {
    bool ok = true;
    const DegreeModel assortative = builtin_sec62({1, 0, 0, 0});
    const DegreeModel independent = builtin_sec62({0.25, 0.25, 0.25, 0.25});
    ok = ok && std::abs(edge_assortativity(assortative.edge_dist()) - 1.0) < 1e-12;
    ok = ok && std::abs(edge_assortativity(independent.edge_dist())) < 1e-12;
    ok = ok && std::abs(graph_assortativity(assortative) - 1.0) < 1e-12;

    GenerationConfig gen;
    gen.seed = 777;
    const SkeletonGraph g1 = generate(10000, assortative, gen);
    const double rq_hat = empirical_edge_assortativity(g1);
    const double r_hat = empirical_graph_assortativity(g1);
    const SkeletonGraph g0 = generate(10000, independent, gen);
    const double rq0_hat = empirical_edge_assortativity(g0);
    ok = ok && std::abs(rq_hat - 1.0) < 0.02 && std::abs(r_hat - 1.0) < 0.02 &&
         std::abs(rq0_hat) < 0.02;
    std::ostringstream os;
    os << "empirical r_Q(Q1) = " << rq_hat << ", r(Q1) = " << r_hat << ", r_Q(Q0) = " << rq0_hat;
    detail = os.str();
    return ok;
}

// 8. generator fidelity: type frequencies within 3 binomial standard errors
bool criterion_generator_fidelity(std::string& detail) {
    const DegreeModel model = builtin_sec61(0.5, 0.16);
    GenerationConfig gen;
    const int seeds = 50;
    int pairs = 0, within = 0;
    double relabel_fraction_sum = 0;
    for (int s = 0; s < seeds; ++s) {
        gen.seed = 9000 + s;
        const SkeletonGraph g = generate(10000, model, gen);
        relabel_fraction_sum +=
            static_cast<double>(g.gen_stats.stub_relabels) / g.gen_stats.in_stub_count;

        const auto p_hat = empirical_node_dist(g);
        for (const auto& [type, p] : model.node_dist().entries()) {
            const double hat = p_hat.count(type) ? p_hat.at(type) : 0.0;
            const double se = std::sqrt(p * (1 - p) / g.n_nodes);
            ++pairs;
            if (std::abs(hat - p) <= 3 * se) ++within;
        }
        const auto q_hat = empirical_edge_dist(g);
        const double n_edges = static_cast<double>(g.edges.size());
        for (const auto& [type, q] : model.edge_dist().entries()) {
            const double hat = q_hat.count(type) ? q_hat.at(type) : 0.0;
            const double se = std::sqrt(q * (1 - q) / n_edges);
            ++pairs;
            if (std::abs(hat - q) <= 3 * se) ++within;
        }
    }
    const double coverage = static_cast<double>(within) / pairs;
    const double mean_relabel = relabel_fraction_sum / seeds;
    std::ostringstream os;
    os << "coverage " << within << "/" << pairs << " = " << coverage << ", mean clip fraction "
       << mean_relabel;
    detail = os.str();
    return coverage >= 0.95 && mean_relabel < 0.01;
}

// 9. invariant property suites, >= 200 random cases each
bool criterion_property_suites(std::string& detail) {
    Rng rng(13579);
    bool ok = true;
    std::ostringstream os;

    // Orbit monotonicity of the edge default vector.
    {
        int failures = 0;
        for (int i = 0; i < 200; ++i) {
            const DegreeModel model = testsupport::random_consistent_model(rng);
            const ReducedAccounting acct = testsupport::random_vulnerability_accounting(model, rng);
            const ShockSpec shock = ShockSpec::uniform(rng.uniform() * 0.3, model.support());
            const CascadeTrajectory traj = solve_cascade(model, acct, shock);
            if (!traj.converged) ++failures;
            EdgeDefaultVector prev;
            for (const auto& step : traj.steps) {
                for (const auto& [j, v] : step.a)
                    if (prev.count(j) && v < prev.at(j) - 1e-12) ++failures;
                prev = step.a;
            }
        }
        ok = ok && failures == 0;
        os << "orbit monotone failures " << failures;
    }

    // Monotonicity of the cascade map.
    {
        int failures = 0;
        for (int i = 0; i < 200; ++i) {
            const DegreeModel model = testsupport::random_consistent_model(rng);
            const ReducedAccounting acct = testsupport::random_vulnerability_accounting(model, rng);
            const ThresholdTable thr = thresholds(acct);
            const ShockSpec shock = ShockSpec::uniform(rng.uniform() * 0.3, model.support());
            const InitialState init = initial_state(shock, model);
            EdgeDefaultVector x, y;
            for (const auto& [j, q] : model.edge_dist().minus()) {
                if (!(q > 0)) continue;
                const double lo = rng.uniform();
                x[j] = lo;
                y[j] = lo + (1 - lo) * rng.uniform();
            }
            const StepResult gx = cascade_step(x, init.sigma0, shock, thr, model);
            const StepResult gy = cascade_step(y, init.sigma0, shock, thr, model);
            for (const auto& [j, vx] : gx.a)
                if (vx > gy.a.at(j) + 1e-12) ++failures;
        }
        ok = ok && failures == 0;
        os << ", G monotone failures " << failures;
    }

    // Monotonicity of the in-component map.
    {
        int failures = 0;
        for (int i = 0; i < 200; ++i) {
            const DegreeModel model = testsupport::random_consistent_model(rng);
            const ReducedAccounting acct = testsupport::random_vulnerability_accounting(model, rng);
            const ThresholdTable thr = thresholds(acct);
            std::map<int, double> lo, hi;
            for (const auto& [k, q] : model.edge_dist().plus()) {
                if (!(q > 0)) continue;
                const double v = rng.uniform();
                lo[k] = v;
                hi[k] = v + (1 - v) * rng.uniform();
            }
            const auto hlo = frequency_map(lo, model, thr);
            const auto hhi = frequency_map(hi, model, thr);
            for (const auto& [k, v] : hlo)
                if (v > hhi.at(k) + 1e-12) ++failures;
        }
        ok = ok && failures == 0;
        os << ", h monotone failures " << failures;
    }

    // Seed-set monotonicity of the finite cascade.
    {
        int failures = 0;
        for (int i = 0; i < 200; ++i) {
            auto test_case = testsupport::random_graph_case(rng, 150);
            std::vector<int> seed;
            for (int v = 0; v < test_case.graph.n_nodes; ++v)
                if (rng.uniform() < 0.1) seed.push_back(v);
            const CascadeRunResult base = run_cascade(test_case.graph, seed, test_case.thresholds);
            std::vector<int> bigger = seed;
            bigger.push_back(static_cast<int>(rng.below(test_case.graph.n_nodes)));
            std::sort(bigger.begin(), bigger.end());
            bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
            const CascadeRunResult grown = run_cascade(test_case.graph, bigger, test_case.thresholds);
            if (!std::includes(grown.defaulted_nodes.begin(), grown.defaulted_nodes.end(),
                               base.defaulted_nodes.begin(), base.defaulted_nodes.end()))
                ++failures;
        }
        ok = ok && failures == 0;
        os << ", seed monotone failures " << failures;
    }

    // Scheduler order independence.
    {
        int failures = 0;
        for (int i = 0; i < 200; ++i) {
            auto test_case = testsupport::random_graph_case(rng, 200);
            std::vector<int> seed;
            for (int v = 0; v < test_case.graph.n_nodes; ++v)
                if (rng.uniform() < 0.08) seed.push_back(v);
            const CascadeRunResult sync = run_cascade(test_case.graph, seed, test_case.thresholds);
            const std::vector<int> async =
                testsupport::async_cascade(test_case.graph, seed, test_case.thresholds, rng);
            if (sync.defaulted_nodes != async) ++failures;
        }
        ok = ok && failures == 0;
        os << ", scheduler failures " << failures;
    }

    detail = os.str();
    return ok;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "critical buffer reproduction", criterion_critical_buffer},
        {2, "closed-form spectral radius", criterion_closed_form_radius},
        {3, "D/Dtilde radius equality", criterion_similarity},
        {4, "binomial tail oracle", criterion_binomial_tail},
        {5, "theory vs simulation cascade size", criterion_size_vs_simulation},
        {6, "frequency formula vs simulation", criterion_frequency_vs_simulation},
        {7, "assortativity fixtures", criterion_assortativity},
        {8, "generator fidelity", criterion_generator_fidelity},
        {9, "invariant property suites", criterion_property_suites},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  %d  %s (%s)\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
