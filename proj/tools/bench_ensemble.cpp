// Benchmark: serial reference vs OpenMP ensemble on the two-class model.

#include <chrono>
#include <iostream>
#include <string>

#include "banknet/experiments.hpp"
#include "banknet/io.hpp"
#include "banknet/monte_carlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace banknet;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = 10000;
    int realizations = 100;
    if (argc > 1) n = std::stoi(argv[1]);
    if (argc > 2) realizations = std::stoi(argv[2]);

    const DegreeModel model = builtin_sec61(0.5, 0.16);
    const ReducedAccounting acct = gk_specification(0.04, model.support());

    EnsembleConfig config;
    config.n_nodes = n;
    config.n_realizations = realizations;
    config.master_seed = 20240613;
    config.shock.mode = ShockConfig::Mode::single_node;

#ifdef _OPENMP
    std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "threads: 1 (OpenMP disabled)\n";
#endif
    std::cout << "n=" << n << " realizations=" << realizations << "\n";

    auto t0 = clock_type::now();
    const EnsembleStats serial = run_ensemble_serial(model, acct, config);
    const double t_serial = seconds_since(t0);

    t0 = clock_type::now();
    const EnsembleStats parallel = run_ensemble(model, acct, config);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.runs.size() == parallel.runs.size();
    for (std::size_t i = 0; identical && i < serial.runs.size(); ++i)
        identical = serial.runs[i].default_fraction == parallel.runs[i].default_fraction &&
                    serial.runs[i].n_rounds == parallel.runs[i].n_rounds;

    std::cout << "serial:   " << format_double(t_serial) << " s ("
              << format_double(realizations / t_serial) << " runs/s)\n";
    std::cout << "parallel: " << format_double(t_parallel) << " s ("
              << format_double(realizations / t_parallel) << " runs/s)\n";
    std::cout << "speedup:  " << format_double(t_serial / t_parallel) << "x\n";
    std::cout << "results identical: " << (identical ? "yes" : "NO") << "\n";
    std::cout << "global frequency " << format_double(parallel.global_frequency) << ", mean global size "
              << format_double(parallel.mean_global_size) << "\n";
    return identical ? 0 : 1;
}
