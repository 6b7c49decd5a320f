#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "banknet/degree_model.hpp"
#include "banknet/monte_carlo.hpp"
#include "banknet/types.hpp"

namespace banknet {

/// Two-class interbank family: node types (3,3), (3,12), (12,3), (12,12),
/// P with off-diagonal weight a in [0, 1/2] and Q with coupling b in
/// [0, 1/5]. Consistent by construction for every admissible (a, b).
DegreeModel builtin_sec61(double a, double b);

/// Size-tiered family: diagonal P = diag(8,4,2,1)/15 on degrees 2,4,8,16
/// and a convex combination of four permutation edge laws spanning the
/// assortativity range (q1 fully assortative ... q3/q4 fully
/// disassortative).
DegreeModel builtin_sec62(const std::array<double, 4>& q);

struct ExperimentSpec {
    enum class Source { model_file, sec61, sec62 };
    Source source = Source::sec61;
    std::string model_file;

    std::vector<double> a_values{0.5};
    std::vector<double> b_values{0.16};
    std::vector<std::array<double, 4>> q_points{{1, 0, 0, 0}};

    // Accounting: GK weights with a uniform buffer per sweep point.
    std::vector<double> gamma_values{0.035};
    std::string accounting_file;  // overrides GK when set (fixes gamma)

    double rho0 = 1e-4;  // uniform analytic shock

    // Outputs: any of size, frequency, gamma_c, radius, r, r_q, z,
    // sim_size, sim_frequency.
    std::set<std::string> outputs{"size", "frequency", "gamma_c", "radius", "r", "r_q"};

    // Ensemble settings (used when sim_* outputs are requested).
    int n = 10000;
    int realizations = 500;
    std::uint64_t seed = 1;
    double global_threshold = 0.05;
    bool single_node_shock = true;

    std::string format = "csv";  // csv | json
    bool split_files = false;    // one output file per quantity

    /// Canonical description used for the provenance hash.
    std::string describe() const;
};

struct ResultTable {
    std::vector<std::string> meta;     // emitted as '#' comment lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Evaluates every grid point of the spec. Per-point failures land in the
/// `error` column and the run continues. Rows come back in grid order
/// independent of scheduling; rerunning the same spec reproduces the table
/// byte for byte.
ResultTable run_experiment(const ExperimentSpec& spec);
ResultTable run_experiment_serial(const ExperimentSpec& spec);

void write_table_csv(std::ostream& out, const ResultTable& table);
void write_table_json(std::ostream& out, const ResultTable& table);

/// FNV-1a hash of the spec description, for output provenance.
std::uint64_t spec_hash(const ExperimentSpec& spec);

/// Barycentric grid over the face of the q-simplex where component
/// `zero_index` vanishes, with `resolution` points per edge.
std::vector<std::array<double, 4>> simplex_face(int zero_index, int resolution);

inline constexpr const char* kToolVersion = "banknet 0.1.0";

}  // namespace banknet
