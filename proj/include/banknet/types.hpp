#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace banknet {

/// A node class: a bank with `in_deg` debtors and `out_deg` creditors.
struct NodeType {
    int in_deg = 0;   // number of incoming exposures (j)
    int out_deg = 0;  // number of outgoing exposures (k)

    friend auto operator<=>(const NodeType&, const NodeType&) = default;
};

/// An edge class: an exposure leaving a node of out-degree `out_deg`
/// and entering a node of in-degree `in_deg`.
struct EdgeType {
    int out_deg = 0;  // out-degree of the source node (k)
    int in_deg = 0;   // in-degree of the target node (j)

    friend auto operator<=>(const EdgeType&, const EdgeType&) = default;
};

enum class ErrorKind {
    invalid_distribution,
    inconsistent_mean_degree,
    zero_mean_degree,
    degenerate_degree_variance,
    missing_out_degree_mass,
    missing_in_degree_mass,
    missing_mass,
    clip_budget_exceeded,
    generation_failed,
    parameter_out_of_range,
    simplex_violation,
    no_bracket,
    not_converged,
    io_error,
    invalid_argument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Tolerances used across the library.
inline constexpr double kProbSumTol = 1e-12;      // distribution normalization
inline constexpr double kMeanDegreeTol = 1e-12;   // in-mean vs out-mean agreement
inline constexpr double kConsistencyTol = 1e-9;   // P/Q marginal consistency checks

}  // namespace banknet
