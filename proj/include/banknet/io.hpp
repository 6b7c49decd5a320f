#pragma once

#include <iosfwd>
#include <string>

#include "banknet/balance_sheets.hpp"
#include "banknet/cascade_analytic.hpp"
#include "banknet/degree_model.hpp"
#include "banknet/monte_carlo.hpp"

namespace banknet {

/// Parses a probability given as a JSON number, a decimal string ("0.25")
/// or a rational string ("1/3").
double parse_probability(const std::string& text);

/// Model file: JSON with `in_degrees`, `out_degrees`, `P` (list of {j,k,p})
/// and `Q` (list of {k,j,q}); probabilities may be numbers, decimal strings
/// or "num/den" rationals.
DegreeModel load_model(std::istream& in);
DegreeModel load_model_file(const std::string& path);
void save_model(std::ostream& out, const DegreeModel& model);

/// Accounting file: JSON, either {"gk": {"gamma": x}} (resolved against the
/// model's support) or explicit {"gamma": [{j,k,value}], "w": [{j,value}]}.
ReducedAccounting load_accounting(std::istream& in, const DegreeSupport& support);
ReducedAccounting load_accounting_file(const std::string& path, const DegreeSupport& support);

/// Shortest decimal representation that round-trips the value.
std::string format_double(double value);

/// Long-format trajectory table: step, index, quantity, value. Sigma rows
/// are expanded to (out-degree, in-degree) pairs with edge mass.
void write_trajectory_csv(std::ostream& out, const CascadeTrajectory& trajectory,
                          const DegreeModel& model);

/// One row per realization plus a trailing summary row; the master seed is
/// recorded in the header comments.
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats, int n_nodes, double gamma);

}  // namespace banknet
