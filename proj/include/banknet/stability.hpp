#pragma once

#include <map>
#include <utility>
#include <vector>

#include "banknet/balance_sheets.hpp"
#include "banknet/cascade_analytic.hpp"
#include "banknet/degree_model.hpp"
#include "banknet/matrix.hpp"
#include "banknet/types.hpp"

namespace banknet {

/// Linearization of the cascade map at the undefaulted state, indexed by
/// in-degree. Entry (j, j') is the expected number of defaulted in-degree-j
/// edges produced through a vulnerable node by one defaulted in-degree-j'
/// edge.
struct TriggerMatrix {
    std::vector<int> in_degrees;  // row/column labels
    Matrix matrix;
    double radius = 0;            // Perron root
};

TriggerMatrix trigger_matrix(const DegreeModel& model, const ThresholdTable& thresholds);

/// Spectral radius of a non-negative square matrix. Power iteration on the
/// unit-shifted matrix from the all-ones vector, with Collatz-Wielandt
/// bounds as the stopping test; if the bounds stall (defective dominant
/// eigenvalue), the estimate is refined by repeated squaring.
double spectral_radius(const Matrix& m, double tol = 1e-12, int max_iter = 100000);

/// Whether an infinitesimal seed grows to a finite-fraction cascade:
/// radius of the trigger matrix > 1.
std::pair<bool, double> cascade_condition(const DegreeModel& model, const ReducedAccounting& acct);

/// Smallest uniform buffer at which the cascade condition stops holding.
/// The radius is a non-increasing step function of gamma whose jumps sit at
/// the exposure weights, so bisection runs over those candidate values and
/// the crossing is located exactly; any tol >= 0 is honored trivially.
double critical_gamma(const DegreeModel& model, const std::map<int, double>& weights,
                      double gamma_lo, double gamma_hi, double tol = 0);

/// One application of the in-component fixed point map h. `c` is indexed by
/// out-degree class; classes with no edge mass are absent.
std::map<int, double> frequency_map(const std::map<int, double>& c, const DegreeModel& model,
                                    const ThresholdTable& thresholds);

struct FrequencyResult {
    std::map<int, double> c;  // least fixed point of h, per out-degree class
    double f = 0;             // fractional size of the in-component
    bool trivial = true;      // c == all-ones (no giant vulnerable cluster reachable)
    int iterations = 0;
};

/// Global-cascade frequency: iterate h from zero to its least fixed point
/// and size the in-component. Reported as trivial (f = 0) when the cascade
/// condition does not hold.
FrequencyResult cascade_frequency(const DegreeModel& model, const ReducedAccounting& acct,
                                  double tol = 1e-12, int max_iter = 100000);

/// The factors relating the trigger matrix to the in-component
/// linearization: D = A * Bf and Dtilde = (Lambda * Bf * A * Lambda^-1)^T.
/// `Bf` is the vulnerable-mass factor; the name avoids a clash with the
/// endpoint in-degree joint law B.
struct SimilarityFactors {
    std::vector<int> in_degrees;   // index set J
    std::vector<int> out_degrees;  // index set K
    Matrix A;                      // |J| x |K|
    Matrix Bf;                     // |K| x |J|
    std::vector<double> lambda;    // diagonal of Lambda, per out-degree class
};

struct SimilarityReport {
    double d_radius = 0;
    double dtilde_radius = 0;
    Matrix dtilde_direct;      // entrywise definition
    Matrix dtilde_similarity;  // via (Lambda Bf A Lambda^-1)^T
    SimilarityFactors factors;
};

/// Builds Dtilde along both routes and reports both spectral radii. For a
/// consistent model the two constructions agree entrywise and share their
/// radius with the trigger matrix.
SimilarityReport similarity_check(const DegreeModel& model, const ThresholdTable& thresholds);

}  // namespace banknet
