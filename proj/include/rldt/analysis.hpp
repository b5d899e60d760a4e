#pragma once

// Closed-form expected returns for the query-versus-report tradeoff.

namespace rldt {

/// Class density `p` at a parent state and `p_prime` at a child reached by one query.
struct DensityPair {
  double p = 0.0;
  double p_prime = 0.0;
};

/// p r_plus + (1 - p) r_minus, the value a report converges to when the
/// reported class has density p. Throws std::invalid_argument for p outside [0, 1].
double expected_report_return(double p, double r_plus, double r_minus);

/// Expected gain of querying feature i and then reporting, over reporting
/// right away:
///   -c_i + (gamma p' - p) r_plus + (-1 + gamma - gamma p' + p) r_minus
/// Positive means the query pays for itself.
double query_advantage(DensityPair pair, double gamma, double c_i, double r_plus, double r_minus);

/// Recomputes the advantage as [-c_i + gamma E(p')] - E(p) and throws
/// std::logic_error if it differs from query_advantage by more than
/// `tolerance`. Returns the difference.
double advantage_consistency_check(DensityPair pair, double gamma, double c_i, double r_plus,
                                   double r_minus, double tolerance = 1e-12);

}  // namespace rldt
