#include "rldt/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rldt {

namespace {

void check_density(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must be in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

double expected_report_return(double p, double r_plus, double r_minus) {
  check_density(p, "p");
  return p * r_plus + (1.0 - p) * r_minus;
}

double query_advantage(DensityPair pair, double gamma, double c_i, double r_plus, double r_minus) {
  check_density(pair.p, "p");
  check_density(pair.p_prime, "p_prime");
  const double p = pair.p;
  const double q = pair.p_prime;
  return -c_i + (gamma * q - p) * r_plus + (-1.0 + gamma - gamma * q + p) * r_minus;
}

double advantage_consistency_check(DensityPair pair, double gamma, double c_i, double r_plus,
                                   double r_minus, double tolerance) {
  const double via_returns = -c_i + gamma * expected_report_return(pair.p_prime, r_plus, r_minus) -
                             expected_report_return(pair.p, r_plus, r_minus);
  const double diff = via_returns - query_advantage(pair, gamma, c_i, r_plus, r_minus);
  if (!(std::abs(diff) <= tolerance)) {
    throw std::logic_error("query advantage mismatch: " + std::to_string(diff));
  }
  return diff;
}

}  // namespace rldt
