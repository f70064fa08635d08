#include "vstbench/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace vstbench::special {

double gamma_p(double a, double x) {
  if (!(a > 0) || x < 0 || std::isnan(x)) throw std::domain_error("gamma_p: need a > 0 and x >= 0");
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0) || x < 0 || std::isnan(x)) throw std::domain_error("gamma_q: need a > 0 and x >= 0");
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double beta_inc(double a, double b, double x) {
  if (!(a > 0) || !(b > 0) || !(x >= 0 && x <= 1)) throw std::domain_error("beta_inc: need a, b > 0 and x in [0, 1]");
  return boost::math::ibeta(a, b, x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double chi2_sf(double x, double dof) {
  if (x <= 0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double f_sf(double f, double d1, double d2) {
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return beta_inc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

double t_two_sided(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return beta_inc(0.5 * dof, 0.5, dof / (dof + t * t));
}

}  // namespace vstbench::special
