#include "latmul/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace latmul::theory {

namespace {
constexpr double kLn2 = 0.69314718055994530941723212145818;

double r_star_residual(double r) { return 1.0 + 4.0 * kLn2 * r - std::exp2(2.0 * r); }
}  // namespace

double phi(double x) { return 2.0 * x - x * x; }

double r_star() {
  static const double cached = [] {
    double lo = 0.5, hi = 2.0;
    // residual is positive at lo, negative at hi
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double res = r_star_residual(mid);
      if (std::fabs(res) < 1e-12) return mid;
      if (res > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return cached;
}

double gamma1_curve(double rate) { return phi(std::exp2(-2.0 * rate)); }

double gamma_curve(double rate) {
  if (rate < 0.0) throw std::invalid_argument("gamma_curve: rate must be >= 0");
  double rs = r_star();
  if (rate >= rs) return gamma1_curve(rate);
  return 1.0 - (1.0 - gamma1_curve(rs)) * rate / rs;
}

double gaussian_drf(double rate) { return std::exp2(-2.0 * rate); }

double theorem_bound_two_sided(const BoundInputs& in) {
  double p = phi(std::exp2(-2.0 * in.rate / in.kappa));
  double bias = 1.0 - in.kappa * in.alpha;
  double noise = in.kappa * in.alpha * in.alpha *
                 (1.0 - in.kappa + in.kappa * p) / (1.0 - p);
  return in.tilde_c * in.tilde_c * bias * bias +
         in.norm_a * in.norm_a * in.norm_b * in.norm_b / in.n * noise;
}

double theorem_bound_one_sided(const BoundInputs& in) {
  double bias = 1.0 - in.kappa * in.alpha;
  double noise = in.kappa * in.alpha * in.alpha *
                 (1.0 - in.kappa + 1.0 / (std::exp2(2.0 * in.rate / in.kappa) - 1.0));
  return in.tilde_c * in.tilde_c * bias * bias +
         in.norm_a * in.norm_a * in.norm_b * in.norm_b / in.n * noise;
}

double theorem3_bound(const BoundInputs& in) {
  double s = std::exp2(2.0 * in.rate);
  return in.norm_a * in.norm_a * in.norm_b * in.norm_b / in.n *
         (2.0 * s - 1.0) / ((s - 1.0) * (s - 1.0));
}

double theorem3_bound_one_sided(const BoundInputs& in) {
  return in.norm_a * in.norm_a * in.norm_b * in.norm_b / in.n /
         (std::exp2(2.0 * in.rate) - 1.0);
}

double optimized_bound_one_sided(const BoundInputs& in) {
  double d2 = std::exp2(-2.0 * in.rate);
  double d4 = d2 * d2;
  return in.tilde_c * in.tilde_c * d4 +
         in.norm_a * in.norm_a * in.norm_b * in.norm_b / in.n * (d2 - d4);
}

double scalar_quant_prediction(double n, double rate) {
  double ln_term = 2.0 / 3.0 * std::log(n);
  double s = std::exp2(2.0 * rate);
  return ln_term * (2.0 * s + ln_term) / (s * s);
}

}  // namespace latmul::theory
