#pragma once

namespace latmul::theory {

/// phi(x) = 2x - x^2.
double phi(double x);

/// Critical rate R*: unique root of 1 + 4 ln(2) R = 2^{2R} in [0.5, 2],
/// found by bisection to 1e-12 residual.
double r_star();

/// Gamma_1(R) = phi(2^{-2R}) = 2*2^{-2R} - 2^{-4R}.
double gamma1_curve(double rate);

/// Convex envelope of Gamma_1: linear on [0, R*], equal to Gamma_1 above.
/// Distortion-rate function for Gaussian matrix multiplication.
double gamma_curve(double rate);

/// Gaussian distortion-rate function 2^{-2R}.
double gaussian_drf(double rate);

/// Per-entry MSE bounds, evaluated with the asymptotic slack set to zero.
struct BoundInputs {
  double rate = 1.0;       // bits per entry
  double kappa = 1.0;
  double alpha = 1.0;
  double norm_a = 0.0;     // ||a_bar_i||
  double norm_b = 0.0;     // ||b_bar_j||
  double tilde_c = 0.0;    // (a_bar^T b_bar)_{ij}
  double n = 1.0;
};

/// General (kappa, alpha) two-sided form:
/// C~^2 (1-ka)^2 + (|a|^2|b|^2/n) * k a^2 (1-k+k phi(2^{-2R/k}))/(1-phi(2^{-2R/k})).
double theorem_bound_two_sided(const BoundInputs& in);

/// General one-sided form:
/// C~^2 (1-ka)^2 + (|a|^2|b|^2/n) * k a^2 (1-k + 1/(2^{2R/k}-1)).
double theorem_bound_one_sided(const BoundInputs& in);

/// alpha = kappa = 1 bound: (|a|^2|b|^2/n) * (2*2^{2R}-1)/(2^{2R}-1)^2.
double theorem3_bound(const BoundInputs& in);

/// One-sided alpha = kappa = 1 factor: (|a|^2|b|^2/n) / (2^{2R}-1).
double theorem3_bound_one_sided(const BoundInputs& in);

/// MMSE-optimized one-sided bound (the 2^{-2R} - 2^{-4R} + C~^2 2^{-4R} form).
double optimized_bound_one_sided(const BoundInputs& in);

/// Scalar l_inf-normalized R-bit quantizer prediction:
/// (2/3 ln n)(2*2^{2R} + (2/3) ln n) / 2^{4R} per unit |a|^2|b|^2/n.
double scalar_quant_prediction(double n, double rate);

}  // namespace latmul::theory
