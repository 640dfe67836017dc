#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace latmul {

/// Randomized Hadamard rotation S = (1/sqrt(n_pad)) * H * diag(T), with the
/// sign vector T in {-1,1}^{n_pad} derived from sign_seed. Shared between the
/// A-side and B-side encoders.
struct RotationSpec {
  std::uint32_t n_pad = 0;  // power of two >= n
  std::uint64_t sign_seed = 0;

  static std::uint32_t pad_dim(std::uint32_t n);
  static RotationSpec make(std::uint32_t n, std::uint64_t sign_seed);
  std::vector<double> signs() const;  // T as +-1.0
};

/// Subtract the column mean; returns the mean.
double center_column(Eigen::VectorXd& x);

/// In-place Walsh-Hadamard transform (unnormalized); length must be a power
/// of two. Applying twice multiplies by the length.
void fwht_inplace(std::span<double> x);

/// U = H * diag(T) * pad(xbar) / norm, so that ||U||^2 = n_pad. The caller
/// supplies norm = ||xbar|| (computed pre-padding); zero norm is rejected.
Eigen::VectorXd apply_rht(const Eigen::VectorXd& xbar, double norm, const RotationSpec& spec);

/// Identity-rotation variant used when the Hadamard stage is disabled:
/// U = sqrt(n) * xbar / norm.
Eigen::VectorXd normalize_column(const Eigen::VectorXd& xbar, double norm);

/// Nearest point of the mean in {k * 2*delta}; |error| <= delta for |mean| <= M.
double quantize_mean(double mean, double delta, double M);

/// Nearest point of the norm in {0} union {M^-4 (1+delta)^k, k=0..T};
/// relative error <= delta inside [M^-4, sqrt(n)*M].
double quantize_norm(double norm, double delta, double M, std::uint64_t n);

/// Side-info bit accounting for the paper-grid mode.
double mean_grid_bits(double delta, double M);
double norm_grid_bits(double delta, double M, std::uint64_t n);
std::uint64_t norm_grid_levels(double delta, double M, std::uint64_t n);  // T

}  // namespace latmul
