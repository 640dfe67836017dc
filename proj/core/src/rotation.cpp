#include "latmul/rotation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "latmul/rng.hpp"

namespace latmul {

std::uint32_t RotationSpec::pad_dim(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("pad_dim: n must be positive");
  return std::bit_ceil(n);
}

RotationSpec RotationSpec::make(std::uint32_t n, std::uint64_t sign_seed) {
  return RotationSpec{pad_dim(n), sign_seed};
}

std::vector<double> RotationSpec::signs() const {
  CounterRng rng(sign_seed, streams::kSigns);
  std::vector<double> t(n_pad);
  for (std::uint32_t i = 0; i < n_pad; ++i)
    t[i] = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
  return t;
}

double center_column(Eigen::VectorXd& x) {
  double mean = x.mean();
  x.array() -= mean;
  return mean;
}

void fwht_inplace(std::span<double> x) {
  const std::size_t n = x.size();
  if (n == 0 || !std::has_single_bit(n))
    throw std::invalid_argument("fwht_inplace: length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        double a = x[j];
        double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

Eigen::VectorXd apply_rht(const Eigen::VectorXd& xbar, double norm, const RotationSpec& spec) {
  if (!(norm > 0.0)) throw std::invalid_argument("apply_rht: zero-norm column");
  if (xbar.size() > static_cast<Eigen::Index>(spec.n_pad))
    throw std::invalid_argument("apply_rht: column longer than n_pad");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.n_pad);
  std::vector<double> t = spec.signs();
  for (Eigen::Index i = 0; i < xbar.size(); ++i) u(i) = t[i] * xbar(i) / norm;
  fwht_inplace(std::span<double>(u.data(), u.size()));
  return u;
}

Eigen::VectorXd normalize_column(const Eigen::VectorXd& xbar, double norm) {
  if (!(norm > 0.0)) throw std::invalid_argument("normalize_column: zero-norm column");
  return std::sqrt(static_cast<double>(xbar.size())) / norm * xbar;
}

double quantize_mean(double mean, double delta, double M) {
  if (std::fabs(mean) > M) throw std::invalid_argument("quantize_mean: |mean| exceeds M");
  double k = std::round(mean / (2.0 * delta));
  return k * 2.0 * delta;
}

std::uint64_t norm_grid_levels(double delta, double M, std::uint64_t n) {
  double top = std::ceil(std::log(std::sqrt(static_cast<double>(n)) * std::pow(M, 5)));
  return static_cast<std::uint64_t>(std::ceil(top / std::log1p(delta)));
}

double quantize_norm(double norm, double delta, double M, std::uint64_t n) {
  if (norm < 0.0) throw std::invalid_argument("quantize_norm: negative norm");
  double limit = std::sqrt(static_cast<double>(n)) * M;
  if (norm > limit) throw std::invalid_argument("quantize_norm: norm exceeds sqrt(n)*M");
  if (norm == 0.0) return 0.0;
  const double lo = std::pow(M, -4.0);
  const std::uint64_t levels = norm_grid_levels(delta, M, n);
  double kf = std::log(norm / lo) / std::log1p(delta);
  long k = std::lround(kf);
  double best = 0.0;
  double best_err = norm;  // distance to the 0 grid point
  for (long c = k - 1; c <= k + 1; ++c) {
    if (c < 0 || c > static_cast<long>(levels)) continue;
    double g = lo * std::pow(1.0 + delta, static_cast<double>(c));
    double err = std::fabs(norm - g);
    if (err < best_err) {
      best_err = err;
      best = g;
    }
  }
  return best;
}

double mean_grid_bits(double delta, double M) { return std::log2(M / delta); }

double norm_grid_bits(double delta, double M, std::uint64_t n) {
  return std::log2(static_cast<double>(norm_grid_levels(delta, M, n) + 2));
}

}  // namespace latmul
