#include <doctest.h>

#include "latmul/rng.hpp"
#include "latmul/rotation.hpp"

using namespace latmul;

TEST_CASE("padding to a power of two") {
  CHECK(RotationSpec::pad_dim(1) == 1);
  CHECK(RotationSpec::pad_dim(2) == 2);
  CHECK(RotationSpec::pad_dim(3) == 4);
  CHECK(RotationSpec::pad_dim(6144) == 8192);
}

TEST_CASE("walsh hadamard transform") {
  CounterRng rng(61, 0);
  for (int n : {1, 2, 8, 64, 256}) {
    std::vector<double> x(n), y(n), x0, y0;
    for (auto& v : x) v = rng.next_gaussian();
    for (auto& v : y) v = rng.next_gaussian();
    x0 = x;
    y0 = y;
    fwht_inplace(x);
    fwht_inplace(y);

    // H^2 = n I
    std::vector<double> xx = x;
    fwht_inplace(xx);
    for (int i = 0; i < n; ++i) CHECK(xx[i] == doctest::Approx(n * x0[i]).epsilon(1e-10));

    // <Hx, Hy> = n <x, y>
    double ip = 0.0, ip0 = 0.0;
    for (int i = 0; i < n; ++i) {
      ip += x[i] * y[i];
      ip0 += x0[i] * y0[i];
    }
    CHECK(ip == doctest::Approx(n * ip0).epsilon(1e-10));
  }
  std::vector<double> bad(3);
  CHECK_THROWS_AS(fwht_inplace(bad), std::invalid_argument);
}

TEST_CASE("randomized rotation normalizes energy") {
  CounterRng rng(62, 0);
  RotationSpec spec = RotationSpec::make(100, 17);
  CHECK(spec.n_pad == 128);

  auto signs = spec.signs();
  CHECK(signs.size() == 128);
  for (double s : signs) CHECK(std::fabs(s) == 1.0);

  Eigen::VectorXd x(100);
  for (int i = 0; i < 100; ++i) x(i) = rng.next_gaussian();
  Eigen::VectorXd u = apply_rht(x, x.norm(), spec);
  CHECK(u.size() == 128);
  CHECK(u.squaredNorm() == doctest::Approx(128.0).epsilon(1e-10));

  // deterministic in the seed
  Eigen::VectorXd u2 = apply_rht(x, x.norm(), spec);
  CHECK((u - u2).norm() == 0.0);

  // inner products preserved up to the sqrt(n_pad)/norm scaling
  Eigen::VectorXd y(100);
  for (int i = 0; i < 100; ++i) y(i) = rng.next_gaussian();
  Eigen::VectorXd v = apply_rht(y, y.norm(), spec);
  double lhs = u.dot(v) * x.norm() * y.norm() / 128.0;
  CHECK(lhs == doctest::Approx(x.dot(y)).epsilon(1e-9));

  Eigen::VectorXd w = normalize_column(x, x.norm());
  CHECK(w.size() == 100);
  CHECK(w.squaredNorm() == doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("column centering") {
  Eigen::VectorXd x(4);
  x << 1.0, 2.0, 3.0, 6.0;
  double mean = center_column(x);
  CHECK(mean == doctest::Approx(3.0));
  CHECK(x.sum() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(x(0) == doctest::Approx(-2.0));
}

TEST_CASE("mean grid quantizer") {
  const double delta = 0.01, M = 4.0;
  CounterRng rng(63, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    double mean = (2.0 * rng.next_double() - 1.0) * M;
    double mh = quantize_mean(mean, delta, M);
    CHECK(std::fabs(mh - mean) <= delta + 1e-12);
    // on the grid {2 delta k}
    double k = mh / (2.0 * delta);
    CHECK(std::fabs(k - std::round(k)) < 1e-9);
  }
  CHECK_THROWS_AS(quantize_mean(5.0, delta, M), std::invalid_argument);
}

TEST_CASE("norm grid quantizer") {
  const double delta = 0.01, M = 4.0;
  const std::uint64_t n = 4096;
  CounterRng rng(64, 0);
  const double lo = std::pow(M, -4.0), hi = std::sqrt(static_cast<double>(n)) * M;
  for (int trial = 0; trial < 2000; ++trial) {
    // log-uniform over the representable range
    double norm = lo * std::pow(hi / lo, rng.next_double());
    double nh = quantize_norm(norm, delta, M, n);
    CHECK(std::fabs(nh - norm) / norm <= delta + 1e-12);
    if (nh != 0.0) {
      double k = std::log(nh / lo) / std::log1p(delta);
      CHECK(std::fabs(k - std::round(k)) < 1e-6);
    }
  }
  // tiny norms collapse to the reserved zero level
  CHECK(quantize_norm(0.0, delta, M, n) == 0.0);
  CHECK(quantize_norm(lo * 0.3, delta, M, n) == 0.0);
  CHECK_THROWS_AS(quantize_norm(2.0 * hi, delta, M, n), std::invalid_argument);

  // brute-force oracle: returned level is the closest representable one
  std::uint64_t levels = norm_grid_levels(delta, M, n);
  for (int trial = 0; trial < 200; ++trial) {
    double norm = lo * std::pow(hi / lo, rng.next_double());
    double best = 0.0;
    for (std::uint64_t k = 0; k <= levels; ++k) {
      double cand = lo * std::pow(1.0 + delta, static_cast<double>(k));
      if (std::fabs(cand - norm) < std::fabs(best - norm)) best = cand;
    }
    CHECK(quantize_norm(norm, delta, M, n) == doctest::Approx(best).epsilon(1e-12));
  }

  CHECK(mean_grid_bits(delta, M) == doctest::Approx(std::log2(M / delta)));
  CHECK(norm_grid_bits(delta, M, n) == doctest::Approx(std::log2(levels + 2.0)));
}
