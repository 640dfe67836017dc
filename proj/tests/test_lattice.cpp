#include <doctest.h>

#include "latmul/lattice.hpp"
#include "latmul/rng.hpp"
#include "oracles.hpp"

using latmul::CounterRng;
using latmul::Lattice;
using latmul::LatticeKind;

namespace {

std::vector<Lattice> test_lattices() {
  return {Lattice::zn(1), Lattice::zn(3), Lattice::zn(4), Lattice::dn(2),
          Lattice::dn(3), Lattice::dn(4), Lattice::e8()};
}

Eigen::VectorXd random_point(CounterRng& rng, int d, double range) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = (2.0 * rng.next_double() - 1.0) * range;
  return x;
}

}  // namespace

TEST_CASE("stored constants") {
  CHECK(Lattice::zn(1).sigma2() == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(Lattice::zn(5).sigma2() == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(Lattice::dn(3).sigma2() == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(Lattice::dn(2).sigma2() == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(Lattice::dn(4).sigma2() == doctest::Approx(0.1083030).epsilon(1e-4));
  CHECK(Lattice::e8().sigma2() == doctest::Approx(0.0716843).epsilon(1e-4));

  CHECK(Lattice::zn(3).covol() == doctest::Approx(1.0));
  CHECK(Lattice::dn(3).covol() == doctest::Approx(2.0));
  CHECK(Lattice::dn(4).covol() == doctest::Approx(2.0));
  CHECK(Lattice::e8().covol() == doctest::Approx(1.0));

  CHECK(Lattice::zn(3).tau() == 1.0);
  CHECK(Lattice::dn(3).tau() == 2.0);
  CHECK(Lattice::e8().tau() == 2.0);

  // r_eff = (covol / V_d)^{1/d}
  for (const auto& lat : test_lattices()) {
    double expect = std::pow(lat.covol() / latmul::unit_ball_volume(lat.dim()),
                             1.0 / lat.dim());
    CHECK(lat.r_eff() == doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK(Lattice::zn(4).r_cov() == doctest::Approx(1.0));  // sqrt(d)/2
  CHECK(Lattice::dn(3).r_cov() == doctest::Approx(1.0));
  CHECK(Lattice::dn(4).r_cov() == doctest::Approx(1.0));
  CHECK(Lattice::e8().r_cov() == doctest::Approx(1.0));
}

TEST_CASE("generator matrices") {
  for (const auto& lat : test_lattices()) {
    // generator columns are lattice points and G * G^{-1} = I
    for (int j = 0; j < lat.dim(); ++j)
      CHECK(oracle::is_lattice_point(lat, lat.generator().col(j)));
    Eigen::MatrixXd prod = lat.generator() * lat.generator_inverse();
    CHECK((prod - Eigen::MatrixXd::Identity(lat.dim(), lat.dim())).norm() < 1e-12);
    CHECK(std::fabs(std::fabs(lat.generator().determinant()) - lat.covol()) < 1e-9);
  }
}

TEST_CASE("nearest point hand cases") {
  Lattice d3 = Lattice::dn(3);
  Eigen::VectorXd x(3), p(3);
  x << 0.6, 0.6, 0.6;
  p = d3.nearest_point(x);
  CHECK(p(0) == 0.0);
  CHECK(p(1) == 1.0);
  CHECK(p(2) == 1.0);

  x << 1.2, 0.1, 0.9;
  Eigen::VectorXd m = d3.mod_lattice(x);
  CHECK(m(0) == doctest::Approx(0.2));
  CHECK(m(1) == doctest::Approx(0.1));
  CHECK(m(2) == doctest::Approx(-0.1));

  // scalar rounding breaks ties toward the smaller integer
  Lattice z1 = Lattice::zn(1);
  Eigen::VectorXd h(1);
  h << 0.5;
  CHECK(z1.nearest_point(h)(0) == 0.0);
  h << -0.5;
  CHECK(z1.nearest_point(h)(0) == -1.0);

  // equidistant D2 tie goes to the lexicographically smallest point
  Lattice d2 = Lattice::dn(2);
  Eigen::VectorXd t(2);
  t << 0.5, 0.5;
  Eigen::VectorXd tp = d2.nearest_point(t);
  CHECK(tp(0) == 0.0);
  CHECK(tp(1) == 0.0);
}

TEST_CASE("nearest point matches brute force") {
  for (const auto& lat : test_lattices()) {
    CounterRng rng(11, lat.dim() + 100 * static_cast<int>(lat.kind()));
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd x = random_point(rng, lat.dim(), 3.0);
      Eigen::VectorXd fast = lat.nearest_point(x);
      Eigen::VectorXd slow = oracle::brute_nearest(lat, x);
      CAPTURE(x.transpose());
      CHECK((fast - slow).norm() == 0.0);
      CHECK(oracle::is_lattice_point(lat, fast));
    }
  }
}

TEST_CASE("quantizer properties") {
  for (const auto& lat : test_lattices()) {
    CounterRng rng(12, static_cast<int>(lat.kind()));
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd x = random_point(rng, lat.dim(), 4.0);
      Eigen::VectorXd p = lat.nearest_point(x);

      // idempotence
      CHECK((lat.nearest_point(p) - p).norm() == 0.0);

      // equivariance under a lattice shift (twice a generator column)
      Eigen::VectorXd shift = 2.0 * lat.generator().col(trial % lat.dim());
      Eigen::VectorXd p2 = lat.nearest_point(x + shift);
      CHECK((p2 - (p + shift)).norm() < 1e-9);

      // mod output is the residual and lies within the covering radius
      Eigen::VectorXd m = lat.mod_lattice(x);
      CHECK((m - (x - p)).norm() == 0.0);
      CHECK(m.norm() <= lat.r_cov() + 1e-9);

      // coset coordinates reproduce the point through the generator
      long y[8];
      lat.coset_coords(p.data(), y);
      Eigen::VectorXd yv(lat.dim());
      for (int i = 0; i < lat.dim(); ++i) yv(i) = static_cast<double>(y[i]);
      CHECK((lat.generator() * yv - p).norm() < 1e-9);
    }
  }
}

TEST_CASE("non-finite input rejected") {
  Lattice d3 = Lattice::dn(3);
  Eigen::VectorXd x(3);
  x << 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(d3.nearest_point(x), std::invalid_argument);
  x << 0.0, std::numeric_limits<double>::infinity(), 0.0;
  CHECK_THROWS_AS(d3.nearest_point(x), std::invalid_argument);
}

TEST_CASE("monte carlo second moment agrees with stored sigma2") {
  for (const auto& lat : test_lattices()) {
    auto est = lat.second_moment_mc(200000, 99);
    CAPTURE(to_string(lat.kind()));
    CHECK(std::fabs(est.mean - lat.sigma2()) < 4.0 * est.std_err);
  }
  // D3 value pinned: 3/24 = 0.125
  auto d3 = Lattice::dn(3).second_moment_mc(400000, 7);
  CHECK(std::fabs(d3.mean - 0.125) < 3.0 * d3.std_err);
}

TEST_CASE("gamma1 rule of thumb") {
  CHECK(Lattice::zn(1).gamma1_rule_of_thumb() == doctest::Approx(1.0 / 3).epsilon(1e-9));
  CHECK(Lattice::dn(3).gamma1_rule_of_thumb() == doctest::Approx(0.6139).epsilon(1e-3));
  for (const auto& lat : test_lattices()) {
    double d = lat.dim();
    CHECK(lat.gamma1_rule_of_thumb() >= d / (d + 2.0) - 1e-12);
  }
}
