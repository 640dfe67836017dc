#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace latmul {

enum class LatticeKind : std::uint8_t { Zn = 0, Dn = 1, E8 = 2 };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& s);

/// A base lattice G * Z^d in a small dimension (d <= 8), with an exact
/// nearest-neighbor quantizer and precomputed geometric constants.
/// Immutable after construction; all member functions are reentrant.
///
/// Tie-breaking in nearest_point is deterministic: among equidistant lattice
/// points the one with the lexicographically smallest coordinate vector wins.
class Lattice {
 public:
  static Lattice make(LatticeKind kind, int dim);
  static Lattice zn(int dim) { return make(LatticeKind::Zn, dim); }
  static Lattice dn(int dim) { return make(LatticeKind::Dn, dim); }
  static Lattice e8() { return make(LatticeKind::E8, 8); }

  LatticeKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Eigen::MatrixXd& generator() const { return gen_; }
  const Eigen::MatrixXd& generator_inverse() const { return gen_inv_; }
  double sigma2() const { return sigma2_; }
  double covol() const { return covol_; }
  double tau() const { return tau_; }
  double r_eff() const { return r_eff_; }
  double r_cov() const { return r_cov_; }

  /// Q_L(x): closest lattice point, exact squared-distance comparisons.
  /// Throws std::invalid_argument on non-finite input.
  void nearest_point(const double* x, double* out) const;
  Eigen::VectorXd nearest_point(const Eigen::VectorXd& x) const;

  /// [x] mod L = x - Q_L(x); result lies in the Voronoi cell.
  void mod_lattice(const double* x, double* out) const;
  Eigen::VectorXd mod_lattice(const Eigen::VectorXd& x) const;

  /// Integer coordinates y with G*y == p, for a lattice point p.
  void coset_coords(const double* point, long* out) const;

  /// d * sigma2 / r_eff^2 (always >= d/(d+2)); starting point for the
  /// overload-avoidance scale bank.
  double gamma1_rule_of_thumb() const;

  struct McEstimate {
    double mean;
    double std_err;
  };
  /// Monte Carlo estimate of the per-dimension dither second moment,
  /// for validating the stored sigma2 constant.
  McEstimate second_moment_mc(std::int64_t samples, std::uint64_t seed) const;

 private:
  Lattice() = default;

  LatticeKind kind_;
  int dim_;
  Eigen::MatrixXd gen_;
  Eigen::MatrixXd gen_inv_;
  double sigma2_;
  double covol_;
  double tau_;
  double r_eff_;
  double r_cov_;
};

/// Volume of the unit l2 ball in R^d.
double unit_ball_volume(int d);

}  // namespace latmul
