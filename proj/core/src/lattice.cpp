#include "latmul/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "latmul/rng.hpp"

namespace latmul {

namespace {

// Round to nearest integer, ties toward the smaller value. This makes the
// scalar quantizer consistent with the lexicographic tie rule.
inline double round_tie_down(double x) { return std::ceil(x - 0.5); }

inline bool lex_less(const double* a, const double* b, int d) {
  for (int i = 0; i < d; ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

inline double sq_dist(const double* x, const double* p, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double e = x[i] - p[i];
    s += e * e;
  }
  return s;
}

void quantize_zn(const double* x, double* out, int d) {
  for (int i = 0; i < d; ++i) out[i] = round_tie_down(x[i]);
}

// Round all coordinates; if the sum is odd, re-round the coordinate with the
// largest |rounding error| in the other direction. Equal errors resolve to the
// lexicographically smallest resulting vector (an error of exactly 0 admits a
// flip in either direction).
void quantize_dn(const double* x, double* out, int d) {
  quantize_zn(x, out, d);
  long sum = 0;
  for (int i = 0; i < d; ++i) sum += static_cast<long>(out[i]);
  if ((sum & 1L) == 0) return;

  double max_err = -1.0;
  for (int i = 0; i < d; ++i) {
    double e = std::fabs(x[i] - out[i]);
    if (e > max_err) max_err = e;
  }
  double best[8];
  bool have_best = false;
  for (int i = 0; i < d; ++i) {
    double err = x[i] - out[i];
    if (std::fabs(err) != max_err) continue;
    double dirs[2];
    int ndirs = 0;
    if (err > 0.0) {
      dirs[ndirs++] = 1.0;
    } else if (err < 0.0) {
      dirs[ndirs++] = -1.0;
    } else {
      dirs[ndirs++] = -1.0;
      dirs[ndirs++] = 1.0;
    }
    for (int k = 0; k < ndirs; ++k) {
      double cand[8];
      for (int j = 0; j < d; ++j) cand[j] = out[j];
      cand[i] += dirs[k];
      if (!have_best || lex_less(cand, best, d)) {
        for (int j = 0; j < d; ++j) best[j] = cand[j];
        have_best = true;
      }
    }
  }
  for (int j = 0; j < d; ++j) out[j] = best[j];
}

// E8 = D8 union (D8 + 1/2): decode in both cosets and keep the closer point.
void quantize_e8(const double* x, double* out) {
  double a[8], b[8], shifted[8];
  quantize_dn(x, a, 8);
  for (int i = 0; i < 8; ++i) shifted[i] = x[i] - 0.5;
  quantize_dn(shifted, b, 8);
  for (int i = 0; i < 8; ++i) b[i] += 0.5;
  double da = sq_dist(x, a, 8);
  double db = sq_dist(x, b, 8);
  const double* pick = a;
  if (db < da || (db == da && lex_less(b, a, 8))) pick = b;
  for (int i = 0; i < 8; ++i) out[i] = pick[i];
}

}  // namespace

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::Zn: return "Zn";
    case LatticeKind::Dn: return "Dn";
    case LatticeKind::E8: return "E8";
  }
  return "?";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
  if (s == "Zn" || s == "zn") return LatticeKind::Zn;
  if (s == "Dn" || s == "dn") return LatticeKind::Dn;
  if (s == "E8" || s == "e8") return LatticeKind::E8;
  throw std::invalid_argument("unknown lattice kind: " + s);
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(1.0 + d / 2.0);
}

Lattice Lattice::make(LatticeKind kind, int dim) {
  Lattice lat;
  lat.kind_ = kind;
  lat.dim_ = dim;
  switch (kind) {
    case LatticeKind::Zn: {
      if (dim < 1 || dim > 8) throw std::invalid_argument("Zn: dim must be in [1,8]");
      lat.gen_ = Eigen::MatrixXd::Identity(dim, dim);
      lat.sigma2_ = 1.0 / 12.0;
      lat.covol_ = 1.0;
      lat.tau_ = 1.0;
      lat.r_cov_ = 0.5 * std::sqrt(static_cast<double>(dim));
      break;
    }
    case LatticeKind::Dn: {
      if (dim < 2 || dim > 4) throw std::invalid_argument("Dn: dim must be in [2,4]");
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
      for (int i = 0; i + 1 < dim; ++i) {
        g(i, i) = 1.0;
        g(i + 1, i) = 1.0;
      }
      g(dim - 1, dim - 1) = 2.0;
      lat.gen_ = g;
      // D2 by self-similarity to Z2; D3 exact; D4 Monte Carlo golden (1e7 draws)
      const double s2[3] = {1.0 / 6.0, 3.0 / 24.0, 0.1083030};
      lat.sigma2_ = s2[dim - 2];
      lat.covol_ = 2.0;
      lat.tau_ = 2.0;
      lat.r_cov_ = 1.0;  // deep hole at a unit vector for n <= 4
      break;
    }
    case LatticeKind::E8: {
      if (dim != 8) throw std::invalid_argument("E8: dim must be 8");
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(8, 8);
      g(0, 0) = 2.0;
      for (int i = 1; i < 7; ++i) {
        g(i, i) = 1.0;
        g(i - 1, i) = -1.0;
      }
      for (int i = 0; i < 8; ++i) g(i, 7) = 0.5;
      lat.gen_ = g;
      lat.sigma2_ = 0.0716843;  // Monte Carlo golden (1e7 draws)
      lat.covol_ = 1.0;
      lat.tau_ = 2.0;
      lat.r_cov_ = 1.0;  // deep hole at a unit vector
      break;
    }
  }
  lat.gen_inv_ = lat.gen_.inverse();
  lat.r_eff_ = std::pow(lat.covol_ / unit_ball_volume(dim), 1.0 / dim);
  return lat;
}

void Lattice::nearest_point(const double* x, double* out) const {
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument("nearest_point: non-finite input");
  }
  switch (kind_) {
    case LatticeKind::Zn: quantize_zn(x, out, dim_); break;
    case LatticeKind::Dn: quantize_dn(x, out, dim_); break;
    case LatticeKind::E8: quantize_e8(x, out); break;
  }
}

Eigen::VectorXd Lattice::nearest_point(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("nearest_point: dimension mismatch");
  Eigen::VectorXd out(dim_);
  nearest_point(x.data(), out.data());
  return out;
}

void Lattice::mod_lattice(const double* x, double* out) const {
  double p[8];
  nearest_point(x, p);
  for (int i = 0; i < dim_; ++i) out[i] = x[i] - p[i];
}

Eigen::VectorXd Lattice::mod_lattice(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("mod_lattice: dimension mismatch");
  Eigen::VectorXd out(dim_);
  mod_lattice(x.data(), out.data());
  return out;
}

void Lattice::coset_coords(const double* point, long* out) const {
  for (int i = 0; i < dim_; ++i) {
    double y = 0.0;
    for (int j = 0; j < dim_; ++j) y += gen_inv_(i, j) * point[j];
    out[i] = std::lround(y);
  }
}

double Lattice::gamma1_rule_of_thumb() const {
  return dim_ * sigma2_ / (r_eff_ * r_eff_);
}

Lattice::McEstimate Lattice::second_moment_mc(std::int64_t samples, std::uint64_t seed) const {
  if (samples < 1) throw std::invalid_argument("second_moment_mc: samples must be >= 1");
  CounterRng rng(seed, 0x5eC0);
  double sum = 0.0, sum_sq = 0.0;
  double u[8], z[8], p[8];
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < dim_; ++i) u[i] = tau_ * rng.next_double();
    nearest_point(u, p);
    double n2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      z[i] = u[i] - p[i];
      n2 += z[i] * z[i];
    }
    double v = n2 / dim_;
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / samples;
  double var = sum_sq / samples - mean * mean;
  return {mean, std::sqrt(std::max(var, 0.0) / samples)};
}

}  // namespace latmul
