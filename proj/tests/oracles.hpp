// Slow reference implementations used only to check the fast library code.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "latmul/lattice.hpp"

namespace oracle {

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

/// Exhaustive nearest-point search over a coordinate box around x, restricted
/// to lattice membership. Ties go to the lexicographically smallest point.
inline Eigen::VectorXd brute_nearest(const latmul::Lattice& lat, const Eigen::VectorXd& x) {
  const int d = lat.dim();
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_p = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd p(d);

  auto consider = [&](const Eigen::VectorXd& cand) {
    double dist = (cand - x).squaredNorm();
    if (dist < best || (dist == best && lex_less(cand, best_p))) {
      best = dist;
      best_p = cand;
    }
  };

  // integer points (even-sum only for Dn and the integer coset of E8)
  auto scan = [&](double offset, bool even_sum, auto&& self, int coord) -> void {
    if (coord == d) {
      if (even_sum) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += p(i) - offset;
        if (std::lround(s) % 2 != 0) return;
      }
      consider(p);
      return;
    }
    double base = std::floor(x(coord) - offset + 0.5) + offset;  // nearest grid point
    for (int delta = -1; delta <= 1; ++delta) {
      p(coord) = base + delta;
      self(offset, even_sum, self, coord + 1);
    }
  };

  switch (lat.kind()) {
    case latmul::LatticeKind::Zn:
      scan(0.0, false, scan, 0);
      break;
    case latmul::LatticeKind::Dn:
      scan(0.0, true, scan, 0);
      break;
    case latmul::LatticeKind::E8:
      scan(0.0, true, scan, 0);
      scan(0.5, true, scan, 0);
      break;
  }
  return best_p;
}

/// Membership check from the definition of each lattice.
inline bool is_lattice_point(const latmul::Lattice& lat, const Eigen::VectorXd& p,
                             double tol = 1e-9) {
  const int d = lat.dim();
  auto near_int = [&](double v) { return std::fabs(v - std::round(v)) < tol; };
  switch (lat.kind()) {
    case latmul::LatticeKind::Zn: {
      for (int i = 0; i < d; ++i)
        if (!near_int(p(i))) return false;
      return true;
    }
    case latmul::LatticeKind::Dn: {
      long sum = 0;
      for (int i = 0; i < d; ++i) {
        if (!near_int(p(i))) return false;
        sum += std::lround(p(i));
      }
      return sum % 2 == 0;
    }
    case latmul::LatticeKind::E8: {
      bool all_int = true, all_half = true;
      for (int i = 0; i < d; ++i) {
        if (!near_int(p(i))) all_int = false;
        if (!near_int(p(i) - 0.5)) all_half = false;
      }
      if (!all_int && !all_half) return false;
      double offset = all_int ? 0.0 : 0.5;
      long sum = 0;
      for (int i = 0; i < d; ++i) sum += std::lround(p(i) - offset);
      return sum % 2 == 0;
    }
  }
  return false;
}

}  // namespace oracle
