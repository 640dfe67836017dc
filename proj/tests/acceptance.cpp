// Acceptance gate: one pass/fail line per criterion. Runs the reduced
// problem sizes by default (seconds); --full switches to the full-size
// reproduction (minutes).
#include <cmath>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "latmul/experiment.hpp"
#include "latmul/io.hpp"
#include "latmul/rng.hpp"
#include "latmul/theory.hpp"
#include "oracles.hpp"

using namespace latmul;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << name << "  [" << detail << "]\n";
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void check_reproduction(bool full) {
  ExperimentConfig cfg;
  cfg.n = full ? 6144 : 1536;
  cfg.seed = 1;
  ExperimentReport rep = run_experiment(cfg);

  // full-size window [0.050, 0.068]; reduced size widened by 20%
  double lo = full ? 0.050 : 0.040;
  double hi = full ? 0.068 : 0.0816;
  report("reproduction distortion", rep.distortion_cubed >= lo && rep.distortion_cubed <= hi,
         "(1/n^3)||C_hat-C||_F^2 = " + fmt(rep.distortion_cubed) + " in [" + fmt(lo) + ", " +
             fmt(hi) + "], n=" + std::to_string(cfg.n));
  report("reproduction rate", rep.effective_rate >= 2.9 && rep.effective_rate <= 3.15,
         "effective rate = " + fmt(rep.effective_rate) + " bits/entry in [2.9, 3.15]");
  report("gamma index entropy", std::fabs(rep.gamma_entropy - 1.3) <= 0.3,
         "H(gamma) = " + fmt(rep.gamma_entropy) + " bits/block, target 1.3 +- 0.3");

  ExperimentReport sb = run_scalar_baseline(cfg);
  double ratio = sb.distortion_per_entry / rep.distortion_per_entry;
  // reduced size widened by 20%, like the lattice window (the scalar
  // prediction shrinks with ln n)
  double slo = full ? 0.14 : 0.112;
  double shi = full ? 0.20 : 0.24;
  report("scalar baseline window",
         sb.distortion_per_entry >= slo && sb.distortion_per_entry <= shi,
         "3-bit l_inf distortion = " + fmt(sb.distortion_per_entry) + " in [" + fmt(slo) +
             ", " + fmt(shi) + "]");
  report("scalar baseline ratio", ratio >= 2.2,
         "scalar/lattice distortion ratio = " + fmt(ratio) + " >= 2.2");
}

void check_theory() {
  double rs = theory::r_star();
  double residual = 1.0 + 4.0 * std::log(2.0) * rs - std::exp2(2.0 * rs);
  report("critical rate", std::fabs(rs - 0.906) <= 1e-3 && std::fabs(residual) < 1e-10,
         "R* = " + fmt(rs) + ", residual = " + fmt(residual));

  double g = theory::gamma_curve(3.015);
  report("curve value at 3.015", std::fabs(g - 0.0304) <= 5e-4,
         "curve(3.015) = " + fmt(g) + ", target 0.0304 +- 5e-4");

  double worst = 0.0;
  for (double r = 0.05; r <= 4.0; r += 0.01) {
    auto value = [&](double k) {
      return (1.0 - k) + k * theory::phi(std::exp2(-2.0 * r / k));
    };
    double best = 1.0, best_k = 1.0;
    for (int i = 1; i <= 2000; ++i) {
      double k = i / 2000.0;
      double v = value(k);
      if (v < best) {
        best = v;
        best_k = k;
      }
    }
    double klo = std::max(1e-9, best_k - 1e-3);
    double khi = std::min(1.0, best_k + 1e-3);
    for (int i = 0; i <= 4000; ++i) {
      double v = value(klo + (khi - klo) * i / 4000.0);
      if (v < best) best = v;
    }
    worst = std::max(worst, std::fabs(theory::gamma_curve(r) - best));
  }
  report("curve equals kappa minimization", worst < 1e-6,
         "max |curve - min_kappa form| = " + fmt(worst) + " < 1e-6 on dense R grid");
}

void check_codec() {
  std::vector<Lattice> lats = {Lattice::zn(1), Lattice::zn(3), Lattice::dn(3),
                               Lattice::dn(4), Lattice::e8()};

  // 10^4 no-overload round trips: exact reconstruction and the error bound
  int trials_ok = 0;
  bool exact = true, bounded = true;
  for (const auto& lat : lats) {
    const int d = lat.dim();
    CounterRng rng(77, static_cast<int>(lat.kind()) + 16 * d);
    for (int trial = 0; trial < 4000 && trials_ok < 10000; ++trial) {
      int q = 2 + static_cast<int>(rng.next_u64() % 7);
      double beta = 0.05 + rng.next_double();
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x(i) = (2.0 * rng.next_double() - 1.0) * 0.3 * beta * q;
      Eigen::VectorXd z = draw_dither(lat, 77, 5000 + trial);
      BlockCode code = encode_block(x.data(), lat, q, beta, z.data());
      if (code.overload) continue;
      ++trials_ok;
      Eigen::VectorXd decoded(d), reference(d);
      decode_block(code, lat, q, beta, z.data(), decoded.data());
      Eigen::VectorXd t = lat.nearest_point(x / beta + z);
      for (int i = 0; i < d; ++i) reference(i) = beta * (t(i) - z(i));
      if ((decoded - reference).norm() != 0.0) exact = false;
      if ((x - decoded).norm() > beta * lat.r_cov() + 1e-9) bounded = false;
    }
  }
  report("codec round-trip exactness", exact && bounded && trials_ok >= 10000,
         std::to_string(trials_ok) + " no-overload trials, exact=" +
             (exact ? "yes" : "no") + ", within beta*r_cov=" + (bounded ? "yes" : "no"));

  // nearest-point brute-force oracle, 10^3 points per lattice
  bool nearest_ok = true;
  for (const auto& lat : lats) {
    CounterRng rng(78, static_cast<int>(lat.kind()) + 32 * lat.dim());
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd x(lat.dim());
      for (int i = 0; i < lat.dim(); ++i) x(i) = 6.0 * (rng.next_double() - 0.5);
      if ((lat.nearest_point(x) - oracle::brute_nearest(lat, x)).norm() != 0.0)
        nearest_ok = false;
    }
  }
  report("nearest-point oracle agreement", nearest_ok,
         "1000 random points per lattice vs exhaustive search");

  bool dither_ok = true;
  for (const auto& lat : lats)
    for (int s = 0; s < 500; ++s)
      if (lat.nearest_point(draw_dither(lat, 79, s)).norm() != 0.0) dither_ok = false;
  report("dither in Voronoi cell", dither_ok, "Q(Z) = 0 for 500 draws per lattice");

  auto mc = Lattice::dn(3).second_moment_mc(400000, 80);
  report("monte carlo second moment", std::fabs(mc.mean - 0.125) < 3.0 * mc.std_err,
         "sigma2 estimate " + fmt(mc.mean) + " vs 0.125, 3 SE = " + fmt(3.0 * mc.std_err));
}

void check_lut(bool full) {
  PipelineConfig cfg;
  cfg.code.lattice = Lattice::dn(3);
  cfg.code.q = 6;
  cfg.code.gamma_bank = NestedCodeConfig::default_gamma_bank(cfg.code.lattice);
  cfg.rotate = false;

  InnerProductLUT lut = build_lut(cfg.code.lattice, cfg.code.q, cfg.dither(Side::A, 0),
                                  cfg.dither(Side::B, 0), LutMode::Real);
  report("lut size", lut.entries == 46656,
         "q^{2d} = " + std::to_string(lut.entries) + ", expected 46656");

  const std::uint32_t n = full ? 6144 : 1536;
  Eigen::MatrixXd a = gaussian_matrix(n, 256, 1, streams::kMatrixA);
  Eigen::MatrixXd b = gaussian_matrix(n, 256, 1, streams::kMatrixB);
  EncodedMatrix ea = encode_matrix(a, cfg, Side::A);
  EncodedMatrix eb = encode_matrix(b, cfg, Side::B);
  Eigen::MatrixXd direct = decode_matmul(ea, eb, cfg);
  Eigen::MatrixXd via_lut = decode_matmul_lut(ea, eb, lut, cfg);
  report("lut real-mode bit identity", (direct - via_lut).norm() == 0.0,
         "max |direct - lut| = " + fmt((direct - via_lut).cwiseAbs().maxCoeff()));

  InnerProductLUT lut8 = build_lut(cfg.code.lattice, cfg.code.q, cfg.dither(Side::A, 0),
                                   cfg.dither(Side::B, 0), LutMode::Int8);
  Eigen::MatrixXd via_int8 = decode_matmul_lut(ea, eb, lut8, cfg);
  Eigen::MatrixXd exact = a.transpose() * b;
  double d_direct = (direct - exact).squaredNorm();
  double d_int8 = (via_int8 - exact).squaredNorm();
  double rel = std::fabs(d_int8 - d_direct) / d_direct;
  report("lut int8 distortion", rel <= 0.02,
         "relative distortion change = " + fmt(rel) + " <= 0.02, clamps=" +
             std::to_string(lut8.clamp_count));
}

void check_one_sided() {
  const std::uint32_t n = 4096, cols = 256;
  Eigen::MatrixXd a = gaussian_matrix(n, cols, 2, streams::kMatrixA);
  Eigen::MatrixXd b = gaussian_matrix(n, cols, 2, streams::kMatrixB);

  for (int q : {4, 16}) {  // R = 2 and R = 4 bits/dimension
    PipelineConfig cfg;
    cfg.code.lattice = Lattice::dn(3);
    cfg.code.q = q;
    cfg.code.gamma_bank = NestedCodeConfig::default_gamma_bank(cfg.code.lattice);
    cfg.rotate = false;
    cfg.alpha_mode = AlphaMode::OneSided;
    double rate = std::log2(static_cast<double>(q));

    EncodedMatrix ea = encode_matrix(a, cfg, Side::A);
    Eigen::MatrixXd c_hat = one_sided_matmul(ea, b, cfg);
    Eigen::MatrixXd c_ref = a.transpose() * b;

    // centered columns and products for the bound
    Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
    Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
    Eigen::VectorXd na2 = ac.colwise().squaredNorm();
    Eigen::VectorXd nb2 = bc.colwise().squaredNorm();
    Eigen::MatrixXd tilde_c = ac.transpose() * bc;

    double mse = 0.0, bound = 0.0;
    double d2 = std::exp2(-2.0 * rate), d4 = d2 * d2;
    for (std::uint32_t i = 0; i < cols; ++i)
      for (std::uint32_t j = 0; j < cols; ++j) {
        double e = c_hat(i, j) - c_ref(i, j);
        mse += e * e;
        bound += tilde_c(i, j) * tilde_c(i, j) * d4 + na2(i) * nb2(j) / n * (d2 - d4);
      }
    mse /= cols * static_cast<double>(cols);
    bound /= cols * static_cast<double>(cols);
    double ratio = mse / bound;
    report("one-sided bound R=" + fmt(rate), ratio <= 1.25,
           "MSE/bound = " + fmt(ratio) + " <= 1.25 (MSE " + fmt(mse) + ", bound " +
               fmt(bound) + ")");
  }
}

void check_sweeps() {
  ExperimentConfig cfg;
  cfg.n = 768;
  cfg.a = 256;
  cfg.b = 256;
  cfg.seed = 3;

  auto rows = sweep_rates(cfg, {2, 4, 8, 16});
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].distortion > rows[i - 1].distortion) monotone = false;
  std::string path;
  for (const auto& r : rows) path += " " + fmt(r.distortion);
  report("distortion nonincreasing in rate", monotone, "q=2,4,8,16 distortions:" + path);

  auto pair = sweep_lattices(cfg, {{LatticeKind::Dn, 3}, {LatticeKind::Zn, 3}});
  report("d3 beats z3 at equal rate", pair[0].distortion < pair[1].distortion,
         "D3 " + fmt(pair[0].distortion) + " < Z3 " + fmt(pair[1].distortion) +
             " at q=" + std::to_string(cfg.q));
}

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--full") == 0) full = true;

  std::cout << "acceptance gate (" << (full ? "full" : "reduced") << " sizes)\n";
  check_reproduction(full);
  check_theory();
  check_codec();
  check_lut(full);
  check_one_sided();
  check_sweeps();

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED\n"
                                : std::to_string(g_failures) + " CRITERIA FAILED\n");
  return g_failures == 0 ? 0 : 1;
}
