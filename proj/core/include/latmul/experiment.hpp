#pragma once

#include <string>
#include <vector>

#include "latmul/pipeline.hpp"

namespace latmul {

/// Harness settings. Defaults reproduce the reference run: D3, q=6, n=6144,
/// square sides, gamma bank {0.7 i} of size 9, alpha = kappa = 1, shared
/// dithers, no rotation, exact side info.
struct ExperimentConfig {
  std::uint32_t n = 6144;
  std::uint32_t a = 0;  // 0 means n
  std::uint32_t b = 0;
  std::string distribution = "gaussian";  // gaussian | file
  std::string file_a;
  std::string file_b;
  LatticeKind lattice = LatticeKind::Dn;
  int dim = 3;
  int q = 6;
  double gamma1 = 0.7;  // 0 selects the rule-of-thumb start
  int bank_size = 9;
  double kappa = 1.0;
  AlphaMode alpha_mode = AlphaMode::None;
  double alpha_explicit = 1.0;
  bool rotate = false;
  bool center = true;
  bool dither_enabled = true;
  std::uint64_t seed = 1;
  LutMode lut = LutMode::Off;  // decode path: off = direct
  int scalar_rate = 3;         // baseline quantizer bits
  std::string histogram_csv;   // empty disables the dump

  std::uint32_t cols_a() const { return a ? a : n; }
  std::uint32_t cols_b() const { return b ? b : n; }
  PipelineConfig pipeline() const;
  void validate() const;

  /// key=value lines, '#' comments; unknown keys are an error.
  static ExperimentConfig load(const std::string& path);
  void apply(const std::string& key, const std::string& value);
};

struct ExperimentReport {
  std::uint32_t n = 0, a = 0, b = 0;
  double distortion_per_entry = 0.0;  // ||C_hat - C||_F^2 / (n a b)
  double distortion_cubed = 0.0;      // ||C_hat - C||_F^2 / n^3
  double effective_rate = 0.0;        // bits per matrix entry
  double payload_rate = 0.0;          // recomputed from the packed stream size
  double gamma_entropy = 0.0;         // bits per block
  std::uint64_t saturation_count = 0;
  std::uint64_t lut_clamp_count = 0;
  double gamma_at_rate = 0.0;      // distortion-rate curve at the effective rate
  double theorem3_prediction = 0.0;
  double scalar_prediction = 0.0;
  double seconds_encode = 0.0;
  double seconds_decode = 0.0;
  double seconds_reference = 0.0;

  std::string summary() const;
};

/// Deterministic standard Gaussian matrix; column c uses stream
/// column(base_stream, c), so the draw is independent of the thread count.
Eigen::MatrixXd gaussian_matrix(std::uint32_t rows, std::uint32_t cols,
                                std::uint64_t seed, std::uint64_t base_stream);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// l_inf-normalized R-bit scalar baseline: each column is divided by its max
/// absolute entry (scale stored exactly), entries quantized to
/// round(2^{R-1} x) / 2^{R-1}.
ExperimentReport run_scalar_baseline(const ExperimentConfig& cfg);

struct SweepRow {
  std::string label;
  double rate_nominal = 0.0;  // log2(q)
  double rate_effective = 0.0;
  double distortion = 0.0;
  double gamma_at_rate = 0.0;
  double gap_ratio = 0.0;  // distortion / gamma_at_rate
};

std::vector<SweepRow> sweep_rates(const ExperimentConfig& cfg, const std::vector<int>& qs);
std::vector<SweepRow> sweep_lattices(const ExperimentConfig& cfg,
                                     const std::vector<std::pair<LatticeKind, int>>& lats);

}  // namespace latmul
