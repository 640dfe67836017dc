#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "latmul/codec.hpp"

namespace latmul {

enum class AlphaMode : std::uint8_t { None = 0, TwoSided = 1, OneSided = 2, Explicit = 3 };
enum class LutMode : std::uint8_t { Off = 0, Real = 1, Int8 = 2 };
enum class Side : std::uint8_t { A = 0, B = 1 };

std::string to_string(AlphaMode m);
AlphaMode alpha_mode_from_string(const std::string& s);

/// alpha resolution: None -> 1, TwoSided -> 1 - phi(2^{-2R/k}),
/// OneSided -> 1 - 2^{-2R/k}.
double mmse_alpha(double rate_bits, double kappa, AlphaMode mode);

struct PipelineConfig {
  NestedCodeConfig code;
  double kappa = 1.0;  // fraction of rotated coordinates that are described
  AlphaMode alpha_mode = AlphaMode::None;
  double alpha_explicit = 1.0;
  bool rotate = true;
  bool center = true;
  std::uint64_t rotation_seed = 1;
  std::uint64_t dither_seed = 2;
  bool shared_dithers = true;  // one dither per side for all blocks (LUT-compatible)
  bool dither_enabled = true;
  bool exact_side_info = true;  // fp64 mean/norm; otherwise the (M, delta) grids
  double grid_M = 0.0;
  double grid_delta = 0.0;

  double alpha() const;
  std::uint64_t hash() const;  // compatibility fingerprint (excludes side)
  void validate() const;

  std::uint32_t pad_dim(std::uint32_t n) const;
  /// Number of described coordinates: kappa * n_pad rounded down to a
  /// multiple of the lattice dimension.
  std::uint32_t kept_dims(std::uint32_t n) const;
  double side_info_bits_per_column(std::uint32_t n) const;
  Eigen::VectorXd dither(Side side, std::uint32_t block) const;
};

struct SideInfo {
  double mean_hat = 0.0;
  double norm_hat = 0.0;  // 0 marks the reserved all-zero column codeword
};

struct EncodedMatrix {
  std::uint32_t n = 0;
  std::uint32_t cols = 0;
  std::uint32_t n_pad = 0;
  std::uint32_t kept = 0;        // described coordinates per column
  std::uint32_t num_blocks = 0;  // kept / d
  Side side = Side::A;
  std::uint64_t config_hash = 0;
  std::uint64_t saturation_count = 0;
  std::vector<SideInfo> side_info;       // per column
  std::vector<std::uint8_t> gamma_idx;   // cols * num_blocks
  std::vector<std::uint32_t> codes;      // cols * num_blocks, base-q packed index

  double gamma_entropy_bits() const;  // empirical bits per block
  /// Packed stream size over all columns: per column a varint block count,
  /// 4-bit gamma indices, ceil(d*log2 q)-bit block codes, and the side info.
  std::uint64_t payload_bits(const PipelineConfig& cfg) const;
};

/// Per-column front end of the encoder: center, quantize mean/norm, rotate
/// (or just normalize), keep the first kappa*n_pad coordinates, then run the
/// escalating Voronoi-code encoder on each d-dimensional block.
EncodedMatrix encode_matrix(const Eigen::MatrixXd& mat, const PipelineConfig& cfg, Side side);

struct InnerProductLUT {
  int q = 0;
  int dim = 0;
  LutMode mode = LutMode::Real;
  std::uint64_t entries = 0;  // q^{2d}
  std::uint64_t clamp_count = 0;
  std::uint64_t dither_fingerprint = 0;
  double i8_scale = 1.0;  // integer magnification applied before rounding
  std::vector<double> real;
  std::vector<std::int8_t> i8;

  double fetch(std::uint32_t code_u, std::uint32_t code_v) const {
    std::uint64_t idx = static_cast<std::uint64_t>(code_u) * entries_per_side + code_v;
    return mode == LutMode::Real ? real[idx] : static_cast<double>(i8[idx]) / i8_scale;
  }
  std::uint64_t entries_per_side = 0;  // q^d
};

/// Table of dithered codeword inner products at beta = 1. Int8 mode stores
/// round(scale * value) clamped to [-128, 127], counting clamps; the integer
/// scale is the largest that keeps the table inside the int8 range, so the
/// quantization step is well below 1.
InnerProductLUT build_lut(const Lattice& lat, int q, const Eigen::VectorXd& z1,
                          const Eigen::VectorXd& z2, LutMode mode,
                          std::uint64_t max_entries = (1ull << 28));

/// Reconstruction: C_ij = alpha * (norm_a norm_b / n_pad) * sum_k bU_k bV_k <u_k, v_k>
/// + n * mean_a * mean_b. Kahan-compensated accumulation in a fixed order.
Eigen::MatrixXd decode_matmul(const EncodedMatrix& enc_a, const EncodedMatrix& enc_b,
                              const PipelineConfig& cfg);

/// Same reconstruction with the per-block inner products fetched from the LUT.
/// Bit-identical to decode_matmul in real mode.
Eigen::MatrixXd decode_matmul_lut(const EncodedMatrix& enc_a, const EncodedMatrix& enc_b,
                                  const InnerProductLUT& lut, const PipelineConfig& cfg);

/// One-sided path: B enters uncompressed through the same front end.
Eigen::MatrixXd one_sided_matmul(const EncodedMatrix& enc_a, const Eigen::MatrixXd& b,
                                 const PipelineConfig& cfg);

/// log2(q) + gamma-index entropy/d + side info/n, in bits per matrix entry.
double effective_rate_bits(const EncodedMatrix& enc, const PipelineConfig& cfg);

}  // namespace latmul
