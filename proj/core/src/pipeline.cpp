#include "latmul/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "latmul/parallel.hpp"
#include "latmul/rng.hpp"
#include "latmul/rotation.hpp"
#include "latmul/theory.hpp"

namespace latmul {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
std::uint64_t fnv_add(std::uint64_t h, const T& v) {
  return fnv1a(&v, sizeof(T), h);
}

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

std::string to_string(AlphaMode m) {
  switch (m) {
    case AlphaMode::None: return "none";
    case AlphaMode::TwoSided: return "two_sided";
    case AlphaMode::OneSided: return "one_sided";
    case AlphaMode::Explicit: return "explicit";
  }
  return "?";
}

AlphaMode alpha_mode_from_string(const std::string& s) {
  if (s == "none") return AlphaMode::None;
  if (s == "two_sided") return AlphaMode::TwoSided;
  if (s == "one_sided") return AlphaMode::OneSided;
  if (s == "explicit") return AlphaMode::Explicit;
  throw std::invalid_argument("unknown alpha mode: " + s);
}

double mmse_alpha(double rate_bits, double kappa, AlphaMode mode) {
  switch (mode) {
    case AlphaMode::None: return 1.0;
    case AlphaMode::TwoSided: return 1.0 - theory::phi(std::exp2(-2.0 * rate_bits / kappa));
    case AlphaMode::OneSided: return 1.0 - std::exp2(-2.0 * rate_bits / kappa);
    case AlphaMode::Explicit: break;
  }
  throw std::invalid_argument("mmse_alpha: explicit mode carries its own value");
}

double PipelineConfig::alpha() const {
  if (alpha_mode == AlphaMode::Explicit) return alpha_explicit;
  return mmse_alpha(code.rate_bits(), kappa, alpha_mode);
}

std::uint64_t PipelineConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv_add(h, code.lattice.kind());
  h = fnv_add(h, code.lattice.dim());
  h = fnv_add(h, code.q);
  for (double g : code.gamma_bank) h = fnv_add(h, g);
  h = fnv_add(h, kappa);
  h = fnv_add(h, alpha_mode);
  h = fnv_add(h, alpha_explicit);
  h = fnv_add(h, rotate);
  h = fnv_add(h, center);
  h = fnv_add(h, rotation_seed);
  h = fnv_add(h, dither_seed);
  h = fnv_add(h, shared_dithers);
  h = fnv_add(h, dither_enabled);
  h = fnv_add(h, exact_side_info);
  h = fnv_add(h, grid_M);
  h = fnv_add(h, grid_delta);
  return h;
}

void PipelineConfig::validate() const {
  code.validate();
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must be in (0,1]");
  if (alpha_mode == AlphaMode::Explicit && !(alpha_explicit > 0.0 && alpha_explicit <= 1.0))
    throw std::invalid_argument("explicit alpha must be in (0,1]");
  if (!exact_side_info && (grid_M <= 0.0 || grid_delta <= 0.0))
    throw std::invalid_argument("paper-grid side info requires positive M and delta");
  if (block_bits(code.lattice.dim(), code.q) > 32)
    throw std::invalid_argument("block index exceeds 32 bits");
}

std::uint32_t PipelineConfig::pad_dim(std::uint32_t n) const {
  return rotate ? RotationSpec::pad_dim(n) : n;
}

std::uint32_t PipelineConfig::kept_dims(std::uint32_t n) const {
  const int d = code.lattice.dim();
  auto kept = static_cast<std::uint32_t>(kappa * pad_dim(n));
  kept -= kept % d;
  if (kept == 0) throw std::invalid_argument("kappa too small: no block survives");
  return kept;
}

double PipelineConfig::side_info_bits_per_column(std::uint32_t n) const {
  if (exact_side_info) return 128.0;  // fp64 mean + fp64 norm
  return mean_grid_bits(grid_delta, grid_M) + norm_grid_bits(grid_delta, grid_M, n);
}

Eigen::VectorXd PipelineConfig::dither(Side side, std::uint32_t block) const {
  if (!dither_enabled) return Eigen::VectorXd::Zero(code.lattice.dim());
  std::uint64_t base = side == Side::A ? streams::kDitherA : streams::kDitherB;
  std::uint64_t stream = shared_dithers ? base : streams::dither_block(base, block);
  return draw_dither(code.lattice, dither_seed, stream);
}

double EncodedMatrix::gamma_entropy_bits() const {
  std::map<std::uint8_t, std::uint64_t> counts;
  for (std::uint8_t g : gamma_idx) ++counts[g];
  double total = static_cast<double>(gamma_idx.size());
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::uint64_t EncodedMatrix::payload_bits(const PipelineConfig& cfg) const {
  std::vector<std::uint8_t> varint;
  write_varint(varint, num_blocks);
  const int bb = block_bits(cfg.code.lattice.dim(), cfg.code.q);
  // gamma indices and block codes are byte-aligned per column in the stream
  std::uint64_t gamma_bytes = (4ull * num_blocks + 7) / 8;
  std::uint64_t code_bytes = (static_cast<std::uint64_t>(bb) * num_blocks + 7) / 8;
  std::uint64_t per_col = varint.size() * 8ull + gamma_bytes * 8 + code_bytes * 8 + 128ull;
  return per_col * cols;
}

namespace {

// Decoded codeword tables at beta = 1 for a shared-dither configuration.
struct CodewordTable {
  int dim = 0;
  std::uint64_t count = 0;  // q^d
  std::vector<double> pts;  // count * dim
  const double* at(std::uint32_t code) const { return pts.data() + code * dim; }
};

CodewordTable build_codeword_table(const Lattice& lat, int q, const Eigen::VectorXd& z) {
  CodewordTable t;
  t.dim = lat.dim();
  t.count = 1;
  for (int i = 0; i < t.dim; ++i) t.count *= q;
  t.pts.resize(t.count * t.dim);
  for (std::uint64_t c = 0; c < t.count; ++c) {
    BlockCode code = block_from_index(c, t.dim, q);
    decode_block(code, lat, q, 1.0, z.data(), t.pts.data() + c * t.dim);
  }
  return t;
}

inline double dot_d(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

std::uint64_t dither_fp(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2, int q, int d) {
  std::uint64_t h = fnv1a(z1.data(), z1.size() * sizeof(double));
  h = fnv1a(z2.data(), z2.size() * sizeof(double), h);
  h = fnv_add(h, q);
  h = fnv_add(h, d);
  return h;
}

}  // namespace

EncodedMatrix encode_matrix(const Eigen::MatrixXd& mat, const PipelineConfig& cfg, Side side) {
  cfg.validate();
  if (mat.size() == 0) throw std::invalid_argument("encode_matrix: empty matrix");
  if (!mat.allFinite()) throw std::invalid_argument("encode_matrix: non-finite entries");

  const auto n = static_cast<std::uint32_t>(mat.rows());
  const auto cols = static_cast<std::uint32_t>(mat.cols());
  const int d = cfg.code.lattice.dim();

  EncodedMatrix enc;
  enc.n = n;
  enc.cols = cols;
  enc.n_pad = cfg.pad_dim(n);
  enc.kept = cfg.kept_dims(n);
  enc.num_blocks = enc.kept / d;
  enc.side = side;
  enc.config_hash = cfg.hash();
  enc.side_info.resize(cols);
  enc.gamma_idx.assign(static_cast<std::size_t>(cols) * enc.num_blocks, 0);
  enc.codes.assign(static_cast<std::size_t>(cols) * enc.num_blocks, 0);

  const RotationSpec spec{enc.n_pad, cfg.rotation_seed};
  const Eigen::VectorXd shared_z = cfg.dither(side, 0);
  std::atomic<std::uint64_t> saturated{0};

  parallel_for(0, cols, [&](std::size_t lo, std::size_t hi) {
    std::uint64_t local_sat = 0;
    for (std::size_t c = lo; c < hi; ++c) {
      Eigen::VectorXd x = mat.col(static_cast<Eigen::Index>(c));
      double mean = cfg.center ? center_column(x) : 0.0;
      double norm = x.norm();
      SideInfo& si = enc.side_info[c];
      if (cfg.exact_side_info) {
        si.mean_hat = mean;
        si.norm_hat = norm;
      } else {
        si.mean_hat = quantize_mean(mean, cfg.grid_delta, cfg.grid_M);
        si.norm_hat = quantize_norm(norm, cfg.grid_delta, cfg.grid_M, n);
      }
      if (norm == 0.0) {
        si.norm_hat = 0.0;  // reserved all-zero codeword
        continue;
      }
      Eigen::VectorXd u = cfg.rotate ? apply_rht(x, norm, spec) : normalize_column(x, norm);
      std::size_t base = c * enc.num_blocks;
      for (std::uint32_t k = 0; k < enc.num_blocks; ++k) {
        const double* blk = u.data() + static_cast<std::size_t>(k) * d;
        Eigen::VectorXd zk;
        const double* z = shared_z.data();
        if (!cfg.shared_dithers && cfg.dither_enabled) {
          zk = cfg.dither(side, k);
          z = zk.data();
        }
        EscalationResult res = encode_block_escalating(blk, cfg.code, z);
        enc.gamma_idx[base + k] = static_cast<std::uint8_t>(res.gamma_index);
        enc.codes[base + k] =
            static_cast<std::uint32_t>(block_to_index(res.code, d, cfg.code.q));
        if (res.saturated) ++local_sat;
      }
    }
    saturated += local_sat;
  });
  enc.saturation_count = saturated;
  return enc;
}

InnerProductLUT build_lut(const Lattice& lat, int q, const Eigen::VectorXd& z1,
                          const Eigen::VectorXd& z2, LutMode mode, std::uint64_t max_entries) {
  if (mode == LutMode::Off) throw std::invalid_argument("build_lut: mode must be real or int8");
  const int d = lat.dim();
  std::uint64_t per_side = 1;
  for (int i = 0; i < d; ++i) per_side *= q;
  InnerProductLUT lut;
  lut.q = q;
  lut.dim = d;
  lut.mode = mode;
  lut.entries_per_side = per_side;
  lut.entries = per_side * per_side;
  lut.dither_fingerprint = dither_fp(z1, z2, q, d);
  if (lut.entries > max_entries) throw std::invalid_argument("build_lut: entry budget exceeded");

  CodewordTable tu = build_codeword_table(lat, q, z1);
  CodewordTable tv = build_codeword_table(lat, q, z2);
  if (mode == LutMode::Real) {
    lut.real.resize(lut.entries);
  } else {
    lut.i8.resize(lut.entries);
    // integer magnification filling the int8 range; 1 when values already
    // reach past 127 (clamping then does the limiting)
    double max_abs = 0.0;
    for (std::uint64_t u = 0; u < per_side; ++u)
      for (std::uint64_t v = 0; v < per_side; ++v)
        max_abs = std::max(max_abs, std::fabs(dot_d(tu.at(static_cast<std::uint32_t>(u)),
                                                    tv.at(static_cast<std::uint32_t>(v)), d)));
    lut.i8_scale = max_abs > 0.0 ? std::max(1.0, std::floor(127.0 / max_abs)) : 1.0;
  }
  std::atomic<std::uint64_t> clamps{0};
  parallel_for(0, per_side, [&](std::size_t lo, std::size_t hi) {
    std::uint64_t local_clamps = 0;
    for (std::size_t u = lo; u < hi; ++u) {
      const double* pu = tu.at(static_cast<std::uint32_t>(u));
      for (std::uint64_t v = 0; v < per_side; ++v) {
        double ip = dot_d(pu, tv.at(static_cast<std::uint32_t>(v)), d);
        std::uint64_t idx = u * per_side + v;
        if (mode == LutMode::Real) {
          lut.real[idx] = ip;
        } else {
          double r = std::round(ip * lut.i8_scale);
          if (r > 127.0) {
            r = 127.0;
            ++local_clamps;
          } else if (r < -128.0) {
            r = -128.0;
            ++local_clamps;
          }
          lut.i8[idx] = static_cast<std::int8_t>(r);
        }
      }
    }
    clamps += local_clamps;
  });
  lut.clamp_count = clamps;
  return lut;
}

namespace {

void check_pair(const EncodedMatrix& a, const EncodedMatrix& b, const PipelineConfig& cfg) {
  if (a.config_hash != cfg.hash() || b.config_hash != cfg.hash())
    throw std::invalid_argument("decode_matmul: config hash mismatch");
  if (a.n != b.n || a.kept != b.kept || a.num_blocks != b.num_blocks)
    throw std::invalid_argument("decode_matmul: encoded shapes incompatible");
}

// Shared decode kernel; `fetch(ca, cb)` yields the beta=1 block inner product.
template <typename Fetch>
Eigen::MatrixXd decode_kernel(const EncodedMatrix& ea, const EncodedMatrix& eb,
                              const PipelineConfig& cfg, Fetch&& fetch) {
  const double alpha = cfg.alpha();
  const double n = ea.n;
  const double n_pad = ea.n_pad;
  const std::uint32_t K = ea.num_blocks;

  std::vector<double> betas(cfg.code.gamma_bank.size());
  for (std::size_t i = 0; i < betas.size(); ++i)
    betas[i] = beta_from_gamma(cfg.code.gamma_bank[i], cfg.code.rate_bits(),
                               cfg.code.lattice.sigma2());

  Eigen::MatrixXd out(ea.cols, eb.cols);
  parallel_for(0, ea.cols, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const SideInfo& sa = ea.side_info[i];
      const std::uint32_t* ca = ea.codes.data() + i * K;
      const std::uint8_t* ga = ea.gamma_idx.data() + i * K;
      for (std::uint32_t j = 0; j < eb.cols; ++j) {
        const SideInfo& sb = eb.side_info[j];
        double mean_term = n * sa.mean_hat * sb.mean_hat;
        if (sa.norm_hat == 0.0 || sb.norm_hat == 0.0) {
          out(static_cast<Eigen::Index>(i), j) = mean_term;
          continue;
        }
        const std::uint32_t* cb = eb.codes.data() + static_cast<std::size_t>(j) * K;
        const std::uint8_t* gb = eb.gamma_idx.data() + static_cast<std::size_t>(j) * K;
        Kahan acc;
        for (std::uint32_t k = 0; k < K; ++k)
          acc.add(betas[ga[k]] * betas[gb[k]] * fetch(ca[k], cb[k], k));
        out(static_cast<Eigen::Index>(i), j) =
            alpha * sa.norm_hat * sb.norm_hat / n_pad * acc.sum + mean_term;
      }
    }
  });
  return out;
}

bool all_gamma_zero(const EncodedMatrix& e) {
  for (std::uint8_t g : e.gamma_idx)
    if (g != 0) return false;
  return true;
}

}  // namespace

Eigen::MatrixXd decode_matmul(const EncodedMatrix& ea, const EncodedMatrix& eb,
                              const PipelineConfig& cfg) {
  check_pair(ea, eb, cfg);
  const Lattice& lat = cfg.code.lattice;
  const int d = lat.dim();
  const int q = cfg.code.q;

  if (cfg.shared_dithers) {
    Eigen::VectorXd z1 = cfg.dither(Side::A, 0);
    Eigen::VectorXd z2 = cfg.dither(Side::B, 0);
    // Integer fast path: undithered codewords of an integral lattice with a
    // single beta are exact integers, so blocks accumulate in int32.
    if (!cfg.dither_enabled && lat.kind() != LatticeKind::E8 && all_gamma_zero(ea) &&
        all_gamma_zero(eb)) {
      CodewordTable tu = build_codeword_table(lat, q, z1);
      CodewordTable tv = build_codeword_table(lat, q, z2);
      std::uint64_t per_side = tu.count;
      std::vector<std::int32_t> ilut(per_side * per_side);
      for (std::uint64_t u = 0; u < per_side; ++u)
        for (std::uint64_t v = 0; v < per_side; ++v)
          ilut[u * per_side + v] = static_cast<std::int32_t>(
              std::lround(dot_d(tu.at(u), tv.at(v), d)));

      const double alpha = cfg.alpha();
      const double beta1 = beta_from_gamma(cfg.code.gamma_bank[0], cfg.code.rate_bits(),
                                           lat.sigma2());
      const double n = ea.n;
      const std::uint32_t K = ea.num_blocks;
      Eigen::MatrixXd out(ea.cols, eb.cols);
      parallel_for(0, ea.cols, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const SideInfo& sa = ea.side_info[i];
          const std::uint32_t* ca = ea.codes.data() + i * K;
          for (std::uint32_t j = 0; j < eb.cols; ++j) {
            const SideInfo& sb = eb.side_info[j];
            double mean_term = n * sa.mean_hat * sb.mean_hat;
            if (sa.norm_hat == 0.0 || sb.norm_hat == 0.0) {
              out(static_cast<Eigen::Index>(i), j) = mean_term;
              continue;
            }
            const std::uint32_t* cb = eb.codes.data() + static_cast<std::size_t>(j) * K;
            std::int32_t acc = 0;
            for (std::uint32_t k = 0; k < K; ++k) acc += ilut[ca[k] * per_side + cb[k]];
            out(static_cast<Eigen::Index>(i), j) =
                alpha * sa.norm_hat * sb.norm_hat / ea.n_pad * beta1 * beta1 * acc +
                mean_term;
          }
        }
      });
      return out;
    }
    InnerProductLUT lut = build_lut(lat, q, z1, z2, LutMode::Real);
    return decode_kernel(ea, eb, cfg,
                         [&](std::uint32_t a, std::uint32_t b, std::uint32_t) {
                           return lut.fetch(a, b);
                         });
  }

  // Per-block dithers: decode both blocks on the fly.
  return decode_kernel(ea, eb, cfg,
                       [&, d, q](std::uint32_t a, std::uint32_t b, std::uint32_t k) {
                         Eigen::VectorXd z1 = cfg.dither(Side::A, k);
                         Eigen::VectorXd z2 = cfg.dither(Side::B, k);
                         double u[8], v[8];
                         decode_block(block_from_index(a, d, q), lat, q, 1.0, z1.data(), u);
                         decode_block(block_from_index(b, d, q), lat, q, 1.0, z2.data(), v);
                         return dot_d(u, v, d);
                       });
}

Eigen::MatrixXd decode_matmul_lut(const EncodedMatrix& ea, const EncodedMatrix& eb,
                                  const InnerProductLUT& lut, const PipelineConfig& cfg) {
  check_pair(ea, eb, cfg);
  if (!cfg.shared_dithers)
    throw std::invalid_argument("decode_matmul_lut: requires shared dithers");
  Eigen::VectorXd z1 = cfg.dither(Side::A, 0);
  Eigen::VectorXd z2 = cfg.dither(Side::B, 0);
  if (lut.q != cfg.code.q || lut.dim != cfg.code.lattice.dim() ||
      lut.dither_fingerprint != dither_fp(z1, z2, cfg.code.q, cfg.code.lattice.dim()))
    throw std::invalid_argument("decode_matmul_lut: LUT/dither mismatch");
  return decode_kernel(ea, eb, cfg,
                       [&](std::uint32_t a, std::uint32_t b, std::uint32_t) {
                         return lut.fetch(a, b);
                       });
}

Eigen::MatrixXd one_sided_matmul(const EncodedMatrix& ea, const Eigen::MatrixXd& b,
                                 const PipelineConfig& cfg) {
  if (ea.config_hash != cfg.hash())
    throw std::invalid_argument("one_sided_matmul: config hash mismatch");
  if (static_cast<std::uint32_t>(b.rows()) != ea.n)
    throw std::invalid_argument("one_sided_matmul: row mismatch");

  const Lattice& lat = cfg.code.lattice;
  const int d = lat.dim();
  const std::uint32_t K = ea.num_blocks;
  const double alpha = cfg.alpha();
  const RotationSpec spec{ea.n_pad, cfg.rotation_seed};

  Eigen::VectorXd z1 = cfg.dither(Side::A, 0);
  CodewordTable tu = build_codeword_table(lat, cfg.code.q, z1);

  std::vector<double> betas(cfg.code.gamma_bank.size());
  for (std::size_t i = 0; i < betas.size(); ++i)
    betas[i] = beta_from_gamma(cfg.code.gamma_bank[i], cfg.code.rate_bits(), lat.sigma2());

  // Exact front end for the uncompressed side.
  const auto bcols = static_cast<std::uint32_t>(b.cols());
  Eigen::MatrixXd v_exact(ea.kept, bcols);
  std::vector<double> means_b(bcols), norms_b(bcols);
  parallel_for(0, bcols, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      Eigen::VectorXd x = b.col(static_cast<Eigen::Index>(j));
      means_b[j] = cfg.center ? center_column(x) : 0.0;
      norms_b[j] = x.norm();
      if (norms_b[j] == 0.0) {
        v_exact.col(static_cast<Eigen::Index>(j)).setZero();
        continue;
      }
      Eigen::VectorXd u = cfg.rotate ? apply_rht(x, norms_b[j], spec)
                                     : normalize_column(x, norms_b[j]);
      v_exact.col(static_cast<Eigen::Index>(j)) = u.head(ea.kept);
    }
  });

  Eigen::MatrixXd out(ea.cols, bcols);
  parallel_for(0, ea.cols, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const SideInfo& sa = ea.side_info[i];
      const std::uint32_t* ca = ea.codes.data() + i * K;
      const std::uint8_t* ga = ea.gamma_idx.data() + i * K;
      for (std::uint32_t j = 0; j < bcols; ++j) {
        double mean_term = ea.n * sa.mean_hat * means_b[j];
        if (sa.norm_hat == 0.0 || norms_b[j] == 0.0) {
          out(static_cast<Eigen::Index>(i), j) = mean_term;
          continue;
        }
        const double* vj = v_exact.col(j).data();
        Kahan acc;
        for (std::uint32_t k = 0; k < K; ++k)
          acc.add(betas[ga[k]] * dot_d(tu.at(ca[k]), vj + static_cast<std::size_t>(k) * d, d));
        out(static_cast<Eigen::Index>(i), j) =
            alpha * sa.norm_hat * norms_b[j] / ea.n_pad * acc.sum + mean_term;
      }
    }
  });
  return out;
}

double effective_rate_bits(const EncodedMatrix& enc, const PipelineConfig& cfg) {
  double coset = enc.kept * cfg.code.rate_bits();
  double gamma = enc.num_blocks * enc.gamma_entropy_bits();
  double side = cfg.side_info_bits_per_column(enc.n);
  return (coset + gamma + side) / enc.n;
}

}  // namespace latmul
