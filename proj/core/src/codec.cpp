#include "latmul/codec.hpp"

#include <cmath>
#include <stdexcept>

#include "latmul/rng.hpp"

namespace latmul {

double NestedCodeConfig::rate_bits() const { return std::log2(static_cast<double>(q)); }

std::vector<double> NestedCodeConfig::default_gamma_bank(const Lattice& lat, int bank_size) {
  // gamma1 = rule of thumb rounded up to one decimal (0.7 for D3), bank {i*gamma1}
  double g1 = std::ceil(lat.gamma1_rule_of_thumb() * 10.0) / 10.0;
  std::vector<double> bank(bank_size);
  for (int i = 0; i < bank_size; ++i) bank[i] = (i + 1) * g1;
  return bank;
}

void NestedCodeConfig::validate() const {
  if (q < 2) throw std::invalid_argument("nesting ratio q must be an integer >= 2");
  if (gamma_bank.empty()) throw std::invalid_argument("gamma bank must be nonempty");
  if (gamma_bank.size() > 16) throw std::invalid_argument("gamma bank limited to 16 entries (4-bit index)");
  for (std::size_t i = 0; i < gamma_bank.size(); ++i) {
    if (gamma_bank[i] <= 0.0) throw std::invalid_argument("gamma values must be positive");
    if (i > 0 && gamma_bank[i] <= gamma_bank[i - 1])
      throw std::invalid_argument("gamma bank must be strictly increasing");
  }
  if (block_bits(lattice.dim(), q) > 63)
    throw std::invalid_argument("block exceeds 63 bits; reduce q or lattice dimension");
}

double beta_from_gamma(double gamma, double rate_bits, double sigma2) {
  if (gamma <= 0.0 || rate_bits <= 0.0 || sigma2 <= 0.0)
    throw std::invalid_argument("beta_from_gamma: inputs must be positive");
  return std::sqrt(gamma / (std::exp2(2.0 * rate_bits) - 1.0) / sigma2);
}

BlockCode encode_block(const double* x, const Lattice& lat, int q, double beta,
                       const double* z) {
  const int d = lat.dim();
  double scaled[8], t[8], xt[8], l[8];
  for (int i = 0; i < d; ++i) scaled[i] = x[i] / beta + z[i];
  lat.nearest_point(scaled, t);

  BlockCode code;
  long y[8];
  lat.coset_coords(t, y);
  for (int i = 0; i < d; ++i) {
    long m = y[i] % q;
    if (m < 0) m += q;
    code.digits[i] = static_cast<std::uint16_t>(m);
  }

  for (int i = 0; i < d; ++i) xt[i] = (t[i] - z[i]) / q;
  lat.nearest_point(xt, l);
  for (int i = 0; i < d; ++i) {
    if (l[i] != 0.0) {
      code.overload = true;
      break;
    }
  }
  return code;
}

void decode_block(const BlockCode& code, const Lattice& lat, int q, double beta,
                  const double* z, double* out) {
  const int d = lat.dim();
  const Eigen::MatrixXd& g = lat.generator();
  double gd[8], ys[8], l[8];
  for (int i = 0; i < d; ++i) {
    double v = 0.0;
    for (int j = 0; j < d; ++j) v += g(i, j) * code.digits[j];
    gd[i] = v;
  }
  for (int i = 0; i < d; ++i) ys[i] = (gd[i] - z[i]) / q;
  lat.nearest_point(ys, l);
  // gd - q*l is exact (small dyadic rationals), so the no-overload round trip
  // reproduces beta * (Q(x/beta + z) - z) bit for bit
  for (int i = 0; i < d; ++i) out[i] = beta * ((gd[i] - q * l[i]) - z[i]);
}

Eigen::VectorXd draw_dither(const Lattice& lat, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  const int d = lat.dim();
  Eigen::VectorXd u(d);
  for (int i = 0; i < d; ++i) u(i) = lat.tau() * rng.next_double();
  return u - lat.nearest_point(u);
}

EscalationResult encode_block_escalating(const double* x, const NestedCodeConfig& cfg,
                                         const double* z) {
  const double rate = cfg.rate_bits();
  const double s2 = cfg.lattice.sigma2();
  EscalationResult res;
  for (std::size_t i = 0; i < cfg.gamma_bank.size(); ++i) {
    double beta = beta_from_gamma(cfg.gamma_bank[i], rate, s2);
    res.code = encode_block(x, cfg.lattice, cfg.q, beta, z);
    res.gamma_index = static_cast<int>(i);
    if (!res.code.overload) return res;
  }
  res.saturated = true;
  return res;
}

int block_bits(int dim, int q) {
  return static_cast<int>(std::ceil(dim * std::log2(static_cast<double>(q))));
}

std::uint64_t block_to_index(const BlockCode& code, int dim, int q) {
  std::uint64_t idx = 0;
  for (int i = dim - 1; i >= 0; --i) idx = idx * q + code.digits[i];
  return idx;
}

BlockCode block_from_index(std::uint64_t idx, int dim, int q) {
  BlockCode code;
  for (int i = 0; i < dim; ++i) {
    code.digits[i] = static_cast<std::uint16_t>(idx % q);
    idx /= q;
  }
  return code;
}

void BitWriter::write(std::uint64_t value, int bits) {
  for (int b = 0; b < bits; ++b) {
    std::size_t byte = bit_pos_ >> 3;
    if (byte >= bytes_.size()) bytes_.push_back(0);
    if ((value >> b) & 1ull) bytes_[byte] |= static_cast<std::uint8_t>(1u << (bit_pos_ & 7));
    ++bit_pos_;
  }
}

std::uint64_t BitReader::read(int bits) {
  std::uint64_t v = 0;
  for (int b = 0; b < bits; ++b) {
    std::size_t byte = bit_pos_ >> 3;
    if (byte >= size_) throw std::runtime_error("bitstream truncated");
    if ((data_[byte] >> (bit_pos_ & 7)) & 1u) v |= (1ull << b);
    ++bit_pos_;
  }
  return v;
}

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint64_t read_varint(const std::uint8_t* data, std::size_t size, std::size_t& pos) {
  std::uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (pos >= size) throw std::runtime_error("varint truncated");
    std::uint8_t b = data[pos++];
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
    if (shift > 63) throw std::runtime_error("varint overflow");
  }
}

}  // namespace latmul
