#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "latmul/lattice.hpp"

namespace latmul {

/// Self-similar nested pair beta*q*L' inside beta*L' for one block.
/// gamma_bank must be strictly increasing; default bank is {i*gamma1}.
struct NestedCodeConfig {
  Lattice lattice = Lattice::zn(1);
  int q = 2;                       // nesting ratio, rate = log2(q) bits/dim
  std::vector<double> gamma_bank;  // overload-avoidance scale bank

  double rate_bits() const;  // log2(q)

  static std::vector<double> default_gamma_bank(const Lattice& lat, int bank_size = 9);
  void validate() const;
};

struct BlockCode {
  std::array<std::uint16_t, 8> digits{};  // coset index in [q]^d
  bool overload = false;
};

/// beta = sqrt(gamma / (2^{2R} - 1) / sigma2); beta^2 * sigma2 * (2^{2R}-1) = gamma.
double beta_from_gamma(double gamma, double rate_bits, double sigma2);

/// Voronoi-code encoder: t = Q(x/beta + z), coset index = G^{-1} t mod q,
/// overload iff q * Q((t - z)/q) != 0.
BlockCode encode_block(const double* x, const Lattice& lat, int q, double beta,
                       const double* z);

/// Inverse map: x_hat = beta * ([G*digits - z] mod q*L'); lies in beta*V_{qL'}.
void decode_block(const BlockCode& code, const Lattice& lat, int q, double beta,
                  const double* z, double* out);

/// Uniform dither over the Voronoi cell: Z = U - Q(U), U ~ Uniform([0,tau)^d).
Eigen::VectorXd draw_dither(const Lattice& lat, std::uint64_t seed, std::uint64_t stream);

struct EscalationResult {
  BlockCode code;
  int gamma_index = 0;  // 0-based index into the bank
  bool saturated = false;
};

/// Try the bank in increasing order until no overload; if every gamma
/// overloads, keep the largest-gamma code and flag saturation.
EscalationResult encode_block_escalating(const double* x, const NestedCodeConfig& cfg,
                                         const double* z);

/// Bits per block in the packed stream: ceil(d * log2 q).
int block_bits(int dim, int q);

/// Little-endian base-q digit packing of a block into a single integer.
std::uint64_t block_to_index(const BlockCode& code, int dim, int q);
BlockCode block_from_index(std::uint64_t idx, int dim, int q);

/// LSB-first bit packer for the column payload format.
class BitWriter {
 public:
  void write(std::uint64_t value, int bits);
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::size_t bit_count() const { return bit_pos_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_pos_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  std::uint64_t read(int bits);
  std::size_t bit_pos() const { return bit_pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t bit_pos_ = 0;
};

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint64_t read_varint(const std::uint8_t* data, std::size_t size, std::size_t& pos);

}  // namespace latmul
