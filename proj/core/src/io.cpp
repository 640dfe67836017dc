#include "latmul/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace latmul::io {

namespace {

constexpr char kMatrixMagic[8] = {'L', 'M', 'A', 'T', 'F', '6', '4', '\0'};
constexpr char kEncodedMagic[8] = {'L', 'M', 'E', 'N', 'C', '1', '\0', '\0'};
constexpr char kLutMagic[8] = {'L', 'M', 'L', 'U', 'T', '1', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

// Fixed little-endian layout; this code targets little-endian hosts only.
static_assert(std::endian::native == std::endian::little);

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw std::runtime_error("cannot open: " + path);
  auto size = static_cast<std::size_t>(f.tellg());
  f.seekg(0);
  std::vector<std::uint8_t> buf(size);
  if (size) f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!f) throw std::runtime_error("read failed: " + path);
  return buf;
}

class Cursor {
 public:
  Cursor(const std::vector<std::uint8_t>& buf, std::string path)
      : buf_(buf), path_(std::move(path)) {}

  template <typename T>
  T get() {
    T v;
    raw(&v, sizeof(T));
    return v;
  }
  void raw(void* out, std::size_t size) {
    if (pos_ + size > buf_.size()) throw std::runtime_error("truncated file: " + path_);
    std::memcpy(out, buf_.data() + pos_, size);
    pos_ += size;
  }
  void expect_magic(const char (&magic)[8], const char* what) {
    char got[8];
    raw(got, 8);
    if (std::memcmp(got, magic, 8) != 0)
      throw std::runtime_error(std::string("bad magic (not a ") + what + " file): " + path_);
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  const std::uint8_t* ptr() const { return buf_.data() + pos_; }
  void skip(std::size_t n) {
    if (pos_ + n > buf_.size()) throw std::runtime_error("truncated file: " + path_);
    pos_ += n;
  }

 private:
  const std::vector<std::uint8_t>& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

void save_matrix(const std::string& path, const Eigen::MatrixXd& mat) {
  auto f = open_out(path);
  f.write(kMatrixMagic, 8);
  put(f, static_cast<std::uint32_t>(mat.rows()));
  put(f, static_cast<std::uint32_t>(mat.cols()));
  f.write(reinterpret_cast<const char*>(mat.data()),
          static_cast<std::streamsize>(sizeof(double) * mat.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  auto buf = read_all(path);
  Cursor c(buf, path);
  c.expect_magic(kMatrixMagic, "matrix");
  auto rows = c.get<std::uint32_t>();
  auto cols = c.get<std::uint32_t>();
  Eigen::MatrixXd mat(rows, cols);
  c.raw(mat.data(), sizeof(double) * mat.size());
  return mat;
}

Eigen::MatrixXd load_matrix_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::uint64_t rows, cols;
  if (!(f >> rows >> cols)) throw std::runtime_error("bad text matrix header: " + path);
  Eigen::MatrixXd mat(rows, cols);
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t col = 0; col < cols; ++col)
      if (!(f >> mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))))
        throw std::runtime_error("truncated text matrix: " + path);
  return mat;
}

Eigen::MatrixXd load_matrix_any(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char head[8] = {};
  f.read(head, 8);
  if (f.gcount() == 8 && std::memcmp(head, kMatrixMagic, 8) == 0) return load_matrix(path);
  return load_matrix_text(path);
}

void save_encoded(const std::string& path, const EncodedMatrix& enc,
                  const PipelineConfig& cfg) {
  if (enc.config_hash != cfg.hash())
    throw std::invalid_argument("save_encoded: config hash mismatch");
  const int bb = block_bits(cfg.code.lattice.dim(), cfg.code.q);
  auto f = open_out(path);
  f.write(kEncodedMagic, 8);
  put(f, kVersion);
  put(f, enc.config_hash);
  put(f, enc.n);
  put(f, enc.cols);
  put(f, enc.n_pad);
  put(f, enc.kept);
  put(f, enc.num_blocks);
  put(f, static_cast<std::uint8_t>(enc.side));
  put(f, enc.saturation_count);
  for (std::uint32_t c = 0; c < enc.cols; ++c) {
    put(f, enc.side_info[c].mean_hat);
    put(f, enc.side_info[c].norm_hat);
    std::vector<std::uint8_t> vi;
    write_varint(vi, enc.num_blocks);
    f.write(reinterpret_cast<const char*>(vi.data()), static_cast<std::streamsize>(vi.size()));
    const std::size_t base = static_cast<std::size_t>(c) * enc.num_blocks;
    BitWriter gw;
    for (std::uint32_t k = 0; k < enc.num_blocks; ++k) gw.write(enc.gamma_idx[base + k], 4);
    f.write(reinterpret_cast<const char*>(gw.bytes().data()),
            static_cast<std::streamsize>(gw.bytes().size()));
    BitWriter cw;
    for (std::uint32_t k = 0; k < enc.num_blocks; ++k) cw.write(enc.codes[base + k], bb);
    f.write(reinterpret_cast<const char*>(cw.bytes().data()),
            static_cast<std::streamsize>(cw.bytes().size()));
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

EncodedMatrix load_encoded(const std::string& path, const PipelineConfig& cfg) {
  const int bb = block_bits(cfg.code.lattice.dim(), cfg.code.q);
  auto buf = read_all(path);
  Cursor c(buf, path);
  c.expect_magic(kEncodedMagic, "encoded-matrix");
  auto version = c.get<std::uint32_t>();
  if (version != kVersion)
    throw std::runtime_error("unsupported encoded-matrix version: " + path);
  EncodedMatrix enc;
  enc.config_hash = c.get<std::uint64_t>();
  if (enc.config_hash != cfg.hash())
    throw std::runtime_error("encoded matrix was produced with a different config: " + path);
  enc.n = c.get<std::uint32_t>();
  enc.cols = c.get<std::uint32_t>();
  enc.n_pad = c.get<std::uint32_t>();
  enc.kept = c.get<std::uint32_t>();
  enc.num_blocks = c.get<std::uint32_t>();
  enc.side = static_cast<Side>(c.get<std::uint8_t>());
  enc.saturation_count = c.get<std::uint64_t>();
  if (enc.num_blocks == 0 ||
      enc.kept != enc.num_blocks * static_cast<std::uint32_t>(cfg.code.lattice.dim()))
    throw std::runtime_error("inconsistent encoded-matrix header: " + path);
  enc.side_info.resize(enc.cols);
  enc.gamma_idx.resize(static_cast<std::size_t>(enc.cols) * enc.num_blocks);
  enc.codes.resize(static_cast<std::size_t>(enc.cols) * enc.num_blocks);
  for (std::uint32_t col = 0; col < enc.cols; ++col) {
    enc.side_info[col].mean_hat = c.get<double>();
    enc.side_info[col].norm_hat = c.get<double>();
    std::size_t vpos = 0;
    std::uint64_t nb = read_varint(c.ptr(), c.remaining(), vpos);
    c.skip(vpos);
    if (nb != enc.num_blocks)
      throw std::runtime_error("per-column block count mismatch: " + path);
    const std::size_t base = static_cast<std::size_t>(col) * enc.num_blocks;
    std::size_t gbytes = (4ull * enc.num_blocks + 7) / 8;
    BitReader gr(c.ptr(), gbytes);
    for (std::uint32_t k = 0; k < enc.num_blocks; ++k)
      enc.gamma_idx[base + k] = static_cast<std::uint8_t>(gr.read(4));
    c.skip(gbytes);
    std::size_t cbytes = (static_cast<std::size_t>(bb) * enc.num_blocks + 7) / 8;
    BitReader cr(c.ptr(), cbytes);
    for (std::uint32_t k = 0; k < enc.num_blocks; ++k)
      enc.codes[base + k] = static_cast<std::uint32_t>(cr.read(bb));
    c.skip(cbytes);
  }
  return enc;
}

void save_lut(const std::string& path, const InnerProductLUT& lut) {
  auto f = open_out(path);
  f.write(kLutMagic, 8);
  put(f, kVersion);
  put(f, static_cast<std::uint32_t>(lut.q));
  put(f, static_cast<std::uint32_t>(lut.dim));
  put(f, static_cast<std::uint8_t>(lut.mode));
  put(f, lut.entries);
  put(f, lut.entries_per_side);
  put(f, lut.clamp_count);
  put(f, lut.dither_fingerprint);
  put(f, lut.i8_scale);
  if (lut.mode == LutMode::Real)
    f.write(reinterpret_cast<const char*>(lut.real.data()),
            static_cast<std::streamsize>(sizeof(double) * lut.real.size()));
  else
    f.write(reinterpret_cast<const char*>(lut.i8.data()),
            static_cast<std::streamsize>(lut.i8.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

InnerProductLUT load_lut(const std::string& path) {
  auto buf = read_all(path);
  Cursor c(buf, path);
  c.expect_magic(kLutMagic, "LUT");
  auto version = c.get<std::uint32_t>();
  if (version != kVersion) throw std::runtime_error("unsupported LUT version: " + path);
  InnerProductLUT lut;
  lut.q = static_cast<int>(c.get<std::uint32_t>());
  lut.dim = static_cast<int>(c.get<std::uint32_t>());
  lut.mode = static_cast<LutMode>(c.get<std::uint8_t>());
  lut.entries = c.get<std::uint64_t>();
  lut.entries_per_side = c.get<std::uint64_t>();
  lut.clamp_count = c.get<std::uint64_t>();
  lut.dither_fingerprint = c.get<std::uint64_t>();
  lut.i8_scale = c.get<double>();
  if (lut.mode == LutMode::Real) {
    lut.real.resize(lut.entries);
    c.raw(lut.real.data(), sizeof(double) * lut.entries);
  } else if (lut.mode == LutMode::Int8) {
    lut.i8.resize(lut.entries);
    c.raw(lut.i8.data(), lut.entries);
  } else {
    throw std::runtime_error("bad LUT mode byte: " + path);
  }
  return lut;
}

}  // namespace latmul::io
