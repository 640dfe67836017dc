#pragma once

#include <string>

#include "latmul/pipeline.hpp"

namespace latmul::io {

/// Binary matrix container: 8-byte magic "LMATF64\0", uint32 rows, uint32
/// cols, then rows*cols little-endian float64 values in column-major order.
void save_matrix(const std::string& path, const Eigen::MatrixXd& mat);
Eigen::MatrixXd load_matrix(const std::string& path);

/// Text matrix: whitespace-separated, first two numbers are rows and cols,
/// followed by rows*cols values in row-major order.
Eigen::MatrixXd load_matrix_text(const std::string& path);

/// Dispatches on the magic bytes: binary container if present, text otherwise.
Eigen::MatrixXd load_matrix_any(const std::string& path);

/// Encoded-matrix container: magic "LMENC1\0\0", uint32 version, the config
/// hash, dimensions, then per column the side info (two float64), a varint
/// block count, byte-aligned 4-bit gamma indices, and byte-aligned
/// ceil(d*log2 q)-bit block codes, all LSB-first.
void save_encoded(const std::string& path, const EncodedMatrix& enc,
                  const PipelineConfig& cfg);
/// Fails with a descriptive error on magic/version/truncation/config-hash
/// mismatch.
EncodedMatrix load_encoded(const std::string& path, const PipelineConfig& cfg);

/// LUT container: magic "LMLUT1\0\0", uint32 version, q, dim, mode, clamp
/// count, dither fingerprint, then the table (float64 or int8 entries).
void save_lut(const std::string& path, const InnerProductLUT& lut);
InnerProductLUT load_lut(const std::string& path);

}  // namespace latmul::io
