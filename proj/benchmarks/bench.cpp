#include <benchmark/benchmark.h>

#include "latmul/experiment.hpp"
#include "latmul/rng.hpp"
#include "latmul/rotation.hpp"

using namespace latmul;

namespace {

PipelineConfig d3_config() {
  PipelineConfig cfg;
  cfg.code.lattice = Lattice::dn(3);
  cfg.code.q = 6;
  cfg.code.gamma_bank = NestedCodeConfig::default_gamma_bank(cfg.code.lattice);
  cfg.rotate = false;
  return cfg;
}

void bm_fwht(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n);
  CounterRng rng(1, 0);
  for (auto& v : x) v = rng.next_gaussian();
  for (auto _ : state) {
    fwht_inplace(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_fwht)->RangeMultiplier(4)->Range(1 << 8, 1 << 16);

void bm_nearest_point(benchmark::State& state) {
  Lattice lat = state.range(0) == 0   ? Lattice::dn(3)
                : state.range(0) == 1 ? Lattice::dn(4)
                                      : Lattice::e8();
  CounterRng rng(2, 0);
  std::vector<double> pts(1024 * lat.dim());
  for (auto& v : pts) v = 4.0 * (rng.next_double() - 0.5);
  double out[8];
  std::size_t i = 0;
  for (auto _ : state) {
    lat.nearest_point(pts.data() + (i & 1023) * lat.dim(), out);
    benchmark::DoNotOptimize(out);
    ++i;
  }
}
BENCHMARK(bm_nearest_point)->Arg(0)->Arg(1)->Arg(2);

void bm_encode(benchmark::State& state) {
  PipelineConfig cfg = d3_config();
  const auto n = static_cast<std::uint32_t>(state.range(0));
  Eigen::MatrixXd a = gaussian_matrix(n, 64, 3, streams::kMatrixA);
  for (auto _ : state) {
    EncodedMatrix enc = encode_matrix(a, cfg, Side::A);
    benchmark::DoNotOptimize(enc.codes.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 64);
}
BENCHMARK(bm_encode)->Arg(768)->Arg(1536)->Arg(3072);

void bm_decode_direct(benchmark::State& state) {
  PipelineConfig cfg = d3_config();
  const auto n = static_cast<std::uint32_t>(state.range(0));
  Eigen::MatrixXd a = gaussian_matrix(n, 64, 4, streams::kMatrixA);
  Eigen::MatrixXd b = gaussian_matrix(n, 64, 4, streams::kMatrixB);
  EncodedMatrix ea = encode_matrix(a, cfg, Side::A);
  EncodedMatrix eb = encode_matrix(b, cfg, Side::B);
  for (auto _ : state) {
    Eigen::MatrixXd c = decode_matmul(ea, eb, cfg);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 64 * 64);
}
BENCHMARK(bm_decode_direct)->Arg(768)->Arg(1536);

void bm_decode_lut(benchmark::State& state) {
  PipelineConfig cfg = d3_config();
  const auto n = static_cast<std::uint32_t>(state.range(0));
  Eigen::MatrixXd a = gaussian_matrix(n, 64, 4, streams::kMatrixA);
  Eigen::MatrixXd b = gaussian_matrix(n, 64, 4, streams::kMatrixB);
  EncodedMatrix ea = encode_matrix(a, cfg, Side::A);
  EncodedMatrix eb = encode_matrix(b, cfg, Side::B);
  InnerProductLUT lut = build_lut(cfg.code.lattice, cfg.code.q, cfg.dither(Side::A, 0),
                                  cfg.dither(Side::B, 0), LutMode::Real);
  for (auto _ : state) {
    Eigen::MatrixXd c = decode_matmul_lut(ea, eb, lut, cfg);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 64 * 64);
}
BENCHMARK(bm_decode_lut)->Arg(768)->Arg(1536);

void bm_lut_build(benchmark::State& state) {
  PipelineConfig cfg = d3_config();
  for (auto _ : state) {
    InnerProductLUT lut = build_lut(cfg.code.lattice, cfg.code.q, cfg.dither(Side::A, 0),
                                    cfg.dither(Side::B, 0), LutMode::Real);
    benchmark::DoNotOptimize(lut.real.data());
  }
}
BENCHMARK(bm_lut_build);

}  // namespace

BENCHMARK_MAIN();
