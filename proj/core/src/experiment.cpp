#include "latmul/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "latmul/io.hpp"
#include "latmul/parallel.hpp"
#include "latmul/rng.hpp"
#include "latmul/theory.hpp"

namespace latmul {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

LutMode lut_mode_from_string(const std::string& v) {
  if (v == "off") return LutMode::Off;
  if (v == "real") return LutMode::Real;
  if (v == "int8") return LutMode::Int8;
  throw std::invalid_argument("unknown lut mode: " + v);
}

void write_histogram(const std::string& path, const Eigen::MatrixXd& diff, double n) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "err\n";
  f.precision(17);
  double scale = 1.0 / std::sqrt(n);
  for (Eigen::Index j = 0; j < diff.cols(); ++j)
    for (Eigen::Index i = 0; i < diff.rows(); ++i) f << diff(i, j) * scale << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

struct Inputs {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

Inputs load_inputs(const ExperimentConfig& cfg) {
  Inputs in;
  if (cfg.distribution == "gaussian") {
    in.a = gaussian_matrix(cfg.n, cfg.cols_a(), cfg.seed, streams::kMatrixA);
    in.b = gaussian_matrix(cfg.n, cfg.cols_b(), cfg.seed, streams::kMatrixB);
  } else {
    in.a = io::load_matrix_any(cfg.file_a);
    in.b = io::load_matrix_any(cfg.file_b);
    if (in.a.rows() != in.b.rows())
      throw std::invalid_argument("input matrices disagree on inner dimension");
    if (static_cast<std::uint32_t>(in.a.rows()) != cfg.n)
      throw std::invalid_argument("config n does not match matrix rows");
  }
  return in;
}

void fill_distortion(ExperimentReport& rep, const Eigen::MatrixXd& c_hat,
                     const Eigen::MatrixXd& c_ref) {
  double fro2 = (c_hat - c_ref).squaredNorm();
  double n = rep.n;
  rep.distortion_per_entry = fro2 / (n * static_cast<double>(rep.a) * rep.b);
  rep.distortion_cubed = fro2 / (n * n * n);
}

void fill_theory(ExperimentReport& rep, double rate) {
  rep.gamma_at_rate = theory::gamma_curve(rate);
  theory::BoundInputs bi;
  bi.rate = rate;
  // unit norms and n=1 give the bare rate factor, the same normalized units
  // as distortion_per_entry for Gaussian inputs (||a||^2 = ||b||^2 = n)
  bi.norm_a = bi.norm_b = 1.0;
  bi.n = 1.0;
  rep.theorem3_prediction = theory::theorem3_bound(bi);
  rep.scalar_prediction = theory::scalar_quant_prediction(rep.n, rate);
}

}  // namespace

PipelineConfig ExperimentConfig::pipeline() const {
  PipelineConfig p;
  p.code.lattice = Lattice::make(lattice, dim);
  p.code.q = q;
  if (gamma1 > 0.0) {
    p.code.gamma_bank.resize(bank_size);
    for (int i = 0; i < bank_size; ++i) p.code.gamma_bank[i] = gamma1 * (i + 1);
  } else {
    p.code.gamma_bank = NestedCodeConfig::default_gamma_bank(p.code.lattice, bank_size);
  }
  p.kappa = kappa;
  p.alpha_mode = alpha_mode;
  p.alpha_explicit = alpha_explicit;
  p.rotate = rotate;
  p.center = center;
  p.dither_enabled = dither_enabled;
  p.rotation_seed = seed * 2 + 1;
  p.dither_seed = seed * 2 + 2;
  return p;
}

void ExperimentConfig::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (distribution != "gaussian" && distribution != "file")
    throw std::invalid_argument("distribution must be gaussian or file");
  if (distribution == "file" && (file_a.empty() || file_b.empty()))
    throw std::invalid_argument("file distribution requires file_a and file_b");
  if (scalar_rate < 1 || scalar_rate > 16)
    throw std::invalid_argument("scalar_rate must be in [1, 16]");
  pipeline().validate();
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "n") n = static_cast<std::uint32_t>(std::stoul(value));
  else if (key == "a") a = static_cast<std::uint32_t>(std::stoul(value));
  else if (key == "b") b = static_cast<std::uint32_t>(std::stoul(value));
  else if (key == "distribution") distribution = value;
  else if (key == "file_a") file_a = value;
  else if (key == "file_b") file_b = value;
  else if (key == "lattice") lattice = lattice_kind_from_string(value);
  else if (key == "dim") dim = std::stoi(value);
  else if (key == "q") q = std::stoi(value);
  else if (key == "gamma1") gamma1 = std::stod(value);
  else if (key == "bank_size") bank_size = std::stoi(value);
  else if (key == "kappa") kappa = std::stod(value);
  else if (key == "alpha_mode") alpha_mode = alpha_mode_from_string(value);
  else if (key == "alpha") alpha_explicit = std::stod(value);
  else if (key == "rotate") rotate = parse_bool(value);
  else if (key == "center") center = parse_bool(value);
  else if (key == "dither") dither_enabled = parse_bool(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "lut") lut = lut_mode_from_string(value);
  else if (key == "scalar_rate") scalar_rate = std::stoi(value);
  else if (key == "histogram_csv") histogram_csv = value;
  else throw std::invalid_argument("unknown config key: " + key);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string ExperimentReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  os << "n=" << n << " a=" << a << " b=" << b << "\n"
     << "distortion_per_entry = " << distortion_per_entry << "\n"
     << "distortion_over_n3   = " << distortion_cubed << "\n"
     << "effective_rate       = " << effective_rate << " bits/entry\n"
     << "payload_rate         = " << payload_rate << " bits/entry\n"
     << "gamma_entropy        = " << gamma_entropy << " bits/block\n"
     << "saturations          = " << saturation_count << "\n"
     << "lut_clamps           = " << lut_clamp_count << "\n"
     << "curve_at_rate        = " << gamma_at_rate << "\n"
     << "bound_prediction     = " << theorem3_prediction << "\n"
     << "scalar_prediction    = " << scalar_prediction << "\n"
     << "encode_s=" << seconds_encode << " decode_s=" << seconds_decode
     << " reference_s=" << seconds_reference << "\n";
  return os.str();
}

Eigen::MatrixXd gaussian_matrix(std::uint32_t rows, std::uint32_t cols,
                                std::uint64_t seed, std::uint64_t base_stream) {
  Eigen::MatrixXd m(rows, cols);
  parallel_for(0, cols, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      CounterRng rng(seed, streams::column(base_stream, static_cast<std::uint32_t>(c)));
      for (std::uint32_t r = 0; r < rows; ++r)
        m(r, static_cast<Eigen::Index>(c)) = rng.next_gaussian();
    }
  });
  return m;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PipelineConfig pipe = cfg.pipeline();
  Inputs in = load_inputs(cfg);

  ExperimentReport rep;
  rep.n = cfg.n;
  rep.a = static_cast<std::uint32_t>(in.a.cols());
  rep.b = static_cast<std::uint32_t>(in.b.cols());

  auto t0 = std::chrono::steady_clock::now();
  EncodedMatrix ea = encode_matrix(in.a, pipe, Side::A);
  EncodedMatrix eb = encode_matrix(in.b, pipe, Side::B);
  rep.seconds_encode = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd c_hat;
  if (cfg.lut == LutMode::Off) {
    c_hat = decode_matmul(ea, eb, pipe);
  } else {
    InnerProductLUT lut = build_lut(pipe.code.lattice, pipe.code.q,
                                    pipe.dither(Side::A, 0), pipe.dither(Side::B, 0),
                                    cfg.lut);
    rep.lut_clamp_count = lut.clamp_count;
    c_hat = decode_matmul_lut(ea, eb, lut, pipe);
  }
  rep.seconds_decode = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd c_ref = in.a.transpose() * in.b;
  rep.seconds_reference = seconds_since(t0);

  fill_distortion(rep, c_hat, c_ref);
  rep.effective_rate = effective_rate_bits(ea, pipe);
  rep.payload_rate = static_cast<double>(ea.payload_bits(pipe)) / ea.cols / ea.n;
  rep.gamma_entropy = ea.gamma_entropy_bits();
  rep.saturation_count = ea.saturation_count + eb.saturation_count;
  fill_theory(rep, rep.effective_rate);

  if (!cfg.histogram_csv.empty()) write_histogram(cfg.histogram_csv, c_hat - c_ref, cfg.n);
  return rep;
}

ExperimentReport run_scalar_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  Inputs in = load_inputs(cfg);

  ExperimentReport rep;
  rep.n = cfg.n;
  rep.a = static_cast<std::uint32_t>(in.a.cols());
  rep.b = static_cast<std::uint32_t>(in.b.cols());

  const double levels = std::exp2(cfg.scalar_rate - 1);
  auto quantize = [&](Eigen::MatrixXd& m) {
    parallel_for(0, static_cast<std::size_t>(m.cols()), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t c = lo; c < hi; ++c) {
        auto col = m.col(static_cast<Eigen::Index>(c));
        double s = col.cwiseAbs().maxCoeff();
        if (s == 0.0) continue;
        for (Eigen::Index r = 0; r < col.size(); ++r)
          col(r) = s * std::round(levels * (col(r) / s)) / levels;
      }
    });
  };

  auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd qa = in.a;
  Eigen::MatrixXd qb = in.b;
  quantize(qa);
  quantize(qb);
  rep.seconds_encode = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd c_hat = qa.transpose() * qb;
  rep.seconds_decode = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd c_ref = in.a.transpose() * in.b;
  rep.seconds_reference = seconds_since(t0);

  fill_distortion(rep, c_hat, c_ref);
  // per-column l_inf scale as fp64 side info
  rep.effective_rate = cfg.scalar_rate + 64.0 / cfg.n;
  rep.payload_rate = rep.effective_rate;
  fill_theory(rep, rep.effective_rate);

  if (!cfg.histogram_csv.empty()) write_histogram(cfg.histogram_csv, c_hat - c_ref, cfg.n);
  return rep;
}

namespace {

SweepRow row_from(const ExperimentConfig& cfg, const std::string& label) {
  ExperimentReport rep = run_experiment(cfg);
  SweepRow row;
  row.label = label;
  row.rate_nominal = std::log2(static_cast<double>(cfg.q));
  row.rate_effective = rep.effective_rate;
  row.distortion = rep.distortion_per_entry;
  row.gamma_at_rate = rep.gamma_at_rate;
  row.distortion = rep.distortion_per_entry;
  row.gap_ratio = rep.gamma_at_rate > 0.0 ? row.distortion / rep.gamma_at_rate : 0.0;
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_rates(const ExperimentConfig& cfg, const std::vector<int>& qs) {
  std::vector<SweepRow> rows;
  rows.reserve(qs.size());
  for (int q : qs) {
    ExperimentConfig c = cfg;
    c.q = q;
    rows.push_back(row_from(c, "q=" + std::to_string(q)));
  }
  return rows;
}

std::vector<SweepRow> sweep_lattices(const ExperimentConfig& cfg,
                                     const std::vector<std::pair<LatticeKind, int>>& lats) {
  std::vector<SweepRow> rows;
  rows.reserve(lats.size());
  for (const auto& [kind, dim] : lats) {
    ExperimentConfig c = cfg;
    c.lattice = kind;
    c.dim = dim;
    rows.push_back(row_from(c, to_string(kind) + std::to_string(dim)));
  }
  return rows;
}

}  // namespace latmul
