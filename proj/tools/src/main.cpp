// latmul: lattice-coded approximate matrix multiplication harness.
//
// Subcommands:
//   run              encode A and B, decode A^T B, report distortion and rate
//   scalar-baseline  l_inf-normalized scalar quantizer on the same inputs
//   sweep            repeat `run` over a q grid (or lattice list), CSV out
//   curves           theory reference curves as CSV
//   encode           matrix file -> encoded-matrix file
//   decode           two encoded-matrix files -> product matrix file
//   lut-build        inner-product table for the configured code -> file

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "latmul/experiment.hpp"
#include "latmul/io.hpp"
#include "latmul/theory.hpp"

namespace {

using latmul::ExperimentConfig;

// Flags mirror the config-file keys; a flag given on the command line wins
// over the value loaded from --config.
void attach_common(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value config file");
  cmd->add_option("--n", cfg.n, "inner dimension (rows of A and B)");
  cmd->add_option("--a", cfg.a, "columns of A (0 = n)");
  cmd->add_option("--b", cfg.b, "columns of B (0 = n)");
  cmd->add_option("--distribution", cfg.distribution, "gaussian | file");
  cmd->add_option("--file-a", cfg.file_a, "input matrix A (binary or text)");
  cmd->add_option("--file-b", cfg.file_b, "input matrix B");
  cmd->add_option("--lattice", [&cfg](const std::vector<std::string>& v) {
    cfg.lattice = latmul::lattice_kind_from_string(v.back());
    return true;
  }, "base lattice: zn | dn | e8");
  cmd->add_option("--dim", cfg.dim, "lattice dimension");
  cmd->add_option("--q", cfg.q, "nesting ratio (rate = log2 q bits/dim)");
  cmd->add_option("--gamma1", cfg.gamma1, "first bank scale (0 = rule of thumb)");
  cmd->add_option("--bank-size", cfg.bank_size, "gamma bank size");
  cmd->add_option("--kappa", cfg.kappa, "fraction of coordinates described");
  cmd->add_option("--alpha-mode", [&cfg](const std::vector<std::string>& v) {
    cfg.alpha_mode = latmul::alpha_mode_from_string(v.back());
    return true;
  }, "none | two_sided | one_sided | explicit");
  cmd->add_option("--alpha", cfg.alpha_explicit, "explicit alpha value");
  cmd->add_flag("--rotate,!--no-rotate", cfg.rotate, "randomized Hadamard rotation");
  cmd->add_flag("--center,!--no-center", cfg.center, "subtract column means");
  cmd->add_flag("--dither,!--no-dither", cfg.dither_enabled, "random dithers");
  cmd->add_option("--seed", cfg.seed, "master seed");
  cmd->add_option("--lut", [&cfg](const std::vector<std::string>& v) {
    if (v.back() == "off") cfg.lut = latmul::LutMode::Off;
    else if (v.back() == "real") cfg.lut = latmul::LutMode::Real;
    else if (v.back() == "int8") cfg.lut = latmul::LutMode::Int8;
    else throw CLI::ValidationError("--lut", "expected off|real|int8");
    return true;
  }, "decode path: off (direct) | real | int8");
  cmd->add_option("--scalar-rate", cfg.scalar_rate, "baseline quantizer bits");
  cmd->add_option("--histogram-csv", cfg.histogram_csv, "dump (C_hat-C)/sqrt(n) entries");
}

// Re-parse so command-line flags override the file values.
ExperimentConfig resolve(CLI::App* cmd, const ExperimentConfig& parsed,
                         const std::string& config_path, int argc, char** argv) {
  if (config_path.empty()) return parsed;
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  std::string dummy_path;
  CLI::App reapp{""};
  auto* sub = reapp.add_subcommand(cmd->get_name());
  attach_common(sub, cfg, dummy_path);
  reapp.allow_extras();
  sub->allow_extras();
  reapp.parse(argc, argv);
  return cfg;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nested-lattice approximate matrix multiplication"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path;
  std::string out_path, in_path, in_path_b, lut_path;
  std::string side = "a";
  std::string qs_arg = "2,4,6,8,16";
  std::string lattices_arg;
  double r_min = 0.25, r_max = 6.0, r_step = 0.25;

  auto* run = app.add_subcommand("run", "encode, multiply, report");
  attach_common(run, cfg, config_path);

  auto* scalar = app.add_subcommand("scalar-baseline", "scalar quantizer reference");
  attach_common(scalar, cfg, config_path);

  auto* sweep = app.add_subcommand("sweep", "rate or lattice sweep, CSV");
  attach_common(sweep, cfg, config_path);
  sweep->add_option("--qs", qs_arg, "comma-separated q values");
  sweep->add_option("--lattices", lattices_arg,
                    "comma-separated kind:dim pairs, e.g. dn:3,zn:3");
  sweep->add_option("--out", out_path, "CSV path (default stdout)");

  auto* curves = app.add_subcommand("curves", "theory curves as CSV");
  curves->add_option("--r-min", r_min);
  curves->add_option("--r-max", r_max);
  curves->add_option("--r-step", r_step);
  curves->add_option("--out", out_path, "CSV path (default stdout)");

  auto* encode = app.add_subcommand("encode", "matrix file -> encoded file");
  attach_common(encode, cfg, config_path);
  encode->add_option("--in", in_path, "input matrix")->required();
  encode->add_option("--out", out_path, "output encoded matrix")->required();
  encode->add_option("--side", side, "a | b (selects the dither stream)");

  auto* decode = app.add_subcommand("decode", "two encoded files -> product");
  attach_common(decode, cfg, config_path);
  decode->add_option("--in-a", in_path, "encoded A")->required();
  decode->add_option("--in-b", in_path_b, "encoded B")->required();
  decode->add_option("--out", out_path, "output matrix file")->required();
  decode->add_option("--lut-file", lut_path, "use a prebuilt LUT");

  auto* lut_build = app.add_subcommand("lut-build", "inner-product table -> file");
  attach_common(lut_build, cfg, config_path);
  lut_build->add_option("--out", out_path, "output LUT file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto* cmd = app.get_subcommands().front();
    if (cmd != curves) cfg = resolve(cmd, cfg, config_path, argc, argv);

    if (cmd == run) {
      auto rep = latmul::run_experiment(cfg);
      std::cout << rep.summary();
    } else if (cmd == scalar) {
      auto rep = latmul::run_scalar_baseline(cfg);
      std::cout << rep.summary();
    } else if (cmd == sweep) {
      std::vector<latmul::SweepRow> rows;
      if (!lattices_arg.empty()) {
        std::vector<std::pair<latmul::LatticeKind, int>> lats;
        std::size_t pos = 0;
        while (pos < lattices_arg.size()) {
          auto comma = lattices_arg.find(',', pos);
          if (comma == std::string::npos) comma = lattices_arg.size();
          auto item = lattices_arg.substr(pos, comma - pos);
          auto colon = item.find(':');
          if (colon == std::string::npos)
            throw std::runtime_error("--lattices items must be kind:dim");
          lats.emplace_back(latmul::lattice_kind_from_string(item.substr(0, colon)),
                            std::stoi(item.substr(colon + 1)));
          pos = comma + 1;
        }
        rows = latmul::sweep_lattices(cfg, lats);
      } else {
        rows = latmul::sweep_rates(cfg, parse_int_list(qs_arg));
      }
      std::ofstream file;
      auto& os = open_or_stdout(file, out_path);
      os << "label,rate_nominal,rate_effective,distortion,curve,gap_ratio\n";
      os.precision(10);
      for (const auto& r : rows)
        os << r.label << ',' << r.rate_nominal << ',' << r.rate_effective << ','
           << r.distortion << ',' << r.gamma_at_rate << ',' << r.gap_ratio << "\n";
    } else if (cmd == curves) {
      std::ofstream file;
      auto& os = open_or_stdout(file, out_path);
      os << "R,curve,curve_high_rate,one_sided\n";
      os.precision(10);
      for (double r = r_min; r <= r_max + 1e-12; r += r_step) {
        latmul::theory::BoundInputs bi;
        bi.rate = r;
        bi.norm_a = bi.norm_b = 1.0;
        bi.n = 1.0;
        os << r << ',' << latmul::theory::gamma_curve(r) << ','
           << latmul::theory::gamma1_curve(r) << ','
           << latmul::theory::theorem3_bound_one_sided(bi) << "\n";
      }
    } else if (cmd == encode) {
      auto pipe = cfg.pipeline();
      auto mat = latmul::io::load_matrix_any(in_path);
      auto s = side == "b" ? latmul::Side::B : latmul::Side::A;
      auto enc = latmul::encode_matrix(mat, pipe, s);
      latmul::io::save_encoded(out_path, enc, pipe);
      std::cout << "encoded " << enc.cols << " columns, " << enc.num_blocks
                << " blocks each, saturations=" << enc.saturation_count
                << ", rate=" << latmul::effective_rate_bits(enc, pipe) << " bits/entry\n";
    } else if (cmd == decode) {
      auto pipe = cfg.pipeline();
      auto ea = latmul::io::load_encoded(in_path, pipe);
      auto eb = latmul::io::load_encoded(in_path_b, pipe);
      Eigen::MatrixXd c;
      if (!lut_path.empty()) {
        auto lut = latmul::io::load_lut(lut_path);
        c = latmul::decode_matmul_lut(ea, eb, lut, pipe);
      } else {
        c = latmul::decode_matmul(ea, eb, pipe);
      }
      latmul::io::save_matrix(out_path, c);
      std::cout << "wrote " << c.rows() << "x" << c.cols() << " product to " << out_path
                << "\n";
    } else if (cmd == lut_build) {
      auto pipe = cfg.pipeline();
      auto lut = latmul::build_lut(pipe.code.lattice, pipe.code.q,
                                   pipe.dither(latmul::Side::A, 0),
                                   pipe.dither(latmul::Side::B, 0),
                                   cfg.lut == latmul::LutMode::Int8 ? latmul::LutMode::Int8
                                                                    : latmul::LutMode::Real);
      latmul::io::save_lut(out_path, lut);
      std::cout << "wrote " << lut.entries << " entries (" << lut.entries_per_side
                << " per side), clamps=" << lut.clamp_count << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
