// udc: under-display camera simulation, dataset synthesis and restoration.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 numeric failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "udc/errors.hpp"
#include "udc/formation.hpp"
#include "udc/kernel_code.hpp"
#include "udc/keyval.hpp"
#include "udc/metrics.hpp"
#include "udc/nn/checkpoint.hpp"
#include "udc/nn/dataset.hpp"
#include "udc/nn/train.hpp"
#include "udc/optics.hpp"
#include "udc/pfm.hpp"
#include "udc/png_io.hpp"
#include "udc/postproc.hpp"
#include "udc/rng.hpp"
#include "udc/wiener.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> list_pfm_sorted(const std::string& dir) {
  if (!fs::is_directory(dir)) throw udc::IoError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".pfm")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

void apply_overrides(udc::KeyVal& kv, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

udc::DisplayPattern make_pattern(const std::string& desc, int n, double pitch) {
  if (desc == "ones") return udc::make_ones_pattern(n, pitch);
  auto parse_two = [&](const std::string& body) {
    int period = 0;
    double duty = 0.0;
    if (std::sscanf(body.c_str(), "%d:%lf", &period, &duty) != 2)
      throw std::invalid_argument("pattern arg needs <period>:<duty>");
    return std::make_pair(period, duty);
  };
  if (desc.rfind("stripes:", 0) == 0) {
    auto [p, d] = parse_two(desc.substr(8));
    return udc::make_stripe_pattern(n, pitch, p, d);
  }
  if (desc.rfind("grid:", 0) == 0) {
    auto [p, d] = parse_two(desc.substr(5));
    return udc::make_grid_pattern(n, pitch, p, d);
  }
  // Otherwise a grayscale PFM of transmission values.
  udc::Image im = udc::read_pfm(desc);
  if (im.ch != 1 || im.h != n || im.w != n)
    throw std::invalid_argument("pattern image must be " + std::to_string(n) +
                                "x" + std::to_string(n) + " grayscale");
  return udc::pattern_from_values(n, pitch, im.data);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty list: '" + s + "'");
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------- commands

struct SimulatePsfArgs {
  std::string config, pattern = "ones", out;
  std::vector<std::string> sets;
};

void run_simulate_psf(const SimulatePsfArgs& a) {
  udc::KeyVal kv = a.config.empty() ? udc::KeyVal::from_string("", "<defaults>")
                                    : udc::KeyVal::from_file(a.config);
  apply_overrides(kv, a.sets);
  udc::OpticsConfig cfg = udc::optics_from_keyval(kv);

  udc::DisplayPattern pattern = make_pattern(a.pattern, cfg.grid_n, cfg.pitch);
  std::vector<std::string> warnings;
  udc::PsfStack psf = udc::simulate_psf(pattern, cfg, &warnings);
  print_warnings(warnings);
  udc::save_psf(a.out, psf);
  std::cout << "psf " << psf.k << "x" << psf.k << " gains " << psf.channel_gains[0]
            << " " << psf.channel_gains[1] << " " << psf.channel_gains[2] << "\n";
}

struct FusePsfArgs {
  std::vector<std::string> captures;
  std::string times, out;
  double sat_level = 0.0;
};

void run_fuse_psf(const FusePsfArgs& a) {
  std::vector<udc::Image> captures;
  for (const std::string& path : a.captures)
    captures.push_back(udc::read_pfm(path));
  std::vector<double> times = parse_double_list(a.times);
  udc::PsfStack psf = udc::fuse_psf_exposures(captures, times, a.sat_level);
  udc::save_psf(a.out, psf);
}

struct RotatePsfArgs {
  std::string in, out;
  double angle = 0.0;
};

void run_rotate_psf(const RotatePsfArgs& a) {
  udc::PsfStack psf = udc::load_psf(a.in);
  udc::save_psf(a.out, udc::rotate_psf(psf, a.angle));
}

struct GenScenesArgs {
  int count = 8, size = 128, highlights = 6;
  uint64_t seed = 7;
  double base_max = 0.8, hi_lo = 50.0, hi_hi = 2000.0;
  std::string out;
};

void run_gen_scenes(const GenScenesArgs& a) {
  fs::create_directories(a.out);
  udc::Rng rng(a.seed);
  for (int i = 0; i < a.count; ++i) {
    udc::Image scene = udc::gen_synthetic_scene(a.size, a.size, a.highlights,
                                                rng, a.base_max, a.hi_lo, a.hi_hi);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d.pfm", i);
    udc::write_pfm((fs::path(a.out) / name).string(), scene);
  }
  std::cout << "wrote " << a.count << " scenes to " << a.out << "\n";
}

struct SynthesizeArgs {
  std::string scenes, psf_set, out, basis;
  double xmax = 500.0, alpha = 0.25, noise_sigma = 0.0;
  uint64_t seed = 1;
  int code_dim = 5, pca_side = 64;
};

void run_synthesize(const SynthesizeArgs& a) {
  std::vector<std::string> scene_files = list_pfm_sorted(a.scenes);
  std::vector<std::string> psf_files = list_pfm_sorted(a.psf_set);
  if (scene_files.empty()) throw udc::IoError("no scenes in " + a.scenes);
  if (psf_files.empty()) throw udc::IoError("no kernels in " + a.psf_set);

  std::vector<udc::PsfStack> kernels;
  for (const std::string& f : psf_files) kernels.push_back(udc::load_psf(f));

  udc::KernelBasis basis;
  if (!a.basis.empty()) {
    basis = udc::load_basis(a.basis);
  } else {
    int b = a.code_dim;
    if (b > static_cast<int>(kernels.size()) - 1) {
      b = std::max(1, static_cast<int>(kernels.size()) - 1);
      std::cerr << "warning: code_dim clamped to " << b
                << " (only " << kernels.size() << " kernels)\n";
    }
    std::vector<std::string> warnings;
    basis = udc::fit_pca(kernels, b, a.pca_side, &warnings);
    print_warnings(warnings);
  }

  fs::create_directories(a.out);
  udc::save_basis((fs::path(a.out) / "basis.udck").string(), basis);

  udc::Rng rng(a.seed);
  int idx = 0;
  for (const std::string& sf : scene_files) {
    udc::Image scene = udc::read_pfm(sf);
    for (size_t ki = 0; ki < kernels.size(); ++ki) {
      udc::DegradedPair dp = udc::simulate_degraded(scene, kernels[ki], a.xmax,
                                                    a.alpha, a.noise_sigma, rng);
      udc::nn::TrainPair pair;
      char stem[32];
      std::snprintf(stem, sizeof(stem), "pair_%04d", idx++);
      pair.name = stem;
      pair.degraded = std::move(dp.degraded);
      pair.target = std::move(dp.target);
      pair.code = udc::encode_kernel(kernels[ki], basis);
      pair.angle_deg = kernels[ki].angle_deg;
      pair.psf_name = fs::path(psf_files[ki]).filename().string();
      udc::nn::save_pair(a.out, pair);
    }
  }
  std::cout << "wrote " << idx << " pairs to " << a.out << "\n";
}

struct PcaFitArgs {
  std::string kernels, out;
  int code_dim = 5, side = 64;
};

void run_pca_fit(const PcaFitArgs& a) {
  std::vector<udc::PsfStack> kernels;
  for (const std::string& f : list_pfm_sorted(a.kernels))
    kernels.push_back(udc::load_psf(f));
  std::vector<std::string> warnings;
  udc::KernelBasis basis = udc::fit_pca(kernels, a.code_dim, a.side, &warnings);
  print_warnings(warnings);
  udc::save_basis(a.out, basis);
  std::cout << "basis b=" << basis.b << " side=" << basis.side << "\n";
}

struct EncodeKernelArgs {
  std::string psf, basis;
};

void run_encode_kernel(const EncodeKernelArgs& a) {
  udc::KernelBasis basis = udc::load_basis(a.basis);
  std::vector<double> code = udc::encode_kernel(udc::load_psf(a.psf), basis);
  std::ostringstream out;
  out.precision(17);
  for (size_t i = 0; i < code.size(); ++i) out << (i ? "," : "") << code[i];
  std::cout << out.str() << "\n";
}

struct WienerArgs {
  std::string in, psf, out, pad = "replicate";
  double nsr = 1e-3, alpha = 0.25;
  bool linear = false;
};

void run_wiener(const WienerArgs& a) {
  udc::Image y = udc::read_pfm(a.in);
  udc::PsfStack psf = udc::load_psf(a.psf);
  udc::PadMode pad;
  if (a.pad == "replicate")
    pad = udc::PadMode::kReplicate;
  else if (a.pad == "zero")
    pad = udc::PadMode::kZero;
  else
    throw std::invalid_argument("--pad must be replicate or zero");
  udc::Image x = a.linear ? udc::wiener_deconvolve_linear(y, psf, a.nsr, pad)
                          : udc::wiener_deconvolve(y, psf, a.nsr, a.alpha, pad);
  udc::write_pfm(a.out, x);
}

struct TrainArgs {
  std::string data, net_cfg, train_cfg, out, log;
};

void run_train(const TrainArgs& a) {
  udc::nn::Dataset ds = udc::nn::load_dataset(a.data);

  udc::KeyVal nkv = a.net_cfg.empty()
                        ? udc::KeyVal::from_string("", "<defaults>")
                        : udc::KeyVal::from_file(a.net_cfg);
  udc::nn::NetConfig ncfg;
  ncfg.c0 = nkv.get_int_or("c0", ncfg.c0);
  ncfg.s = nkv.get_int_or("s", ncfg.s);
  ncfg.b = nkv.get_int_or("b", ds.basis.b);
  uint64_t init_seed = static_cast<uint64_t>(nkv.get_int_or("init_seed", 42));
  ncfg.validate();
  if (ncfg.b != ds.basis.b)
    throw std::invalid_argument("net b=" + std::to_string(ncfg.b) +
                                " != basis b=" + std::to_string(ds.basis.b));

  udc::KeyVal tkv = a.train_cfg.empty()
                        ? udc::KeyVal::from_string("", "<defaults>")
                        : udc::KeyVal::from_file(a.train_cfg);
  udc::nn::TrainConfig tcfg = udc::nn::train_from_keyval(tkv);

  udc::nn::DiscNet<float> net = udc::nn::DiscNet<float>::init(ncfg, init_seed);
  std::vector<udc::nn::LossRow> rows = udc::nn::train(net, ds, tcfg);

  udc::nn::save_net(a.out, net);
  if (!a.log.empty()) {
    std::ofstream log(a.log);
    if (!log) throw udc::IoError("cannot create " + a.log);
    log << udc::nn::loss_csv(rows);
  }
  if (!rows.empty())
    std::cout << "final l1 " << rows.back().l1 << " over " << rows.size()
              << " iterations\n";
}

struct InferArgs {
  std::string model, in, out, psf, basis, code;
  int tile = 0;
};

void run_infer(const InferArgs& a) {
  udc::nn::DiscNet<float> net = udc::nn::load_net(a.model);
  udc::Image y = udc::read_pfm(a.in);

  std::vector<double> code;
  if (!a.code.empty()) {
    code = parse_double_list(a.code);
  } else {
    if (a.psf.empty() || a.basis.empty())
      throw std::invalid_argument("infer needs --code or both --psf and --basis");
    code = udc::encode_kernel(udc::load_psf(a.psf), udc::load_basis(a.basis));
  }
  if (code.size() != static_cast<size_t>(net.cfg.b))
    throw std::invalid_argument("code length != model b");

  udc::write_pfm(a.out, udc::nn::infer_image(net, y, code, a.tile));
}

struct EvalArgs {
  std::string pred, gt, report, mismatch, model, data;
};

void eval_dirs(const EvalArgs& a) {
  std::vector<std::string> preds = list_pfm_sorted(a.pred);
  if (preds.empty()) throw udc::IoError("no predictions in " + a.pred);
  std::vector<udc::MetricRow> rows;
  for (const std::string& p : preds) {
    std::string name = fs::path(p).filename().string();
    fs::path g = fs::path(a.gt) / name;
    if (!fs::exists(g)) throw udc::IoError("missing ground truth " + g.string());
    udc::Image pi = udc::read_pfm(p);
    udc::Image gi = udc::read_pfm(g.string());
    rows.push_back({name, udc::psnr(pi, gi), udc::ssim(pi, gi)});
  }
  std::string csv = udc::metrics_csv(rows);
  std::ofstream out(a.report);
  if (!out) throw udc::IoError("cannot create " + a.report);
  out << csv;
  std::cout << csv;
}

void eval_mismatch(const EvalArgs& a) {
  if (a.mismatch != "permute")
    throw std::invalid_argument("--mismatch supports only 'permute'");
  if (a.model.empty() || a.data.empty())
    throw std::invalid_argument("--mismatch needs --model and --data");

  udc::nn::DiscNet<float> net = udc::nn::load_net(a.model);
  udc::nn::Dataset ds = udc::nn::load_dataset(a.data);
  size_t m = ds.pairs.size();
  if (m < 2) throw std::invalid_argument("--mismatch needs >= 2 pairs");

  auto mean_l1 = [](const udc::Image& x, const udc::Image& y) {
    double acc = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i)
      acc += std::fabs(x.data[i] - y.data[i]);
    return acc / static_cast<double>(x.data.size());
  };

  double l1_correct = 0.0, l1_perm = 0.0;
  double psnr_correct = 0.0, psnr_perm = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const udc::nn::TrainPair& pair = ds.pairs[i];
    // Shift-by-one permutation pairs every image with a wrong code.
    const std::vector<double>& wrong = ds.pairs[(i + 1) % m].code;
    udc::Image rc = udc::nn::infer_image(net, pair.degraded, pair.code);
    udc::Image rp = udc::nn::infer_image(net, pair.degraded, wrong);
    l1_correct += mean_l1(rc, pair.target);
    l1_perm += mean_l1(rp, pair.target);
    psnr_correct += udc::psnr(rc, pair.target);
    psnr_perm += udc::psnr(rp, pair.target);
  }
  l1_correct /= static_cast<double>(m);
  l1_perm /= static_cast<double>(m);
  psnr_correct /= static_cast<double>(m);
  psnr_perm /= static_cast<double>(m);

  std::ostringstream csv;
  csv.precision(10);
  csv << "mode,l1,psnr\n"
      << "correct," << l1_correct << "," << psnr_correct << "\n"
      << "permuted," << l1_perm << "," << psnr_perm << "\n";
  std::ofstream out(a.report);
  if (!out) throw udc::IoError("cannot create " + a.report);
  out << csv.str();
  std::cout << csv.str();
}

struct PostprocArgs {
  std::string in, out, ccm, rgb, clahe_spec, pfm_out;
};

void run_postproc(const PostprocArgs& a) {
  udc::Image im = udc::read_pfm(a.in);
  if (!a.ccm.empty()) {
    std::vector<double> m = parse_double_list(a.ccm);
    if (m.size() != 9) throw std::invalid_argument("--ccm needs 9 values");
    std::array<double, 9> mm;
    std::copy(m.begin(), m.end(), mm.begin());
    im = udc::apply_ccm(im, mm);
  }
  if (!a.rgb.empty()) {
    std::vector<double> g = parse_double_list(a.rgb);
    if (g.size() != 3) throw std::invalid_argument("--rgb needs 3 values");
    im = udc::rgb_scale(im, {g[0], g[1], g[2]});
  }
  if (!a.clahe_spec.empty()) {
    std::vector<double> c = parse_double_list(a.clahe_spec);
    if (c.size() != 3)
      throw std::invalid_argument("--clahe needs tiles_x,tiles_y,clip_limit");
    for (double& v : im.data) v = std::clamp(v, 0.0, 1.0);
    im = udc::clahe(im, static_cast<int>(c[0]), static_cast<int>(c[1]), c[2]);
  }
  udc::write_png(a.out, im);
  if (!a.pfm_out.empty()) udc::write_pfm(a.pfm_out, im);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"under-display camera diffraction simulation and restoration"};
  app.require_subcommand(1);

  SimulatePsfArgs sim;
  auto* c_sim = app.add_subcommand("simulate-psf", "wave-optics PSF of a display pattern");
  c_sim->add_option("--config", sim.config, "optics key=value config file");
  c_sim->add_option("--set", sim.sets, "override config entries (key=value)");
  c_sim->add_option("--pattern", sim.pattern,
                    "ones | stripes:P:D | grid:P:D | grayscale PFM path");
  c_sim->add_option("--out", sim.out, "output PSF (.pfm + .meta)")->required();
  c_sim->callback([&] { run_simulate_psf(sim); });

  FusePsfArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse-psf", "HDR-merge bracketed PSF captures");
  c_fuse->add_option("--captures", fuse.captures, "capture PFMs, brightest first")
      ->required()->expected(-1);
  c_fuse->add_option("--times", fuse.times, "comma list of exposure times")->required();
  c_fuse->add_option("--sat-level", fuse.sat_level,
                     "saturation threshold (default 0.95 * global max)");
  c_fuse->add_option("--out", fuse.out, "output PSF")->required();
  c_fuse->callback([&] { run_fuse_psf(fuse); });

  RotatePsfArgs rot;
  auto* c_rot = app.add_subcommand("rotate-psf", "rotate a PSF about its center");
  c_rot->add_option("--in", rot.in, "input PSF")->required();
  c_rot->add_option("--angle", rot.angle, "degrees, |angle| <= 45")->required();
  c_rot->add_option("--out", rot.out, "output PSF")->required();
  c_rot->callback([&] { run_rotate_psf(rot); });

  GenScenesArgs gen;
  auto* c_gen = app.add_subcommand("gen-scenes", "synthetic HDR scenes");
  c_gen->add_option("--count", gen.count);
  c_gen->add_option("--size", gen.size);
  c_gen->add_option("--highlights", gen.highlights);
  c_gen->add_option("--seed", gen.seed);
  c_gen->add_option("--base-max", gen.base_max);
  c_gen->add_option("--hi-lo", gen.hi_lo);
  c_gen->add_option("--hi-hi", gen.hi_hi);
  c_gen->add_option("--out", gen.out, "output directory")->required();
  c_gen->callback([&] { run_gen_scenes(gen); });

  SynthesizeArgs syn;
  auto* c_syn = app.add_subcommand("synthesize", "degraded/target training pairs");
  c_syn->add_option("--scenes", syn.scenes, "scene directory")->required();
  c_syn->add_option("--psf-set", syn.psf_set, "kernel directory")->required();
  c_syn->add_option("--xmax", syn.xmax, "sensor clip level");
  c_syn->add_option("--alpha", syn.alpha, "tone mapping constant");
  c_syn->add_option("--noise-sigma", syn.noise_sigma);
  c_syn->add_option("--seed", syn.seed);
  c_syn->add_option("--basis", syn.basis, "reuse an existing kernel basis");
  c_syn->add_option("--code-dim", syn.code_dim, "basis size when fitting here");
  c_syn->add_option("--pca-side", syn.pca_side, "signature resolution");
  c_syn->add_option("--out", syn.out, "dataset directory")->required();
  c_syn->callback([&] { run_synthesize(syn); });

  PcaFitArgs pca;
  auto* c_pca = app.add_subcommand("pca-fit", "fit a kernel-code basis");
  c_pca->add_option("--kernels", pca.kernels, "kernel directory")->required();
  c_pca->add_option("--code-dim", pca.code_dim);
  c_pca->add_option("--side", pca.side);
  c_pca->add_option("--out", pca.out, "output .udck")->required();
  c_pca->callback([&] { run_pca_fit(pca); });

  EncodeKernelArgs enc;
  auto* c_enc = app.add_subcommand("encode-kernel", "project a PSF onto a basis");
  c_enc->add_option("--psf", enc.psf)->required();
  c_enc->add_option("--basis", enc.basis)->required();
  c_enc->callback([&] { run_encode_kernel(enc); });

  WienerArgs wie;
  auto* c_wie = app.add_subcommand("wiener", "Wiener deconvolution baseline");
  c_wie->add_option("--in", wie.in, "degraded PFM")->required();
  c_wie->add_option("--psf", wie.psf)->required();
  c_wie->add_option("--nsr", wie.nsr, "noise-to-signal ratio");
  c_wie->add_option("--alpha", wie.alpha, "tone mapping constant");
  c_wie->add_flag("--linear", wie.linear, "input already linear radiance");
  c_wie->add_option("--pad", wie.pad, "replicate | zero");
  c_wie->add_option("--out", wie.out)->required();
  c_wie->callback([&] { run_wiener(wie); });

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "train the restoration network");
  c_tr->add_option("--data", tr.data, "dataset directory")->required();
  c_tr->add_option("--net", tr.net_cfg, "network key=value config");
  c_tr->add_option("--train", tr.train_cfg, "training key=value config");
  c_tr->add_option("--out", tr.out, "output checkpoint .udcn")->required();
  c_tr->add_option("--log", tr.log, "loss CSV path");
  c_tr->callback([&] { run_train(tr); });

  InferArgs inf;
  auto* c_inf = app.add_subcommand("infer", "restore an image with a checkpoint");
  c_inf->add_option("--model", inf.model)->required();
  c_inf->add_option("--in", inf.in)->required();
  c_inf->add_option("--psf", inf.psf, "kernel to encode as the condition");
  c_inf->add_option("--basis", inf.basis);
  c_inf->add_option("--code", inf.code, "comma list, bypasses --psf/--basis");
  c_inf->add_option("--tile", inf.tile, "0 = whole frame");
  c_inf->add_option("--out", inf.out)->required();
  c_inf->callback([&] { run_infer(inf); });

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "PSNR/SSIM report or mismatch probe");
  c_ev->add_option("--pred", ev.pred, "prediction directory");
  c_ev->add_option("--gt", ev.gt, "ground truth directory");
  c_ev->add_option("--report", ev.report, "output CSV")->required();
  c_ev->add_option("--mismatch", ev.mismatch, "'permute': wrong-code probe");
  c_ev->add_option("--model", ev.model, "checkpoint for --mismatch");
  c_ev->add_option("--data", ev.data, "dataset for --mismatch");
  c_ev->callback([&] {
    if (!ev.mismatch.empty())
      eval_mismatch(ev);
    else if (!ev.pred.empty() && !ev.gt.empty())
      eval_dirs(ev);
    else
      throw std::invalid_argument("eval needs --pred/--gt or --mismatch");
  });

  PostprocArgs pp;
  auto* c_pp = app.add_subcommand("postproc", "color pipeline to 8-bit PNG");
  c_pp->add_option("--in", pp.in, "input PFM")->required();
  c_pp->add_option("--ccm", pp.ccm, "9 comma floats, row-major");
  c_pp->add_option("--rgb", pp.rgb, "3 comma floats");
  c_pp->add_option("--clahe", pp.clahe_spec, "tiles_x,tiles_y,clip_limit");
  c_pp->add_option("--pfm-out", pp.pfm_out, "also write the result as PFM");
  c_pp->add_option("--out", pp.out, "output PNG")->required();
  c_pp->callback([&] { run_postproc(pp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const udc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const udc::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
