#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "udc/formation.hpp"
#include "udc/image.hpp"
#include "udc/kernel_code.hpp"
#include "udc/pfm.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(UDC_CLI_BIN) + " " + args;
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("cli rejects bad invocations with exit code 2") {
  CHECK(run_cli("2>/dev/null") == 2);
  CHECK(run_cli("no-such-command 2>/dev/null") == 2);
  CHECK(run_cli("simulate-psf --no-such-flag x 2>/dev/null") == 2);
  CHECK(run_cli("rotate-psf --in a.pfm --out b.pfm 2>/dev/null") == 2);
}

TEST_CASE("cli reports missing inputs with exit code 3") {
  fs::path dir = fresh_dir("udc_cli_io");
  CHECK(run_cli("rotate-psf --in /nonexistent_udc.pfm --angle 5 --out " +
                q(dir / "r.pfm") + " 2>/dev/null") == 3);
  CHECK(run_cli("eval --pred /nonexistent_dir_udc --gt /also_missing --report " +
                q(dir / "rep.csv") + " 2>/dev/null") == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli end-to-end pipeline") {
  fs::path dir = fresh_dir("udc_cli_pipe");
  fs::path scenes = dir / "scenes";
  fs::path kernels = dir / "kernels";
  fs::path data = dir / "data";
  fs::create_directories(kernels);

  CHECK(run_cli("gen-scenes --count 2 --size 48 --highlights 2 --seed 9 --out " +
                q(scenes)) == 0);
  CHECK(fs::exists(scenes / "scene_0000.pfm"));
  CHECK(fs::exists(scenes / "scene_0001.pfm"));

  // Small grid keeps the wave-optics solve quick; warnings are expected.
  CHECK(run_cli("simulate-psf --set grid_n=64 --set kernel_size=31"
                " --pattern stripes:8:0.7 --out " +
                q(kernels / "psf_a.pfm") + " 2>/dev/null") == 0);
  CHECK(fs::exists(kernels / "psf_a.pfm"));
  CHECK(fs::exists(kernels / "psf_a.pfm.meta"));
  CHECK(run_cli("rotate-psf --in " + q(kernels / "psf_a.pfm") +
                " --angle 10 --out " + q(kernels / "psf_b.pfm")) == 0);
  CHECK(run_cli("rotate-psf --in " + q(kernels / "psf_a.pfm") +
                " --angle 60 --out " + q(kernels / "bad.pfm") +
                " 2>/dev/null") == 2);

  CHECK(run_cli("synthesize --scenes " + q(scenes) + " --psf-set " + q(kernels) +
                " --noise-sigma 0.001 --seed 3 --code-dim 3 --pca-side 16"
                " --out " + q(data) + " 2>/dev/null") == 0);
  CHECK(fs::exists(data / "basis.udck"));
  CHECK(fs::exists(data / "pair_0000_deg.pfm"));
  CHECK(fs::exists(data / "pair_0003_tgt.pfm"));
  // Two kernels support only a one-component basis.
  udc::KernelBasis basis = udc::load_basis((data / "basis.udck").string());
  CHECK(basis.b == 1);

  fs::path netcfg = dir / "net.cfg";
  std::ofstream(netcfg) << "c0 = 4\ns = 3\ninit_seed = 2\n";
  fs::path traincfg = dir / "train.cfg";
  std::ofstream(traincfg) << "iters = 2\nbatch = 1\npatch = 16\nseed = 4\n";
  fs::path model = dir / "model.udcn";
  fs::path losslog = dir / "loss.csv";
  CHECK(run_cli("train --data " + q(data) + " --net " + q(netcfg) +
                " --train " + q(traincfg) + " --out " + q(model) + " --log " +
                q(losslog)) == 0);
  CHECK(fs::exists(model));
  {
    std::ifstream log(losslog);
    std::string header, row;
    REQUIRE(std::getline(log, header));
    CHECK(header == "iter,lr,l1,surrogate,total");
    REQUIRE(std::getline(log, row));
    CHECK(row.substr(0, 2) == "0,");
  }

  fs::path restored = dir / "restored.pfm";
  CHECK(run_cli("infer --model " + q(model) + " --in " +
                q(data / "pair_0000_deg.pfm") + " --psf " +
                q(kernels / "psf_a.pfm") + " --basis " +
                q(data / "basis.udck") + " --out " + q(restored)) == 0);
  udc::Image rest = udc::read_pfm(restored.string());
  CHECK(rest.h == 48);
  CHECK(rest.ch == 3);

  CHECK(run_cli("wiener --in " + q(data / "pair_0000_deg.pfm") + " --psf " +
                q(kernels / "psf_a.pfm") + " --nsr 1e-2 --out " +
                q(dir / "wiener.pfm")) == 0);
  CHECK(fs::exists(dir / "wiener.pfm"));

  fs::path pred = dir / "pred";
  fs::path gt = dir / "gt";
  fs::create_directories(pred);
  fs::create_directories(gt);
  fs::copy_file(restored, pred / "a.pfm");
  fs::copy_file(data / "pair_0000_tgt.pfm", gt / "a.pfm");
  fs::path report = dir / "report.csv";
  CHECK(run_cli("eval --pred " + q(pred) + " --gt " + q(gt) + " --report " +
                q(report) + " >/dev/null") == 0);
  {
    std::ifstream rep(report);
    std::string header;
    REQUIRE(std::getline(rep, header));
    CHECK(header == "name,psnr,ssim");
  }

  fs::path mm = dir / "mismatch.csv";
  CHECK(run_cli("eval --mismatch permute --model " + q(model) + " --data " +
                q(data) + " --report " + q(mm) + " >/dev/null") == 0);
  {
    std::ifstream rep(mm);
    std::string l0, l1, l2;
    REQUIRE(std::getline(rep, l0));
    CHECK(l0 == "mode,l1,psnr");
    REQUIRE(std::getline(rep, l1));
    CHECK(l1.substr(0, 8) == "correct,");
    REQUIRE(std::getline(rep, l2));
    CHECK(l2.substr(0, 9) == "permuted,");
  }

  CHECK(run_cli("encode-kernel --psf " + q(kernels / "psf_a.pfm") +
                " --basis " + q(data / "basis.udck") + " >/dev/null") == 0);

  fs::path png = dir / "out.png";
  CHECK(run_cli("postproc --in " + q(restored) +
                " --rgb 1.1,1.0,0.9 --clahe 2,2,2.0 --out " + q(png)) == 0);
  {
    std::ifstream p(png, std::ios::binary);
    unsigned char sig[8] = {0};
    p.read(reinterpret_cast<char*>(sig), 8);
    CHECK(sig[0] == 0x89);
    CHECK(sig[1] == 'P');
    CHECK(sig[2] == 'N');
    CHECK(sig[3] == 'G');
  }

  fs::remove_all(dir);
}
