#include "udc/nn/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "udc/errors.hpp"
#include "udc/keyval.hpp"
#include "udc/pfm.hpp"

namespace fs = std::filesystem;

namespace udc::nn {

void save_pair(const std::string& dir, const TrainPair& pair) {
  fs::path base = fs::path(dir) / pair.name;
  write_pfm(base.string() + "_deg.pfm", pair.degraded);
  write_pfm(base.string() + "_tgt.pfm", pair.target);

  std::ostringstream meta;
  meta << "psf=" << pair.psf_name << "\n";
  meta << "angle_deg=" << pair.angle_deg << "\n";
  meta << "code=";
  meta.precision(17);
  for (size_t i = 0; i < pair.code.size(); ++i)
    meta << (i ? "," : "") << pair.code[i];
  meta << "\n";

  std::ofstream out(base.string() + ".meta");
  if (!out) throw IoError("dataset: cannot create " + base.string() + ".meta");
  out << meta.str();
}

Dataset load_dataset(const std::string& dir) {
  fs::path root(dir);
  if (!fs::is_directory(root))
    throw IoError("dataset: not a directory: " + dir);

  Dataset ds;
  fs::path basis_path = root / "basis.udck";
  if (!fs::exists(basis_path))
    throw IoError("dataset: missing " + basis_path.string());
  ds.basis = load_basis(basis_path.string());

  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(root)) {
    std::string fn = entry.path().filename().string();
    const std::string suffix = "_deg.pfm";
    if (fn.size() > suffix.size() &&
        fn.compare(fn.size() - suffix.size(), suffix.size(), suffix) == 0)
      stems.push_back(fn.substr(0, fn.size() - suffix.size()));
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty())
    throw IoError("dataset: no *_deg.pfm pairs in " + dir);

  for (const std::string& stem : stems) {
    TrainPair pair;
    pair.name = stem;
    fs::path base = root / stem;
    pair.degraded = read_pfm(base.string() + "_deg.pfm");
    pair.target = read_pfm(base.string() + "_tgt.pfm");
    if (!pair.degraded.same_shape(pair.target))
      throw IoError("dataset: shape mismatch for " + stem);

    KeyVal kv = KeyVal::from_file(base.string() + ".meta");
    pair.psf_name = kv.get_string_or("psf", "");
    pair.angle_deg = kv.get_double_or("angle_deg", 0.0);
    pair.code = kv.get_double_list("code");
    if (pair.code.size() != static_cast<size_t>(ds.basis.b))
      throw IoError("dataset: code length != basis.b for " + stem);
    ds.pairs.push_back(std::move(pair));
  }
  return ds;
}

}  // namespace udc::nn
