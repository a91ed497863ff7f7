#include "udc/kernel_code.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "udc/detail/binio.hpp"
#include "udc/errors.hpp"

namespace udc {

namespace {
constexpr double kLumaR = 0.2126, kLumaG = 0.7152, kLumaB = 0.0722;

void warn(std::vector<std::string>* sink, const std::string& msg) {
  if (sink)
    sink->push_back(msg);
  else
    std::cerr << "warning: " << msg << "\n";
}
}  // namespace

std::vector<double> resample_area(const std::vector<double>& src, int sh,
                                  int sw, int dh, int dw) {
  if (sh <= 0 || sw <= 0 || dh <= 0 || dw <= 0)
    throw std::invalid_argument("resample: non-positive shape");
  if (src.size() != static_cast<size_t>(sh) * sw)
    throw std::invalid_argument("resample: source size mismatch");

  std::vector<double> dst(static_cast<size_t>(dh) * dw, 0.0);
  double ry = static_cast<double>(sh) / dh;
  double rx = static_cast<double>(sw) / dw;
  for (int di = 0; di < dh; ++di) {
    double y0 = di * ry, y1 = (di + 1) * ry;
    int iy0 = static_cast<int>(std::floor(y0));
    int iy1 = std::min(sh, static_cast<int>(std::ceil(y1)));
    for (int dj = 0; dj < dw; ++dj) {
      double x0 = dj * rx, x1 = (dj + 1) * rx;
      int ix0 = static_cast<int>(std::floor(x0));
      int ix1 = std::min(sw, static_cast<int>(std::ceil(x1)));
      double acc = 0.0;
      for (int sy = iy0; sy < iy1; ++sy) {
        double wy = std::min<double>(y1, sy + 1) - std::max<double>(y0, sy);
        if (wy <= 0.0) continue;
        for (int sx = ix0; sx < ix1; ++sx) {
          double wx = std::min<double>(x1, sx + 1) - std::max<double>(x0, sx);
          if (wx <= 0.0) continue;
          acc += wy * wx * src[static_cast<size_t>(sy) * sw + sx];
        }
      }
      dst[static_cast<size_t>(di) * dw + dj] = acc / (ry * rx);
    }
  }
  return dst;
}

std::vector<double> kernel_signature(const PsfStack& psf, int side) {
  if (side < 2) throw std::invalid_argument("signature: side must be >= 2");
  std::vector<double> luma(static_cast<size_t>(psf.k) * psf.k);
  for (int y = 0; y < psf.k; ++y)
    for (int x = 0; x < psf.k; ++x)
      luma[static_cast<size_t>(y) * psf.k + x] = kLumaR * psf.at(0, y, x) +
                                                 kLumaG * psf.at(1, y, x) +
                                                 kLumaB * psf.at(2, y, x);
  std::vector<double> sig = resample_area(luma, psf.k, psf.k, side, side);
  double sum = 0.0;
  for (double v : sig) sum += v;
  if (!(sum > 0.0)) throw NumericError("signature: kernel has no energy");
  for (double& v : sig) v /= sum;
  return sig;
}

KernelBasis fit_pca(const std::vector<PsfStack>& kernels, int b, int side,
                    std::vector<std::string>* warnings) {
  int m = static_cast<int>(kernels.size());
  if (m < 2) throw std::invalid_argument("pca: need at least 2 kernels");
  if (b < 1) throw std::invalid_argument("pca: b must be >= 1");

  size_t D = static_cast<size_t>(side) * side;
  Eigen::MatrixXd X(m, static_cast<Eigen::Index>(D));
  for (int i = 0; i < m; ++i) {
    std::vector<double> sig = kernel_signature(kernels[static_cast<size_t>(i)], side);
    for (size_t j = 0; j < D; ++j)
      X(i, static_cast<Eigen::Index>(j)) = sig[j];
  }

  Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;

  // m x m Gram eigenproblem; exact scatter-matrix eigenpairs for rank < m.
  Eigen::MatrixXd G = X * X.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw NumericError("pca: eigensolver failed");

  KernelBasis basis;
  basis.b = b;
  basis.side = side;
  basis.mean.assign(mean.data(), mean.data() + D);
  basis.components.assign(static_cast<size_t>(b) * D, 0.0);
  basis.eigenvalues.assign(static_cast<size_t>(b), 0.0);

  double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  double tol = std::max(lmax * 1e-12, 1e-30);
  int rank = 0;
  // Eigen sorts ascending; walk from the back.
  for (int i = 0; i < b && i < m; ++i) {
    double lambda = es.eigenvalues()(m - 1 - i);
    if (lambda <= tol) break;
    Eigen::VectorXd comp = X.transpose() * es.eigenvectors().col(m - 1 - i);
    comp /= std::sqrt(lambda);
    // Deterministic sign: largest-magnitude element positive.
    Eigen::Index arg = 0;
    comp.cwiseAbs().maxCoeff(&arg);
    if (comp(arg) < 0.0) comp = -comp;
    for (size_t j = 0; j < D; ++j)
      basis.components[static_cast<size_t>(i) * D + j] =
          comp(static_cast<Eigen::Index>(j));
    basis.eigenvalues[static_cast<size_t>(i)] = lambda;
    ++rank;
  }
  if (rank < b)
    warn(warnings, "pca: centered rank " + std::to_string(rank) + " < b = " +
                       std::to_string(b) + ", trailing components are zero");
  return basis;
}

std::vector<double> encode_kernel(const PsfStack& psf,
                                  const KernelBasis& basis) {
  std::vector<double> sig = kernel_signature(psf, basis.side);
  size_t D = static_cast<size_t>(basis.side) * basis.side;
  std::vector<double> code(static_cast<size_t>(basis.b), 0.0);
  for (int i = 0; i < basis.b; ++i) {
    const double* comp = basis.component(i);
    double acc = 0.0;
    for (size_t j = 0; j < D; ++j) acc += (sig[j] - basis.mean[j]) * comp[j];
    code[static_cast<size_t>(i)] = acc;
  }
  return code;
}

std::vector<double> decode_kernel(const std::vector<double>& code,
                                  const KernelBasis& basis) {
  if (code.size() != static_cast<size_t>(basis.b))
    throw std::invalid_argument("decode: code length != b");
  size_t D = static_cast<size_t>(basis.side) * basis.side;
  std::vector<double> out(basis.mean);
  for (int i = 0; i < basis.b; ++i) {
    const double* comp = basis.component(i);
    double c = code[static_cast<size_t>(i)];
    for (size_t j = 0; j < D; ++j) out[j] += c * comp[j];
  }
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

Image stretch_code(const std::vector<double>& code, int h, int w) {
  if (code.empty()) throw std::invalid_argument("stretch: empty code");
  Image maps(h, w, static_cast<int>(code.size()));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (size_t i = 0; i < code.size(); ++i)
        maps.at(y, x, static_cast<int>(i)) = code[i];
  return maps;
}

void save_basis(const std::string& path, const KernelBasis& basis) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("udck: cannot create " + path);
  out.write("UDCK", 4);
  detail::write_le<uint16_t>(out, 1);
  detail::write_le<uint16_t>(out, static_cast<uint16_t>(basis.b));
  detail::write_le<uint32_t>(out, static_cast<uint32_t>(basis.side));
  for (double v : basis.eigenvalues)
    detail::write_f32(out, static_cast<float>(v));
  for (double v : basis.mean) detail::write_f32(out, static_cast<float>(v));
  for (double v : basis.components)
    detail::write_f32(out, static_cast<float>(v));
  if (!out) throw IoError("udck: write failed for " + path);
}

KernelBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("udck: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != "UDCK")
    throw IoError("udck: bad magic in " + path);
  uint16_t version = detail::read_le<uint16_t>(in, "udck version");
  if (version != 1)
    throw IoError("udck: unsupported version " + std::to_string(version));

  KernelBasis basis;
  basis.b = detail::read_le<uint16_t>(in, "udck b");
  basis.side = static_cast<int>(detail::read_le<uint32_t>(in, "udck side"));
  if (basis.b < 1 || basis.side < 2 || basis.side > 4096)
    throw IoError("udck: implausible header in " + path);

  size_t D = static_cast<size_t>(basis.side) * basis.side;
  basis.eigenvalues.resize(static_cast<size_t>(basis.b));
  for (double& v : basis.eigenvalues) v = detail::read_f32(in, "udck eigenvalue");
  basis.mean.resize(D);
  for (double& v : basis.mean) v = detail::read_f32(in, "udck mean");
  basis.components.resize(static_cast<size_t>(basis.b) * D);
  for (double& v : basis.components)
    v = detail::read_f32(in, "udck component");
  return basis;
}

}  // namespace udc
