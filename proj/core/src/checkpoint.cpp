#include "udc/nn/checkpoint.hpp"

#include <cstdint>
#include <fstream>

#include "udc/detail/binio.hpp"
#include "udc/errors.hpp"

namespace udc::nn {

void save_net(const std::string& path, const DiscNet<float>& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("udcn: cannot create " + path);
  out.write("UDCN", 4);
  detail::write_le<uint16_t>(out, 1);
  detail::write_le<uint16_t>(out, static_cast<uint16_t>(net.cfg.c0));
  detail::write_le<uint16_t>(out, static_cast<uint16_t>(net.cfg.s));
  detail::write_le<uint16_t>(out, static_cast<uint16_t>(net.cfg.b));
  detail::write_le<uint32_t>(out, static_cast<uint32_t>(net.params.size()));
  for (const auto& [name, t] : net.params) {
    detail::write_le<uint16_t>(out, static_cast<uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    out.put(static_cast<char>(4));
    detail::write_le<uint32_t>(out, static_cast<uint32_t>(t.n));
    detail::write_le<uint32_t>(out, static_cast<uint32_t>(t.c));
    detail::write_le<uint32_t>(out, static_cast<uint32_t>(t.h));
    detail::write_le<uint32_t>(out, static_cast<uint32_t>(t.w));
    for (float v : t.v) detail::write_f32(out, v);
  }
  if (!out) throw IoError("udcn: write failed for " + path);
}

DiscNet<float> load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("udcn: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != "UDCN")
    throw IoError("udcn: bad magic in " + path);
  uint16_t version = detail::read_le<uint16_t>(in, "udcn version");
  if (version != 1)
    throw IoError("udcn: unsupported version " + std::to_string(version));

  NetConfig cfg;
  cfg.c0 = detail::read_le<uint16_t>(in, "udcn c0");
  cfg.s = detail::read_le<uint16_t>(in, "udcn s");
  cfg.b = detail::read_le<uint16_t>(in, "udcn b");
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw IoError("udcn: bad architecture header in " + path + ": " + e.what());
  }

  // Weight values are irrelevant here; the structure gives the expected
  // tensor names and shapes, the file must match them one for one.
  DiscNet<float> net = DiscNet<float>::init(cfg, 0);

  uint32_t count = detail::read_le<uint32_t>(in, "udcn tensor count");
  if (count != net.params.size())
    throw IoError("udcn: tensor count mismatch in " + path);

  for (auto& [name, t] : net.params) {
    uint16_t len = detail::read_le<uint16_t>(in, "udcn name length");
    std::string fname(len, '\0');
    in.read(fname.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len))
      throw IoError("udcn: truncated name in " + path);
    if (fname != name)
      throw IoError("udcn: tensor '" + fname + "' does not match expected '" +
                    name + "'");
    int rank = in.get();
    if (rank != 4) throw IoError("udcn: unsupported tensor rank in " + path);
    uint32_t dims[4];
    for (uint32_t& d : dims) d = detail::read_le<uint32_t>(in, "udcn dim");
    if (dims[0] != static_cast<uint32_t>(t.n) ||
        dims[1] != static_cast<uint32_t>(t.c) ||
        dims[2] != static_cast<uint32_t>(t.h) ||
        dims[3] != static_cast<uint32_t>(t.w))
      throw IoError("udcn: shape mismatch for tensor '" + name + "'");
    for (float& v : t.v) v = detail::read_f32(in, "udcn payload");
  }
  return net;
}

}  // namespace udc::nn
