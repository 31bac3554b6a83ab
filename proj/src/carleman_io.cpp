#include "clbm/carleman.hpp"

#include <fstream>

namespace clbm {

void save_carleman_vector(const std::filesystem::path& path, const CarlemanState<double>& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_carleman_vector: cannot open " + path.string());
  VectorDumpHeader header;
  header.order = static_cast<std::uint32_t>(s.order);
  header.sites = static_cast<std::uint32_t>(s.sites());
  header.velocities = kQ;
  const Eigen::VectorXd v = s.to_vector();
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw Error("save_carleman_vector: write failed for " + path.string());
}

LoadedVector load_carleman_vector(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error("load_carleman_vector: cannot open " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  LoadedVector loaded;
  static_assert(sizeof(VectorDumpHeader) == 16);
  if (bytes < sizeof(VectorDumpHeader)) throw Error("load_carleman_vector: truncated header");
  in.read(reinterpret_cast<char*>(&loaded.header), sizeof(VectorDumpHeader));
  if (loaded.header.magic != VectorDumpHeader::kMagic) throw Error("load_carleman_vector: bad magic");
  const std::size_t payload = bytes - sizeof(VectorDumpHeader);
  if (payload % sizeof(double) != 0) throw Error("load_carleman_vector: payload is not a float64 array");
  loaded.values.resize(static_cast<Eigen::Index>(payload / sizeof(double)));
  in.read(reinterpret_cast<char*>(loaded.values.data()), static_cast<std::streamsize>(payload));
  if (!in) throw Error("load_carleman_vector: read failed");
  return loaded;
}

}  // namespace clbm
