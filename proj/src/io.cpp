#include "kvn/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace kvn {

static_assert(std::endian::native == std::endian::little, "series encoding assumes a little-endian host");

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw IoError("short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("series file truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string encode_series(const Propagation& prop, std::size_t n, int dim) {
  std::string out;
  out.reserve(24 + prop.snapshots.size() * (8 + 16 * n));
  out.append("KVNF", 4);
  put<std::uint32_t>(out, kSeriesVersion);
  put<std::uint64_t>(out, n);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(prop.snapshots.size()));
  for (const auto& s : prop.snapshots) {
    if (s.psi.size() != n) throw DimensionError("snapshot size does not match N");
    put<double>(out, s.time);
    for (const auto& v : s.psi) {
      put<double>(out, v.real());
      put<double>(out, v.imag());
    }
  }
  return out;
}

SeriesFile decode_series(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "KVNF") != 0) throw IoError("not a KVNF series file");
  std::size_t pos = 4;
  SeriesFile f;
  f.version = take<std::uint32_t>(bytes, pos);
  if (f.version != kSeriesVersion) throw IoError("unsupported series version " + std::to_string(f.version));
  f.n = take<std::uint64_t>(bytes, pos);
  f.dim = take<std::uint32_t>(bytes, pos);
  const auto count = take<std::uint32_t>(bytes, pos);
  if (bytes.size() - pos != static_cast<std::size_t>(count) * (8 + 16 * f.n)) {
    throw IoError("series file size does not match its header");
  }
  for (std::uint32_t k = 0; k < count; ++k) {
    f.times.push_back(take<double>(bytes, pos));
    ComplexField psi(f.n);
    for (auto& v : psi) {
      const double re = take<double>(bytes, pos);
      const double im = take<double>(bytes, pos);
      v = {re, im};
    }
    f.states.push_back(std::move(psi));
  }
  return f;
}

std::string norm_csv(const Propagation& prop) {
  std::string s = "step,t,norm,norm_drift\n";
  for (const auto& r : prop.norm_history) {
    s += std::to_string(r.step) + ',' + fmt(r.time) + ',' + fmt(r.norm) + ',' + fmt(r.drift) + '\n';
  }
  return s;
}

std::string classification_csv(const Grid& grid, const BoundaryClassification& cls) {
  const int d = grid.dim();
  std::string s = "face";
  for (int a = 0; a < d; ++a) s += ",x_" + std::to_string(a + 1);
  s += ",normal_flux,class\n";
  const auto faces = grid.boundary_faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    s += std::to_string(f);
    for (int a = 0; a < d; ++a) s += ',' + fmt(faces[f].centroid[a]);
    s += ',' + fmt(cls.normal_flux[f]) + ',' + to_string(cls.face_class[f]) + '\n';
  }
  return s;
}

std::string trajectory_csv(const Trajectory& tr, int dim) {
  std::string s = "t";
  for (int a = 0; a < dim; ++a) s += ",x_" + std::to_string(a + 1);
  s += ",div_integral\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    s += fmt(tr.times[k]);
    for (int a = 0; a < dim; ++a) s += ',' + fmt(tr.states[k][a]);
    s += ',' + fmt(tr.divergence_integral[k]) + '\n';
  }
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kvn
