#include "mlin/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mlin {

namespace {
constexpr char kMagic[4] = {'M', 'L', 'F', '1'};
}

void write_field(const Field& f, const std::string& path, bool single_precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path);
  unsigned char header[32] = {0};
  std::memcpy(header, kMagic, 4);
  header[4] = static_cast<unsigned char>(f.grid.dims);
  header[5] = f.space == Space::spectral ? 1 : 0;
  header[6] = single_precision ? 0 : 1;
  std::uint32_t p = static_cast<std::uint32_t>(f.grid.points_per_axis);
  std::memcpy(header + 8, &p, 4);
  double box = f.grid.box_length;
  std::memcpy(header + 16, &box, 8);
  out.write(reinterpret_cast<const char*>(header), 32);
  if (single_precision) {
    for (const cplx& v : f.values) {
      float re = static_cast<float>(v.real()), im = static_cast<float>(v.imag());
      out.write(reinterpret_cast<const char*>(&re), 4);
      out.write(reinterpret_cast<const char*>(&im), 4);
    }
  } else {
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  }
  if (!out) throw std::runtime_error("write_field: write failed for " + path);
}

Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path);
  unsigned char header[32];
  in.read(reinterpret_cast<char*>(header), 32);
  if (!in || std::memcmp(header, kMagic, 4) != 0)
    throw std::runtime_error("read_field: bad magic in " + path);
  int dims = header[4];
  bool spectral = header[5] != 0;
  bool dbl = header[6] != 0;
  std::uint32_t p;
  std::memcpy(&p, header + 8, 4);
  double box;
  std::memcpy(&box, header + 16, 8);
  Field f;
  f.grid = make_grid(dims, static_cast<int>(p), box);
  f.space = spectral ? Space::spectral : Space::physical;
  f.values.resize(f.grid.total_points());
  if (dbl) {
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  } else {
    for (cplx& v : f.values) {
      float re, im;
      in.read(reinterpret_cast<char*>(&re), 4);
      in.read(reinterpret_cast<char*>(&im), 4);
      v = cplx(re, im);
    }
  }
  if (!in) throw std::runtime_error("read_field: truncated payload in " + path);
  return f;
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  std::vector<int> idx(f.grid.dims);
  char buf[64];
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    f.grid.unravel(flat, idx.data());
    for (int a = 0; a < f.grid.dims; ++a) out << idx[a] << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.values[flat].real(), f.values[flat].imag());
    out << buf;
  }
}

}  // namespace mlin
