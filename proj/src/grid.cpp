#include "mlin/grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mlin/fft.hpp"

namespace mlin {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// parity of the sum of per-axis indices; the centered-box phase factor
// (-1)^{sum k_a} implements the x_i = (i - P/2) dx origin shift.
int index_parity(const Grid& g, std::size_t flat) {
  int parity = 0;
  std::size_t rest = flat;
  for (int a = 0; a < g.dims; ++a) {
    parity ^= static_cast<int>(rest % g.points_per_axis) & 1;
    rest /= g.points_per_axis;
  }
  return parity;
}

}  // namespace

std::size_t Grid::total_points() const {
  std::size_t t = 1;
  for (int a = 0; a < dims; ++a) t *= static_cast<std::size_t>(points_per_axis);
  return t;
}

void Grid::unravel(std::size_t flat, int* idx) const {
  // axis 0 is the slowest-varying (row-major)
  for (int a = dims - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_per_axis);
    flat /= points_per_axis;
  }
}

std::size_t Grid::ravel(const int* idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dims; ++a)
    flat = flat * points_per_axis + static_cast<std::size_t>(idx[a]);
  return flat;
}

Grid make_grid(int dims, int points_per_axis, double box_length) {
  if (dims < 1 || dims > 4) throw std::invalid_argument("make_grid: dims must be in 1..4");
  if (!power_of_two(points_per_axis) || points_per_axis < 8)
    throw std::invalid_argument("make_grid: points_per_axis must be a power of two >= 8");
  if (!(box_length > 0)) throw std::invalid_argument("make_grid: box_length must be positive");
  return Grid{dims, points_per_axis, box_length};
}

Field sample(const PointFn& fn, const Grid& grid) {
  Field f;
  f.grid = grid;
  f.space = Space::physical;
  f.values.resize(grid.total_points());
  std::vector<int> idx(grid.dims);
  std::vector<double> x(grid.dims);
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    grid.unravel(flat, idx.data());
    for (int a = 0; a < grid.dims; ++a) x[a] = grid.coord(idx[a]);
    cplx v = fn(std::span<const double>(x.data(), x.size()));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "sample: non-finite value at x = (";
      for (int a = 0; a < grid.dims; ++a) msg << (a ? ", " : "") << x[a];
      msg << ")";
      throw std::runtime_error(msg.str());
    }
    f.values[flat] = v;
  }
  return f;
}

Field forward_ft(const Field& f) {
  if (f.space != Space::physical)
    throw std::invalid_argument("forward_ft: input must be physical-space");
  Field out;
  out.grid = f.grid;
  out.space = Space::spectral;
  out.values = f.values;
  std::vector<int> dims(f.grid.dims, f.grid.points_per_axis);
  dft(out.values, dims, -1);
  const double scale = std::pow(f.grid.spacing(), f.grid.dims);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    double s = index_parity(f.grid, k) ? -scale : scale;
    out.values[k] *= s;
  }
  return out;
}

Field inverse_ft(const Field& f) {
  if (f.space != Space::spectral)
    throw std::invalid_argument("inverse_ft: input must be spectral-space");
  Field out;
  out.grid = f.grid;
  out.space = Space::physical;
  out.values = f.values;
  const double scale = std::pow(f.grid.freq_step(), f.grid.dims);
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    double s = index_parity(f.grid, k) ? -scale : scale;
    out.values[k] *= s;
  }
  std::vector<int> dims(f.grid.dims, f.grid.points_per_axis);
  dft(out.values, dims, +1);
  return out;
}

double lp_norm(const Field& f, double p) {
  if (!(p > 0)) throw std::invalid_argument("lp_norm: p must be positive");
  if (std::isinf(p)) {
    double m = 0;
    for (const cplx& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  const double cell = f.space == Space::physical ? f.grid.spacing() : f.grid.freq_step();
  const double measure = std::pow(cell, f.grid.dims);
  long double acc = 0;
  for (const cplx& v : f.values) acc += std::pow(std::abs(v), p);
  return static_cast<double>(std::pow(measure * acc, 1.0L / p));
}

Field multiply_pointwise(const Field& a, const Field& b) {
  if (!(a.grid == b.grid) || a.space != b.space)
    throw std::invalid_argument("multiply_pointwise: mismatched fields");
  Field out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

}  // namespace mlin
