#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mlin {

using cplx = std::complex<double>;

enum class Space { physical, spectral };

// Periodic box [-L/2, L/2)^dims sampled on P points per axis (P a power of
// two).  Physical lattice: x_i = (i - P/2) dx.  Frequency lattice: k/L with
// k in signed FFT order [-P/2, P/2).
struct Grid {
  int dims = 1;
  int points_per_axis = 8;
  double box_length = 1.0;

  double spacing() const { return box_length / points_per_axis; }
  double freq_step() const { return 1.0 / box_length; }
  double nyquist() const { return points_per_axis / (2.0 * box_length); }
  std::size_t total_points() const;

  int signed_index(int k) const {
    return k < points_per_axis / 2 ? k : k - points_per_axis;
  }
  // wraps a signed per-axis index back into [0, P)
  int storage_index(int k_signed) const {
    int p = points_per_axis;
    int k = k_signed % p;
    return k < 0 ? k + p : k;
  }
  double coord(int i) const { return (i - points_per_axis / 2) * spacing(); }
  double freq(int k) const { return signed_index(k) / box_length; }

  void unravel(std::size_t flat, int* idx) const;
  std::size_t ravel(const int* idx) const;

  bool operator==(const Grid&) const = default;
};

Grid make_grid(int dims, int points_per_axis, double box_length);

struct Field {
  Grid grid;
  Space space = Space::physical;
  std::vector<cplx> values;
};

using PointFn = std::function<cplx(std::span<const double>)>;

// Samples fn at the physical lattice points. Throws if fn returns a
// non-finite value, naming the offending coordinate.
Field sample(const PointFn& fn, const Grid& grid);

// Continuum-calibrated transforms: forward approximates
// \int f(x) e^{-2 pi i <x,xi>} dx, inverse undoes it exactly on the lattice.
Field forward_ft(const Field& f);
Field inverse_ft(const Field& f);

// Riemann-sum L^p norm with the cell measure of the field's space
// (dx^dims physical, dxi^dims spectral). p = infinity gives max |f|.
double lp_norm(const Field& f, double p);

// Pointwise helpers used across modules.
Field multiply_pointwise(const Field& a, const Field& b);

}  // namespace mlin
