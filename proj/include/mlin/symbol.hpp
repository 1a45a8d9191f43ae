#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlin/grid.hpp"

namespace mlin {

using SymbolFn = std::function<cplx(std::span<const double>)>;

// Samples of an m-linear multiplier on the product frequency lattice
// (m blocks of n axes, row-major, each axis in FFT index order). A symbol
// may carry a closed-form evaluator; dilation and off-lattice resampling are
// only available through it.
struct Symbol {
  Grid factor_grid;  // n axes
  int m = 1;
  std::vector<cplx> values;
  SymbolFn evaluator;                  // optional closed form on (R^n)^m
  std::vector<double> support_center;  // optional hint, size m*n

  int n() const { return factor_grid.dims; }
  int total_dims() const { return m * factor_grid.dims; }
  std::size_t total_points() const;

  // the product-lattice frequency vector of a flat index
  void frequency(std::size_t flat, double* xi) const;
  cplx value_at(std::size_t flat) const { return values[flat]; }
};

Symbol make_symbol(const Grid& factor_grid, int m);
Symbol make_symbol(const Grid& factor_grid, int m, const SymbolFn& fn);

// Materializes evaluator-backed values (no-op when already stored).
void realize_values(Symbol& sigma);

// View of a symbol's stored values as a physical-space Field on the
// (m n)-dimensional product grid (frequency variables become the function's
// domain; norms of symbols are norms of this function).
Field symbol_as_field(const Symbol& sigma);

}  // namespace mlin
