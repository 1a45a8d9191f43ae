#include "mlin/symbol.hpp"

#include <stdexcept>

namespace mlin {

std::size_t Symbol::total_points() const {
  std::size_t t = 1;
  for (int a = 0; a < total_dims(); ++a) t *= static_cast<std::size_t>(factor_grid.points_per_axis);
  return t;
}

void Symbol::frequency(std::size_t flat, double* xi) const {
  const int d = total_dims();
  const int p = factor_grid.points_per_axis;
  for (int a = d - 1; a >= 0; --a) {
    xi[a] = factor_grid.freq(static_cast<int>(flat % p));
    flat /= p;
  }
}

Symbol make_symbol(const Grid& factor_grid, int m) {
  if (m < 1) throw std::invalid_argument("make_symbol: m must be positive");
  if (m * factor_grid.dims > 4)
    throw std::invalid_argument("make_symbol: product dimension m*n must be <= 4");
  Symbol s;
  s.factor_grid = factor_grid;
  s.m = m;
  s.values.assign(s.total_points(), cplx(0, 0));
  return s;
}

Symbol make_symbol(const Grid& factor_grid, int m, const SymbolFn& fn) {
  Symbol s = make_symbol(factor_grid, m);
  s.evaluator = fn;
  realize_values(s);
  return s;
}

void realize_values(Symbol& sigma) {
  if (!sigma.evaluator) return;
  sigma.values.resize(sigma.total_points());
  std::vector<double> xi(sigma.total_dims());
  for (std::size_t flat = 0; flat < sigma.values.size(); ++flat) {
    sigma.frequency(flat, xi.data());
    sigma.values[flat] = sigma.evaluator(std::span<const double>(xi.data(), xi.size()));
  }
}

Field symbol_as_field(const Symbol& sigma) {
  Field f;
  f.grid = make_grid(sigma.total_dims(), sigma.factor_grid.points_per_axis,
                     sigma.factor_grid.box_length);
  f.space = Space::physical;
  f.values = sigma.values;
  return f;
}

}  // namespace mlin
