#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlin/frames.hpp"
#include "mlin/grid.hpp"
#include "mlin/symbol.hpp"

namespace mlin {

struct NormReport {
  double value = 0;
  int j_min = 0, j_max = 0;
  int argmax_j = 0;
  Grid grid;
};

// || (I - Delta_1)^{s_1/2} ... (I - Delta_m)^{s_m/2} F ||_{L^r} on the
// product space: frequency weight prod_k <xi_k>^{s_k} applied blockwise.
// F is a physical-space field on an (m n)-dimensional grid.
double product_sobolev_norm(const Field& F, int m, double r, std::span<const double> s);

// Standard Sobolev norm with the joint weight (1 + 4 pi^2 |xi|^2)^{s/2}.
double standard_sobolev_norm(const Field& F, double r, double s);

// Controls where the dilated localized symbol is evaluated. When the symbol
// carries an evaluator, the norm integrand sigma(2^j xi) Psi_hat(xi) is
// sampled on `grid` shifted by the lattice-snapped center (exact on the
// torus: recentering only modulates the transform, leaving weighted norms
// unchanged). Without an evaluator, dilation falls back to index strides on
// the symbol's own grid and requires j >= 0.
struct HormanderOptions {
  std::optional<Grid> norm_grid;          // per-axis grid of the evaluation window
  bool recenter = true;                   // shift the window onto the support center
  std::optional<std::vector<int>> j_list; // scales to scan; default: resolvable window
};

NormReport hormander_functional(const Symbol& sigma, const FrameFamily& psi_m, double r,
                                std::span<const double> s, const HormanderOptions& opts = {});

// Hardy-Littlewood maximal function over centered cubes with dyadic
// half-widths {0, dx, 2 dx, 4 dx, ...} clipped to the box;
// M_t f = (M(|f|^t))^{1/t}.
Field hl_maximal(const Field& f, double t);

// Generalized Peetre maximal function
//   M^t_{s,2^j} f(x) = 2^{jn/t} || f(x - .) / (1 + 2^j |.|)^s ||_{L^t},
// weighted sliding maximum for t = infinity. Requires s t > n for t < inf.
Field peetre_maximal(const Field& f, double s, int j, double t);

// || sup_j |phi_j * f| ||_{L^p} over the resolvable window.
NormReport hardy_norm(const Field& f, double p);

// Same but for an envelope g with f = g e^{2 pi i <x, carrier>}: the hats are
// evaluated at xi + carrier, which is exact and keeps the lattice demodulated.
NormReport hardy_norm_modulated(const Field& envelope, std::span<const double> carrier, double p,
                                int j_lo, int j_hi);

// || ( sum_j |psi_j * f|^2 )^{1/2} ||_{L^p}; requires mean-zero f.
double square_function_norm(const Field& f, double p);

// sup over grid-aligned dyadic cubes of the mean oscillation.
double bmo_seminorm(const Field& f);

}  // namespace mlin
