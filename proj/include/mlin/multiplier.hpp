#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mlin/frames.hpp"
#include "mlin/grid.hpp"
#include "mlin/symbol.hpp"

namespace mlin {

struct ApplyStats {
  std::size_t wrapped_bins = 0;  // lattice points whose output frequency left the box
};

// T_sigma(f_1,...,f_m)(x): frequency contraction
//   H(eta) = sum_{xi_1 + ... + xi_m = eta} sigma(xi) prod f_hat_j(xi_j)
// over the product lattice, then one inverse transform. Output frequencies
// beyond the Nyquist box wrap; `stats` counts the affected lattice points.
Field apply_multiplier(const Symbol& sigma, std::span<const Field> inputs,
                       ApplyStats* stats = nullptr);

// sigma_j = sigma * Theta_hat(. / 2^j)
Symbol localize_symbol(const Symbol& sigma, const FrameFamily& theta_m, int j);

// Partition by which coordinate's dyadic scale is maximal; ties go to the
// smallest index. Requires sigma to vanish on bins the dyadic frames cannot
// cover (the zero frequency and scales outside the window).
std::vector<Symbol> kappa_decompose(const Symbol& sigma);

// Splits the kappa = 1 component at inner scale j - 4 - floor(log2 m):
// first element keeps the near-diagonal scales (low), second the widely
// separated ones (high); the two sum back to the input bin-exactly.
std::pair<Symbol, Symbol> low_high_split(const Symbol& sigma_kappa1);

struct PointwiseBoundReport {
  double max_ratio = 0;      // max_x |T f(x)| / (norm * prod Peetre_k f_k(x))
  double sobolev_norm = 0;   // || sigma(2^j .) ||_{L^t_s}
  std::size_t skipped = 0;   // grid points below the denominator floor
};

// Lemma-style pointwise bound: |T_sigma f(x)| <= C ||sigma(2^j.)||_{L^t_s}
// prod_k M^t_{s_k,2^j} f_k(x). Reports the empirical C.
PointwiseBoundReport pointwise_bound_check(const Symbol& sigma, std::span<const Field> inputs,
                                           std::span<const double> s, double t, int j);

}  // namespace mlin
