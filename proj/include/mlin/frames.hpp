#pragma once

#include <span>

#include "mlin/grid.hpp"

namespace mlin {

// C-infinity transition g(u) = exp(-1/u) for u > 0, 0 otherwise.
double bump_g(double u);

// Radial profile equal to 1 on [0, inner], 0 on [outer, inf), built as
// g(outer - r) / (g(outer - r) + g(r - inner)); exactly 1/2 at the midpoint.
struct Cutoff {
  double inner = 0;
  double outer = 1;
  double operator()(double rho) const;
};

Cutoff build_cutoff(double inner, double outer);

// Rising counterpart: 0 on [0, a], 1 on [b, inf).
struct RisingCutoff {
  double a = 0, b = 1;
  double operator()(double rho) const;
};

// Littlewood-Paley pieces built from the fixed cutoff chi = build_cutoff(1,2):
//   psi_hat_radial(r)   = chi(r) - chi(2r), supported in 1/2 < r < 2
//   phi_hat_radial(r)   = chi(r), 1 on r <= 1, 0 on r >= 2
// and their dyadic dilates psi_hat(xi, j) = psi_hat_radial(|xi| / 2^j).
double psi_hat_radial(double rho);
double phi_hat_radial(double rho);
double psi_hat(std::span<const double> xi, int j);
double phi_hat(std::span<const double> xi, int j);

enum class FrameKind {
  psi,            // annulus 1/2..2, telescoping partition of unity
  phi,            // ball, 1 on |xi| <= 1, 0 beyond 2
  Psi_m,          // same profile on the m-fold product space
  Theta_m,        // 1 on 2^{-2} m^{-1/2} .. 2^2 m^{1/2}, support 2^{-3}.. 2^3-scaled
  theta_annular,  // annulus [scale/(2000 sqrt m), scale/(1000 sqrt m)]
  theta_tilde,    // 1 on <= scale/(1000 sqrt m), support <= scale/(100 sqrt m)
  varphi_ball,    // support <= scale/(200 l m); physical values nonnegative
  varphi_tilde,   // 1 on <= scale/(200 m), support <= scale/(100 m)
};

// Radial spectral profile of one frame function. For varphi_ball the stored
// profile is the half-radius generator eta_hat; the actual hat is its
// self-convolution (see varphi_hat_value) so that the physical function is
// a square, hence nonnegative.
struct FrameFamily {
  FrameKind kind = FrameKind::psi;
  int m = 1;
  double scale = 1.0;
  double support_inner = 0;  // hat vanishes for rho < support_inner (annular kinds)
  double support_outer = 0;  // hat vanishes for rho > support_outer
  double plateau_lo = 0;     // hat is exactly 1 on [plateau_lo, plateau_hi]
  double plateau_hi = 0;

  double hat(double rho) const;                  // radial hat value
  double hat_at(std::span<const double> xi) const;
  double hat_dilated(std::span<const double> xi, int j) const;  // hat(|xi|/2^j)
};

// scale multiplies the paper's support radii; l only matters for varphi_ball.
FrameFamily make_frame(FrameKind kind, int m = 1, double scale = 1.0, int l = 1);

// varphi_ball: value of the true hat (self-convolution of the generator) at
// radius rho, and the physical-space value varphi(x) = eta(x)^2 where eta is
// the inverse transform of the generator (n = 1).
double varphi_hat_value(const FrameFamily& varphi, double rho);
double varphi_moment0(const FrameFamily& varphi);  // integral of the generator = eta(0)

struct ScaleWindow {
  int j_min = 0, j_max = 0;
  bool contains(int j) const { return j >= j_min && j <= j_max; }
};

// Dyadic scales whose annuli the grid resolves:
// j_min = ceil(log2(8 dxi)), j_max = floor(log2(nyquist / 4)).
ScaleWindow resolvable_window(const Grid& grid);

// Spectral convolution with the scale-j member of the family
// ((g)_j = psi_j * g, (g)^j = phi_j * g and likewise for other kinds).
Field frame_convolve(const FrameFamily& family, int j, const Field& f);

}  // namespace mlin
