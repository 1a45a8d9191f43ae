#include "mlin/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace mlin {

double bump_g(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }

// The transition variable is normalized to unit width: exp(-1/u) underflows
// identically for u < 1/708, which would break narrow annuli.
double Cutoff::operator()(double rho) const {
  if (rho <= inner) return 1.0;
  if (rho >= outer) return 0.0;
  const double w = outer - inner;
  const double gd = bump_g((outer - rho) / w);
  return gd / (gd + bump_g((rho - inner) / w));
}

Cutoff build_cutoff(double inner, double outer) {
  if (!(inner >= 0) || !(inner < outer))
    throw std::invalid_argument("build_cutoff: need 0 <= inner < outer");
  return Cutoff{inner, outer};
}

double RisingCutoff::operator()(double rho) const {
  if (rho <= a) return 0.0;
  if (rho >= b) return 1.0;
  const double w = b - a;
  const double gu = bump_g((rho - a) / w);
  return gu / (gu + bump_g((b - rho) / w));
}

namespace {
const Cutoff kChi = Cutoff{1.0, 2.0};

double norm2(std::span<const double> xi) {
  double r2 = 0;
  for (double c : xi) r2 += c * c;
  return std::sqrt(r2);
}
}  // namespace

double psi_hat_radial(double rho) { return kChi(rho) - kChi(2.0 * rho); }
double phi_hat_radial(double rho) { return kChi(rho); }

double psi_hat(std::span<const double> xi, int j) {
  return psi_hat_radial(norm2(xi) * std::exp2(-j));
}

double phi_hat(std::span<const double> xi, int j) {
  return phi_hat_radial(norm2(xi) * std::exp2(-j));
}

double FrameFamily::hat(double rho) const {
  switch (kind) {
    case FrameKind::psi:
    case FrameKind::Psi_m:
      return psi_hat_radial(rho);
    case FrameKind::phi:
      return phi_hat_radial(rho);
    case FrameKind::Theta_m: {
      RisingCutoff lo{support_inner, plateau_lo};
      Cutoff hi{plateau_hi, support_outer};
      return lo(rho) * hi(rho);
    }
    case FrameKind::theta_annular: {
      RisingCutoff lo{support_inner, plateau_lo};
      Cutoff hi{plateau_hi, support_outer};
      return lo(rho) * hi(rho);
    }
    case FrameKind::theta_tilde:
    case FrameKind::varphi_tilde:
    case FrameKind::varphi_ball: {
      // varphi_ball stores the half-radius generator profile here
      Cutoff c{plateau_hi, support_outer};
      return c(rho);
    }
  }
  return 0;
}

double FrameFamily::hat_at(std::span<const double> xi) const { return hat(norm2(xi)); }

double FrameFamily::hat_dilated(std::span<const double> xi, int j) const {
  return hat(norm2(xi) * std::exp2(-j));
}

FrameFamily make_frame(FrameKind kind, int m, double scale, int l) {
  if (m < 1) throw std::invalid_argument("make_frame: m must be positive");
  FrameFamily f;
  f.kind = kind;
  f.m = m;
  f.scale = scale;
  const double sm = std::sqrt(static_cast<double>(m));
  switch (kind) {
    case FrameKind::psi:
    case FrameKind::Psi_m:
      f.support_inner = 0.5;
      f.support_outer = 2.0;
      f.plateau_lo = f.plateau_hi = 1.0;  // single interior point where hat = 1
      break;
    case FrameKind::phi:
      f.support_inner = 0.0;
      f.support_outer = 2.0;
      f.plateau_lo = 0.0;
      f.plateau_hi = 1.0;
      break;
    case FrameKind::Theta_m:
      f.support_inner = 0.125 / sm;
      f.plateau_lo = 0.25 / sm;
      f.plateau_hi = 4.0 * sm;
      f.support_outer = 8.0 * sm;
      break;
    case FrameKind::theta_annular: {
      const double a = scale / (2000.0 * sm), b = scale / (1000.0 * sm);
      const double w = (b - a) / 3.0;
      f.support_inner = a;
      f.plateau_lo = a + w;
      f.plateau_hi = b - w;
      f.support_outer = b;
      break;
    }
    case FrameKind::theta_tilde:
      f.plateau_lo = 0.0;
      f.plateau_hi = scale / (1000.0 * sm);
      f.support_outer = scale / (100.0 * sm);
      break;
    case FrameKind::varphi_ball: {
      // generator at half radius; true hat = generator self-convolution
      if (l < 1) throw std::invalid_argument("make_frame: l must be positive");
      const double half = scale / (400.0 * l * m);
      f.plateau_lo = 0.0;
      f.plateau_hi = half / 2.0;
      f.support_outer = half;
      break;
    }
    case FrameKind::varphi_tilde:
      f.plateau_lo = 0.0;
      f.plateau_hi = scale / (200.0 * m);
      f.support_outer = scale / (100.0 * m);
      break;
  }
  return f;
}

double varphi_hat_value(const FrameFamily& varphi, double rho) {
  if (varphi.kind != FrameKind::varphi_ball)
    throw std::invalid_argument("varphi_hat_value: frame is not varphi_ball");
  // 1-d self-convolution of the even generator profile at offset rho
  const double R = varphi.support_outer;
  if (std::abs(rho) >= 2.0 * R) return 0.0;
  const int panels = 4096;
  const double a = -R, b = R;
  const double h = (b - a) / panels;
  auto gen = [&](double u) { return varphi.hat(std::abs(u)); };
  long double acc = 0;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
    acc += (gen(x0) * gen(rho - x0) + 4.0 * gen(x1) * gen(rho - x1) + gen(x2) * gen(rho - x2)) *
           (h / 6.0);
  }
  return static_cast<double>(acc);
}

double varphi_moment0(const FrameFamily& varphi) {
  if (varphi.kind != FrameKind::varphi_ball)
    throw std::invalid_argument("varphi_moment0: frame is not varphi_ball");
  const double R = varphi.support_outer;
  const int panels = 2048;
  const double h = 2.0 * R / panels;
  long double acc = 0;
  for (int i = 0; i < panels; ++i) {
    double x0 = -R + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
    acc += (varphi.hat(std::abs(x0)) + 4.0 * varphi.hat(std::abs(x1)) + varphi.hat(std::abs(x2))) *
           (h / 6.0);
  }
  return static_cast<double>(acc);
}

ScaleWindow resolvable_window(const Grid& grid) {
  ScaleWindow w;
  w.j_min = static_cast<int>(std::ceil(std::log2(8.0 * grid.freq_step())));
  w.j_max = static_cast<int>(std::floor(std::log2(grid.nyquist() / 4.0)));
  return w;
}

Field frame_convolve(const FrameFamily& family, int j, const Field& f) {
  if (f.space != Space::physical)
    throw std::invalid_argument("frame_convolve: input must be physical-space");
  ScaleWindow w = resolvable_window(f.grid);
  if (!w.contains(j))
    throw std::invalid_argument("frame_convolve: scale j outside the resolvable window");
  Field spec = forward_ft(f);
  std::vector<int> idx(f.grid.dims);
  std::vector<double> xi(f.grid.dims);
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    f.grid.unravel(flat, idx.data());
    for (int a = 0; a < f.grid.dims; ++a) xi[a] = f.grid.freq(idx[a]);
    spec.values[flat] *= family.hat_dilated(xi, j);
  }
  return inverse_ft(spec);
}

}  // namespace mlin
