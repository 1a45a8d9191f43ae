#include "mlin/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace mlin {

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  long double acc = 0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
    acc += (f(x0) + 4.0 * f(x1) + f(x2)) * (h / 6.0);
  }
  return static_cast<double>(acc);
}

cplx simpson_c(const std::function<cplx(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  std::complex<long double> acc = 0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
    cplx v = (f(x0) + 4.0 * f(x1) + f(x2)) * (h / 6.0);
    acc += std::complex<long double>(v.real(), v.imag());
  }
  return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

double h_windowed_hat(const HKernelParams& params, const std::function<double(double)>& window,
                      double radius, double xi, double dy) {
  // even integrand: 2 int_0^R H(y) w(y) cos(2 pi xi y) dy. The kernel has a
  // unit-scale peak at the origin and is log-smooth beyond, so the head is
  // integrated at a fixed fine step and the tail on dyadic blocks whose step
  // tracks both the local smoothness (y/64) and the oscillation.
  auto f = [&](double y) {
    return h_kernel_radial(y, params) * window(y) * std::cos(2.0 * std::numbers::pi * xi * y);
  };
  const double per_osc = std::abs(xi) > 0 ? 1.0 / (24.0 * std::abs(xi)) : radius;
  const double head = std::min(8.0, radius);
  long double acc = simpson(f, 0.0, head, std::max(64, static_cast<int>(std::ceil(head / (dy / 8)))));
  double a = head;
  while (a < radius) {
    const double b = std::min(2.0 * a, radius);
    const double step = std::min({per_osc, a / 64.0, dy * 64.0});
    const int panels = std::max(16, static_cast<int>(std::ceil((b - a) / step)));
    acc += simpson(f, a, b, panels);
    a = b;
  }
  return 2.0 * static_cast<double>(acc);
}

double h_windowed_mass(const HKernelParams& params, const std::function<double(double)>& window,
                       double radius, double dy) {
  return h_windowed_hat(params, window, radius, 0.0, dy);
}

double radial_lp_mass_1d(const std::function<double(double)>& f, double R, double p, int panels) {
  auto g = [&](double y) { return std::pow(std::abs(f(y)), p); };
  return 2.0 * simpson(g, 0.0, R, panels);
}

}  // namespace mlin
