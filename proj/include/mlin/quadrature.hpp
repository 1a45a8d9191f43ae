#pragma once

#include <functional>

#include "mlin/kernels.hpp"

namespace mlin {

// Composite Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int panels);
// Complex variant for oscillatory integrands.
cplx simpson_c(const std::function<cplx(double)>& f, double a, double b, int panels);

// Fourier transform at frequency xi of the compactly truncated kernel
//   H_{t,gamma}(y) * window(y),  |y| <= radius   (n = 1, real even result).
// Plain fine Simpson; the window keeps the domain compact.
double h_windowed_hat(const HKernelParams& params, const std::function<double(double)>& window,
                      double radius, double xi, double dy = 1.0 / 64);

// int H_{t,gamma}(y) window(y) dy over |y| <= radius (the xi = 0 case).
double h_windowed_mass(const HKernelParams& params, const std::function<double(double)>& window,
                       double radius, double dy = 1.0 / 64);

// Truncated-ball L^p mass of a radial function, n = 1: 2 int_0^R |f|^p.
double radial_lp_mass_1d(const std::function<double(double)>& f, double R, double p, int panels);

}  // namespace mlin
