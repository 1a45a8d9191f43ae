#pragma once

#include <complex>
#include <vector>

namespace mlin {

using cplx = std::complex<double>;

// In-place unnormalized DFT of a row-major multi-dimensional array.
// sign = -1: forward (e^{-2 pi i k x / P}), sign = +1: backward.
// All axis lengths must be powers of two. Thread-safe; results are
// bit-deterministic for a fixed input regardless of caller threading.
void dft(std::vector<cplx>& data, const std::vector<int>& dims, int sign);

}  // namespace mlin
