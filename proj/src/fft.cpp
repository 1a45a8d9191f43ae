#include "mlin/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace mlin {

namespace {

std::mutex plan_mutex;
std::map<std::pair<std::vector<int>, int>, fftw_plan>& plan_cache() {
  static auto* cache = new std::map<std::pair<std::vector<int>, int>, fftw_plan>();
  return *cache;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void dft(std::vector<cplx>& data, const std::vector<int>& dims, int sign) {
  if (dims.empty()) throw std::invalid_argument("dft: empty dims");
  std::size_t total = 1;
  for (int d : dims) {
    if (!power_of_two(d)) throw std::invalid_argument("dft: axis length must be a power of two");
    total *= static_cast<std::size_t>(d);
  }
  if (data.size() != total) throw std::invalid_argument("dft: data size does not match dims");

  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    // Plan creation is not thread-safe in FFTW; executing a cached plan is.
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(dims, sign);
    auto it = plan_cache().find(key);
    if (it == plan_cache().end()) {
      // FFTW_ESTIMATE never touches the buffer; FFTW_UNALIGNED lets the same
      // plan run on any double-aligned array via fftw_execute_dft.
      plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                           sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
      if (!plan) throw std::runtime_error("dft: fftw_plan_dft failed");
      plan_cache().emplace(std::move(key), plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace mlin
