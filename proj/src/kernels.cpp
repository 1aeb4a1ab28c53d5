#include "cdrops/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace cdrops::kernels {

namespace scalar {

double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0.0) row += w[j] * std::pow(d2, p);
    }
    total += w[i] * row;
  }
  return total;
}

void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0.0) acc += w[j] * std::pow(d2, p);
    }
    out[i] = acc;
  }
}

double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p) {
  double total = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double dx = xa[i] - xb[j];
      const double dy = ya[i] - yb[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0.0) row += wb[j] * std::pow(d2, p);
    }
    total += wa[i] * row;
  }
  return total;
}

}  // namespace scalar

namespace {

std::atomic<int> g_backend{-1};

Backend detect() {
  const char* env = std::getenv("CHARGED_DROPS_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() {
  int b = g_backend.load(std::memory_order_relaxed);
  if (b < 0) {
    b = static_cast<int>(detect());
    g_backend.store(b, std::memory_order_relaxed);
  }
  return static_cast<Backend>(b);
}

void set_backend(Backend backend) {
  if (backend == Backend::Avx2 && !avx2_available()) backend = Backend::Scalar;
  g_backend.store(static_cast<int>(backend), std::memory_order_relaxed);
}

const char* backend_name(Backend backend) { return backend == Backend::Avx2 ? "avx2" : "scalar"; }

double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p) {
  return active_backend() == Backend::Avx2 ? avx2::pair_sum(x, y, w, n, p) : scalar::pair_sum(x, y, w, n, p);
}

void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out) {
  if (active_backend() == Backend::Avx2) avx2::potential(x, y, w, n, p, out);
  else scalar::potential(x, y, w, n, p, out);
}

double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p) {
  return active_backend() == Backend::Avx2 ? avx2::cross_sum(xa, ya, wa, na, xb, yb, wb, nb, p)
                                           : scalar::cross_sum(xa, ya, wa, na, xb, yb, wb, nb, p);
}

}  // namespace cdrops::kernels
