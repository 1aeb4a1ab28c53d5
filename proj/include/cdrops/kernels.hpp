#pragma once

#include <cstddef>

// Pairwise power-law sums over planar point sets, the inner loops of the cell
// quadrature. Every routine evaluates (|x_i - x_j|^2)^p and skips coincident
// pairs (zero distance). A scalar reference and an AVX2/FMA variant exist; the
// active one is chosen at first use from CPUID, and CHARGED_DROPS_SIMD=scalar
// forces the reference path.

namespace cdrops::kernels {

enum class Backend { Scalar, Avx2 };

/// sum_{i<j} w_i w_j (d_ij^2)^p
double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p);

/// out_i = sum_{j != i} w_j (d_ij^2)^p
void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out);

/// sum_i sum_j wa_i wb_j (d_ij^2)^p over a in A, b in B
double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p);

Backend active_backend();
bool avx2_available();
/// Override the dispatch (tests); Avx2 is ignored when the CPU lacks it.
void set_backend(Backend backend);
const char* backend_name(Backend backend);

namespace scalar {
double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p);
void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out);
double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p);
}  // namespace scalar

namespace avx2 {
double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p);
void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out);
double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p);
/// Lane-wise exp(p log d2) as used by the kernels; exposed for accuracy tests.
void pow_lanes(const double* d2, double p, double* out, std::size_t n);
}  // namespace avx2

}  // namespace cdrops::kernels
