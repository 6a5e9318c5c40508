#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the density batch path and the EM
// accumulation steps. Every kernel has a scalar reference implementation and,
// on x86-64, an AVX2/FMA variant selected at runtime. The two are
// equivalence-tested; callers only see the dispatched entry points.
namespace resk::kernels {

enum class Isa { Scalar, Avx2 };

// ISA picked at startup (or forced via force_isa / RESK_FORCE_SCALAR=1).
Isa active_isa();
const char* isa_name(Isa isa);

// Testing hook. Forcing Avx2 on a machine without it is ignored.
void force_isa(Isa isa);

// sum(x)
double reduce_sum(const double* x, std::size_t n);

// sum(x .* y)
double reduce_dot(const double* x, const double* y, std::size_t n);

// sum(w .* (a - ca))
double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n);

// sum(w .* (a - ca) .* (b - cb))
double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n);

// out = a .* b
void elem_mul(double* out, const double* a, const double* b, std::size_t n);

// out += coeff * (a - ca)
void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n);

// out += coeff * (a - ca) .* (b - cb)
void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n);

// Scalar reference implementations, kept callable for equivalence tests.
namespace scalar {
double reduce_sum(const double* x, std::size_t n);
double reduce_dot(const double* x, const double* y, std::size_t n);
double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n);
double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n);
void elem_mul(double* out, const double* a, const double* b, std::size_t n);
void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n);
void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n);
} // namespace scalar

#if defined(RESK_HAVE_AVX2)
namespace avx2 {
double reduce_sum(const double* x, std::size_t n);
double reduce_dot(const double* x, const double* y, std::size_t n);
double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n);
double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n);
void elem_mul(double* out, const double* a, const double* b, std::size_t n);
void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n);
void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n);
} // namespace avx2
#endif

} // namespace resk::kernels
