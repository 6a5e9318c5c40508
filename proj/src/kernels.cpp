#include "resk/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace resk::kernels {

namespace scalar {

double reduce_sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double reduce_dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * (a[i] - ca);
    return acc;
}

double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * (a[i] - ca) * (b[i] - cb);
    return acc;
}

void elem_mul(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += coeff * (a[i] - ca);
}

void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += coeff * (a[i] - ca) * (b[i] - cb);
}

} // namespace scalar

namespace {

struct Table {
    double (*reduce_sum)(const double*, std::size_t);
    double (*reduce_dot)(const double*, const double*, std::size_t);
    double (*reduce_wsum_centered)(const double*, const double*, double, std::size_t);
    double (*reduce_wprod_centered)(const double*, const double*, double,
                                    const double*, double, std::size_t);
    void (*elem_mul)(double*, const double*, const double*, std::size_t);
    void (*accum_centered)(double*, const double*, double, double, std::size_t);
    void (*accum_centered_prod)(double*, const double*, double,
                                const double*, double, double, std::size_t);
};

constexpr Table kScalarTable = {
    scalar::reduce_sum,
    scalar::reduce_dot,
    scalar::reduce_wsum_centered,
    scalar::reduce_wprod_centered,
    scalar::elem_mul,
    scalar::accum_centered,
    scalar::accum_centered_prod,
};

#if defined(RESK_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::reduce_sum,
    avx2::reduce_dot,
    avx2::reduce_wsum_centered,
    avx2::reduce_wprod_centered,
    avx2::elem_mul,
    avx2::accum_centered,
    avx2::accum_centered_prod,
};
#endif

bool avx2_usable() {
#if defined(RESK_HAVE_AVX2)
    if (std::getenv("RESK_FORCE_SCALAR") != nullptr) return false;
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Isa> g_isa{avx2_usable() ? Isa::Avx2 : Isa::Scalar};

const Table& table() {
#if defined(RESK_HAVE_AVX2)
    return g_isa.load(std::memory_order_relaxed) == Isa::Avx2 ? kAvx2Table : kScalarTable;
#else
    return kScalarTable;
#endif
}

} // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_usable()) return;
    g_isa.store(isa, std::memory_order_relaxed);
}

double reduce_sum(const double* x, std::size_t n) {
    return table().reduce_sum(x, n);
}

double reduce_dot(const double* x, const double* y, std::size_t n) {
    return table().reduce_dot(x, y, n);
}

double reduce_wsum_centered(const double* w, const double* a, double ca, std::size_t n) {
    return table().reduce_wsum_centered(w, a, ca, n);
}

double reduce_wprod_centered(const double* w, const double* a, double ca,
                             const double* b, double cb, std::size_t n) {
    return table().reduce_wprod_centered(w, a, ca, b, cb, n);
}

void elem_mul(double* out, const double* a, const double* b, std::size_t n) {
    table().elem_mul(out, a, b, n);
}

void accum_centered(double* out, const double* a, double ca, double coeff, std::size_t n) {
    table().accum_centered(out, a, ca, coeff, n);
}

void accum_centered_prod(double* out, const double* a, double ca,
                         const double* b, double cb, double coeff, std::size_t n) {
    table().accum_centered_prod(out, a, ca, b, cb, coeff, n);
}

} // namespace resk::kernels
