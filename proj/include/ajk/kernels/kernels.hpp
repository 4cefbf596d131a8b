#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64 builds, an AVX2/FMA version. The variant is chosen once at first
// use from the CPU features (override with AJK_KERNELS=scalar|avx2) and can be
// switched explicitly, which the equivalence tests do.

namespace ajk::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sum_squares)(const double* a, std::size_t n);
    // sum_i observed[i] * w[i] * (a[i] - b[i])^2
    double (*masked_weighted_sse)(const double* a, const double* b, const double* w,
                                  const bool* observed, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}

#if defined(AJK_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

/// Compiled in and supported by the running CPU.
bool backend_available(Backend backend);

Backend active_backend();

/// Throws DomainError when the backend is unavailable.
void set_backend(Backend backend);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum_squares(std::span<const double> a) {
    return active().sum_squares(a.data(), a.size());
}

inline double masked_weighted_sse(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> w, std::span<const bool> observed) {
    return active().masked_weighted_sse(a.data(), b.data(), w.data(), observed.data(), a.size());
}

}  // namespace ajk::kernels
