#include "ajk/kernels/kernels.hpp"

namespace ajk::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double masked_weighted_sse(const double* a, const double* b, const double* w,
                           const bool* observed, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!observed[i]) continue;
        const double diff = a[i] - b[i];
        acc += w[i] * diff * diff;
    }
    return acc;
}

}  // namespace

const KernelTable& table() {
    static const KernelTable kTable{"scalar", &dot, &axpy, &sum_squares, &masked_weighted_sse};
    return kTable;
}

}  // namespace ajk::kernels::scalar
