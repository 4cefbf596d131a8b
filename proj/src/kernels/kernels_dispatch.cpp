#include "ajk/kernels/kernels.hpp"

#include "ajk/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace ajk::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(AJK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* table_for(Backend backend) {
    switch (backend) {
    case Backend::Scalar:
        return &scalar::table();
    case Backend::Avx2:
#if defined(AJK_HAVE_AVX2)
        return cpu_has_avx2() ? &avx2::table() : nullptr;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

Backend initial_backend() {
    if (const char* env = std::getenv("AJK_KERNELS")) {
        const std::string_view choice{env};
        if (choice == "scalar") return Backend::Scalar;
        if (choice == "avx2" && table_for(Backend::Avx2) != nullptr) return Backend::Avx2;
    }
    return table_for(Backend::Avx2) != nullptr ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{table_for(initial_backend())};
    return table;
}

}  // namespace

bool backend_available(Backend backend) {
    return table_for(backend) != nullptr;
}

Backend active_backend() {
    return current().load() == &scalar::table() ? Backend::Scalar : Backend::Avx2;
}

void set_backend(Backend backend) {
    const KernelTable* table = table_for(backend);
    if (table == nullptr) throw DomainError("kernel backend not available on this build/CPU");
    current().store(table);
}

const KernelTable& active() {
    return *current().load(std::memory_order_relaxed);
}

}  // namespace ajk::kernels
