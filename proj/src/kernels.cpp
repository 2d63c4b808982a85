#include "sac/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sac::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Table* avx2_table_impl();
#endif

const Table* avx2_table() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_table_impl();
#endif
    return nullptr;
}

namespace {

const Table* select() {
    if (const char* env = std::getenv("SACLAB_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return &scalar_table();
        if (want == "avx2") {
            const Table* t = avx2_table();
            if (!t) throw std::runtime_error("SACLAB_KERNELS=avx2 but AVX2+FMA unavailable");
            return t;
        }
        throw std::runtime_error("unknown SACLAB_KERNELS value: " + want);
    }
    if (const Table* t = avx2_table()) return t;
    return &scalar_table();
}

}  // namespace

const Table& active() {
    static const Table* chosen = select();
    return *chosen;
}

std::string backend_name() { return active().name; }

}  // namespace sac::kernels
