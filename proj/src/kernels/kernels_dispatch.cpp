#include <cstdlib>
#include <cstring>

#include "hardy/kernels.hpp"

namespace hardy::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops* avx2_table_internal();
#endif

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_table_internal();
#endif
    return nullptr;
}

namespace {

struct Selection {
    const Ops* table;
    const char* name;
};

Selection select() {
    const char* env = std::getenv("HARDY_FACTOR_KERNEL");
    if (env && std::strcmp(env, "scalar") == 0) return {&scalar_ops(), "scalar"};
    const Ops* simd = avx2_ops();
    if (env && std::strcmp(env, "avx2") == 0 && simd) return {simd, "avx2"};
    if (env && env[0] != '\0' && std::strcmp(env, "avx2") != 0) return {&scalar_ops(), "scalar"};
    if (simd) return {simd, "avx2"};
    return {&scalar_ops(), "scalar"};
}

const Selection& selection() {
    static const Selection s = select();
    return s;
}

} // namespace

const Ops& ops() { return *selection().table; }
const char* active_name() { return selection().name; }

} // namespace hardy::kernels
