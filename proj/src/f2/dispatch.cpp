#include "loopcoh/f2/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace loopcoh::f2 {
namespace {

const RowKernels* kernels_for(SimdLevel level)
{
    switch (level) {
        case SimdLevel::scalar: return &scalar_kernels();
        case SimdLevel::avx2: return avx2_kernels();
        case SimdLevel::neon: return neon_kernels();
    }
    return nullptr;
}

const RowKernels* initial_kernels()
{
    if (const char* env = std::getenv("LOOPCOH_SIMD")) {
        std::string want(env);
        for (SimdLevel level : {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon}) {
            if (want == level_name(level)) {
                if (const RowKernels* k = kernels_for(level))
                    return k;
            }
        }
    }
    return kernels_for(detect_best_level());
}

std::atomic<const RowKernels*>& active_slot()
{
    static std::atomic<const RowKernels*> slot{initial_kernels()};
    return slot;
}

}  // namespace

SimdLevel detect_best_level()
{
    if (avx2_kernels())
        return SimdLevel::avx2;
    if (neon_kernels())
        return SimdLevel::neon;
    return SimdLevel::scalar;
}

std::vector<SimdLevel> available_levels()
{
    std::vector<SimdLevel> out{SimdLevel::scalar};
    if (avx2_kernels())
        out.push_back(SimdLevel::avx2);
    if (neon_kernels())
        out.push_back(SimdLevel::neon);
    return out;
}

const RowKernels& active_kernels()
{
    return *active_slot().load(std::memory_order_acquire);
}

void set_active_level(SimdLevel level)
{
    const RowKernels* k = kernels_for(level);
    if (!k)
        throw std::runtime_error("SIMD level '" + std::string(level_name(level)) + "' is not available on this machine");
    active_slot().store(k, std::memory_order_release);
}

std::string_view level_name(SimdLevel level)
{
    switch (level) {
        case SimdLevel::scalar: return "scalar";
        case SimdLevel::avx2: return "avx2";
        case SimdLevel::neon: return "neon";
    }
    return "unknown";
}

}  // namespace loopcoh::f2
