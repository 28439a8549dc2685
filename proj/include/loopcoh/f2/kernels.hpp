#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace loopcoh::f2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

enum class SimdLevel { scalar, avx2, neon };

// Row primitives for bit-packed F2 matrices. Every variant must agree bit for
// bit with the scalar reference; tests/test_f2.cpp checks this on random rows.
struct RowKernels {
    SimdLevel level;
    void (*xor_into)(Word* dst, const Word* src, std::size_t n);
    std::size_t (*popcount)(const Word* row, std::size_t n);
    bool (*is_zero)(const Word* row, std::size_t n);
};

const RowKernels& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks support.
const RowKernels* avx2_kernels();
const RowKernels* neon_kernels();

// Kernels used by the elimination routines. Initialised from LOOPCOH_SIMD
// (scalar|avx2|neon) if set, otherwise the best level the CPU supports.
const RowKernels& active_kernels();
void set_active_level(SimdLevel level);
SimdLevel detect_best_level();
std::vector<SimdLevel> available_levels();

std::string_view level_name(SimdLevel level);

}  // namespace loopcoh::f2
