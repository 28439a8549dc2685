#include "loopcoh/f2/kernels.hpp"

#if defined(__ARM_NEON) && defined(__aarch64__)

#include <arm_neon.h>

#include <bit>

namespace loopcoh::f2 {
namespace {

void xor_into_neon(Word* dst, const Word* src, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_u64(dst + i, veorq_u64(vld1q_u64(dst + i), vld1q_u64(src + i)));
    for (; i < n; ++i)
        dst[i] ^= src[i];
}

std::size_t popcount_neon(const Word* row, std::size_t n)
{
    std::size_t total = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint8x16_t bytes = vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(row + i)));
        total += vaddvq_u8(bytes);
    }
    for (; i < n; ++i)
        total += static_cast<std::size_t>(std::popcount(row[i]));
    return total;
}

bool is_zero_neon(const Word* row, std::size_t n)
{
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vorrq_u64(acc, vld1q_u64(row + i));
    Word folded = vgetq_lane_u64(acc, 0) | vgetq_lane_u64(acc, 1);
    for (; i < n; ++i)
        folded |= row[i];
    return folded == 0;
}

constexpr RowKernels kNeon{SimdLevel::neon, xor_into_neon, popcount_neon, is_zero_neon};

}  // namespace

const RowKernels* neon_kernels()
{
    return &kNeon;
}

}  // namespace loopcoh::f2

#else

namespace loopcoh::f2 {
const RowKernels* neon_kernels()
{
    return nullptr;
}
}  // namespace loopcoh::f2

#endif
