// Compiled with -mavx2 when the toolchain targets x86-64; callers only reach
// these functions after a runtime CPU check.
#include "loopcoh/f2/kernels.hpp"

#if defined(LOOPCOH_HAVE_AVX2)

#include <immintrin.h>

#include <bit>

namespace loopcoh::f2 {
namespace {

void xor_into_avx2(Word* dst, const Word* src, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(a, b));
    }
    for (; i < n; ++i)
        dst[i] ^= src[i];
}

// Nibble lookup popcount (Mula), reduced with sad against zero.
std::size_t popcount_avx2(const Word* row, std::size_t n)
{
    const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                            0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + i));
        __m256i lo = _mm256_and_si256(v, low_mask);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
        __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::size_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i)
        total += static_cast<std::size_t>(std::popcount(row[i]));
    return total;
}

bool is_zero_avx2(const Word* row, std::size_t n)
{
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_or_si256(acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + i)));
    if (!_mm256_testz_si256(acc, acc))
        return false;
    for (; i < n; ++i)
        if (row[i] != 0)
            return false;
    return true;
}

constexpr RowKernels kAvx2{SimdLevel::avx2, xor_into_avx2, popcount_avx2, is_zero_avx2};

}  // namespace

const RowKernels* avx2_kernels()
{
    return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

}  // namespace loopcoh::f2

#else

namespace loopcoh::f2 {
const RowKernels* avx2_kernels()
{
    return nullptr;
}
}  // namespace loopcoh::f2

#endif
