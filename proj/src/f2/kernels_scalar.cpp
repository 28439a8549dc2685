#include "loopcoh/f2/kernels.hpp"

#include <bit>

namespace loopcoh::f2 {
namespace {

void xor_into_scalar(Word* dst, const Word* src, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        dst[i] ^= src[i];
}

std::size_t popcount_scalar(const Word* row, std::size_t n)
{
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i)
        total += static_cast<std::size_t>(std::popcount(row[i]));
    return total;
}

bool is_zero_scalar(const Word* row, std::size_t n)
{
    Word acc = 0;
    for (std::size_t i = 0; i < n; ++i)
        acc |= row[i];
    return acc == 0;
}

constexpr RowKernels kScalar{SimdLevel::scalar, xor_into_scalar, popcount_scalar, is_zero_scalar};

}  // namespace

const RowKernels& scalar_kernels()
{
    return kScalar;
}

}  // namespace loopcoh::f2
