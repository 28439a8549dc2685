#include "doctest.h"

#include "loopcoh/f2/bit_matrix.hpp"
#include "loopcoh/f2/kernels.hpp"

#include <random>
#include <vector>

using namespace loopcoh::f2;

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double density)
{
    std::bernoulli_distribution bit(density);
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (bit(rng))
                m.set(r, c);
    return m;
}

// Rank by textbook elimination on bool vectors; shares no code with the
// packed implementation.
std::size_t naive_rank(const BitMatrix& m)
{
    std::vector<std::vector<bool>> a(m.rows(), std::vector<bool>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            a[r][c] = m.get(r, c);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < a.size(); ++c) {
        std::size_t p = rank;
        while (p < a.size() && !a[p][c])
            ++p;
        if (p == a.size())
            continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = 0; r < a.size(); ++r)
            if (r != rank && a[r][c])
                for (std::size_t k = 0; k < m.cols(); ++k)
                    a[r][k] = a[r][k] ^ a[rank][k];
        ++rank;
    }
    return rank;
}

struct LevelGuard {
    SimdLevel saved = active_kernels().level;
    ~LevelGuard() { set_active_level(saved); }
};

}  // namespace

TEST_CASE("scalar kernels are always available")
{
    auto levels = available_levels();
    REQUIRE(!levels.empty());
    CHECK(levels.front() == SimdLevel::scalar);
    CHECK(level_name(SimdLevel::scalar) == "scalar");
}

TEST_CASE("every SIMD variant agrees with the scalar reference")
{
    std::mt19937_64 rng(7);
    const auto& ref = scalar_kernels();
    std::vector<const RowKernels*> variants;
    if (auto* k = avx2_kernels())
        variants.push_back(k);
    if (auto* k = neon_kernels())
        variants.push_back(k);
    for (const RowKernels* k : variants) {
        CAPTURE(level_name(k->level));
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 64u, 67u}) {
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<Word> a(n), b(n);
                for (auto& w : a)
                    w = rng();
                for (auto& w : b)
                    w = trial % 3 == 0 ? 0 : rng();
                auto ra = a;
                ref.xor_into(ra.data(), b.data(), n);
                auto va = a;
                k->xor_into(va.data(), b.data(), n);
                CHECK(ra == va);
                CHECK(ref.popcount(a.data(), n) == k->popcount(a.data(), n));
                CHECK(ref.is_zero(b.data(), n) == k->is_zero(b.data(), n));
            }
        }
    }
}

TEST_CASE("rank matches a naive elimination under every kernel level")
{
    LevelGuard guard;
    std::mt19937_64 rng(11);
    for (SimdLevel level : available_levels()) {
        set_active_level(level);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t rows = 1 + rng() % 90, cols = 1 + rng() % 300;
            auto m = random_matrix(rng, rows, cols, trial % 2 ? 0.05 : 0.4);
            CHECK(rank(m) == naive_rank(m));
        }
    }
}

TEST_CASE("dense and sparse rank agree")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = random_matrix(rng, 1 + rng() % 120, 1 + rng() % 200, 0.03 + 0.01 * (trial % 10));
        CHECK(rank(m) == rank_sparse(to_sparse(m)));
        CHECK(rank_auto(m, 0) == rank(m));
    }
}

TEST_CASE("left kernel vectors annihilate and have the right count")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = random_matrix(rng, 1 + rng() % 70, 1 + rng() % 70, 0.2);
        auto k = left_kernel(m);
        CHECK(k.rows() == m.rows() - rank(m));
        CHECK(k.multiply(m).is_zero());
        CHECK(rank(k) == k.rows());
    }
}

TEST_CASE("transpose preserves rank and round-trips")
{
    std::mt19937_64 rng(9);
    auto m = random_matrix(rng, 77, 130, 0.3);
    CHECK(m.transposed().transposed() == m);
    CHECK(rank(m.transposed()) == rank(m));
}

TEST_CASE("incremental basis tracks span membership")
{
    IncrementalBasis basis(10);
    BitVector a(10), b(10), c(10);
    a.set(1);
    a.set(4);
    b.set(4);
    b.set(9);
    c = a;
    c ^= b;
    CHECK(basis.insert(a));
    CHECK(basis.insert(b));
    CHECK(basis.contains(c));
    CHECK_FALSE(basis.insert(c));
    CHECK(basis.rank() == 2);
    BitVector e(10);
    e.set(0);
    CHECK_FALSE(basis.contains(e));
}

TEST_CASE("row space is reduced echelon")
{
    BitMatrix m(3, 4);
    m.set(0, 0);
    m.set(0, 1);
    m.set(1, 1);
    m.set(2, 0);
    auto rs = row_space(m);
    CHECK(rs.rows() == 2);
    CHECK(rs.get(0, 0));
    CHECK_FALSE(rs.get(0, 1));
    CHECK(rs.get(1, 1));
}
