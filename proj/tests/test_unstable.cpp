#include "doctest.h"

#include "loopcoh/unstable.hpp"
#include "oracles.hpp"

#include <random>

using namespace loopcoh;
using namespace loopcoh::unstable;
using steenrod::AdmissibleMonomial;

namespace {

Element random_element(const FreeUnstableAlgebra& A, int degree, std::mt19937_64& rng)
{
    Element x = A.zero(degree);
    for (const auto& m : A.basis(degree))
        if (rng() % 2)
            x.terms.toggle(m);
    return x;
}

std::vector<int> degrees_of(const std::vector<AlgebraGenerator>& gens)
{
    std::vector<int> out;
    for (const auto& g : gens)
        out.push_back(g.degree);
    return out;
}

}  // namespace

TEST_CASE("spec parsing")
{
    CHECK(EMSpaceSpec::parse("2,3*2").factors == std::vector<int>{2, 3, 3});
    CHECK(EMSpaceSpec::parse("3,2").factors == std::vector<int>{2, 3});
    CHECK(EMSpaceSpec::parse("").is_point());
    CHECK(EMSpaceSpec::parse("point").is_point());
    CHECK(EMSpaceSpec::parse("2,3*2").to_string() == "2,3*2");
    CHECK_THROWS_AS(EMSpaceSpec::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(EMSpaceSpec::parse("2,x"), std::invalid_argument);
    CHECK_THROWS_AS(EMSpaceSpec::parse("2,,3"), std::invalid_argument);
}

TEST_CASE("EM generators")
{
    CHECK(degrees_of(em_generators(1, 10)) == std::vector<int>{1});
    CHECK(degrees_of(em_generators(2, 9)) == std::vector<int>{2, 3, 5, 9});
    auto g3 = em_generators(3, 5);
    CHECK(degrees_of(g3) == std::vector<int>{3, 4, 5});
    CHECK(g3[2].op == AdmissibleMonomial({2}));
    for (int m = 1; m <= 6; ++m) {
        auto got = degrees_of(em_generators(m, 40));
        auto want = oracle::serre_generator_degrees(m, 40);
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
}

TEST_CASE("Poincare series")
{
    CHECK(FreeUnstableAlgebra::from_spec({}, 5).poincare_series(5) == std::vector<std::size_t>{1, 0, 0, 0, 0, 0});
    CHECK(FreeUnstableAlgebra::from_spec({{1}}, 7).poincare_series(7) == std::vector<std::size_t>(8, 1));
    CHECK(FreeUnstableAlgebra::from_spec({{2}}, 6).poincare_series(6) ==
          std::vector<std::size_t>{1, 0, 1, 1, 1, 2, 2});
    for (int m = 1; m <= 5; ++m)
        CHECK(FreeUnstableAlgebra::from_spec({{m}}, 22).poincare_series(22) == oracle::em_series(m, 22));
    auto two = FreeUnstableAlgebra::from_spec({{2, 3}}, 18).poincare_series(18);
    CHECK(two == convolve(oracle::em_series(2, 18), oracle::em_series(3, 18)));
    CHECK(two == convolve(FreeUnstableAlgebra::from_spec({{2}}, 18).poincare_series(18),
                          FreeUnstableAlgebra::from_spec({{3}}, 18).poincare_series(18)));
}

TEST_CASE("basis order is graded lexicographic")
{
    auto A = FreeUnstableAlgebra::from_spec({{2, 2}}, 12);
    for (int d = 0; d <= 12; ++d) {
        const auto& b = A.basis(d);
        for (std::size_t i = 0; i + 1 < b.size(); ++i)
            CHECK(graded_lex_less(b[i], b[i + 1]));
        for (std::size_t i = 0; i < b.size(); ++i)
            CHECK(*A.index_of(b[i]) == i);
    }
}

TEST_CASE("action on F2[x] matches binomial coefficients")
{
    auto A = FreeUnstableAlgebra::from_spec({{1}}, 30);
    for (int j = 1; j <= 15; ++j) {
        const Monomial xj{j, {{0, static_cast<std::uint32_t>(j)}}};
        for (int i = 0; i + j <= 30; ++i) {
            auto s = A.sq(i, A.element(xj));
            const bool nonzero = oracle::binom(j, i) % 2 == 1;
            CHECK(s.terms.size() == (nonzero ? 1u : 0u));
            if (nonzero)
                CHECK(s.terms.begin()->degree == i + j);
        }
    }
}

TEST_CASE("action on the K(Z/2,2) generators")
{
    auto A = FreeUnstableAlgebra::from_spec({{2}}, 12);
    auto iota = A.element(A.generator_monomial(0));
    auto sq1 = A.sq(1, iota);
    auto sq21 = A.sq(2, sq1);
    CHECK(A.to_string(sq1) == "[Sq^1(i0)]");
    CHECK(A.to_string(sq21) == "[Sq^2Sq^1(i0)]");
    // Sq^1 Sq^2 = Sq^3 kills a class of degree 2
    CHECK(A.sq(1, A.sq(2, iota)).is_zero());
    // Sq^3 Sq^1 i has excess 2 and equals (Sq^1 i)^2
    CHECK(A.sq(3, sq1) == A.multiply(sq1, sq1));
    CHECK(A.sq(2, iota) == A.multiply(iota, iota));
}

TEST_CASE("instability and unit on every basis element")
{
    for (auto spec : {EMSpaceSpec{{2}}, EMSpaceSpec{{3}}, EMSpaceSpec{{2, 3}}, EMSpaceSpec{{4}}}) {
        auto A = FreeUnstableAlgebra::from_spec(spec, 16);
        for (int d = 1; 2 * d <= 16; ++d)
            for (const auto& m : A.basis(d)) {
                auto x = A.element(m);
                CHECK(A.sq(0, x) == x);
                CHECK(A.sq(d, x) == A.multiply(x, x));
                CHECK(A.sq_lower(0, x) == A.multiply(x, x));
                CHECK(A.sq_lower(d, x) == x);
                for (int k = d + 1; k <= d + 3; ++k)
                    CHECK(A.sq(k, x).is_zero());
            }
    }
}

TEST_CASE("Cartan formula on random products")
{
    std::mt19937_64 rng(17);
    auto A = FreeUnstableAlgebra::from_spec({{2, 3}}, 18);
    for (int trial = 0; trial < 200; ++trial) {
        int dx = 1 + rng() % 7, dy = 1 + rng() % 7;
        int k = rng() % (18 - dx - dy + 1);
        auto x = random_element(A, dx, rng);
        auto y = random_element(A, dy, rng);
        Element rhs = A.zero(dx + dy + k);
        for (int i = 0; i <= k; ++i)
            rhs = rhs + A.multiply(A.sq(i, x), A.sq(k - i, y));
        CHECK(A.sq(k, A.multiply(x, y)) == rhs);
    }
}

TEST_CASE("Adem relations hold in the action")
{
    auto A = FreeUnstableAlgebra::from_spec({{2, 3}}, 20);
    for (int d = 1; d <= 10; ++d)
        for (const auto& m : A.basis(d)) {
            auto x = A.element(m);
            for (int b = 1; d + b <= 20; ++b)
                for (int a = 1; a < 2 * b && d + a + b <= 20; ++a) {
                    Element rhs = A.zero(d + a + b);
                    for (const auto& term : steenrod::adem_reduce(std::vector<int>{a, b})) {
                        Element t = x;
                        for (auto it = term.indices().rbegin(); it != term.indices().rend(); ++it)
                            t = A.sq(*it, t);
                        rhs = rhs + t;
                    }
                    CHECK(A.sq(a, A.sq(b, x)) == rhs);
                }
        }
}

TEST_CASE("truncation is explicit")
{
    auto A = FreeUnstableAlgebra::from_spec({{2}}, 6);
    auto iota = A.element(A.generator_monomial(0));
    auto cube = A.multiply(A.multiply(iota, iota), iota);
    CHECK(cube.degree == 6);
    CHECK_THROWS_AS(A.multiply(cube, iota), CutoffExceeded);
    CHECK_THROWS_AS(A.sq(3, A.multiply(iota, iota)), CutoffExceeded);
    CHECK(A.sq(5, A.multiply(iota, iota)).is_zero());
    CHECK(A.multiply(iota, A.zero(3)).is_zero());
    CHECK_THROWS_AS(iota + A.sq(1, iota), NonHomogeneous);
}

TEST_CASE("degree-zero factor is idempotent")
{
    FreeUnstableAlgebra A({{0, "e"}, {2, "i"}}, 8);
    CHECK(A.poincare_series(8) == oracle::times(oracle::em_series(0, 8), oracle::em_series(2, 8)));
    auto e = A.element(A.generator_monomial(0));
    CHECK(A.multiply(e, e) == e);
    CHECK(A.sq(0, e) == e);
}
