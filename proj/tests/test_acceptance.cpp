// Prints one PASS or FAIL line per acceptance criterion and exits nonzero if
// any of them fails. Expected values come from the oracles in oracles.hpp or
// from small computations written out here, never from the code under test.

#include "loopcoh/borel.hpp"
#include "loopcoh/division.hpp"
#include "loopcoh/lbar.hpp"
#include "loopcoh/steenrod.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace loopcoh;
using steenrod::AdmissibleMonomial;
using unstable::Element;
using unstable::EMSpaceSpec;

namespace {

struct Tally {
    long checked = 0;
    long failed = 0;
    std::string first_failure;

    void expect(bool ok, const std::string& what)
    {
        ++checked;
        if (ok)
            return;
        if (failed++ == 0)
            first_failure = what;
    }
};

std::string series_text(const std::vector<std::size_t>& s)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < s.size(); ++i)
        os << (i ? "," : "") << s[i];
    return os.str();
}

Element random_element(const unstable::FreeUnstableAlgebra& A, int degree, std::mt19937_64& rng)
{
    Element x = A.zero(degree);
    for (const auto& m : A.basis(degree))
        if (rng() % 2)
            x.terms.toggle(m);
    return x;
}

std::vector<std::size_t> mapping_series_by_admissibles(const std::vector<int>& spec, int n, int D)
{
    auto em = [D](int m) {
        if (m == 0)
            return oracle::polynomial_series({0}, D);
        return oracle::polynomial_series(oracle::admissible_generator_degrees(m, D), D);
    };
    std::vector<std::size_t> s(static_cast<std::size_t>(D) + 1, 0);
    s[0] = 1;
    for (int m : spec) {
        s = oracle::times(s, em(m));
        if (m - n >= 0)
            s = oracle::times(s, em(m - n));
    }
    return s;
}

// 1. Graded dimensions of the loop algebra against the mapping-space oracle.
Tally criterion_mapping_space()
{
    Tally t;
    for (int n : {1, 3})
        for (int m = n + 1; m <= n + 3; ++m) {
            const int D = 3 * (n + 3);
            division::LoopAlgebra L(EMSpaceSpec{{m}}, n, D);
            const auto got = L.dims();
            const auto want = mapping_series_by_admissibles({m}, n, D);
            t.expect(got == want, "n=" + std::to_string(n) + " m=" + std::to_string(m) + ": " + series_text(got) +
                                      " vs " + series_text(want));
            // The two oracle routes agree with each other as well.
            t.expect(want == oracle::mapping_space_series({m}, n, D), "oracles disagree at m=" + std::to_string(m));
        }
    return t;
}

// 2. The lbar dimension series against the cohomology of the Borel page.
Tally criterion_page_comparison()
{
    Tally t;
    for (int n : {1, 3}) {
        const int D = 4 * (n + 1);
        for (auto spec : {EMSpaceSpec{{n + 1}}, EMSpaceSpec{{n + 2}}, EMSpaceSpec{{n + 1, n + 1}}}) {
            const auto r = lbar::verify_against_page(spec, n, D, {.jobs = 2});
            const std::string tag = "n=" + std::to_string(n) + " spec=" + spec.to_string();
            t.expect(r.verified_limit >= 0 && r.total.left.size() == static_cast<std::size_t>(r.verified_limit) + 1,
                     tag + ": empty verified region");
            t.expect(r.total.pass(), tag + ": total series");
            t.expect(r.kernel_model.pass(), tag + ": ker d vs generated subalgebra");
            t.expect(r.zeta_homology.pass(), tag + ": H(d) vs zeta algebra");
            t.expect(r.model_generators_are_cocycles, tag + ": model generators");
            t.expect(r.bidegree_mismatches.empty(), tag + ": bidegree cells");
        }
    }
    return t;
}

// 3. The differential on the page for spec (n+1).
Tally criterion_page_differential()
{
    Tally t;
    for (int n : {1, 3}) {
        const int D = 4 * (n + 1);
        const auto page = borel::build_page(EMSpaceSpec{{n + 1}}, n, D);
        const auto& L = page.loop();
        const auto& LA = L.algebra();
        const std::string tag = "n=" + std::to_string(n);

        std::size_t nonzero_rows = 0;
        auto position = [](const auto& list, const auto& item) -> std::size_t {
            return static_cast<std::size_t>(std::find(list.begin(), list.end(), item) - list.begin());
        };

        for (std::uint32_t g = 0; g < LA.generators().size(); ++g) {
            const auto gm = LA.generator_monomial(g);
            const int q = gm.degree;
            const std::size_t row_l = position(LA.basis(q), gm);
            for (int p = 0; p + q <= D; ++p) {
                const auto& wb = page.w_basis(p);
                const auto d = page.differential(p, q);
                for (std::size_t iw = 0; iw < wb.size(); ++iw) {
                    const auto row = d.row_vector(iw * LA.dim(q) + row_l);
                    const std::string where = tag + " " + LA.to_string(gm) + " (x) " + wb[iw].to_string();
                    if (L.is_da_type(g) || q - n < 0) {
                        t.expect(row.count() == 0, where + ": d should vanish");
                        continue;
                    }
                    // d(a (x) w) = da (x) w w_{n+1}
                    const auto da = L.d_of_source_generator(L.source_generator(g));
                    auto w = wb[iw];
                    w.exponents.back() += 1;
                    const std::size_t iw_target = position(page.w_basis(p + n + 1), w);
                    f2::BitVector want(row.size());
                    for (const auto& m : da.terms)
                        want.set(iw_target * LA.dim(q - n) + position(LA.basis(q - n), m));
                    t.expect(row == want, where + ": d(a (x) w) differs from da (x) w w_{n+1}");
                    nonzero_rows += want.count() > 0;
                }
            }
        }
        t.expect(nonzero_rows > 0, tag + ": no a-type generator was checked");
        // Pure w classes sit in q = 0, where nothing has anywhere to go.
        for (int p = 0; p <= D; ++p) {
            const auto d = page.differential(p, 0);
            for (std::size_t r = 0; r < d.rows(); ++r)
                t.expect(d.row_vector(r).count() == 0, tag + ": d(w) nonzero at p=" + std::to_string(p));
        }
        for (int p = 0; p <= D; ++p)
            for (int q = 0; p + q <= D; ++q) {
                if (!page.has_cell(p + 2 * (n + 1), q - 2 * n))
                    continue;
                const auto d1 = page.differential(p, q);
                const auto d2 = page.differential(p + n + 1, q - n);
                t.expect(d1.multiply(d2).is_zero(),
                         tag + ": d^2 at (" + std::to_string(p) + "," + std::to_string(q) + ")");
            }
    }
    return t;
}

// 4. Beta invariants.
Tally criterion_beta()
{
    Tally t;
    division::BetaTable rp4(division::real_projective(4));
    const std::vector<std::pair<std::vector<int>, int>> finite = {{{}, 7}, {{1}, 3}, {{2}, 3}, {{2, 1}, 1}};
    for (int d = 0; d <= 10; ++d)
        for (const auto& x : steenrod::admissible_of_degree(d)) {
            std::optional<int> want;
            for (const auto& [word, value] : finite)
                if (x.indices() == word)
                    want = value;
            t.expect(rp4.beta(x) == want, "RP^4 beta of " + x.to_string());
        }
    for (int k = 0; k <= 8; ++k) {
        division::BetaTable sigma(division::suspension(k));
        t.expect(sigma.beta(AdmissibleMonomial()) == k, "suspension " + std::to_string(k) + ": beta(1)");
        for (int d = 1; d <= 8; ++d)
            for (const auto& x : steenrod::admissible_of_degree(d))
                t.expect(!sigma.beta(x).has_value(), "suspension " + std::to_string(k) + ": beta of " + x.to_string());
    }
    for (const auto& name : division::builtin_module_names()) {
        const auto N = division::builtin_module(name);
        const int c = division::bracket(AdmissibleMonomial(), N);
        if (c <= 0)
            continue;
        const auto b = division::BetaTable(N).beta(AdmissibleMonomial());
        t.expect(b && c <= *b && *b <= 2 * c - 1, name + ": beta(1) outside [c, 2c-1]");
    }
    return t;
}

// 5. Squares on divided classes never look at lower-index squares above
// k + beta(1).
Tally criterion_top_squares()
{
    Tally t;
    for (const auto& name : division::builtin_module_names()) {
        const auto N = division::builtin_module(name);
        const auto b1 = division::BetaTable(N).beta(AdmissibleMonomial());
        t.expect(b1.has_value(), name + ": beta(1) is -inf");
        if (!b1)
            continue;
        for (int v = 0; v <= 20; ++v)
            for (std::size_t f = 0; f < N.size(); ++f) {
                const int deg = v - N.degree(f);
                for (int i = 0; i <= deg; ++i) {
                    const int k = deg - i;  // Sq^i = Sq_k on d_f(v)
                    const auto r = division::sq_on_divided(N, i, f, v);
                    t.expect(r.consulted.empty() || *r.consulted.rbegin() <= k + *b1,
                             name + ": |v|=" + std::to_string(v) + " Sq_" + std::to_string(k));
                }
            }
    }
    return t;
}

// 6. Rewriting soundness on random expressions.
Tally criterion_rewriting()
{
    Tally t;
    std::mt19937_64 rng(20261016);
    for (int n : {1, 3}) {
        const int D = 4 * (n + 1);
        for (auto spec : {EMSpaceSpec{{n + 1}}, EMSpaceSpec{{n + 2}}, EMSpaceSpec{{n + 1, n + 1}}}) {
            auto L = std::make_shared<const division::LoopAlgebra>(spec, n, D);
            lbar::Rewriter R(L);
            const std::string tag = "n=" + std::to_string(n) + " spec=" + spec.to_string();
            int done = 0, nonzero = 0;
            while (done < 1000) {
                const int degree = std::uniform_int_distribution<int>(0, D)(rng);
                const auto e = lbar::random_expression(*L, degree, rng);
                if (e.empty())
                    continue;
                ++done;
                try {
                    const auto f = R.reduce(e);
                    t.expect(lbar::Rewriter::last_steps() <= lbar::kDefaultRewriteBudget, tag + ": budget");
                    const auto before = lbar::eval_i(*L, e);
                    t.expect(before == lbar::eval_i(R, f), tag + ": eval changed, got " + R.to_string(f));
                    nonzero += !before.is_zero();
                } catch (const lbar::RewriteBudgetExceeded&) {
                    t.expect(false, tag + ": budget exceeded");
                }
            }
            // Guard against a generator that only ever produces zero.
            t.expect(nonzero >= 300, tag + ": only " + std::to_string(nonzero) + " nonzero expressions");
        }
    }
    return t;
}

// 7. Steenrod algebra and action properties.
Tally criterion_steenrod()
{
    Tally t;
    // Adem reduction: both rewrite orders agree, the result is a fixed point,
    // and every admissible monomial is already reduced.
    for (int a = 1; a <= 10; ++a)
        for (int b = 1; b <= 10; ++b)
            for (int c = 0; c <= 10; ++c) {
                const std::vector<int> w = c ? std::vector<int>{a, b, c} : std::vector<int>{a, b};
                const auto left = steenrod::adem_reduce(w, steenrod::RewriteOrder::leftmost);
                const auto right = steenrod::adem_reduce(w, steenrod::RewriteOrder::rightmost);
                t.expect(left == right, "Adem confluence");
                t.expect(steenrod::adem_reduce(left) == left, "Adem idempotence");
            }
    for (int d = 0; d <= 16; ++d)
        for (const auto& x : steenrod::admissible_of_degree(d))
            t.expect(steenrod::adem_reduce(x.indices()) == steenrod::SteenrodSum(x), "admissible not fixed");

    std::mt19937_64 rng(7);
    const int D = 18;
    const auto A = unstable::FreeUnstableAlgebra::from_spec(EMSpaceSpec{{2, 3}}, D);
    for (int d = 0; 2 * d <= D; ++d)
        for (const auto& m : A.basis(d)) {
            const auto x = A.element(m);
            t.expect(A.sq(0, x) == x, "Sq^0 = id");
            t.expect(A.sq(d, x) == A.multiply(x, x), "top square is the square");
            for (int k = d + 1; d + k <= D; ++k)
                t.expect(A.sq(k, x).is_zero(), "instability");
        }
    for (int trial = 0; trial < 300; ++trial) {
        const int dx = 1 + static_cast<int>(rng() % 7), dy = 1 + static_cast<int>(rng() % 7);
        const int k = static_cast<int>(rng() % (D - dx - dy + 1));
        const auto x = random_element(A, dx, rng), y = random_element(A, dy, rng);
        Element rhs = A.zero(dx + dy + k);
        for (int i = 0; i <= k; ++i)
            rhs = rhs + A.multiply(A.sq(i, x), A.sq(k - i, y));
        t.expect(A.sq(k, A.multiply(x, y)) == rhs, "Cartan formula");
    }
    // The action satisfies the Adem relations.
    for (int d = 1; d <= 8; ++d)
        for (const auto& m : A.basis(d)) {
            const auto x = A.element(m);
            for (int b = 1; d + b <= D; ++b)
                for (int a = 1; a < 2 * b && d + a + b <= D; ++a) {
                    Element rhs = A.zero(d + a + b);
                    for (const auto& term : steenrod::adem_reduce(std::vector<int>{a, b})) {
                        Element y = x;
                        for (auto it = term.indices().rbegin(); it != term.indices().rend(); ++it)
                            y = A.sq(*it, y);
                        rhs = rhs + y;
                    }
                    t.expect(A.sq(a, A.sq(b, x)) == rhs, "Adem relation in the action");
                }
        }
    // Sq commutes with d on the loop algebra.
    for (int n : {1, 3}) {
        division::LoopAlgebra L(EMSpaceSpec{{n + 1, n + 2}}, n, 14);
        const auto& LA = L.algebra();
        for (int q = 0; q <= 14; ++q)
            for (const auto& m : LA.basis(q)) {
                const auto x = LA.element(m);
                t.expect(L.sq(0, x) == x, "Sq^0 = id on L");
                for (int k = 1; q + k <= 14; ++k)
                    t.expect(L.sq(k, L.d(x)) == L.d(L.sq(k, x)), "Sq d = d Sq");
            }
    }
    return t;
}

// 8. n = 1, spec (2), D = 12: lbar total series equals the E_infinity series.
Tally criterion_n1_regression()
{
    Tally t;
    const int n = 1, D = 12;
    const EMSpaceSpec spec{{2}};
    auto L = std::make_shared<const division::LoopAlgebra>(spec, n, D);
    const auto page = borel::cohomology(borel::BigradedPage(L));
    const auto einf = borel::gr_poincare(page);
    auto lbar_total = lbar::lbar_dims(spec, n, D).total;
    lbar_total.resize(einf.size());
    t.expect(!einf.empty(), "empty verified region");
    t.expect(lbar_total == einf, "lbar " + series_text(lbar_total) + " vs E_infinity " + series_text(einf));
    return t;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Tally()>>> criteria = {
        {"loop algebra dimensions equal the mapping-space oracle", criterion_mapping_space},
        {"lbar series equals the Borel page cohomology, both sub-comparisons", criterion_page_comparison},
        {"page differential is da (x) w_{n+1} on generators, d^2 = 0", criterion_page_differential},
        {"beta values for RP^4 and suspensions, beta(1) bounds", criterion_beta},
        {"divided squares stay within k + beta(1)", criterion_top_squares},
        {"rewriting preserves evaluation within budget", criterion_rewriting},
        {"Steenrod algebra and action properties", criterion_steenrod},
        {"n = 1 regression for K(Z/2,2) through degree 12", criterion_n1_regression},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Tally t;
        try {
            t = criteria[i].second();
        } catch (const std::exception& e) {
            t.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = t.failed == 0 && t.checked > 0;
        failures += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << t.checked << " checks";
        if (!ok)
            std::cout << ", " << t.failed << " failed, first: " << t.first_failure;
        std::cout << ", " << static_cast<int>(secs * 1000) << " ms)" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
