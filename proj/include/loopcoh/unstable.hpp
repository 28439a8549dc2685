#pragma once

#include "loopcoh/errors.hpp"
#include "loopcoh/f2/bit_matrix.hpp"
#include "loopcoh/steenrod.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace loopcoh::unstable {

// Multiset of EM-space dimensions: Z = K(Z/2, m_1) x ... x K(Z/2, m_r).
struct EMSpaceSpec {
    std::vector<int> factors;

    // "2,3*2" -> {2, 3, 3}. An empty string or "point" is the one-point space.
    static EMSpaceSpec parse(std::string_view text);
    std::string to_string() const;
    bool is_point() const { return factors.empty(); }

    friend bool operator==(const EMSpaceSpec&, const EMSpaceSpec&) = default;
};

// One tensor factor of a free unstable algebra: H*(K(Z/2, base_degree)).
// base_degree 0 is H^0 of the two-point space, a single degree-0 idempotent.
struct FactorSpec {
    int base_degree = 1;
    std::string symbol;
};

struct AlgebraGenerator {
    std::size_t factor = 0;
    steenrod::AdmissibleMonomial op;
    int degree = 0;
    std::string name;

    bool idempotent() const { return degree == 0; }
};

// Sq^I i_m for admissible I of excess < m and m + |I| <= D, sorted by degree
// then operation. `factor` is left 0.
std::vector<AlgebraGenerator> em_generators(int m, int D);

struct GenPower {
    std::uint32_t gen;
    std::uint32_t exp;
    friend auto operator<=>(const GenPower&, const GenPower&) = default;
};

// Sparse exponent vector, sorted by generator index, no zero exponents.
struct Monomial {
    int degree = 0;
    std::vector<GenPower> powers;

    bool is_one() const { return powers.empty(); }
    std::uint32_t exponent(std::uint32_t gen) const;
    bool is_square() const;
    std::size_t total_exponent() const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.powers == b.powers; }
    friend auto operator<=>(const Monomial& a, const Monomial& b)
    {
        if (auto c = a.degree <=> b.degree; c != 0)
            return c;
        return a.powers <=> b.powers;
    }
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const noexcept;
};

// Graded order, then lexicographic on dense exponent vectors.
bool graded_lex_less(const Monomial& a, const Monomial& b);

// F2-linear combination of monomials.
class MonoSum {
public:
    void toggle(const Monomial& m);
    void add(const MonoSum& other);
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    bool contains(const Monomial& m) const { return terms_.contains(m); }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }
    friend bool operator==(const MonoSum&, const MonoSum&) = default;

private:
    std::set<Monomial> terms_;
};

// Homogeneous element: a MonoSum all of whose terms have degree `degree`.
struct Element {
    int degree = 0;
    MonoSum terms;

    bool is_zero() const { return terms.empty(); }
    friend bool operator==(const Element&, const Element&) = default;
};

Element operator+(const Element& a, const Element& b);

// Polynomial algebra on the Serre generators of a product of H*(K(Z/2, m))'s,
// truncated at degree `cutoff`. Every operation is exact through the cutoff
// and throws CutoffExceeded rather than produce a class above it.
class FreeUnstableAlgebra {
public:
    FreeUnstableAlgebra(std::vector<FactorSpec> factors, int cutoff);
    static FreeUnstableAlgebra from_spec(const EMSpaceSpec& spec, int cutoff);

    int cutoff() const { return cutoff_; }
    const std::vector<FactorSpec>& factors() const { return factors_; }
    const std::vector<AlgebraGenerator>& generators() const { return gens_; }
    const AlgebraGenerator& generator(std::uint32_t g) const { return gens_.at(g); }
    std::optional<std::uint32_t> generator_index(std::size_t factor, const steenrod::AdmissibleMonomial& op) const;

    const std::vector<Monomial>& basis(int degree) const;
    std::size_t dim(int degree) const { return basis(degree).size(); }
    std::optional<std::size_t> index_of(const Monomial& m) const;
    std::vector<std::size_t> poincare_series(int D) const;

    Monomial one() const { return {}; }
    Monomial generator_monomial(std::uint32_t g) const;
    Element element(const Monomial& m) const;
    Element zero(int degree) const { return Element{degree, {}}; }
    Element unit() const { return element(one()); }

    Monomial multiply(const Monomial& a, const Monomial& b) const;
    MonoSum multiply(const MonoSum& a, const MonoSum& b) const;
    Element multiply(const Element& a, const Element& b) const;
    // Monomial m divided by one factor of generator g (g must divide m).
    Monomial divide_by_generator(const Monomial& m, std::uint32_t g) const;
    Monomial square(const Monomial& m) const;

    // Upper-index action.
    MonoSum sq(int k, const Monomial& m) const;
    Element sq(int k, const Element& x) const;
    // Lower-index action Sq_i x = Sq^{|x|-i} x; zero when i > |x| or i < 0.
    Element sq_lower(int i, const Element& x) const;

    // Sq^J applied to the fundamental class of a factor; nullopt means zero.
    // Admissible J of excess exactly m give the square of Sq^{J'} i, where J'
    // drops the leading entry.
    std::optional<Monomial> op_on_fundamental(std::size_t factor, const steenrod::AdmissibleMonomial& op) const;

    f2::BitVector to_vector(const Element& x) const;
    Element from_vector(int degree, const f2::BitVector& v) const;

    std::string to_string(const Monomial& m) const;
    std::string to_string(const Element& x) const;

private:
    void check_degree(int degree) const;
    MonoSum sq_generator(int k, std::uint32_t g) const;
    MonoSum sq_uncached(int k, const Monomial& m) const;

    std::vector<FactorSpec> factors_;
    int cutoff_;
    std::vector<AlgebraGenerator> gens_;
    std::map<std::pair<std::size_t, steenrod::AdmissibleMonomial>, std::uint32_t> gen_lookup_;
    std::vector<std::vector<Monomial>> basis_;
    std::unordered_map<Monomial, std::size_t, MonomialHash> basis_index_;

    struct SqCache;
    std::shared_ptr<SqCache> sq_cache_;
};

// Coefficientwise product of two series truncated to the shorter length.
std::vector<std::size_t> convolve(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace loopcoh::unstable
