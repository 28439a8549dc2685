#pragma once

#include "loopcoh/borel.hpp"
#include "loopcoh/loop_algebra.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

// The functor lbar_n. Products of the symbols phi_i(a), delta(a) and w_j are
// brought to a normal form by a rewriting engine and evaluated in L_n(A);
// tau goes back the other way. At the end of the file the dimension series
// is compared with the Borel page.
namespace loopcoh::lbar {

using division::LoopAlgebra;
using unstable::Element;
using unstable::Monomial;

// ---------------------------------------------------------------------------
// Expressions

enum class SymbolKind { phi, delta, w };

// phi_index(arg), delta(arg), or w_index. `arg` lives in the source algebra A.
struct Symbol {
    SymbolKind kind = SymbolKind::w;
    int index = 0;
    Element arg;

    static Symbol phi(int i, Element a) { return {SymbolKind::phi, i, std::move(a)}; }
    static Symbol delta(Element a) { return {SymbolKind::delta, 0, std::move(a)}; }
    static Symbol w(int j) { return {SymbolKind::w, j, {}}; }
};

using Product = std::vector<Symbol>;

// Formal F2-sum of products of symbols, homogeneous of total degree `degree`
// (phi_i(a) has degree 2|a| - i, delta(a) has |a| - n, w_j has j).
struct PhiExpression {
    int degree = 0;
    std::vector<Product> products;

    bool empty() const { return products.empty(); }
};

int symbol_degree(const Symbol& s, int n);

// phi_k(h) with h an A-generator.
struct PhiAtom {
    int k = 0;
    std::uint32_t gen = 0;
    friend auto operator<=>(const PhiAtom&, const PhiAtom&) = default;
};

// A product in normal form: w exponents (w_2 .. w_{n+1}), phi atoms and
// delta atoms with multiplicities. A term never holds phi and delta atoms at
// the same time, and never w_{n+1} together with a delta atom.
struct NormalTerm {
    std::vector<int> w;
    std::map<PhiAtom, int> phi;
    std::map<Monomial, int> delta;
    friend auto operator<=>(const NormalTerm&, const NormalTerm&) = default;
};

struct NormalForm {
    int degree = 0;
    std::set<NormalTerm> terms;

    bool is_zero() const { return terms.empty(); }
    void toggle(const NormalTerm& t);
    friend bool operator==(const NormalForm&, const NormalForm&) = default;
};

class RewriteBudgetExceeded : public std::runtime_error {
public:
    explicit RewriteBudgetExceeded(std::size_t steps);
};

inline constexpr std::size_t kDefaultRewriteBudget = 1'000'000;

// Stateless apart from the algebra it reads; safe to share between threads.
class Rewriter {
public:
    explicit Rewriter(std::shared_ptr<const LoopAlgebra> L, std::size_t budget = kDefaultRewriteBudget);

    const LoopAlgebra& loop() const { return *L_; }
    int n() const { return L_->n(); }

    // phi_k(h) is kept as an atom exactly when it is one of the zeta
    // generators (see ZetaBasis).
    bool is_phi_atom(int k, std::uint32_t gen) const;
    // Leading lower index of a generator Sq^J i: m - excess(J), or m for i.
    int lower_index(std::uint32_t gen) const;
    // The generator Sq^{J'} i for Sq^J i with J' = J minus its leading entry;
    // the fundamental class maps to itself.
    std::uint32_t tail(std::uint32_t gen) const;

    NormalForm reduce(const PhiExpression& e) const;
    PhiExpression to_expression(const NormalForm& f) const;
    std::string to_string(const NormalForm& f) const;

    // Steps taken by the most recent reduce() on this thread.
    static std::size_t last_steps();

private:
    struct Work;
    void expand(const Symbol& s, std::vector<Product>& alternatives, bool& atom) const;
    void absorb(Work& item, const Symbol& s, std::vector<Work>& stack) const;

    std::shared_ptr<const LoopAlgebra> L_;
    std::size_t budget_;
    std::vector<int> lower_index_;
    std::vector<std::uint32_t> tail_;
};

// phi_i(a) -> Sq_i a (i < n), phi_n(a) -> Sq_n a + a da, delta(a) -> da.
// Throws std::invalid_argument on w symbols and CutoffExceeded above D.
Element eval_i(const LoopAlgebra& L, const PhiExpression& e);
Element eval_i(const Rewriter& R, const NormalForm& f);

// a db_1 ... db_k -> delta(a) delta(b_1) ... delta(b_k), with delta(1) = 0.
PhiExpression tau(const LoopAlgebra& L, const Element& x);

// ---------------------------------------------------------------------------
// Zeta generators

enum class ZetaFamily { squares = 1, low = 2, top = 3 };

// One free generator of lbar'_n / delta, indexed by the A-generator g it comes
// from. squares: phi_0(g), class g^2. low: phi_i(g') for g = Sq_i g', i < n,
// class g. top: phi_n(g') for g = Sq_n g', class Sq_n g' + g' dg'.
struct ZetaGenerator {
    ZetaFamily family = ZetaFamily::low;
    std::uint32_t source_gen = 0;
    PhiAtom atom;
    int degree = 0;
    std::string name;
};

class ZetaBasis {
public:
    ZetaBasis(std::shared_ptr<const LoopAlgebra> L);

    const std::vector<ZetaGenerator>& generators() const { return gens_; }
    std::size_t size() const { return gens_.size(); }
    std::vector<int> degrees() const;
    // Hilbert series of the free commutative algebra on the generators.
    std::vector<std::size_t> free_series(int D) const;
    Element representative(const ZetaGenerator& z) const;
    PhiExpression expression(const ZetaGenerator& z) const;

private:
    std::shared_ptr<const LoopAlgebra> L_;
    std::vector<ZetaGenerator> gens_;
};

std::vector<std::size_t> polynomial_series(const std::vector<int>& degrees, int D);

// ---------------------------------------------------------------------------
// Dimensions and the comparison with the Borel page

// cell(p, q): p is the w-degree, q the internal degree. Weight-p w-monomials
// without w_{n+1} carry ker d, those divisible by w_{n+1} carry the zeta
// algebra.
struct LbarTable {
    int n = 1;
    int cutoff = 0;
    std::vector<std::size_t> kernel;  // q = 0..D
    std::vector<std::size_t> zeta;    // q = 0..D
    std::map<std::pair<int, int>, std::size_t> cells;
    std::vector<std::size_t> total;   // t = 0..D
};

LbarTable lbar_dims(const LoopAlgebra& L, const std::vector<std::size_t>& zeta_series);
LbarTable lbar_dims(const unstable::EMSpaceSpec& spec, int n, int D);

// Dimension in each degree 0..D of the subalgebra of L generated by the
// evaluations of every phi_k(g) and delta(M); it sits inside ker d.
struct SubalgebraModel {
    std::vector<std::size_t> dims;
    bool generators_are_cocycles = true;
};
SubalgebraModel lprime_model(const LoopAlgebra& L);

struct SeriesComparison {
    std::string name;
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    std::optional<int> first_mismatch;
    bool pass() const { return !first_mismatch && left.size() == right.size(); }
};

SeriesComparison compare_series(std::string name, std::vector<std::size_t> left, std::vector<std::size_t> right);

struct VerifyOptions {
    unsigned jobs = 1;
    // Negative control: raise the degree of this zeta generator by one.
    std::optional<std::size_t> corrupt_zeta;
};

struct ComparisonReport {
    std::string spec;
    int n = 1;
    int cutoff = 0;
    int verified_limit = 0;
    SeriesComparison total;           // lbar series vs E_infinity series
    SeriesComparison kernel_model;    // ker d vs the generated subalgebra
    SeriesComparison zeta_homology;   // H(d) vs the zeta free algebra
    bool model_generators_are_cocycles = true;
    std::vector<std::pair<int, int>> bidegree_mismatches;
    std::size_t bidegrees_checked = 0;
    std::optional<std::string> corrupted;

    bool pass() const
    {
        return total.pass() && kernel_model.pass() && zeta_homology.pass() && model_generators_are_cocycles &&
               bidegree_mismatches.empty();
    }
};

ComparisonReport verify_against_page(const unstable::EMSpaceSpec& spec, int n, int D, const VerifyOptions& options = {});
void write_report_text(std::ostream& out, const ComparisonReport& r);
void write_report_json(std::ostream& out, const ComparisonReport& r);
nlohmann::json report_to_json(const ComparisonReport& r);
ComparisonReport report_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Random expressions

// A w-free expression of total degree `degree` with one to three products of
// one to three symbols; phi arguments have degree <= (D + n)/2, delta
// arguments degree <= D + n.
PhiExpression random_expression(const LoopAlgebra& L, int degree, std::mt19937_64& rng);

}  // namespace loopcoh::lbar
