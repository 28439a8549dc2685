#pragma once

#include "loopcoh/f2/bit_matrix.hpp"
#include "loopcoh/steenrod.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

// Division of unstable modules and algebras by a finite module N. The
// generators d_f(v) carry a Steenrod action computed through the dual module;
// beta bounds how many top squares that computation needs.
namespace loopcoh::division {

struct BasisElement {
    int degree = 0;
    std::string label;
    std::string dual_label;
};

// Finite unstable module with an explicit basis. Optionally carries a
// commutative multiplication (needed for the comultiplication on the dual).
class FiniteModule {
public:
    FiniteModule(std::string name, std::vector<BasisElement> basis);

    const std::string& name() const { return name_; }
    const std::vector<BasisElement>& basis() const { return basis_; }
    std::size_t size() const { return basis_.size(); }
    int degree(std::size_t b) const { return basis_.at(b).degree; }
    int top_degree() const;
    bool empty() const { return basis_.empty(); }

    // Sq^i b = sum of `targets`. Unset actions are zero; Sq^0 is the identity.
    void set_action(int i, std::size_t b, std::vector<std::size_t> targets);
    f2::BitVector sq(int i, std::size_t b) const;
    f2::BitVector sq(int i, const f2::BitVector& v) const;
    // x applied to v; the rightmost square acts first.
    f2::BitVector apply(const steenrod::AdmissibleMonomial& x, const f2::BitVector& v) const;
    f2::BitVector unit_vector(std::size_t b) const;

    void set_product(std::size_t a, std::size_t b, std::vector<std::size_t> targets);
    bool has_products() const { return has_products_; }
    f2::BitVector product(std::size_t a, std::size_t b) const;

    // Throws std::logic_error unless squares raise degree correctly, respect
    // instability and satisfy every Adem relation on every basis element.
    void validate() const;

private:
    std::string name_;
    std::vector<BasisElement> basis_;
    std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> action_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> products_;
    bool has_products_ = false;
};

// Built-ins: sigma<k> = one class in degree k; sphere<n> = H*(S^n) with dual
// basis {1, d}; rp<k> = H*(RP^k) for k <= 8; rpinf<K> = H*(RP^infinity)
// truncated above degree K.
FiniteModule suspension(int k);
FiniteModule sphere(int n);
FiniteModule real_projective(int k);
FiniteModule rp_infinity_truncated(int K);
FiniteModule builtin_module(const std::string& name);
std::vector<std::string> builtin_module_names();

// N* with the dual basis in negated degrees. The right action is
// fSq^i = f o Sq^i.
class DualModule {
public:
    explicit DualModule(const FiniteModule& N);

    const FiniteModule& module() const { return *N_; }
    std::size_t size() const { return N_->size(); }
    int degree(std::size_t f) const { return -N_->degree(f); }
    const std::string& label(std::size_t f) const { return N_->basis()[f].dual_label; }

    f2::BitVector right_action(std::size_t f, int i) const;
    bool pairing(std::size_t f, std::size_t y) const { return f == y; }
    // Delta(f) = sum over basis pairs (y, z) with f(yz) = 1 of y* (x) z*.
    std::vector<std::pair<std::size_t, std::size_t>> comultiply(std::size_t f) const;

private:
    std::shared_ptr<const FiniteModule> N_;
};

DualModule dualize(const FiniteModule& N);

struct NamedClass {
    std::string name;
    int degree = 0;
};

struct DividedGenerator {
    std::string name;
    int degree = 0;
    std::size_t v = 0;
    std::size_t f = 0;
};

// Generators d_f(v) of F(V) : N = F(V (x) N*); negative degrees are dropped.
std::vector<DividedGenerator> divide_free(const std::vector<NamedClass>& V, const FiniteModule& N);

// <x, N>: largest degree on which x acts nonzero; 0 when x annihilates N.
int bracket(const steenrod::AdmissibleMonomial& x, const FiniteModule& N);
bool annihilates(const steenrod::AdmissibleMonomial& x, const FiniteModule& N);

// beta_N(x); nullopt stands for -infinity. Memoized per table; the table may
// be shared between threads.
class BetaTable {
public:
    explicit BetaTable(FiniteModule N) : N_(std::move(N)) {}
    std::optional<int> beta(const steenrod::AdmissibleMonomial& x);
    std::optional<int> beta(const steenrod::SteenrodSum& x);
    std::size_t memo_size() const;
    const FiniteModule& module() const { return N_; }

private:
    FiniteModule N_;
    mutable std::mutex mutex_;
    std::map<steenrod::AdmissibleMonomial, std::optional<int>> memo_;
};

struct BetaRow {
    steenrod::AdmissibleMonomial x;
    std::optional<int> value;
};

// beta for every admissible monomial of degree <= top(N).
std::vector<BetaRow> beta_table(const FiniteModule& N);
void write_beta_csv(std::ostream& out, const std::vector<BetaRow>& rows);

// Sq^i d_f(v) for v a class of degree `v_degree` in a free unstable module,
// written as a sum of d_g(Sq^a v). `consulted` holds every lower index
// |v| - a for which the expansion needed Sq^a v with 0 < a <= |v|.
struct DividedSquare {
    std::set<std::pair<std::size_t, int>> terms;  // (g, a) for d_g(Sq^a v)
    std::set<int> consulted;
};

DividedSquare sq_on_divided(const FiniteModule& N, int i, std::size_t f, int v_degree);

struct PresentationSource {
    std::vector<NamedClass> generators;
    // Relations of M as literal "lhs = rhs" text over generator names.
    std::vector<std::string> relations;
    bool is_algebra = false;
};

// Plain-text presentation of M : N. GEN lines then REL lines; schematic
// relations appear as '#' comments.
void emit_presentation(std::ostream& out, const PresentationSource& M, const FiniteModule& N);

}  // namespace loopcoh::division
