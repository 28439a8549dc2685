#include "loopcoh/lbar.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace loopcoh::lbar {

namespace {
thread_local std::size_t g_last_steps = 0;
}

int symbol_degree(const Symbol& s, int n)
{
    switch (s.kind) {
    case SymbolKind::phi:
        return 2 * s.arg.degree - s.index;
    case SymbolKind::delta:
        return s.arg.degree - n;
    case SymbolKind::w:
        return s.index;
    }
    return 0;
}

void NormalForm::toggle(const NormalTerm& t)
{
    if (auto it = terms.find(t); it != terms.end())
        terms.erase(it);
    else
        terms.insert(t);
}

RewriteBudgetExceeded::RewriteBudgetExceeded(std::size_t steps)
    : std::runtime_error("rewriting did not terminate within " + std::to_string(steps) +
                         " steps; the reduction order is broken")
{
}

struct Rewriter::Work {
    NormalTerm acc;
    Product pending;
};

Rewriter::Rewriter(std::shared_ptr<const LoopAlgebra> L, std::size_t budget) : L_(std::move(L)), budget_(budget)
{
    const auto& A = L_->source();
    for (std::uint32_t g = 0; g < A.generators().size(); ++g) {
        const auto& gen = A.generator(g);
        const int m = A.factors()[gen.factor].base_degree;
        lower_index_.push_back(gen.op.is_identity() ? m : m - gen.op.excess());
        tail_.push_back(gen.op.is_identity() ? g : *A.generator_index(gen.factor, gen.op.tail()));
    }
}

int Rewriter::lower_index(std::uint32_t gen) const { return lower_index_.at(gen); }
std::uint32_t Rewriter::tail(std::uint32_t gen) const { return tail_.at(gen); }

bool Rewriter::is_phi_atom(int k, std::uint32_t gen) const
{
    const int lambda = lower_index(gen);
    if (k == 0)
        return lambda > n();
    return k > 0 && k <= std::min(lambda, n());
}

std::size_t Rewriter::last_steps() { return g_last_steps; }

// Fills `alternatives` with products whose sum equals s, or sets `atom` when s
// is already in normal form. Neither means s = 0.
void Rewriter::expand(const Symbol& s, std::vector<Product>& alternatives, bool& atom) const
{
    const auto& A = L_->source();
    const int n = this->n();
    atom = false;
    auto gen_element = [&](std::uint32_t g) { return A.element(A.generator_monomial(g)); };

    if (s.kind == SymbolKind::w) {
        if (s.index < 2 || s.index > n + 1)
            throw std::invalid_argument("w_" + std::to_string(s.index) + " is not a class of BSO(n+1)");
        atom = true;
        return;
    }
    if (s.arg.is_zero())
        return;

    if (s.kind == SymbolKind::delta) {
        if (s.arg.terms.size() > 1) {
            for (const auto& M : s.arg.terms)
                alternatives.push_back({Symbol::delta(A.element(M))});
            return;
        }
        const Monomial& M = *s.arg.terms.begin();
        if (M.degree < n || M.is_square())
            return;
        if (M.total_exponent() == 1) {
            const std::uint32_t g = M.powers[0].gen;
            const int lambda = lower_index(g);
            if (lambda < n)
                return;
            // d(Sq_n a) = (da)^2.
            if (lambda == n && tail(g) != g) {
                alternatives.push_back({Symbol::delta(gen_element(tail(g))), Symbol::delta(gen_element(tail(g)))});
                return;
            }
        }
        atom = true;
        return;
    }

    // phi
    const int k = s.index;
    if (k < 0 || k > n)
        return;
    if (s.arg.terms.size() > 1) {
        std::vector<Monomial> ms(s.arg.terms.begin(), s.arg.terms.end());
        for (const auto& M : ms)
            alternatives.push_back({Symbol::phi(k, A.element(M))});
        if (k == n)
            for (std::size_t i = 0; i < ms.size(); ++i)
                for (std::size_t j = i + 1; j < ms.size(); ++j)
                    alternatives.push_back({Symbol::delta(A.element(A.multiply(ms[i], ms[j])))});
        return;
    }
    const Monomial& M = *s.arg.terms.begin();
    if (M.is_one()) {
        if (k == 0)
            alternatives.push_back({});
        return;
    }
    if (k > M.degree)
        return;
    if (M.total_exponent() > 1) {
        const std::uint32_t g = M.powers[0].gen;
        const Element rest = A.element(A.divide_by_generator(M, g));
        const Element first = gen_element(g);
        for (int i = 0; i <= k; ++i)
            alternatives.push_back({Symbol::phi(i, first), Symbol::phi(k - i, rest)});
        return;
    }

    const std::uint32_t g = M.powers[0].gen;
    const int lambda = lower_index(g);
    const std::uint32_t t = tail(g);
    if (is_phi_atom(k, g)) {
        atom = true;
        return;
    }
    if (k == 0) {
        // g = Sq_lambda t with lambda <= n, so g^2 = (Sq_lambda t)^2.
        alternatives.push_back({Symbol::phi(lambda, gen_element(t)), Symbol::phi(lambda, gen_element(t))});
        if (lambda == n) {
            const Element te = gen_element(t);
            alternatives.push_back({Symbol::delta(A.multiply(A.multiply(te, te), A.sq_lower(n, te)))});
        }
        return;
    }
    // k > lambda: Adem relation for Sq_k Sq_lambda t in lower indices.
    const Element a = gen_element(t);
    const int da = a.degree;
    const int i = lambda;
    const int top = 2 * da - i - k;
    for (int j = 0; 2 * j <= top; ++j) {
        if (!steenrod::binom_mod2(da - i - j - 1, top - 2 * j))
            continue;
        const int kp = 2 * j - 2 * da + 2 * i + k;
        if (kp < 0 || kp > n)
            continue;
        Element sqa = A.sq(j, a);
        if (!sqa.is_zero())
            alternatives.push_back({Symbol::phi(kp, std::move(sqa))});
    }
    if (k == n)
        alternatives.push_back({Symbol::phi(i, a), Symbol::delta(gen_element(g))});
}

void Rewriter::absorb(Work& item, const Symbol& s, std::vector<Work>& stack) const
{
    const auto& A = L_->source();
    const int n = this->n();
    NormalTerm& acc = item.acc;
    const bool has_top_w = acc.w[static_cast<std::size_t>(n - 1)] > 0;

    // delta(a) phi_i(b) = delta(a Sq_i b) + [i = n] delta(ab) delta(b).
    auto fold = [&](const Monomial& a, int i, std::uint32_t b) {
        const Element be = A.element(A.generator_monomial(b));
        const Element ae = A.element(a);
        Work first = item;
        first.pending.push_back(Symbol::delta(A.multiply(ae, A.sq_lower(i, be))));
        stack.push_back(std::move(first));
        if (i == n) {
            Work second = item;
            second.pending.push_back(Symbol::delta(A.multiply(ae, be)));
            second.pending.push_back(Symbol::delta(be));
            stack.push_back(std::move(second));
        }
    };
    auto take_one = [](auto& counts) {
        auto it = counts.begin();
        auto key = it->first;
        if (--it->second == 0)
            counts.erase(it);
        return key;
    };

    switch (s.kind) {
    case SymbolKind::w:
        if (s.index == n + 1 && !acc.delta.empty())
            return;
        ++acc.w[static_cast<std::size_t>(s.index - 2)];
        stack.push_back(std::move(item));
        return;
    case SymbolKind::phi: {
        const PhiAtom atom{s.index, s.arg.terms.begin()->powers[0].gen};
        if (!acc.delta.empty()) {
            const Monomial a = take_one(acc.delta);
            fold(a, atom.k, atom.gen);
            return;
        }
        ++acc.phi[atom];
        stack.push_back(std::move(item));
        return;
    }
    case SymbolKind::delta: {
        if (has_top_w)
            return;
        const Monomial& M = *s.arg.terms.begin();
        if (!acc.phi.empty()) {
            const PhiAtom b = take_one(acc.phi);
            fold(M, b.k, b.gen);
            return;
        }
        // Degree-zero classes da are idempotent.
        if (M.degree == n && acc.delta.contains(M)) {
            stack.push_back(std::move(item));
            return;
        }
        ++acc.delta[M];
        stack.push_back(std::move(item));
        return;
    }
    }
}

NormalForm Rewriter::reduce(const PhiExpression& e) const
{
    NormalForm out{e.degree, {}};
    std::vector<Work> stack;
    for (const auto& p : e.products) {
        Work w;
        w.acc.w.assign(static_cast<std::size_t>(n()), 0);
        // Pending symbols are consumed from the back; reverse so the leftmost
        // factor is handled first.
        w.pending.assign(p.rbegin(), p.rend());
        stack.push_back(std::move(w));
    }
    std::size_t steps = 0;
    std::vector<Product> alternatives;
    while (!stack.empty()) {
        if (++steps > budget_) {
            g_last_steps = steps;
            throw RewriteBudgetExceeded(budget_);
        }
        Work item = std::move(stack.back());
        stack.pop_back();
        if (item.pending.empty()) {
            out.toggle(item.acc);
            continue;
        }
        const Symbol s = std::move(item.pending.back());
        item.pending.pop_back();
        alternatives.clear();
        bool atom = false;
        expand(s, alternatives, atom);
        if (atom) {
            absorb(item, s, stack);
            continue;
        }
        for (auto& alt : alternatives) {
            Work next = item;
            next.pending.insert(next.pending.end(), alt.rbegin(), alt.rend());
            stack.push_back(std::move(next));
        }
    }
    g_last_steps = steps;
    return out;
}

PhiExpression Rewriter::to_expression(const NormalForm& f) const
{
    const auto& A = L_->source();
    PhiExpression out{f.degree, {}};
    for (const auto& t : f.terms) {
        Product p;
        for (std::size_t j = 0; j < t.w.size(); ++j)
            for (int r = 0; r < t.w[j]; ++r)
                p.push_back(Symbol::w(static_cast<int>(j) + 2));
        for (const auto& [atom, mult] : t.phi)
            for (int r = 0; r < mult; ++r)
                p.push_back(Symbol::phi(atom.k, A.element(A.generator_monomial(atom.gen))));
        for (const auto& [M, mult] : t.delta)
            for (int r = 0; r < mult; ++r)
                p.push_back(Symbol::delta(A.element(M)));
        out.products.push_back(std::move(p));
    }
    return out;
}

std::string Rewriter::to_string(const NormalForm& f) const
{
    const auto& A = L_->source();
    if (f.is_zero())
        return "0";
    std::string out;
    for (const auto& t : f.terms) {
        std::vector<std::string> parts;
        auto power = [](std::string base, int e) { return e == 1 ? base : base + "^" + std::to_string(e); };
        for (std::size_t j = 0; j < t.w.size(); ++j)
            if (t.w[j])
                parts.push_back(power("w" + std::to_string(j + 2), t.w[j]));
        for (const auto& [atom, e] : t.phi)
            parts.push_back(power(fmt::format("phi_{}({})", atom.k, A.to_string(A.generator_monomial(atom.gen))), e));
        for (const auto& [M, e] : t.delta)
            parts.push_back(power("delta(" + A.to_string(M) + ")", e));
        std::string term;
        for (const auto& p : parts)
            term += (term.empty() ? "" : " ") + p;
        out += (out.empty() ? "" : " + ") + (term.empty() ? std::string("1") : term);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Element eval_symbol(const LoopAlgebra& L, const Symbol& s)
{
    const auto& A = L.source();
    const int n = L.n();
    const int degree = symbol_degree(s, n);
    switch (s.kind) {
    case SymbolKind::w:
        throw std::invalid_argument("eval_i is only defined on expressions without w classes");
    case SymbolKind::delta:
        return L.d_source(s.arg);
    case SymbolKind::phi:
        break;
    }
    const int i = s.index;
    if (i < 0 || i > n || s.arg.is_zero())
        return Element{degree, {}};
    Element out = L.include(A.sq_lower(i, s.arg));
    out.degree = degree;
    if (i == n) {
        const Element da = L.d_source(s.arg);
        if (!da.is_zero())
            out = out + L.algebra().multiply(L.include(s.arg), da);
    }
    return out;
}

}  // namespace

Element eval_i(const LoopAlgebra& L, const PhiExpression& e)
{
    const auto& LA = L.algebra();
    Element out{e.degree, {}};
    for (const auto& p : e.products) {
        Element prod = LA.unit();
        for (const auto& s : p) {
            prod = LA.multiply(prod, eval_symbol(L, s));
            if (prod.is_zero())
                break;
        }
        if (!prod.is_zero())
            out.terms.add(prod.terms);
    }
    return out;
}

Element eval_i(const Rewriter& R, const NormalForm& f)
{
    return eval_i(R.loop(), R.to_expression(f));
}

PhiExpression tau(const LoopAlgebra& L, const Element& x)
{
    const auto& A = L.source();
    PhiExpression out{x.degree - L.n(), {}};
    for (const auto& mono : x.terms) {
        Monomial a = A.one();
        Product p;
        for (const auto& gp : mono.powers) {
            const std::uint32_t src = L.source_generator(gp.gen);
            if (L.is_da_type(gp.gen)) {
                for (std::uint32_t r = 0; r < gp.exp; ++r)
                    p.push_back(Symbol::delta(A.element(A.generator_monomial(src))));
            } else {
                for (std::uint32_t r = 0; r < gp.exp; ++r)
                    a = A.multiply(a, A.generator_monomial(src));
            }
        }
        // delta(1) = 0: pure da-monomials are d-closed and carry no preimage.
        if (a.is_one())
            continue;
        p.insert(p.begin(), Symbol::delta(A.element(a)));
        out.products.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------

ZetaBasis::ZetaBasis(std::shared_ptr<const LoopAlgebra> L) : L_(std::move(L))
{
    const Rewriter R(L_);
    const auto& A = L_->source();
    const int n = L_->n();
    for (std::uint32_t g = 0; g < A.generators().size(); ++g) {
        const int lambda = R.lower_index(g);
        const int deg = A.generator(g).degree;
        ZetaGenerator z;
        z.source_gen = g;
        if (lambda > n) {
            z.family = ZetaFamily::squares;
            z.atom = {0, g};
            z.degree = 2 * deg;
        } else {
            z.family = lambda < n ? ZetaFamily::low : ZetaFamily::top;
            z.atom = {lambda, R.tail(g)};
            z.degree = deg;
        }
        if (z.degree > L_->cutoff())
            continue;
        z.name = fmt::format("phi_{}({})", z.atom.k, A.to_string(A.generator_monomial(z.atom.gen)));
        gens_.push_back(std::move(z));
    }
    std::stable_sort(gens_.begin(), gens_.end(),
                     [](const ZetaGenerator& a, const ZetaGenerator& b) { return a.degree < b.degree; });
}

std::vector<int> ZetaBasis::degrees() const
{
    std::vector<int> out;
    for (const auto& z : gens_)
        out.push_back(z.degree);
    return out;
}

std::vector<std::size_t> ZetaBasis::free_series(int D) const { return polynomial_series(degrees(), D); }

PhiExpression ZetaBasis::expression(const ZetaGenerator& z) const
{
    const auto& A = L_->source();
    return PhiExpression{z.degree, {{Symbol::phi(z.atom.k, A.element(A.generator_monomial(z.atom.gen)))}}};
}

Element ZetaBasis::representative(const ZetaGenerator& z) const { return eval_i(*L_, expression(z)); }

std::vector<std::size_t> polynomial_series(const std::vector<int>& degrees, int D)
{
    std::vector<std::size_t> s(static_cast<std::size_t>(std::max(D, -1) + 1), 0);
    if (s.empty())
        return s;
    s[0] = 1;
    for (int deg : degrees) {
        if (deg > D)
            continue;
        if (deg <= 0)
            throw std::invalid_argument("free algebra generators must have positive degree");
        for (int d = deg; d <= D; ++d)
            s[d] += s[d - deg];
    }
    return s;
}

// ---------------------------------------------------------------------------

LbarTable lbar_dims(const LoopAlgebra& L, const std::vector<std::size_t>& zeta_series)
{
    const int n = L.n();
    const int D = L.cutoff();
    LbarTable t;
    t.n = n;
    t.cutoff = D;
    t.kernel = L.kernel_dims();
    t.zeta.assign(zeta_series.begin(), zeta_series.begin() + std::min<std::ptrdiff_t>(D + 1, zeta_series.size()));
    t.zeta.resize(static_cast<std::size_t>(D) + 1, 0);
    const auto without_top = borel::w_series(n, D, false);
    const auto all = borel::w_series(n, D, true);
    t.total.assign(static_cast<std::size_t>(D) + 1, 0);
    for (int p = 0; p <= D; ++p)
        for (int q = 0; p + q <= D; ++q) {
            std::size_t dim = without_top[p] * t.kernel[q];
            if (p >= n + 1)
                dim += all[p - n - 1] * t.zeta[q];
            t.cells[{p, q}] = dim;
            t.total[p + q] += dim;
        }
    return t;
}

LbarTable lbar_dims(const unstable::EMSpaceSpec& spec, int n, int D)
{
    auto L = std::make_shared<const LoopAlgebra>(spec, n, D);
    return lbar_dims(*L, ZetaBasis(L).free_series(D));
}

SubalgebraModel lprime_model(const LoopAlgebra& L)
{
    const auto& A = L.source();
    const auto& LA = L.algebra();
    const int n = L.n();
    const int D = L.cutoff();
    SubalgebraModel model;
    const auto kernel = L.kernel_dims();

    std::vector<std::vector<Element>> gens(static_cast<std::size_t>(D) + 1);
    auto add_gen = [&](Element e) {
        if (e.is_zero())
            return;
        if (!L.d(e).is_zero())
            model.generators_are_cocycles = false;
        gens[e.degree].push_back(std::move(e));
    };
    for (std::uint32_t g = 0; g < A.generators().size(); ++g) {
        const Element ge = A.element(A.generator_monomial(g));
        for (int k = 0; k <= n && k <= ge.degree; ++k) {
            const int deg = 2 * ge.degree - k;
            if (deg <= D)
                add_gen(eval_i(L, PhiExpression{deg, {{Symbol::phi(k, ge)}}}));
        }
    }
    for (int s = n; s <= D + n; ++s)
        for (const auto& M : A.basis(s))
            add_gen(L.d_source(M));

    std::vector<std::vector<f2::BitVector>> span(static_cast<std::size_t>(D) + 1);
    std::vector<std::vector<Element>> indecomposable(static_cast<std::size_t>(D) + 1);

    // Rows: x times each basis monomial of L^q.
    auto multiplication_rows = [&](const Element& x, int q) {
        std::vector<f2::BitVector> rows;
        for (const auto& b : LA.basis(q))
            rows.push_back(LA.to_vector(LA.multiply(x, LA.element(b))));
        return rows;
    };
    auto apply_rows = [](const std::vector<f2::BitVector>& rows, const f2::BitVector& v, std::size_t dim) {
        f2::BitVector out(dim);
        for (std::size_t i : v.ones())
            out ^= rows[i];
        return out;
    };

    for (int q = 0; q <= D; ++q) {
        const std::size_t dim = LA.dim(q);
        f2::IncrementalBasis basis(dim);
        auto& S = span[q];
        auto full = [&] { return basis.rank() >= kernel[q] && model.generators_are_cocycles; };
        auto insert = [&](const f2::BitVector& v) {
            if (basis.insert(v)) {
                S.push_back(v);
                return true;
            }
            return false;
        };
        if (q == 0)
            insert(LA.to_vector(LA.unit()));
        for (int q1 = 1; q1 <= q && !full(); ++q1)
            for (const auto& x : indecomposable[q1]) {
                if (full())
                    break;
                const auto rows = multiplication_rows(x, q - q1);
                for (const auto& v : span[q - q1]) {
                    insert(apply_rows(rows, v, dim));
                    if (full())
                        break;
                }
            }
        for (const auto& e : gens[q]) {
            if (full())
                break;
            if (insert(LA.to_vector(e)))
                indecomposable[q].push_back(e);
        }
        // Close up under the degree-zero indecomposables.
        for (const auto& x : indecomposable[0]) {
            const auto rows = multiplication_rows(x, q);
            for (std::size_t i = 0; i < S.size() && !full(); ++i)
                insert(apply_rows(rows, S[i], dim));
        }
        model.dims.push_back(basis.rank());
    }
    return model;
}

SeriesComparison compare_series(std::string name, std::vector<std::size_t> left, std::vector<std::size_t> right)
{
    SeriesComparison c{std::move(name), std::move(left), std::move(right), std::nullopt};
    const std::size_t common = std::max(c.left.size(), c.right.size());
    for (std::size_t t = 0; t < common; ++t) {
        const bool ok = t < c.left.size() && t < c.right.size() && c.left[t] == c.right[t];
        if (!ok) {
            c.first_mismatch = static_cast<int>(t);
            break;
        }
    }
    return c;
}

ComparisonReport verify_against_page(const unstable::EMSpaceSpec& spec, int n, int D, const VerifyOptions& options)
{
    auto L = std::make_shared<const LoopAlgebra>(spec, n, D);
    ComparisonReport r;
    r.spec = spec.is_point() ? "point" : spec.to_string();
    r.n = n;
    r.cutoff = D;
    r.verified_limit = D - (n + 1);
    const std::size_t verified_len = static_cast<std::size_t>(std::max(r.verified_limit + 1, 0));

    struct PageArm {
        std::vector<std::size_t> series;
        borel::CohomologyPage coh{1, 0};
    };
    auto page_arm = [&] {
        borel::BigradedPage page(L);
        borel::CohomologyOptions copts;
        copts.jobs = std::max(1u, options.jobs / 2);
        PageArm arm;
        arm.coh = borel::cohomology(page, copts);
        arm.series = borel::gr_poincare(arm.coh);
        return arm;
    };
    struct LbarArm {
        LbarTable table;
        SubalgebraModel model;
        std::vector<std::size_t> homology;
        std::vector<std::size_t> zeta;
        std::optional<std::string> corrupted;
    };
    auto lbar_arm = [&] {
        LbarArm arm;
        ZetaBasis Z(L);
        auto degrees = Z.degrees();
        if (options.corrupt_zeta) {
            if (*options.corrupt_zeta >= degrees.size())
                throw std::invalid_argument("no zeta generator with index " + std::to_string(*options.corrupt_zeta));
            ++degrees[*options.corrupt_zeta];
            arm.corrupted = Z.generators()[*options.corrupt_zeta].name;
        }
        arm.zeta = polynomial_series(degrees, D);
        arm.table = lbar_dims(*L, arm.zeta);
        arm.model = lprime_model(*L);
        arm.homology = L->homology_dims();
        return arm;
    };

    PageArm pa;
    LbarArm la;
    if (options.jobs > 1) {
        auto fut = std::async(std::launch::async, page_arm);
        la = lbar_arm();
        pa = fut.get();
    } else {
        pa = page_arm();
        la = lbar_arm();
    }

    std::vector<std::size_t> lbar_total(la.table.total.begin(),
                                        la.table.total.begin() + static_cast<std::ptrdiff_t>(verified_len));
    r.total = compare_series("lbar vs E_infinity", std::move(lbar_total), pa.series);
    r.kernel_model = compare_series("ker d vs generated subalgebra", la.table.kernel, la.model.dims);
    r.model_generators_are_cocycles = la.model.generators_are_cocycles;
    std::vector<std::size_t> zeta_part(la.zeta.begin(),
                                       la.zeta.begin() + static_cast<std::ptrdiff_t>(la.homology.size()));
    r.zeta_homology = compare_series("H(d) vs zeta free algebra", la.homology, std::move(zeta_part));
    for (int t = 0; t <= r.verified_limit; ++t)
        for (int p = 0; p <= t; ++p) {
            ++r.bidegrees_checked;
            if (la.table.cells.at({p, t - p}) != pa.coh.dim(p, t - p))
                r.bidegree_mismatches.emplace_back(p, t - p);
        }
    r.corrupted = la.corrupted;
    return r;
}

namespace {

std::string join(const std::vector<std::size_t>& v)
{
    return fmt::format("{}", fmt::join(v, " "));
}

void write_comparison_text(std::ostream& out, const SeriesComparison& c)
{
    out << fmt::format("  {:<32} {}\n", c.name, c.pass() ? "PASS" : "FAIL");
    out << "    left : " << join(c.left) << '\n';
    out << "    right: " << join(c.right) << '\n';
    if (c.first_mismatch)
        out << "    first mismatch in degree " << *c.first_mismatch << '\n';
}

nlohmann::json comparison_json(const SeriesComparison& c)
{
    nlohmann::json j;
    j["name"] = c.name;
    j["left"] = c.left;
    j["right"] = c.right;
    j["first_mismatch"] = c.first_mismatch ? nlohmann::json(*c.first_mismatch) : nlohmann::json(nullptr);
    j["pass"] = c.pass();
    return j;
}

}  // namespace

void write_report_text(std::ostream& out, const ComparisonReport& r)
{
    out << fmt::format("spec {}  n = {}  cutoff {}  verified through total degree {}\n", r.spec, r.n, r.cutoff,
                       r.verified_limit);
    if (r.corrupted)
        out << "  (negative control: degree of " << *r.corrupted << " raised by one)\n";
    write_comparison_text(out, r.total);
    write_comparison_text(out, r.kernel_model);
    write_comparison_text(out, r.zeta_homology);
    if (!r.model_generators_are_cocycles)
        out << "  some generator of the subalgebra model is not a cocycle\n";
    out << fmt::format("  bidegrees checked {}, mismatched {}\n", r.bidegrees_checked, r.bidegree_mismatches.size());
    for (const auto& [p, q] : r.bidegree_mismatches)
        out << fmt::format("    ({}, {})\n", p, q);
    out << (r.pass() ? "PASS" : "FAIL") << '\n';
}

nlohmann::json report_to_json(const ComparisonReport& r)
{
    nlohmann::json j;
    j["spec"] = r.spec;
    j["n"] = r.n;
    j["cutoff"] = r.cutoff;
    j["verified_limit"] = r.verified_limit;
    j["total"] = comparison_json(r.total);
    j["kernel_model"] = comparison_json(r.kernel_model);
    j["zeta_homology"] = comparison_json(r.zeta_homology);
    j["model_generators_are_cocycles"] = r.model_generators_are_cocycles;
    j["bidegrees_checked"] = r.bidegrees_checked;
    auto mism = nlohmann::json::array();
    for (const auto& [p, q] : r.bidegree_mismatches)
        mism.push_back({p, q});
    j["bidegree_mismatches"] = mism;
    j["corrupted"] = r.corrupted ? nlohmann::json(*r.corrupted) : nlohmann::json(nullptr);
    j["verdict"] = r.pass() ? "PASS" : "FAIL";
    return j;
}

ComparisonReport report_from_json(const nlohmann::json& j)
{
    auto comparison = [](const nlohmann::json& c) {
        SeriesComparison s;
        s.name = c.at("name").get<std::string>();
        s.left = c.at("left").get<std::vector<std::size_t>>();
        s.right = c.at("right").get<std::vector<std::size_t>>();
        if (!c.at("first_mismatch").is_null())
            s.first_mismatch = c.at("first_mismatch").get<int>();
        return s;
    };
    ComparisonReport r;
    r.spec = j.at("spec").get<std::string>();
    r.n = j.at("n").get<int>();
    r.cutoff = j.at("cutoff").get<int>();
    r.verified_limit = j.at("verified_limit").get<int>();
    r.total = comparison(j.at("total"));
    r.kernel_model = comparison(j.at("kernel_model"));
    r.zeta_homology = comparison(j.at("zeta_homology"));
    r.model_generators_are_cocycles = j.at("model_generators_are_cocycles").get<bool>();
    r.bidegrees_checked = j.at("bidegrees_checked").get<std::size_t>();
    for (const auto& pq : j.at("bidegree_mismatches"))
        r.bidegree_mismatches.emplace_back(pq.at(0).get<int>(), pq.at(1).get<int>());
    if (!j.at("corrupted").is_null())
        r.corrupted = j.at("corrupted").get<std::string>();
    return r;
}

void write_report_json(std::ostream& out, const ComparisonReport& r)
{
    out << report_to_json(r).dump(2) << '\n';
}

// ---------------------------------------------------------------------------

PhiExpression random_expression(const LoopAlgebra& L, int degree, std::mt19937_64& rng)
{
    const auto& A = L.source();
    const int n = L.n();
    const int D = L.cutoff();
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto random_element = [&](int deg) {
        const auto& basis = A.basis(deg);
        Element e{deg, {}};
        const int terms = uniform(1, static_cast<int>(std::min<std::size_t>(4, basis.size())));
        for (int t = 0; t < terms; ++t)
            e.terms.toggle(basis[static_cast<std::size_t>(uniform(0, static_cast<int>(basis.size()) - 1))]);
        return e;
    };
    auto make_phi = [&](int part) -> std::optional<Symbol> {
        std::vector<int> ks;
        for (int k = part % 2; k <= n + 1; k += 2) {
            const int da = (part + k) / 2;
            if (da >= 1 && 2 * da <= D + n && A.dim(da) > 0)
                ks.push_back(k);
        }
        if (ks.empty())
            return std::nullopt;
        const int k = ks[static_cast<std::size_t>(uniform(0, static_cast<int>(ks.size()) - 1))];
        return Symbol::phi(k, random_element((part + k) / 2));
    };
    auto make_delta = [&](int part) -> std::optional<Symbol> {
        const int da = part + n;
        if (da > D + n || A.dim(da) == 0)
            return std::nullopt;
        return Symbol::delta(random_element(da));
    };

    PhiExpression e{degree, {}};
    const int products = uniform(1, 3);
    for (int attempt = 0; static_cast<int>(e.products.size()) < products && attempt < 200; ++attempt) {
        Product p;
        int remaining = degree;
        const int factors = uniform(1, 3);
        bool ok = true;
        for (int f = 0; f < factors && ok; ++f) {
            const int part = f + 1 == factors ? remaining : uniform(0, remaining);
            const bool phi_first = uniform(0, 1) == 0;
            auto s = phi_first ? make_phi(part) : make_delta(part);
            if (!s)
                s = phi_first ? make_delta(part) : make_phi(part);
            if (!s)
                ok = false;
            else
                p.push_back(std::move(*s));
            remaining -= part;
        }
        if (ok)
            e.products.push_back(std::move(p));
    }
    return e;
}

}  // namespace loopcoh::lbar
