#include "loopcoh/loop_algebra.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace loopcoh::division {

using unstable::Element;
using unstable::FactorSpec;
using unstable::Monomial;

void require_odd(int n)
{
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("n = " + std::to_string(n) +
                                    " is not allowed: the sphere dimension n must be odd and positive");
}

std::vector<FactorSpec> LoopAlgebra::factors_for(const unstable::EMSpaceSpec& spec, int n)
{
    require_odd(n);
    std::vector<FactorSpec> out;
    for (std::size_t s = 0; s < spec.factors.size(); ++s) {
        out.push_back({spec.factors[s], "i" + std::to_string(s)});
        if (spec.factors[s] >= n)
            out.push_back({spec.factors[s] - n, "di" + std::to_string(s)});
    }
    return out;
}

LoopAlgebra::LoopAlgebra(const unstable::EMSpaceSpec& spec, int n, int D)
    : spec_(spec),
      n_(n),
      D_(D),
      A_(unstable::FreeUnstableAlgebra::from_spec(spec, D + n)),
      L_(factors_for(spec, n), D)
{
    std::size_t f = 0;
    for (std::size_t s = 0; s < spec.factors.size(); ++s) {
        a_factor_.push_back(f++);
        da_factor_.push_back(spec.factors[s] >= n ? std::optional<std::size_t>(f++) : std::nullopt);
    }

    a_to_l_.assign(A_.generators().size(), std::nullopt);
    for (std::uint32_t g = 0; g < A_.generators().size(); ++g) {
        const auto& gen = A_.generator(g);
        if (auto l = L_.generator_index(a_factor_[gen.factor], gen.op))
            a_to_l_[g] = *l;
    }

    // d(Sq^J i) = Sq^J(di): push d through the action inside the da factor.
    std::set<std::uint32_t> single_images;
    std::vector<std::optional<std::uint32_t>> da_source(L_.generators().size());
    for (std::uint32_t g = 0; g < A_.generators().size(); ++g) {
        const auto& gen = A_.generator(g);
        Element image{gen.degree - n, {}};
        const auto& daf = da_factor_[gen.factor];
        if (daf && gen.degree - n <= D) {
            if (auto v = L_.op_on_fundamental(*daf, gen.op)) {
                image.terms.toggle(*v);
                if (v->powers.size() == 1 && v->powers[0].exp == 1) {
                    single_images.insert(v->powers[0].gen);
                    da_source[v->powers[0].gen] = g;
                }
            }
        }
        d_source_gen_.push_back(std::move(image));
    }

    l_gen_is_da_.resize(L_.generators().size());
    l_gen_source_.resize(L_.generators().size());
    std::set<std::uint32_t> da_gens;
    for (std::uint32_t l = 0; l < L_.generators().size(); ++l) {
        const auto& gen = L_.generator(l);
        bool is_da = false;
        for (std::size_t s = 0; s < spec.factors.size(); ++s)
            if (da_factor_[s] == gen.factor)
                is_da = true;
        l_gen_is_da_[l] = is_da;
        if (is_da) {
            da_gens.insert(l);
            if (!da_source[l])
                throw std::logic_error("da-type generator " + gen.name + " is not the image of an a-type generator");
            l_gen_source_[l] = *da_source[l];
        } else {
            std::size_t s = 0;
            while (a_factor_[s] != gen.factor)
                ++s;
            l_gen_source_[l] = *A_.generator_index(s, gen.op);
        }
    }
    if (single_images != da_gens)
        throw std::logic_error("d-images of generators do not match the da-type generator set");
}

std::optional<std::uint32_t> LoopAlgebra::a_generator(std::uint32_t a_gen) const
{
    return a_to_l_.at(a_gen);
}

Monomial LoopAlgebra::include(const Monomial& a) const
{
    if (a.degree > D_)
        throw CutoffExceeded(a.degree, D_);
    Monomial out;
    out.degree = a.degree;
    for (const auto& p : a.powers)
        out.powers.push_back({*a_to_l_[p.gen], p.exp});
    // a-type generators keep the relative order of their sources, so the
    // result is still sorted; sort anyway for safety with multi-factor specs.
    std::sort(out.powers.begin(), out.powers.end());
    return out;
}

Element LoopAlgebra::include(const Element& a) const
{
    Element out{a.degree, {}};
    for (const auto& m : a.terms)
        out.terms.toggle(include(m));
    return out;
}

Element LoopAlgebra::d(const Monomial& x) const
{
    Element out{x.degree - n_, {}};
    // Characteristic 2: only generators of odd exponent survive Leibniz.
    for (const auto& p : x.powers) {
        if (l_gen_is_da_[p.gen] || p.exp % 2 == 0)
            continue;
        const Element& dg = d_source_gen_[l_gen_source_[p.gen]];
        if (dg.is_zero())
            continue;
        const Monomial rest = L_.divide_by_generator(x, p.gen);
        for (const auto& t : dg.terms)
            out.terms.toggle(L_.multiply(rest, t));
    }
    return out;
}

Element LoopAlgebra::d(const Element& x) const
{
    Element out{x.degree - n_, {}};
    for (const auto& m : x.terms)
        out.terms.add(d(m).terms);
    return out;
}

Element LoopAlgebra::d_source(const Monomial& a) const
{
    Element out{a.degree - n_, {}};
    if (a.degree - n_ < 0)
        return out;
    if (a.degree - n_ > D_)
        throw CutoffExceeded(a.degree - n_, D_);
    for (const auto& p : a.powers) {
        if (p.exp % 2 == 0)
            continue;
        const Element& dg = d_source_gen_[p.gen];
        if (dg.is_zero())
            continue;
        // |a / g| <= D because |g| >= n whenever dg is nonzero.
        const Monomial rest = include(A_.divide_by_generator(a, p.gen));
        for (const auto& t : dg.terms)
            out.terms.toggle(L_.multiply(rest, t));
    }
    return out;
}

Element LoopAlgebra::d_source(const Element& a) const
{
    Element out{a.degree - n_, {}};
    for (const auto& m : a.terms)
        out.terms.add(d_source(m).terms);
    return out;
}

f2::BitMatrix LoopAlgebra::differential_matrix(int q) const
{
    const auto& rows = L_.basis(q);
    const std::size_t cols = q - n_ >= 0 ? L_.dim(q - n_) : 0;
    f2::BitMatrix m(rows.size(), cols);
    if (cols == 0)
        return m;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& t : d(rows[r]).terms)
            m.flip(r, *L_.index_of(t));
    return m;
}

std::vector<std::size_t> LoopAlgebra::kernel_dims() const
{
    std::vector<std::size_t> out;
    for (int q = 0; q <= D_; ++q)
        out.push_back(L_.dim(q) - f2::rank_auto(differential_matrix(q)));
    return out;
}

std::vector<std::size_t> LoopAlgebra::homology_dims() const
{
    std::vector<std::size_t> out;
    const auto ker = kernel_dims();
    for (int q = 0; q + n_ <= D_; ++q)
        out.push_back(ker[q] - f2::rank_auto(differential_matrix(q + n_)));
    return out;
}

}  // namespace loopcoh::division
