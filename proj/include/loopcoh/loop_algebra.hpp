#pragma once

#include "loopcoh/f2/bit_matrix.hpp"
#include "loopcoh/unstable.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace loopcoh::division {

// L_n(A) = A : H*(S^n) for A = H*(K(Z/2, m_1) x ...), n odd, modelled as the
// polynomial algebra H*(prod K(Z/2, m_s)) (x) H*(prod K(Z/2, m_s - n)). The
// second factor holds the classes da; factors with m_s < n contribute none,
// and m_s = n contributes the idempotent d(i_s) in degree 0.
class LoopAlgebra {
public:
    LoopAlgebra(const unstable::EMSpaceSpec& spec, int n, int D);

    int n() const { return n_; }
    int cutoff() const { return D_; }
    const unstable::EMSpaceSpec& spec() const { return spec_; }

    // The source A, truncated at D + n so that every da of degree <= D has
    // its a available.
    const unstable::FreeUnstableAlgebra& source() const { return A_; }
    // The model of L_n(A), truncated at D.
    const unstable::FreeUnstableAlgebra& algebra() const { return L_; }

    bool is_da_type(std::uint32_t l_gen) const { return l_gen_is_da_.at(l_gen); }
    // a-type: the A-generator it is; da-type: the A-generator a with da = it.
    std::uint32_t source_generator(std::uint32_t l_gen) const { return l_gen_source_.at(l_gen); }
    std::optional<std::uint32_t> a_generator(std::uint32_t a_gen) const;

    // d of an A-generator, an element of L of degree |a| - n (zero when that
    // degree is negative).
    const unstable::Element& d_of_source_generator(std::uint32_t a_gen) const { return d_source_gen_.at(a_gen); }

    unstable::Monomial include(const unstable::Monomial& a) const;
    unstable::Element include(const unstable::Element& a) const;

    // The derivation a -> da, da -> 0 on L.
    unstable::Element d(const unstable::Monomial& x) const;
    unstable::Element d(const unstable::Element& x) const;
    // a -> da for a in A with |a| <= D + n.
    unstable::Element d_source(const unstable::Monomial& a) const;
    unstable::Element d_source(const unstable::Element& a) const;

    unstable::Element sq(int k, const unstable::Element& x) const { return L_.sq(k, x); }

    // Matrix of d : L^q -> L^{q-n}, one row per basis element of L^q.
    f2::BitMatrix differential_matrix(int q) const;
    std::vector<std::size_t> dims() const { return L_.poincare_series(D_); }
    // dim ker(d) in degrees 0..D.
    std::vector<std::size_t> kernel_dims() const;
    // dim ker(d)/im(d) in degrees 0..D-n (im d in degree q needs L^{q+n}).
    std::vector<std::size_t> homology_dims() const;

private:
    static std::vector<unstable::FactorSpec> factors_for(const unstable::EMSpaceSpec& spec, int n);

    unstable::EMSpaceSpec spec_;
    int n_;
    int D_;
    unstable::FreeUnstableAlgebra A_;
    unstable::FreeUnstableAlgebra L_;
    std::vector<std::size_t> a_factor_;                  // source factor s -> L factor
    std::vector<std::optional<std::size_t>> da_factor_;  // source factor s -> L factor
    std::vector<bool> l_gen_is_da_;
    std::vector<std::uint32_t> l_gen_source_;
    std::vector<std::optional<std::uint32_t>> a_to_l_;
    std::vector<unstable::Element> d_source_gen_;
};

// Rejects even or non-positive n with a message about the oddness hypothesis.
void require_odd(int n);

}  // namespace loopcoh::division
