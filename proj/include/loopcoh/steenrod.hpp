#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

// Mod 2 Steenrod algebra in the admissible (Serre-Cartan) basis. Monomials
// are written in upper-index form Sq^{b_1}...Sq^{b_k}, with Sq^{b_k} applied
// first.
namespace loopcoh::steenrod {

// C(a, b) mod 2 by Lucas' theorem. Out-of-range b (b < 0 or b > a) gives 0,
// and so does a < 0.
bool binom_mod2(long a, long b);

bool is_admissible(std::span<const int> word);

class AdmissibleMonomial {
public:
    AdmissibleMonomial() = default;  // the identity Sq^0

    // Throws std::invalid_argument unless every entry is positive and
    // b_i >= 2 b_{i+1}.
    explicit AdmissibleMonomial(std::vector<int> upper_indices);

    const std::vector<int>& indices() const { return indices_; }
    std::size_t length() const { return indices_.size(); }
    bool is_identity() const { return indices_.empty(); }
    int leading() const { return indices_.empty() ? 0 : indices_.front(); }

    // Sum of the upper indices.
    int degree() const;
    // b_1 - (b_2 + ... + b_k); 0 for the identity.
    int excess() const;

    // Drops the leading (outermost) square.
    AdmissibleMonomial tail() const;

    std::string to_string() const;

    auto operator<=>(const AdmissibleMonomial&) const = default;

private:
    std::vector<int> indices_;
};

// F2-linear combination of admissible monomials; adding a present monomial
// removes it.
class SteenrodSum {
public:
    SteenrodSum() = default;
    explicit SteenrodSum(AdmissibleMonomial m) { terms_.insert(std::move(m)); }

    void add(const AdmissibleMonomial& m);
    void add(const SteenrodSum& other);

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    bool contains(const AdmissibleMonomial& m) const { return terms_.contains(m); }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    std::string to_string() const;

    friend bool operator==(const SteenrodSum&, const SteenrodSum&) = default;

private:
    std::set<AdmissibleMonomial> terms_;
};

enum class RewriteOrder { leftmost, rightmost };

// Reduces the composite Sq^{w_1}...Sq^{w_k} to admissible form by repeatedly
// applying the Adem relation
//   Sq^a Sq^b = sum_c C(b-c-1, a-2c) Sq^{a+b-c} Sq^c      (a < 2b)
// to the leftmost (or rightmost) inadmissible adjacent pair. Zero entries are
// treated as Sq^0 and dropped; negative entries throw std::invalid_argument.
SteenrodSum adem_reduce(std::span<const int> word, RewriteOrder order = RewriteOrder::leftmost);

// Reduces every term of an F2-sum of words.
SteenrodSum adem_reduce(const SteenrodSum& sum);

// Composite x∘y (y applied first), memoized; safe to call concurrently.
SteenrodSum compose(const AdmissibleMonomial& x, const AdmissibleMonomial& y);

// Sq^k ∘ x.
SteenrodSum sq_times(int k, const AdmissibleMonomial& x);

// Sq_i x = Sq^{|x| - i} x; the same formula converts upper to lower.
constexpr int lower_to_upper(int lower_index, int argument_degree)
{
    return argument_degree - lower_index;
}

// All admissible monomials of the given degree (degree 0 gives the identity).
std::vector<AdmissibleMonomial> admissible_of_degree(int degree);

}  // namespace loopcoh::steenrod
