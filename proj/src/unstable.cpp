#include "loopcoh/unstable.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace loopcoh::unstable {

using steenrod::AdmissibleMonomial;

namespace {

int parse_int(std::string_view s, std::string_view whole)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("bad spec '" + std::string(whole) + "': expected integers like 2,3*2");
    return value;
}

}  // namespace

EMSpaceSpec EMSpaceSpec::parse(std::string_view text)
{
    EMSpaceSpec spec;
    if (text.empty() || text == "point")
        return spec;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view item = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        int count = 1;
        int m = 0;
        if (auto star = item.find('*'); star != std::string_view::npos) {
            m = parse_int(item.substr(0, star), text);
            count = parse_int(item.substr(star + 1), text);
        } else {
            m = parse_int(item, text);
        }
        if (m < 1)
            throw std::invalid_argument("bad spec '" + std::string(text) + "': EM dimensions must be >= 1");
        if (count < 0)
            throw std::invalid_argument("bad spec '" + std::string(text) + "': negative multiplicity");
        spec.factors.insert(spec.factors.end(), count, m);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    std::sort(spec.factors.begin(), spec.factors.end());
    return spec;
}

std::string EMSpaceSpec::to_string() const
{
    if (factors.empty())
        return "point";
    std::string out;
    for (std::size_t i = 0; i < factors.size();) {
        std::size_t j = i;
        while (j < factors.size() && factors[j] == factors[i])
            ++j;
        if (!out.empty())
            out += ',';
        out += std::to_string(factors[i]);
        if (j - i > 1)
            out += '*' + std::to_string(j - i);
        i = j;
    }
    return out;
}

std::vector<AlgebraGenerator> em_generators(int m, int D)
{
    if (m < 1)
        throw std::invalid_argument("em_generators: m must be >= 1");
    std::vector<AlgebraGenerator> out;
    for (int shift = 0; m + shift <= D; ++shift)
        for (auto& op : steenrod::admissible_of_degree(shift))
            if (op.excess() < m)
                out.push_back({0, op, m + shift, {}});
    return out;
}

std::uint32_t Monomial::exponent(std::uint32_t gen) const
{
    auto it = std::lower_bound(powers.begin(), powers.end(), GenPower{gen, 0});
    return it != powers.end() && it->gen == gen ? it->exp : 0;
}

bool Monomial::is_square() const
{
    return std::all_of(powers.begin(), powers.end(), [](const GenPower& p) { return p.exp % 2 == 0; });
}

std::size_t Monomial::total_exponent() const
{
    std::size_t total = 0;
    for (const auto& p : powers)
        total += p.exp;
    return total;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept
{
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& p : m.powers) {
        h = (h ^ p.gen) * 1099511628211ull;
        h = (h ^ p.exp) * 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

bool graded_lex_less(const Monomial& a, const Monomial& b)
{
    if (a.degree != b.degree)
        return a.degree < b.degree;
    // First generator at which the exponent vectors differ decides.
    std::size_t i = 0, j = 0;
    while (i < a.powers.size() && j < b.powers.size()) {
        const auto& x = a.powers[i];
        const auto& y = b.powers[j];
        if (x.gen == y.gen) {
            if (x.exp != y.exp)
                return x.exp < y.exp;
            ++i;
            ++j;
        } else {
            return x.gen > y.gen;  // b has exponent 0 where a does not, or vice versa
        }
    }
    return i == a.powers.size() && j < b.powers.size();
}

void MonoSum::toggle(const Monomial& m)
{
    auto [it, inserted] = terms_.insert(m);
    if (!inserted)
        terms_.erase(it);
}

void MonoSum::add(const MonoSum& other)
{
    for (const auto& m : other)
        toggle(m);
}

Element operator+(const Element& a, const Element& b)
{
    if (a.is_zero())
        return b.is_zero() ? Element{std::max(a.degree, b.degree), {}} : b;
    if (b.is_zero())
        return a;
    if (a.degree != b.degree)
        throw NonHomogeneous("cannot add elements of degrees " + std::to_string(a.degree) + " and " +
                             std::to_string(b.degree));
    Element out = a;
    out.terms.add(b.terms);
    return out;
}

struct FreeUnstableAlgebra::SqCache {
    std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, std::unordered_map<Monomial, MonoSum, MonomialHash>> by_k;
};

FreeUnstableAlgebra::FreeUnstableAlgebra(std::vector<FactorSpec> factors, int cutoff)
    : factors_(std::move(factors)), cutoff_(cutoff), sq_cache_(std::make_shared<SqCache>())
{
    if (cutoff_ < 0)
        throw std::invalid_argument("cutoff must be >= 0");
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        const auto& fs = factors_[f];
        if (fs.base_degree < 0)
            throw std::invalid_argument("factor of negative degree");
        if (fs.base_degree == 0) {
            gens_.push_back({f, {}, 0, fs.symbol});
            continue;
        }
        for (auto g : em_generators(fs.base_degree, cutoff_)) {
            g.factor = f;
            g.name = g.op.is_identity() ? fs.symbol : g.op.to_string() + "(" + fs.symbol + ")";
            gens_.push_back(std::move(g));
        }
    }
    std::stable_sort(gens_.begin(), gens_.end(), [](const AlgebraGenerator& a, const AlgebraGenerator& b) {
        if (a.degree != b.degree)
            return a.degree < b.degree;
        if (a.factor != b.factor)
            return a.factor < b.factor;
        return a.op < b.op;
    });
    for (std::uint32_t g = 0; g < gens_.size(); ++g)
        gen_lookup_.emplace(std::make_pair(gens_[g].factor, gens_[g].op), g);

    // Enumerate exponent vectors degree by degree.
    basis_.resize(static_cast<std::size_t>(cutoff_) + 1);
    Monomial current;
    auto rec = [&](auto&& self, std::size_t g, int remaining) -> void {
        if (g == gens_.size()) {
            if (remaining == 0)
                basis_[current.degree].push_back(current);
            return;
        }
        self(self, g + 1, remaining);
        const int deg = gens_[g].degree;
        const std::uint32_t max_exp = deg == 0 ? 1 : static_cast<std::uint32_t>(remaining / deg);
        for (std::uint32_t e = 1; e <= max_exp; ++e) {
            current.powers.push_back({static_cast<std::uint32_t>(g), e});
            current.degree += deg * static_cast<int>(e);
            self(self, g + 1, remaining - deg * static_cast<int>(e));
            current.degree -= deg * static_cast<int>(e);
            current.powers.pop_back();
        }
    };
    for (int d = 0; d <= cutoff_; ++d) {
        rec(rec, 0, d);
        std::sort(basis_[d].begin(), basis_[d].end(), graded_lex_less);
        for (std::size_t i = 0; i < basis_[d].size(); ++i)
            basis_index_.emplace(basis_[d][i], i);
    }
}

FreeUnstableAlgebra FreeUnstableAlgebra::from_spec(const EMSpaceSpec& spec, int cutoff)
{
    std::vector<FactorSpec> factors;
    for (std::size_t s = 0; s < spec.factors.size(); ++s)
        factors.push_back({spec.factors[s], "i" + std::to_string(s)});
    return FreeUnstableAlgebra(std::move(factors), cutoff);
}

std::optional<std::uint32_t> FreeUnstableAlgebra::generator_index(std::size_t factor, const AdmissibleMonomial& op) const
{
    auto it = gen_lookup_.find({factor, op});
    if (it == gen_lookup_.end())
        return std::nullopt;
    return it->second;
}

const std::vector<Monomial>& FreeUnstableAlgebra::basis(int degree) const
{
    static const std::vector<Monomial> empty;
    if (degree < 0)
        return empty;
    if (degree > cutoff_)
        throw CutoffExceeded(degree, cutoff_);
    return basis_[degree];
}

std::optional<std::size_t> FreeUnstableAlgebra::index_of(const Monomial& m) const
{
    auto it = basis_index_.find(m);
    if (it == basis_index_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::size_t> FreeUnstableAlgebra::poincare_series(int D) const
{
    if (D > cutoff_)
        throw CutoffExceeded(D, cutoff_);
    std::vector<std::size_t> out;
    for (int d = 0; d <= D; ++d)
        out.push_back(basis_[d].size());
    return out;
}

void FreeUnstableAlgebra::check_degree(int degree) const
{
    if (degree > cutoff_)
        throw CutoffExceeded(degree, cutoff_);
}

Monomial FreeUnstableAlgebra::generator_monomial(std::uint32_t g) const
{
    return Monomial{gens_.at(g).degree, {{g, 1}}};
}

Element FreeUnstableAlgebra::element(const Monomial& m) const
{
    check_degree(m.degree);
    Element e{m.degree, {}};
    e.terms.toggle(m);
    return e;
}

Monomial FreeUnstableAlgebra::multiply(const Monomial& a, const Monomial& b) const
{
    check_degree(a.degree + b.degree);
    Monomial out;
    out.degree = a.degree + b.degree;
    out.powers.reserve(a.powers.size() + b.powers.size());
    std::size_t i = 0, j = 0;
    while (i < a.powers.size() || j < b.powers.size()) {
        if (j == b.powers.size() || (i < a.powers.size() && a.powers[i].gen < b.powers[j].gen)) {
            out.powers.push_back(a.powers[i++]);
        } else if (i == a.powers.size() || b.powers[j].gen < a.powers[i].gen) {
            out.powers.push_back(b.powers[j++]);
        } else {
            const auto g = a.powers[i].gen;
            // Degree-0 generators satisfy x^2 = x.
            const auto e = gens_[g].idempotent() ? 1u : a.powers[i].exp + b.powers[j].exp;
            out.powers.push_back({g, e});
            ++i;
            ++j;
        }
    }
    return out;
}

MonoSum FreeUnstableAlgebra::multiply(const MonoSum& a, const MonoSum& b) const
{
    MonoSum out;
    for (const auto& x : a)
        for (const auto& y : b)
            out.toggle(multiply(x, y));
    return out;
}

Element FreeUnstableAlgebra::multiply(const Element& a, const Element& b) const
{
    check_degree(a.degree + b.degree);
    return Element{a.degree + b.degree, multiply(a.terms, b.terms)};
}

Monomial FreeUnstableAlgebra::divide_by_generator(const Monomial& m, std::uint32_t g) const
{
    Monomial out = m;
    auto it = std::lower_bound(out.powers.begin(), out.powers.end(), GenPower{g, 0});
    if (it == out.powers.end() || it->gen != g)
        throw std::logic_error("divide_by_generator: generator does not divide monomial");
    out.degree -= gens_[g].degree;
    if (--it->exp == 0)
        out.powers.erase(it);
    return out;
}

Monomial FreeUnstableAlgebra::square(const Monomial& m) const
{
    check_degree(2 * m.degree);
    Monomial out = m;
    out.degree *= 2;
    for (auto& p : out.powers)
        if (!gens_[p.gen].idempotent())
            p.exp *= 2;
    return out;
}

std::optional<Monomial> FreeUnstableAlgebra::op_on_fundamental(std::size_t factor, const AdmissibleMonomial& op) const
{
    const int m = factors_.at(factor).base_degree;
    if (m == 0) {
        if (!op.is_identity())
            return std::nullopt;
        return generator_monomial(*generator_index(factor, op));
    }
    const int e = op.excess();
    if (op.is_identity() || e < m) {
        check_degree(m + op.degree());
        auto g = generator_index(factor, op);
        if (!g)
            throw std::logic_error("missing generator " + op.to_string());
        return generator_monomial(*g);
    }
    if (e > m)
        return std::nullopt;
    auto inner = op_on_fundamental(factor, op.tail());
    if (!inner)
        return std::nullopt;
    return square(*inner);
}

MonoSum FreeUnstableAlgebra::sq_generator(int k, std::uint32_t g) const
{
    const auto& gen = gens_[g];
    MonoSum out;
    if (k == 0) {
        out.toggle(generator_monomial(g));
        return out;
    }
    if (gen.idempotent() || k > gen.degree)
        return out;
    for (const auto& term : steenrod::sq_times(k, gen.op))
        if (auto v = op_on_fundamental(gen.factor, term))
            out.toggle(*v);
    return out;
}

MonoSum FreeUnstableAlgebra::sq(int k, const Monomial& m) const
{
    if (k < 0)
        throw std::invalid_argument("negative Steenrod square");
    MonoSum out;
    if (k == 0) {
        out.toggle(m);
        return out;
    }
    if (k > m.degree)
        return out;
    check_degree(m.degree + k);
    const auto key = static_cast<std::uint64_t>(k);
    {
        std::shared_lock lock(sq_cache_->mutex);
        if (auto it = sq_cache_->by_k.find(key); it != sq_cache_->by_k.end())
            if (auto jt = it->second.find(m); jt != it->second.end())
                return jt->second;
    }
    out = sq_uncached(k, m);
    std::unique_lock lock(sq_cache_->mutex);
    sq_cache_->by_k[key].emplace(m, out);
    return out;
}

MonoSum FreeUnstableAlgebra::sq_uncached(int k, const Monomial& m) const
{
    MonoSum out;
    // Idempotent degree-0 factors are fixed by every Sq^i with i > 0 acting
    // trivially on them, so they pass through the Cartan formula.
    for (std::size_t i = 0; i < m.powers.size(); ++i) {
        if (gens_[m.powers[i].gen].idempotent()) {
            Monomial rest = m;
            rest.powers.erase(rest.powers.begin() + static_cast<std::ptrdiff_t>(i));
            const Monomial h = generator_monomial(m.powers[i].gen);
            for (const auto& t : sq(k, rest))
                out.toggle(multiply(h, t));
            return out;
        }
    }
    if (m.is_square()) {
        // Sq^k(y^2) = (Sq^{k/2} y)^2, and 0 for odd k.
        if (k % 2)
            return out;
        Monomial half = m;
        half.degree /= 2;
        for (auto& p : half.powers)
            p.exp /= 2;
        for (const auto& t : sq(k / 2, half))
            out.toggle(square(t));
        return out;
    }
    auto odd = std::find_if(m.powers.begin(), m.powers.end(), [](const GenPower& p) { return p.exp % 2 == 1; });
    const std::uint32_t g = odd->gen;
    const Monomial rest = divide_by_generator(m, g);
    const int top = std::min(k, gens_[g].degree);
    for (int i = 0; i <= top; ++i) {
        if (k - i > rest.degree)
            continue;
        MonoSum left = sq_generator(i, g);
        if (left.empty())
            continue;
        out.add(multiply(left, sq(k - i, rest)));
    }
    return out;
}

Element FreeUnstableAlgebra::sq(int k, const Element& x) const
{
    if (k < 0)
        throw std::invalid_argument("negative Steenrod square");
    Element out{x.degree + k, {}};
    if (k > x.degree)
        return out;
    check_degree(x.degree + k);
    for (const auto& m : x.terms)
        out.terms.add(sq(k, m));
    return out;
}

Element FreeUnstableAlgebra::sq_lower(int i, const Element& x) const
{
    const int upper = steenrod::lower_to_upper(i, x.degree);
    if (upper < 0 || upper > x.degree)
        return Element{2 * x.degree - i, {}};
    return sq(upper, x);
}

f2::BitVector FreeUnstableAlgebra::to_vector(const Element& x) const
{
    f2::BitVector v(dim(x.degree));
    for (const auto& m : x.terms) {
        auto idx = index_of(m);
        if (!idx || m.degree != x.degree)
            throw NonHomogeneous("monomial not in basis of degree " + std::to_string(x.degree));
        v.flip(*idx);
    }
    return v;
}

Element FreeUnstableAlgebra::from_vector(int degree, const f2::BitVector& v) const
{
    Element x{degree, {}};
    const auto& b = basis(degree);
    for (std::size_t i : v.ones())
        x.terms.toggle(b[i]);
    return x;
}

std::string FreeUnstableAlgebra::to_string(const Monomial& m) const
{
    if (m.is_one())
        return "1";
    std::string out;
    for (const auto& p : m.powers) {
        if (!out.empty())
            out += ' ';
        const auto& name = gens_[p.gen].name;
        out += name.find('(') == std::string::npos ? name : "[" + name + "]";
        if (p.exp > 1)
            out += '^' + std::to_string(p.exp);
    }
    return out;
}

std::string FreeUnstableAlgebra::to_string(const Element& x) const
{
    if (x.is_zero())
        return "0";
    std::string out;
    for (const auto& m : x.terms) {
        if (!out.empty())
            out += " + ";
        out += to_string(m);
    }
    return out;
}

std::vector<std::size_t> convolve(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    const std::size_t len = std::min(a.size(), b.size());
    std::vector<std::size_t> out(len, 0);
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; i + j < len; ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace loopcoh::unstable
