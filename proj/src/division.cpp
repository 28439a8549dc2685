#include "loopcoh/division.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace loopcoh::division {

using steenrod::AdmissibleMonomial;
using steenrod::SteenrodSum;

FiniteModule::FiniteModule(std::string name, std::vector<BasisElement> basis)
    : name_(std::move(name)), basis_(std::move(basis))
{
    for (const auto& b : basis_)
        if (b.degree < 0)
            throw std::invalid_argument("finite module " + name_ + ": negative degree");
}

int FiniteModule::top_degree() const
{
    int top = 0;
    for (const auto& b : basis_)
        top = std::max(top, b.degree);
    return top;
}

void FiniteModule::set_action(int i, std::size_t b, std::vector<std::size_t> targets)
{
    if (i <= 0)
        throw std::invalid_argument("set_action: only Sq^i with i > 0 is stored");
    for (std::size_t t : targets)
        if (basis_.at(t).degree != basis_.at(b).degree + i)
            throw std::invalid_argument("set_action: Sq^" + std::to_string(i) + " must raise degree by " +
                                        std::to_string(i));
    std::sort(targets.begin(), targets.end());
    if (targets.empty())
        action_.erase({i, b});
    else
        action_[{i, b}] = std::move(targets);
}

f2::BitVector FiniteModule::unit_vector(std::size_t b) const
{
    f2::BitVector v(size());
    v.set(b);
    return v;
}

f2::BitVector FiniteModule::sq(int i, std::size_t b) const
{
    if (i == 0)
        return unit_vector(b);
    f2::BitVector v(size());
    if (auto it = action_.find({i, b}); it != action_.end())
        for (std::size_t t : it->second)
            v.flip(t);
    return v;
}

f2::BitVector FiniteModule::sq(int i, const f2::BitVector& v) const
{
    if (i == 0)
        return v;
    f2::BitVector out(size());
    for (std::size_t b : v.ones())
        out ^= sq(i, b);
    return out;
}

f2::BitVector FiniteModule::apply(const AdmissibleMonomial& x, const f2::BitVector& v) const
{
    f2::BitVector out = v;
    const auto& idx = x.indices();
    for (auto it = idx.rbegin(); it != idx.rend(); ++it)
        out = sq(*it, out);
    return out;
}

void FiniteModule::set_product(std::size_t a, std::size_t b, std::vector<std::size_t> targets)
{
    for (std::size_t t : targets)
        if (basis_.at(t).degree != basis_.at(a).degree + basis_.at(b).degree)
            throw std::invalid_argument("set_product: product must be additive in degree");
    has_products_ = true;
    products_[{a, b}] = targets;
    products_[{b, a}] = std::move(targets);
}

f2::BitVector FiniteModule::product(std::size_t a, std::size_t b) const
{
    f2::BitVector v(size());
    if (auto it = products_.find({a, b}); it != products_.end())
        for (std::size_t t : it->second)
            v.flip(t);
    return v;
}

void FiniteModule::validate() const
{
    const int top = top_degree();
    for (std::size_t b = 0; b < size(); ++b) {
        for (const auto& [key, targets] : action_)
            if (key.second == b && key.first > degree(b))
                throw std::logic_error(name_ + ": Sq^" + std::to_string(key.first) + " violates instability on " +
                                       basis_[b].label);
        for (int bb = 1; bb <= top; ++bb)
            for (int a = 1; a < 2 * bb; ++a) {
                f2::BitVector lhs = sq(a, sq(bb, b));
                f2::BitVector rhs(size());
                for (const auto& term : steenrod::adem_reduce(std::vector<int>{a, bb}))
                    rhs ^= apply(term, unit_vector(b));
                if (!(lhs == rhs))
                    throw std::logic_error(name_ + ": Adem relation Sq^" + std::to_string(a) + "Sq^" +
                                           std::to_string(bb) + " fails on " + basis_[b].label);
            }
    }
}

FiniteModule suspension(int k)
{
    if (k < 0)
        throw std::invalid_argument("suspension degree must be >= 0");
    const std::string s = "s" + std::to_string(k);
    return FiniteModule("sigma" + std::to_string(k), {{k, s, s + "*"}});
}

FiniteModule sphere(int n)
{
    if (n < 1)
        throw std::invalid_argument("sphere dimension must be >= 1");
    FiniteModule N("sphere" + std::to_string(n), {{0, "1", "1"}, {n, "s", "d"}});
    N.set_product(0, 0, {0});
    N.set_product(0, 1, {1});
    N.set_product(1, 1, {});
    return N;
}

namespace {

// H*(RP^k) = F2[t]/t^{k+1} with Sq^i t^j = C(j, i) t^{i+j}.
FiniteModule truncated_polynomial(std::string name, int k)
{
    std::vector<BasisElement> basis;
    for (int j = 0; j <= k; ++j) {
        std::string label = j == 0 ? "1" : j == 1 ? "t" : "t^" + std::to_string(j);
        basis.push_back({j, label, label + "*"});
    }
    FiniteModule N(std::move(name), std::move(basis));
    for (int j = 1; j <= k; ++j)
        for (int i = 1; i <= j && i + j <= k; ++i)
            if (steenrod::binom_mod2(j, i))
                N.set_action(i, static_cast<std::size_t>(j), {static_cast<std::size_t>(i + j)});
    for (int a = 0; a <= k; ++a)
        for (int b = a; b <= k; ++b) {
            std::vector<std::size_t> t;
            if (a + b <= k)
                t.push_back(static_cast<std::size_t>(a + b));
            N.set_product(static_cast<std::size_t>(a), static_cast<std::size_t>(b), std::move(t));
        }
    return N;
}

int parse_suffix(const std::string& name, std::size_t prefix_len)
{
    int value = -1;
    const char* first = name.data() + prefix_len;
    const char* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc{} || ptr != last)
        throw std::invalid_argument("unknown module '" + name + "'");
    return value;
}

}  // namespace

FiniteModule real_projective(int k)
{
    if (k < 1 || k > 8)
        throw std::invalid_argument("rp<k> is provided for 1 <= k <= 8; use rpinf<K> for larger truncations");
    return truncated_polynomial("rp" + std::to_string(k), k);
}

FiniteModule rp_infinity_truncated(int K)
{
    if (K < 1)
        throw std::invalid_argument("rpinf truncation degree must be >= 1");
    return truncated_polynomial("rpinf" + std::to_string(K), K);
}

FiniteModule builtin_module(const std::string& name)
{
    if (name.rfind("sigma", 0) == 0)
        return suspension(parse_suffix(name, 5));
    if (name.rfind("sphere", 0) == 0)
        return sphere(parse_suffix(name, 6));
    if (name.rfind("rpinf", 0) == 0)
        return rp_infinity_truncated(parse_suffix(name, 5));
    if (name.rfind("rp", 0) == 0)
        return real_projective(parse_suffix(name, 2));
    throw std::invalid_argument("unknown module '" + name + "' (expected sigma<k>, sphere<n>, rp<k>, rpinf<K>)");
}

std::vector<std::string> builtin_module_names()
{
    std::vector<std::string> out;
    for (int k = 0; k <= 5; ++k)
        out.push_back("sigma" + std::to_string(k));
    for (int n = 1; n <= 5; ++n)
        out.push_back("sphere" + std::to_string(n));
    for (int k = 1; k <= 8; ++k)
        out.push_back("rp" + std::to_string(k));
    for (int K : {9, 10, 12})
        out.push_back("rpinf" + std::to_string(K));
    return out;
}

DualModule::DualModule(const FiniteModule& N) : N_(std::make_shared<const FiniteModule>(N)) {}

f2::BitVector DualModule::right_action(std::size_t f, int i) const
{
    // (f Sq^i)(z) = f(Sq^i z): collect every z whose Sq^i hits the dual of f.
    f2::BitVector out(size());
    if (i == 0) {
        out.set(f);
        return out;
    }
    for (std::size_t z = 0; z < size(); ++z)
        if (N_->degree(z) + i == N_->degree(f) && N_->sq(i, z).get(f))
            out.set(z);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> DualModule::comultiply(std::size_t f) const
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t y = 0; y < size(); ++y)
        for (std::size_t z = 0; z < size(); ++z)
            if (N_->product(y, z).get(f))
                out.emplace_back(y, z);
    return out;
}

DualModule dualize(const FiniteModule& N)
{
    return DualModule(N);
}

std::vector<DividedGenerator> divide_free(const std::vector<NamedClass>& V, const FiniteModule& N)
{
    std::vector<DividedGenerator> out;
    for (std::size_t v = 0; v < V.size(); ++v)
        for (std::size_t f = 0; f < N.size(); ++f) {
            const int deg = V[v].degree - N.degree(f);
            if (deg < 0)
                continue;
            out.push_back({"d_" + N.basis()[f].dual_label + "(" + V[v].name + ")", deg, v, f});
        }
    std::stable_sort(out.begin(), out.end(),
                     [](const DividedGenerator& a, const DividedGenerator& b) { return a.degree < b.degree; });
    return out;
}

bool annihilates(const AdmissibleMonomial& x, const FiniteModule& N)
{
    for (std::size_t y = 0; y < N.size(); ++y)
        if (!N.apply(x, N.unit_vector(y)).none())
            return false;
    return true;
}

int bracket(const AdmissibleMonomial& x, const FiniteModule& N)
{
    int best = 0;
    for (std::size_t y = 0; y < N.size(); ++y)
        if (!N.apply(x, N.unit_vector(y)).none())
            best = std::max(best, N.degree(y));
    return best;
}

std::optional<int> BetaTable::beta(const AdmissibleMonomial& x)
{
    // -infinity exactly when x kills N. With this reading the suspension
    // example gives beta(1) = n for every n, including n = 0.
    if (annihilates(x, N_))
        return std::nullopt;
    const int top = N_.top_degree();
    const bool memoize = x.degree() <= top;
    if (memoize) {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(x); it != memo_.end())
            return it->second;
    }
    int best = bracket(x, N_);
    // x Sq^k kills N once k exceeds the top degree.
    for (int k = 1; k <= top; ++k) {
        SteenrodSum xs = steenrod::compose(x, AdmissibleMonomial({k}));
        if (auto b = beta(xs))
            best = std::max(best, 2 * k + *b);
    }
    if (memoize) {
        std::lock_guard lock(mutex_);
        memo_.emplace(x, best);
    }
    return best;
}

std::optional<int> BetaTable::beta(const SteenrodSum& x)
{
    std::optional<int> best;
    for (const auto& m : x)
        if (auto b = beta(m))
            best = best ? std::max(*best, *b) : *b;
    return best;
}

std::size_t BetaTable::memo_size() const
{
    std::lock_guard lock(mutex_);
    return memo_.size();
}

std::vector<BetaRow> beta_table(const FiniteModule& N)
{
    BetaTable table(N);
    std::vector<BetaRow> rows;
    for (int d = 0; d <= N.top_degree(); ++d)
        for (const auto& x : steenrod::admissible_of_degree(d))
            rows.push_back({x, table.beta(x)});
    return rows;
}

void write_beta_csv(std::ostream& out, const std::vector<BetaRow>& rows)
{
    out << "monomial,value\n";
    for (const auto& r : rows)
        out << r.x.to_string() << ',' << (r.value ? std::to_string(*r.value) : "-inf") << '\n';
}

DividedSquare sq_on_divided(const FiniteModule& N, int i, std::size_t f, int v_degree)
{
    DividedSquare result;
    const DualModule dual(N);
    std::map<std::pair<int, std::size_t>, std::set<std::pair<std::size_t, int>>> memo;

    auto toggle = [](std::set<std::pair<std::size_t, int>>& s, const std::pair<std::size_t, int>& t) {
        if (!s.erase(t))
            s.insert(t);
    };

    // Sq^i d_g(v) = d_g(Sq^i v) + sum_{j>=1} Sq^{i-j} d_{g Sq^j}(v)
    std::function<std::set<std::pair<std::size_t, int>>(int, std::size_t)> expand =
        [&](int sq, std::size_t g) -> std::set<std::pair<std::size_t, int>> {
        const int deg = v_degree - N.degree(g);
        std::set<std::pair<std::size_t, int>> out;
        // Negative lower index on d_g(v): zero by instability, nothing consulted.
        if (deg < 0 || sq > deg)
            return out;
        if (auto it = memo.find({sq, g}); it != memo.end())
            return it->second;
        if (sq <= v_degree) {
            if (sq > 0)
                result.consulted.insert(v_degree - sq);
            toggle(out, {g, sq});
        }
        for (int j = 1; j <= sq; ++j)
            for (std::size_t h : dual.right_action(g, j).ones())
                for (const auto& t : expand(sq - j, h))
                    toggle(out, t);
        memo.emplace(std::make_pair(sq, g), out);
        return out;
    };
    result.terms = expand(i, f);
    return result;
}

namespace {

std::string sq_text(int a, const std::string& v)
{
    return a == 0 ? v : "Sq^" + std::to_string(a) + "(" + v + ")";
}

std::string d_text(const FiniteModule& N, std::size_t f, const std::string& inner)
{
    return "d_" + N.basis()[f].dual_label + "(" + inner + ")";
}

std::string sum_text(const std::vector<std::string>& terms)
{
    if (terms.empty())
        return "0";
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty())
            out += " + ";
        out += t;
    }
    return out;
}

}  // namespace

void emit_presentation(std::ostream& out, const PresentationSource& M, const FiniteModule& N)
{
    const DualModule dual(N);
    out << "# division by " << N.name() << (M.is_algebra ? " (unstable algebras)" : " (unstable modules)") << '\n';
    out << "# d_f(v + v') = d_f(v) + d_f(v') for all v, v'\n";
    out << "# d_{f+f'}(v) = d_f(v) + d_{f'}(v) for all f, f'\n";

    std::vector<NamedClass> V = M.generators;
    for (const auto& g : divide_free(V, N))
        out << "GEN " << g.name << ' ' << g.degree << '\n';

    for (const auto& v : V)
        for (std::size_t f = 0; f < N.size(); ++f) {
            const int deg = v.degree - N.degree(f);
            const std::string dv = d_text(N, f, v.name);
            if (deg < 0) {
                out << "REL " << dv << " = 0\n";
                continue;
            }
            // Steenrod action on d_f(v), unexpanded on the right.
            for (int i = 1; i <= deg; ++i) {
                std::vector<std::string> rhs{d_text(N, f, sq_text(i, v.name))};
                for (int j = 1; j <= i; ++j)
                    for (std::size_t h : dual.right_action(f, j).ones()) {
                        if (v.degree - N.degree(h) < 0)
                            continue;
                        rhs.push_back(sq_text(i - j, d_text(N, h, v.name)));
                    }
                out << "REL Sq^" << i << "(" << dv << ") = " << sum_text(rhs) << '\n';
            }
            // Instability: Sq^i vanishes above the degree.
            for (int i = deg + 1; i <= v.degree; ++i)
                out << "REL Sq^" << i << "(" << dv << ") = 0\n";
        }

    for (const auto& rel : M.relations) {
        auto eq = rel.find('=');
        std::string lhs = rel.substr(0, eq);
        std::string rhs = eq == std::string::npos ? "0" : rel.substr(eq + 1);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
            return s;
        };
        for (std::size_t f = 0; f < N.size(); ++f)
            out << "REL " << d_text(N, f, trim(lhs)) << " = " << d_text(N, f, trim(rhs)) << '\n';
    }

    if (!M.is_algebra)
        return;

    // Squaring is the top square: expand Sq^{|d_f v|} d_f(v).
    for (const auto& v : V)
        for (std::size_t f = 0; f < N.size(); ++f) {
            const int deg = v.degree - N.degree(f);
            if (deg < 0)
                continue;
            const std::string dv = d_text(N, f, v.name);
            std::vector<std::string> rhs;
            if (deg == 0) {
                rhs.push_back(dv);
            } else {
                for (const auto& [g, a] : sq_on_divided(N, deg, f, v.degree).terms)
                    rhs.push_back(d_text(N, g, sq_text(a, v.name)));
            }
            out << "REL " << dv << "^2 = " << sum_text(rhs) << '\n';
        }

    if (!N.has_products()) {
        out << "# " << N.name() << " has no multiplication; products of generators are not expanded\n";
        return;
    }
    for (std::size_t a = 0; a < V.size(); ++a)
        for (std::size_t b = a; b < V.size(); ++b)
            for (std::size_t f = 0; f < N.size(); ++f) {
                if (V[a].degree + V[b].degree - N.degree(f) < 0)
                    continue;
                std::vector<std::string> rhs;
                for (const auto& [y, z] : dual.comultiply(f)) {
                    if (V[a].degree - N.degree(y) < 0 || V[b].degree - N.degree(z) < 0)
                        continue;
                    rhs.push_back(d_text(N, y, V[a].name) + "*" + d_text(N, z, V[b].name));
                }
                out << "REL " << d_text(N, f, V[a].name + "*" + V[b].name) << " = " << sum_text(rhs) << '\n';
            }
}

}  // namespace loopcoh::division
