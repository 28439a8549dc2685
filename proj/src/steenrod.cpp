#include "loopcoh/steenrod.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace loopcoh::steenrod {

bool binom_mod2(long a, long b)
{
    if (a < 0 || b < 0 || b > a)
        return false;
    return (a & b) == b;
}

bool is_admissible(std::span<const int> word)
{
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] <= 0)
            return false;
        if (i + 1 < word.size() && word[i] < 2 * word[i + 1])
            return false;
    }
    return true;
}

AdmissibleMonomial::AdmissibleMonomial(std::vector<int> upper_indices) : indices_(std::move(upper_indices))
{
    if (!is_admissible(indices_))
        throw std::invalid_argument("not an admissible sequence: " + to_string());
}

int AdmissibleMonomial::degree() const
{
    int total = 0;
    for (int b : indices_)
        total += b;
    return total;
}

int AdmissibleMonomial::excess() const
{
    if (indices_.empty())
        return 0;
    return 2 * indices_.front() - degree();
}

AdmissibleMonomial AdmissibleMonomial::tail() const
{
    AdmissibleMonomial t;
    if (!indices_.empty())
        t.indices_.assign(indices_.begin() + 1, indices_.end());
    return t;
}

std::string AdmissibleMonomial::to_string() const
{
    if (indices_.empty())
        return "1";
    std::string out;
    for (int b : indices_)
        out += "Sq^" + std::to_string(b);
    return out;
}

void SteenrodSum::add(const AdmissibleMonomial& m)
{
    auto [it, inserted] = terms_.insert(m);
    if (!inserted)
        terms_.erase(it);
}

void SteenrodSum::add(const SteenrodSum& other)
{
    for (const auto& m : other.terms_)
        add(m);
}

std::string SteenrodSum::to_string() const
{
    if (terms_.empty())
        return "0";
    std::string out;
    for (const auto& m : terms_) {
        if (!out.empty())
            out += " + ";
        out += m.to_string();
    }
    return out;
}

namespace {

using Word = std::vector<int>;

void toggle(std::map<Word, bool>& pending, Word w)
{
    auto [it, inserted] = pending.emplace(std::move(w), true);
    if (!inserted)
        pending.erase(it);
}

std::ptrdiff_t find_inadmissible(const Word& w, RewriteOrder order)
{
    const auto n = static_cast<std::ptrdiff_t>(w.size());
    if (order == RewriteOrder::leftmost) {
        for (std::ptrdiff_t i = 0; i + 1 < n; ++i)
            if (w[i] < 2 * w[i + 1])
                return i;
    } else {
        for (std::ptrdiff_t i = n - 2; i >= 0; --i)
            if (w[i] < 2 * w[i + 1])
                return i;
    }
    return -1;
}

}  // namespace

SteenrodSum adem_reduce(std::span<const int> word, RewriteOrder order)
{
    Word start;
    for (int b : word) {
        if (b < 0)
            throw std::invalid_argument("adem_reduce: negative Steenrod index");
        if (b > 0)
            start.push_back(b);
    }
    // F2 worklist: a word present twice cancels.
    std::map<Word, bool> pending;
    pending.emplace(std::move(start), true);
    SteenrodSum result;
    while (!pending.empty()) {
        Word w = pending.begin()->first;
        pending.erase(pending.begin());
        std::ptrdiff_t i = find_inadmissible(w, order);
        if (i < 0) {
            result.add(AdmissibleMonomial(std::move(w)));
            continue;
        }
        const int a = w[i];
        const int b = w[i + 1];
        for (int c = 0; 2 * c <= a; ++c) {
            if (!binom_mod2(b - c - 1, a - 2 * c))
                continue;
            Word next(w.begin(), w.begin() + i);
            next.push_back(a + b - c);
            if (c > 0)
                next.push_back(c);
            next.insert(next.end(), w.begin() + i + 2, w.end());
            toggle(pending, std::move(next));
        }
    }
    return result;
}

SteenrodSum adem_reduce(const SteenrodSum& sum)
{
    SteenrodSum out;
    for (const auto& m : sum)
        out.add(adem_reduce(m.indices()));
    return out;
}

namespace {

struct ComposeCache {
    std::shared_mutex mutex;
    std::map<std::pair<AdmissibleMonomial, AdmissibleMonomial>, SteenrodSum> table;
};

ComposeCache& compose_cache()
{
    static ComposeCache cache;
    return cache;
}

}  // namespace

SteenrodSum compose(const AdmissibleMonomial& x, const AdmissibleMonomial& y)
{
    if (x.is_identity())
        return SteenrodSum(y);
    if (y.is_identity())
        return SteenrodSum(x);
    auto& cache = compose_cache();
    auto key = std::make_pair(x, y);
    {
        std::shared_lock lock(cache.mutex);
        if (auto it = cache.table.find(key); it != cache.table.end())
            return it->second;
    }
    Word word = x.indices();
    word.insert(word.end(), y.indices().begin(), y.indices().end());
    SteenrodSum reduced = adem_reduce(word);
    std::unique_lock lock(cache.mutex);
    cache.table.emplace(std::move(key), reduced);
    return reduced;
}

SteenrodSum sq_times(int k, const AdmissibleMonomial& x)
{
    if (k < 0)
        throw std::invalid_argument("sq_times: negative Steenrod index");
    if (k == 0)
        return SteenrodSum(x);
    return compose(AdmissibleMonomial({k}), x);
}

std::vector<AdmissibleMonomial> admissible_of_degree(int degree)
{
    std::vector<AdmissibleMonomial> out;
    if (degree < 0)
        return out;
    if (degree == 0) {
        out.emplace_back();
        return out;
    }
    // Build right to left: each new leading entry is at least twice the
    // previous leading entry.
    std::vector<int> tail;
    auto rec = [&](auto&& self, int remaining, int min_lead) -> void {
        if (remaining == 0) {
            out.emplace_back(std::vector<int>(tail.rbegin(), tail.rend()));
            return;
        }
        for (int b = min_lead; b <= remaining; ++b) {
            tail.push_back(b);
            self(self, remaining - b, 2 * b);
            tail.pop_back();
        }
    };
    rec(rec, degree, 1);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace loopcoh::steenrod
