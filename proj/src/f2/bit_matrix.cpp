#include "loopcoh/f2/bit_matrix.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace loopcoh::f2 {

void BitVector::set(std::size_t i, bool value)
{
    Word mask = Word{1} << (i % kWordBits);
    if (value)
        words_[i / kWordBits] |= mask;
    else
        words_[i / kWordBits] &= ~mask;
}

bool BitVector::none() const
{
    return active_kernels().is_zero(words_.data(), words_.size());
}

std::size_t BitVector::count() const
{
    return active_kernels().popcount(words_.data(), words_.size());
}

std::optional<std::size_t> BitVector::first_set() const
{
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w])
            return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return std::nullopt;
}

std::vector<std::size_t> BitVector::ones() const
{
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        Word bits = words_[w];
        while (bits) {
            out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

BitVector& BitVector::operator^=(const BitVector& other)
{
    if (other.size_ != size_)
        throw std::invalid_argument("BitVector size mismatch");
    active_kernels().xor_into(words_.data(), other.words_.data(), words_.size());
    return *this;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * stride_, 0)
{
}

void BitMatrix::set(std::size_t r, std::size_t c, bool value)
{
    Word mask = Word{1} << (c % kWordBits);
    Word& w = data_[r * stride_ + c / kWordBits];
    if (value)
        w |= mask;
    else
        w &= ~mask;
}

BitVector BitMatrix::row_vector(std::size_t r) const
{
    BitVector v(cols_);
    std::ranges::copy(row(r), v.words().begin());
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector& v)
{
    if (v.size() != cols_)
        throw std::invalid_argument("BitMatrix::set_row size mismatch");
    std::ranges::copy(v.words(), row(r).begin());
}

BitMatrix BitMatrix::transposed() const
{
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto words = row(r);
        for (std::size_t w = 0; w < stride_; ++w) {
            Word bits = words[w];
            while (bits) {
                std::size_t c = w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
                t.set(c, r);
                bits &= bits - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::multiply(const BitMatrix& rhs) const
{
    if (cols_ != rhs.rows_)
        throw std::invalid_argument("BitMatrix::multiply shape mismatch");
    const auto& k = active_kernels();
    BitMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c))
                k.xor_into(out.row(r).data(), rhs.row(c).data(), out.stride_);
    return out;
}

bool BitMatrix::is_zero() const
{
    return active_kernels().is_zero(data_.data(), data_.size());
}

namespace {

// Forward elimination on the first `pivot_cols` columns. Returns the rank;
// rows [0, rank) carry pivots in increasing column order.
std::size_t forward_eliminate(BitMatrix& m, std::size_t pivot_cols, bool reduce_above,
                              std::vector<std::size_t>* pivots = nullptr)
{
    const auto& k = active_kernels();
    const std::size_t stride = m.words_per_row();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < pivot_cols && rank < m.rows(); ++c) {
        std::size_t p = rank;
        while (p < m.rows() && !m.get(p, c))
            ++p;
        if (p == m.rows())
            continue;
        if (p != rank)
            std::swap_ranges(m.row(p).begin(), m.row(p).end(), m.row(rank).begin());
        const std::size_t off = c / kWordBits;
        const Word* pivot = m.row(rank).data() + off;
        std::size_t first = reduce_above ? 0 : rank + 1;
        for (std::size_t r = first; r < m.rows(); ++r) {
            if (r != rank && m.get(r, c))
                k.xor_into(m.row(r).data() + off, pivot, stride - off);
        }
        if (pivots)
            pivots->push_back(c);
        ++rank;
    }
    return rank;
}

}  // namespace

std::size_t rank(BitMatrix m)
{
    return forward_eliminate(m, m.cols(), false);
}

BitMatrix left_kernel(const BitMatrix& m)
{
    BitMatrix aug(m.rows(), m.cols() + m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c))
                aug.set(r, c);
        aug.set(r, m.cols() + r);
    }
    std::size_t r0 = forward_eliminate(aug, m.cols(), false);
    BitMatrix out(m.rows() - r0, m.rows());
    for (std::size_t r = r0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.rows(); ++c)
            if (aug.get(r, m.cols() + c))
                out.set(r - r0, c);
    return out;
}

BitMatrix row_space(BitMatrix m)
{
    std::size_t r = forward_eliminate(m, m.cols(), true);
    BitMatrix out(r, m.cols());
    for (std::size_t i = 0; i < r; ++i)
        std::ranges::copy(m.row(i), out.row(i).begin());
    return out;
}

std::vector<SparseRow> to_sparse(const BitMatrix& m)
{
    std::vector<SparseRow> rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c : m.row_vector(r).ones())
            rows[r].push_back(static_cast<std::uint32_t>(c));
    return rows;
}

std::size_t rank_sparse(std::vector<SparseRow> rows)
{
    std::unordered_map<std::uint32_t, SparseRow> pivots;
    SparseRow scratch;
    for (auto& row : rows) {
        while (!row.empty()) {
            auto it = pivots.find(row.front());
            if (it == pivots.end()) {
                std::uint32_t lead = row.front();
                pivots.emplace(lead, std::move(row));
                break;
            }
            scratch.clear();
            std::ranges::set_symmetric_difference(row, it->second, std::back_inserter(scratch));
            row.swap(scratch);
        }
    }
    return pivots.size();
}

std::size_t rank_auto(const BitMatrix& m, std::size_t sparse_threshold)
{
    if (m.rows() > sparse_threshold)
        return rank_sparse(to_sparse(m));
    return rank(m);
}

void IncrementalBasis::reduce(BitVector& v) const
{
    if (v.size() != dim_)
        throw std::invalid_argument("IncrementalBasis: dimension mismatch");
    auto words = v.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        while (true) {
            Word bits = words[w];
            bool changed = false;
            while (bits) {
                std::size_t c = w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
                bits &= bits - 1;
                if (pivot_row_[c] != npos) {
                    v ^= rows_[pivot_row_[c]];
                    changed = true;
                    break;
                }
            }
            if (!changed)
                break;
        }
    }
}

bool IncrementalBasis::insert(BitVector v)
{
    reduce(v);
    auto lead = v.first_set();
    if (!lead)
        return false;
    pivot_row_[*lead] = rows_.size();
    rows_.push_back(std::move(v));
    return true;
}

bool IncrementalBasis::contains(BitVector v) const
{
    reduce(v);
    return v.none();
}

}  // namespace loopcoh::f2
