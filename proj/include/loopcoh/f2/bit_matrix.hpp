#pragma once

#include "loopcoh/f2/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace loopcoh::f2 {

inline std::size_t words_for(std::size_t bits)
{
    return (bits + kWordBits - 1) / kWordBits;
}

// Dense row vector over F2.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(words_for(size), 0) {}

    std::size_t size() const { return size_; }
    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    void set(std::size_t i, bool value = true);
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }
    bool none() const;
    std::size_t count() const;
    std::optional<std::size_t> first_set() const;
    std::vector<std::size_t> ones() const;

    BitVector& operator^=(const BitVector& other);
    friend bool operator==(const BitVector&, const BitVector&) = default;

    std::span<Word> words() { return words_; }
    std::span<const Word> words() const { return words_; }

private:
    std::size_t size_ = 0;
    std::vector<Word> words_;
};

// Row-major bit-packed matrix. Rows are padded to whole words; padding bits
// stay zero.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return stride_; }

    bool get(std::size_t r, std::size_t c) const
    {
        return (data_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool value = true);
    void flip(std::size_t r, std::size_t c) { data_[r * stride_ + c / kWordBits] ^= Word{1} << (c % kWordBits); }

    std::span<Word> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
    std::span<const Word> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }
    BitVector row_vector(std::size_t r) const;
    void set_row(std::size_t r, const BitVector& v);

    BitMatrix transposed() const;
    BitMatrix multiply(const BitMatrix& rhs) const;
    bool is_zero() const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> data_;
};

std::size_t rank(BitMatrix m);

// Basis of {x : x * m = 0}, one basis vector per row of the result.
BitMatrix left_kernel(const BitMatrix& m);

// Reduced row echelon basis of the row space.
BitMatrix row_space(BitMatrix m);

// Sparse rows: sorted column indices of the nonzero entries.
using SparseRow = std::vector<std::uint32_t>;
std::size_t rank_sparse(std::vector<SparseRow> rows);
std::vector<SparseRow> to_sparse(const BitMatrix& m);

inline constexpr std::size_t kDefaultSparseThreshold = std::size_t{1} << 14;

// Dense elimination up to `sparse_threshold` rows, sparse above it.
std::size_t rank_auto(const BitMatrix& m, std::size_t sparse_threshold = kDefaultSparseThreshold);

// Row-echelon basis grown one vector at a time. insert() reports whether the
// vector was independent of everything inserted before.
class IncrementalBasis {
public:
    explicit IncrementalBasis(std::size_t dim) : dim_(dim), pivot_row_(dim, npos) {}

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }
    bool insert(BitVector v);
    bool contains(BitVector v) const;
    void reduce(BitVector& v) const;

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t dim_;
    std::vector<BitVector> rows_;
    std::vector<std::size_t> pivot_row_;
};

}  // namespace loopcoh::f2
