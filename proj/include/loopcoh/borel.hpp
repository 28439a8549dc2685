#pragma once

#include "loopcoh/f2/bit_matrix.hpp"
#include "loopcoh/loop_algebra.hpp"

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

// The bigraded page L_n(A) (x) F2[w_2, ..., w_{n+1}] with differential
// d(x (x) w) = d(x) (x) w w_{n+1}, and its cohomology.
namespace loopcoh::borel {

// Exponents of w_2, ..., w_{n+1}; no w_1 slot.
struct WMonomial {
    std::vector<int> exponents;

    int degree() const;
    int exponent(int i) const { return exponents.at(static_cast<std::size_t>(i - 2)); }
    std::string to_string() const;
    friend auto operator<=>(const WMonomial&, const WMonomial&) = default;
};

// All w-monomials of the given degree; `with_top` false excludes w_{n+1}.
std::vector<WMonomial> w_monomials(int n, int degree, bool with_top = true);
std::vector<std::size_t> w_series(int n, int D, bool with_top = true);

class BigradedPage {
public:
    explicit BigradedPage(std::shared_ptr<const division::LoopAlgebra> L);

    int n() const { return L_->n(); }
    int cutoff() const { return L_->cutoff(); }
    const division::LoopAlgebra& loop() const { return *L_; }

    // Cells exist for p, q >= 0 with p + q <= cutoff.
    bool has_cell(int p, int q) const { return p >= 0 && q >= 0 && p + q <= cutoff(); }
    std::size_t dim(int p, int q) const;
    const std::vector<WMonomial>& w_basis(int p) const;
    // Basis element i of cell (p,q) is w_basis(p)[i / dim L^q] (x) (L^q)[i % dim L^q].
    std::string basis_label(int p, int q, std::size_t i) const;

    // d : (p,q) -> (p+n+1, q-n), one row per basis element of (p,q). Zero
    // columns when the target has q - n < 0.
    f2::BitMatrix differential(int p, int q) const;
    std::size_t target_index(int p, int q, std::size_t i_w, std::size_t target_l) const;

private:
    std::shared_ptr<const division::LoopAlgebra> L_;
    std::vector<std::vector<WMonomial>> w_;
    std::vector<f2::BitMatrix> dL_;
};

BigradedPage build_page(const unstable::EMSpaceSpec& spec, int n, int D);

struct CellCohomology {
    int p = 0;
    int q = 0;
    std::size_t source_dim = 0;
    std::size_t rank_out = 0;
    std::size_t rank_in = 0;
    std::size_t dim = 0;
    bool verified = false;
    // Ranks recomputed on the transposed matrices agree with the direct ones.
    bool transpose_consistent = true;
    std::vector<f2::BitVector> representatives;
};

class CohomologyPage {
public:
    CohomologyPage(int n, int cutoff) : n_(n), cutoff_(cutoff) {}

    int n() const { return n_; }
    int cutoff() const { return cutoff_; }
    // Bidegrees with p + q <= cutoff - (n + 1) are verified; the rest sit too
    // close to the truncation and are reported but flagged.
    int verified_limit() const { return cutoff_ - (n_ + 1); }
    bool verified(int p, int q) const { return p + q <= verified_limit(); }

    const CellCohomology& cell(int p, int q) const { return cells_.at({p, q}); }
    std::size_t dim(int p, int q) const { return cell(p, q).dim; }
    const std::map<std::pair<int, int>, CellCohomology>& cells() const { return cells_; }
    void insert(CellCohomology c) { cells_[{c.p, c.q}] = std::move(c); }

private:
    int n_;
    int cutoff_;
    std::map<std::pair<int, int>, CellCohomology> cells_;
};

struct CohomologyOptions {
    unsigned jobs = 1;
    bool representatives = false;
};

CohomologyPage cohomology(const BigradedPage& page, const CohomologyOptions& options = {});

// Sum of dim(p,q) over p + q = t, for t up to the verified limit.
std::vector<std::size_t> gr_poincare(const CohomologyPage& coh);

enum class ChartFormat { csv, svg, txt };
ChartFormat parse_chart_format(const std::string& name);

// What a chart shows, detached from the objects it was computed from so it
// can be stored and rendered again later.
struct ChartCell {
    int p = 0;
    int q = 0;
    std::size_t dim = 0;
    bool verified = true;
};

struct ChartData {
    int n = 1;
    int cutoff = 0;
    bool is_page = true;  // E_{n+1} page (with arrows) or its cohomology
    std::vector<ChartCell> cells;
    // Sources (p, q) of nonzero differential blocks (p,q) -> (p+n+1, q-n).
    std::vector<std::pair<int, int>> arrows;
};

ChartData chart_data(const BigradedPage& page);
ChartData chart_data(const CohomologyPage& coh);

void emit_chart(std::ostream& out, const ChartData& chart, ChartFormat format);
void emit_chart(std::ostream& out, const BigradedPage& page, ChartFormat format);
void emit_chart(std::ostream& out, const CohomologyPage& coh, ChartFormat format);

}  // namespace loopcoh::borel
