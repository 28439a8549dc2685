#include "loopcoh/borel.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace loopcoh::borel {

int WMonomial::degree() const
{
    int d = 0;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        d += static_cast<int>(i + 2) * exponents[i];
    return d;
}

std::string WMonomial::to_string() const
{
    std::string out;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] == 0)
            continue;
        if (!out.empty())
            out += ' ';
        out += "w" + std::to_string(i + 2);
        if (exponents[i] > 1)
            out += "^" + std::to_string(exponents[i]);
    }
    return out.empty() ? "1" : out;
}

std::vector<WMonomial> w_monomials(int n, int degree, bool with_top)
{
    std::vector<WMonomial> out;
    if (degree < 0)
        return out;
    const int slots = n;  // w_2 .. w_{n+1}
    WMonomial cur{std::vector<int>(static_cast<std::size_t>(slots), 0)};
    auto rec = [&](auto&& self, int slot, int remaining) -> void {
        if (slot < 0) {
            if (remaining == 0)
                out.push_back(cur);
            return;
        }
        const int weight = slot + 2;
        const bool allowed = with_top || weight != n + 1;
        const int max_e = allowed ? remaining / weight : 0;
        for (int e = max_e; e >= 0; --e) {
            cur.exponents[slot] = e;
            self(self, slot - 1, remaining - e * weight);
        }
        cur.exponents[slot] = 0;
    };
    rec(rec, slots - 1, degree);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> w_series(int n, int D, bool with_top)
{
    std::vector<std::size_t> out;
    for (int d = 0; d <= D; ++d)
        out.push_back(w_monomials(n, d, with_top).size());
    return out;
}

BigradedPage::BigradedPage(std::shared_ptr<const division::LoopAlgebra> L) : L_(std::move(L))
{
    const int D = cutoff();
    for (int p = 0; p <= D + n() + 1; ++p)
        w_.push_back(w_monomials(n(), p));
    for (int q = 0; q <= D; ++q)
        dL_.push_back(L_->differential_matrix(q));
}

BigradedPage build_page(const unstable::EMSpaceSpec& spec, int n, int D)
{
    return BigradedPage(std::make_shared<const division::LoopAlgebra>(spec, n, D));
}

const std::vector<WMonomial>& BigradedPage::w_basis(int p) const
{
    return w_.at(static_cast<std::size_t>(p));
}

std::size_t BigradedPage::dim(int p, int q) const
{
    if (!has_cell(p, q))
        return 0;
    return w_basis(p).size() * L_->algebra().dim(q);
}

std::string BigradedPage::basis_label(int p, int q, std::size_t i) const
{
    const std::size_t lq = L_->algebra().dim(q);
    const auto& w = w_basis(p)[i / lq];
    const auto& x = L_->algebra().basis(q)[i % lq];
    return L_->algebra().to_string(x) + " (x) " + w.to_string();
}

std::size_t BigradedPage::target_index(int p, int q, std::size_t i_w, std::size_t target_l) const
{
    const int tp = p + n() + 1;
    const int tq = q - n();
    WMonomial w = w_basis(p)[i_w];
    w.exponents.back() += 1;  // times w_{n+1}
    const auto& tw = w_basis(tp);
    const auto it = std::lower_bound(tw.begin(), tw.end(), w);
    return static_cast<std::size_t>(it - tw.begin()) * L_->algebra().dim(tq) + target_l;
}

f2::BitMatrix BigradedPage::differential(int p, int q) const
{
    const int tq = q - n();
    const std::size_t rows = dim(p, q);
    if (tq < 0)
        return f2::BitMatrix(rows, 0);
    const int tp = p + n() + 1;
    const std::size_t cols = w_basis(tp).size() * L_->algebra().dim(tq);
    f2::BitMatrix m(rows, cols);
    const auto& dl = dL_.at(static_cast<std::size_t>(q));
    const std::size_t lq = L_->algebra().dim(q);
    for (std::size_t iw = 0; iw < w_basis(p).size(); ++iw) {
        const std::size_t base = target_index(p, q, iw, 0);
        for (std::size_t r = 0; r < lq; ++r)
            for (std::size_t c : dl.row_vector(r).ones())
                m.set(iw * lq + r, base + c);
    }
    return m;
}

namespace {

CellCohomology compute_cell(const BigradedPage& page, int p, int q, int verified_limit, bool reps)
{
    CellCohomology c;
    c.p = p;
    c.q = q;
    c.source_dim = page.dim(p, q);
    c.verified = p + q <= verified_limit;
    const f2::BitMatrix out = page.differential(p, q);
    c.rank_out = f2::rank_auto(out);
    f2::BitMatrix in;
    const int sp = p - page.n() - 1;
    const int sq = q + page.n();
    if (page.has_cell(sp, sq)) {
        in = page.differential(sp, sq);
        c.rank_in = f2::rank_auto(in);
    }
    // Same ranks with rows and columns exchanged: an independent elimination
    // order on the same data.
    std::size_t rank_out_t = f2::rank(out.transposed());
    std::size_t rank_in_t = in.rows() ? f2::rank(in.transposed()) : 0;
    c.transpose_consistent = rank_out_t == c.rank_out && rank_in_t == c.rank_in;
    c.dim = c.source_dim - c.rank_out - c.rank_in;

    if (reps) {
        f2::IncrementalBasis basis(c.source_dim);
        for (std::size_t r = 0; r < in.rows(); ++r)
            basis.insert(in.row_vector(r));
        f2::BitMatrix kernel = out.cols() ? f2::left_kernel(out) : f2::BitMatrix(0, 0);
        if (!out.cols()) {
            for (std::size_t i = 0; i < c.source_dim; ++i) {
                f2::BitVector v(c.source_dim);
                v.set(i);
                if (basis.insert(v))
                    c.representatives.push_back(std::move(v));
            }
        } else {
            for (std::size_t r = 0; r < kernel.rows(); ++r) {
                f2::BitVector v = kernel.row_vector(r);
                if (basis.insert(v))
                    c.representatives.push_back(std::move(v));
            }
        }
    }
    return c;
}

}  // namespace

CohomologyPage cohomology(const BigradedPage& page, const CohomologyOptions& options)
{
    CohomologyPage coh(page.n(), page.cutoff());
    std::vector<std::pair<int, int>> cells;
    for (int t = 0; t <= page.cutoff(); ++t)
        for (int p = 0; p <= t; ++p)
            cells.emplace_back(p, t - p);

    std::vector<CellCohomology> results(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            results[i] = compute_cell(page, cells[i].first, cells[i].second, coh.verified_limit(),
                                      options.representatives);
    };
    const unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& c : results)
        coh.insert(std::move(c));
    return coh;
}

std::vector<std::size_t> gr_poincare(const CohomologyPage& coh)
{
    std::vector<std::size_t> out;
    for (int t = 0; t <= coh.verified_limit(); ++t) {
        std::size_t total = 0;
        for (int p = 0; p <= t; ++p)
            total += coh.dim(p, t - p);
        out.push_back(total);
    }
    return out;
}

ChartFormat parse_chart_format(const std::string& name)
{
    if (name == "csv")
        return ChartFormat::csv;
    if (name == "svg")
        return ChartFormat::svg;
    if (name == "txt")
        return ChartFormat::txt;
    throw std::invalid_argument("unknown chart format '" + name + "' (expected csv, svg or txt)");
}

namespace {

void write_txt(std::ostream& out, const ChartData& chart, const std::string& title)
{
    const int D = chart.cutoff;
    out << title << '\n';
    std::map<std::pair<int, int>, const ChartCell*> at;
    std::size_t width = 1;
    for (const auto& c : chart.cells) {
        at[{c.p, c.q}] = &c;
        width = std::max(width, std::to_string(c.dim).size() + (c.verified ? 0 : 1));
    }
    width += 1;
    for (int q = D; q >= 0; --q) {
        out << fmt::format("{:>3} |", q);
        for (int p = 0; p + q <= D; ++p) {
            auto it = at.find({p, q});
            const ChartCell* c = it == at.end() ? nullptr : it->second;
            std::string s = !c || c->dim == 0 ? "." : std::to_string(c->dim) + (c->verified ? "" : "?");
            out << fmt::format("{:>{}}", s, width);
        }
        out << '\n';
    }
    out << "    +" << std::string(static_cast<std::size_t>(D + 1) * width, '-') << '\n';
    out << "     ";
    for (int p = 0; p <= D; ++p)
        out << fmt::format("{:>{}}", p, width);
    out << "\n     p (w-degree) ->, q (loop degree) ^\n";
}

void write_svg(std::ostream& out, const ChartData& chart)
{
    const int D = chart.cutoff;
    const int n = chart.n;
    const int cell = 36;
    const int margin = 40;
    const int size = (D + 1) * cell + 2 * margin;
    auto x_of = [&](int p) { return margin + p * cell; };
    auto y_of = [&](int q) { return margin + (D - q) * cell; };
    out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" font-family="monospace" font-size="12">)",
                       size)
        << '\n';
    for (const auto& c : chart.cells) {
        if (c.dim == 0)
            continue;
        out << fmt::format(R"(  <rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="black"/>)", x_of(c.p),
                           y_of(c.q), cell - 4, cell - 4, c.verified ? "#cfe2ff" : "#eeeeee")
            << '\n';
        out << fmt::format(R"(  <text x="{}" y="{}" text-anchor="middle">{}</text>)", x_of(c.p) + (cell - 4) / 2,
                           y_of(c.q) + (cell - 4) / 2 + 4, c.dim)
            << '\n';
    }
    for (const auto& [p, q] : chart.arrows)
        out << fmt::format(R"(  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red"/>)", x_of(p) + cell / 2 - 2,
                           y_of(q) + cell / 2 - 2, x_of(p + n + 1) + cell / 2 - 2, y_of(q - n) + cell / 2 - 2)
            << '\n';
    out << fmt::format(R"(  <text x="{}" y="{}">p</text>)", size - margin / 2, size - margin / 4) << '\n';
    out << fmt::format(R"(  <text x="{}" y="{}">q</text>)", margin / 4, margin / 2) << '\n';
    out << "</svg>\n";
}

}  // namespace

ChartData chart_data(const BigradedPage& page)
{
    ChartData chart;
    chart.n = page.n();
    chart.cutoff = page.cutoff();
    chart.is_page = true;
    for (int t = 0; t <= chart.cutoff; ++t)
        for (int p = 0; p <= t; ++p) {
            const int q = t - p;
            chart.cells.push_back({p, q, page.dim(p, q), true});
            if (page.has_cell(p + page.n() + 1, q - page.n()) && !page.differential(p, q).is_zero())
                chart.arrows.emplace_back(p, q);
        }
    return chart;
}

ChartData chart_data(const CohomologyPage& coh)
{
    ChartData chart;
    chart.n = coh.n();
    chart.cutoff = coh.cutoff();
    chart.is_page = false;
    for (const auto& [key, c] : coh.cells())
        chart.cells.push_back({c.p, c.q, c.dim, c.verified});
    std::sort(chart.cells.begin(), chart.cells.end(), [](const ChartCell& a, const ChartCell& b) {
        return std::pair(a.p + a.q, a.p) < std::pair(b.p + b.q, b.p);
    });
    return chart;
}

void emit_chart(std::ostream& out, const ChartData& chart, ChartFormat format)
{
    switch (format) {
    case ChartFormat::csv:
        out << (chart.is_page ? "p,q,dim\n" : "p,q,dim,verified\n");
        for (const auto& c : chart.cells) {
            out << c.p << ',' << c.q << ',' << c.dim;
            if (!chart.is_page)
                out << ',' << (c.verified ? 1 : 0);
            out << '\n';
        }
        break;
    case ChartFormat::txt:
        write_txt(out, chart,
                  chart.is_page ? fmt::format("E_{} page, n = {}, cutoff {}", chart.n + 1, chart.n, chart.cutoff)
                                : fmt::format("E_infinity, n = {}, cutoff {} ('?' = within n+1 of the cutoff)",
                                              chart.n, chart.cutoff));
        break;
    case ChartFormat::svg:
        write_svg(out, chart);
        break;
    }
}

void emit_chart(std::ostream& out, const BigradedPage& page, ChartFormat format)
{
    emit_chart(out, chart_data(page), format);
}

void emit_chart(std::ostream& out, const CohomologyPage& coh, ChartFormat format)
{
    emit_chart(out, chart_data(coh), format);
}

}  // namespace loopcoh::borel
