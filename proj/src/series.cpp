#include "uniwalsh/series.hpp"

#include "uniwalsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uniwalsh {

namespace {

std::vector<double> walsh_row(Freq n, int rank) {
    std::vector<double> w(std::size_t{1} << rank);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = walsh_sign(n, i, rank);
    return w;
}

void require_resolved(Freq f, int rank, const char* what) {
    if (f >= 0 && rank_for_frequency(f) > rank) throw ResolutionError(std::string(what) + ": grid too coarse");
}

// G += a (x) b on a row-major grid.
void add_tensor(Grid2D& g, std::span<const double> a, std::span<const double> b) {
    const std::size_t cols = g.cols();
    auto vals = g.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* row = vals.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] += ai * b[j];
    }
}

std::int64_t sq(Freq k) { return static_cast<std::int64_t>(k) * k; }

}  // namespace

void normalize(std::vector<Coefficient2D>& coeffs) {
    std::erase_if(coeffs, [](const Coefficient2D& c) { return c.value == 0.0; });
    std::sort(coeffs.begin(), coeffs.end(),
              [](const auto& a, const auto& b) { return a.k != b.k ? a.k < b.k : a.v < b.v; });
    for (std::size_t i = 1; i < coeffs.size(); ++i)
        if (coeffs[i].k == coeffs[i - 1].k && coeffs[i].v == coeffs[i - 1].v)
            throw std::invalid_argument("duplicate coefficient index");
}

void normalize(std::vector<Coefficient1D>& coeffs) {
    std::erase_if(coeffs, [](const Coefficient1D& c) { return c.value == 0.0; });
    std::sort(coeffs.begin(), coeffs.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
    for (std::size_t i = 1; i < coeffs.size(); ++i)
        if (coeffs[i].k == coeffs[i - 1].k) throw std::invalid_argument("duplicate coefficient index");
}

Freq max_frequency(std::span<const Coefficient2D> coeffs) {
    Freq m = -1;
    for (const auto& c : coeffs) m = std::max({m, c.k, c.v});
    return m;
}

Freq max_frequency(std::span<const Coefficient1D> coeffs) {
    Freq m = -1;
    for (const auto& c : coeffs) m = std::max(m, c.k);
    return m;
}

// ---------------------------------------------------------------------------

void WalshSeries2D::append_block(std::vector<Coefficient2D> coeffs, Freq end) {
    const Freq start = boundaries_.back();
    if (end <= start) throw std::invalid_argument("append_block: block end must exceed N_S");
    normalize(coeffs);
    for (const auto& c : coeffs)
        if (c.k < start || c.k >= end || c.v < start || c.v >= end)
            throw std::invalid_argument("append_block: coefficient outside the block square");
    coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
    boundaries_.push_back(end);
    offsets_.push_back(coeffs_.size());
}

std::span<const Coefficient2D> WalshSeries2D::block(std::size_t s) const {
    if (s < 1 || s > depth()) throw std::out_of_range("block index");
    return std::span<const Coefficient2D>(coeffs_).subspan(offsets_[s - 1], offsets_[s] - offsets_[s - 1]);
}

bool WalshSeries2D::block_diagonal() const {
    for (std::size_t s = 1; s <= depth(); ++s)
        for (const auto& c : block(s))
            if (c.k < boundaries_[s - 1] || c.k >= boundaries_[s] || c.v < boundaries_[s - 1] ||
                c.v >= boundaries_[s])
                return false;
    return true;
}

// ---------------------------------------------------------------------------

Grid2D rect_partial_sum(std::span<const Coefficient2D> coeffs, Freq n, Freq m, int rank_x, int rank_y) {
    std::vector<double> dense(std::size_t{1} << (rank_x + rank_y), 0.0);
    for (const auto& c : coeffs) {
        if (c.k > n || c.v > m) continue;
        require_resolved(c.k, rank_x, "rect_partial_sum");
        require_resolved(c.v, rank_y, "rect_partial_sum");
        dense[(static_cast<std::size_t>(c.k) << rank_y) | static_cast<std::size_t>(c.v)] += c.value;
    }
    return inverse_fwht2d(dense, rank_x, rank_y);
}

Grid2D sph_partial_sum(std::span<const Coefficient2D> coeffs, std::int64_t upper, std::int64_t lower,
                       int rank_x, int rank_y) {
    std::vector<double> dense(std::size_t{1} << (rank_x + rank_y), 0.0);
    for (const auto& c : coeffs) {
        const std::int64_t t = sq(c.k) + sq(c.v);
        if (t < lower || t > upper) continue;
        require_resolved(c.k, rank_x, "sph_partial_sum");
        require_resolved(c.v, rank_y, "sph_partial_sum");
        dense[(static_cast<std::size_t>(c.k) << rank_y) | static_cast<std::size_t>(c.v)] += c.value;
    }
    return inverse_fwht2d(dense, rank_x, rank_y);
}

std::int64_t radius_squared_floor(double radius) {
    const double x = radius * radius;
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

Grid1D synthesize(std::span<const Coefficient1D> coeffs, int rank) {
    std::vector<double> dense(std::size_t{1} << rank, 0.0);
    for (const auto& c : coeffs) {
        require_resolved(c.k, rank, "synthesize");
        dense[static_cast<std::size_t>(c.k)] += c.value;
    }
    return inverse_fwht(dense);
}

Grid2D synthesize(std::span<const Coefficient2D> coeffs, int rank_x, int rank_y) {
    const Freq inf = std::numeric_limits<Freq>::max();
    return rect_partial_sum(coeffs, inf, inf, rank_x, rank_y);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Freq> effective_cuts(std::vector<Freq> values, CutRange range) {
    std::vector<Freq> out;
    if (range.hi < range.lo) return out;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    Freq first = -1;
    for (Freq v : values)
        if (v <= range.lo) first = v;
    out.push_back(first);
    for (Freq v : values)
        if (v > range.lo && v <= range.hi) out.push_back(v);
    return out;
}

}  // namespace

DistinctCuts distinct_cuts(std::span<const Coefficient2D> coeffs, CutRange rect, CutRange sph) {
    DistinctCuts out;
    std::vector<Freq> ks, vs;
    std::vector<std::int64_t> ts;
    for (const auto& c : coeffs) {
        ks.push_back(c.k);
        vs.push_back(c.v);
        ts.push_back(sq(c.k) + sq(c.v));
    }
    out.rect_x = effective_cuts(ks, rect);
    out.rect_y = effective_cuts(vs, rect);
    if (out.rect_x.empty() || out.rect_y.empty()) {
        out.rect_x.clear();
        out.rect_y.clear();
    }
    if (sph.hi >= sph.lo) {
        const std::int64_t lo = 2 * sq(sph.lo);
        const std::int64_t hi = 2 * sq(sph.hi);
        out.sph_lower = lo;
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        const bool has_lo = std::binary_search(ts.begin(), ts.end(), lo);
        out.sph.push_back(has_lo ? lo : -1);
        for (auto t : ts)
            if (t > lo && t <= hi) out.sph.push_back(t);
    }
    return out;
}

std::vector<Freq> distinct_cuts_1d(std::span<const Coefficient1D> coeffs, CutRange range) {
    std::vector<Freq> ks;
    for (const auto& c : coeffs) ks.push_back(c.k);
    return effective_cuts(ks, range);
}

void sweep_rect(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts, int rank_x, int rank_y,
                const RectVisitor& visit) {
    for (const auto& c : coeffs) {
        require_resolved(c.k, rank_x, "sweep_rect");
        require_resolved(c.v, rank_y, "sweep_rect");
    }
    std::vector<Coefficient2D> by_v(coeffs.begin(), coeffs.end());
    std::stable_sort(by_v.begin(), by_v.end(), [](const auto& a, const auto& b) { return a.v < b.v; });

    const std::size_t rows = std::size_t{1} << rank_x;
    std::vector<double> a(rows);
    for (Freq n : cuts.rect_x) {
        Grid2D g(rank_x, rank_y);
        std::size_t ptr = 0;
        for (Freq m : cuts.rect_y) {
            while (n >= 0 && ptr < by_v.size() && by_v[ptr].v <= m) {
                const Freq v = by_v[ptr].v;
                std::fill(a.begin(), a.end(), 0.0);
                bool any = false;
                for (; ptr < by_v.size() && by_v[ptr].v == v; ++ptr) {
                    if (by_v[ptr].k > n) continue;
                    any = true;
                    const double c = by_v[ptr].value;
                    for (std::size_t i = 0; i < rows; ++i) a[i] += c * walsh_sign(by_v[ptr].k, i, rank_x);
                }
                if (any) add_tensor(g, a, walsh_row(v, rank_y));
            }
            visit(n, m, g);
        }
    }
}

void sweep_sph(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts, int rank_x, int rank_y,
               const SphVisitor& visit) {
    std::vector<Coefficient2D> by_t;
    for (const auto& c : coeffs) {
        if (sq(c.k) + sq(c.v) < cuts.sph_lower) continue;
        require_resolved(c.k, rank_x, "sweep_sph");
        require_resolved(c.v, rank_y, "sweep_sph");
        by_t.push_back(c);
    }
    std::stable_sort(by_t.begin(), by_t.end(),
                     [](const auto& a, const auto& b) { return sq(a.k) + sq(a.v) < sq(b.k) + sq(b.v); });
    Grid2D g(rank_x, rank_y);
    std::vector<double> a(std::size_t{1} << rank_x);
    std::size_t ptr = 0;
    for (std::int64_t u : cuts.sph) {
        for (; ptr < by_t.size() && sq(by_t[ptr].k) + sq(by_t[ptr].v) <= u; ++ptr) {
            const auto& c = by_t[ptr];
            for (std::size_t i = 0; i < a.size(); ++i) a[i] = c.value * walsh_sign(c.k, i, rank_x);
            add_tensor(g, a, walsh_row(c.v, rank_y));
        }
        visit(u, g);
    }
}

void sweep_prefix(std::span<const Coefficient1D> coeffs, std::span<const Freq> cuts, int rank,
                  const PrefixVisitor& visit) {
    for (const auto& c : coeffs) require_resolved(c.k, rank, "sweep_prefix");
    std::vector<Coefficient1D> sorted(coeffs.begin(), coeffs.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
    Grid1D g(rank);
    std::size_t ptr = 0;
    for (Freq m : cuts) {
        for (; ptr < sorted.size() && sorted[ptr].k <= m; ++ptr)
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sorted[ptr].value * walsh_sign(sorted[ptr].k, i, rank);
        visit(m, g);
    }
}

// ---------------------------------------------------------------------------

double coeff_power_norm(std::span<const Coefficient2D> coeffs, double exponent) {
    if (!(exponent > 0)) throw std::invalid_argument("coeff_power_norm: exponent must be positive");
    double s = 0.0;
    for (const auto& c : coeffs) s += std::pow(std::abs(c.value), exponent);
    return s;
}

double coeff_power_norm(std::span<const Coefficient1D> coeffs, double exponent) {
    if (!(exponent > 0)) throw std::invalid_argument("coeff_power_norm: exponent must be positive");
    double s = 0.0;
    for (const auto& c : coeffs) s += std::pow(std::abs(c.value), exponent);
    return s;
}

double worst_subset_margin(const Grid2D& g, const Grid2D& budget, const DyadicSet2D& E) {
    const int rx = std::max({g.rank_x(), budget.rank_x(), E.rank_x()});
    const int ry = std::max({g.rank_y(), budget.rank_y(), E.rank_y()});
    const Grid2D a = refine(g, rx, ry);
    const Grid2D b = refine(budget, rx, ry);
    const DyadicSet2D e = refine(E, rx, ry);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (e.contains(k)) s += std::max(0.0, std::abs(a[k]) - b[k]);
    return s * a.cell_area();
}

double worst_subset_margin(const Grid1D& g, const Grid1D& budget, const DyadicSet1D& E) {
    const int r = std::max({g.rank(), budget.rank(), E.rank()});
    const Grid1D a = refine(g, r);
    const Grid1D b = refine(budget, r);
    const DyadicSet1D e = refine(E, r);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (e.contains(k)) s += std::max(0.0, std::abs(a[k]) - b[k]);
    return s * a.cell_length();
}

double restricted_l1(const Grid2D& g, const DyadicSet2D& E) {
    const int rx = std::max(g.rank_x(), E.rank_x());
    const int ry = std::max(g.rank_y(), E.rank_y());
    const Grid2D a = refine(g, rx, ry);
    const DyadicSet2D e = refine(E, rx, ry);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (e.contains(k)) s += std::abs(a[k]);
    return s * a.cell_area();
}

std::pair<int, int> working_ranks(std::span<const Coefficient2D> coeffs, int min_x, int min_y) {
    Freq mk = -1, mv = -1;
    for (const auto& c : coeffs) {
        mk = std::max(mk, c.k);
        mv = std::max(mv, c.v);
    }
    return {std::max(min_x, mk < 0 ? 0 : rank_for_frequency(mk)),
            std::max(min_y, mv < 0 ? 0 : rank_for_frequency(mv))};
}

// ---------------------------------------------------------------------------

namespace {

// Cut lists with an empty side replaced by the single empty sum.
DistinctCuts with_defaults(const DistinctCuts& cuts) {
    DistinctCuts c = cuts;
    if (c.rect_x.empty() || c.rect_y.empty()) {
        c.rect_x = {-1};
        c.rect_y = {-1};
    }
    if (c.sph.empty()) c.sph = {-1};
    return c;
}

std::vector<std::size_t> cells_of(const DyadicSet2D& e) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < e.size(); ++k)
        if (e.contains(k)) idx.push_back(k);
    return idx;
}

}  // namespace

CombinedSums combined_sums_constant(std::span<const Coefficient2D> coeffs, const DistinctCuts& raw,
                                    const DyadicSet2D& E) {
    const DistinctCuts cuts = with_defaults(raw);
    const auto [rx, ry] = working_ranks(coeffs, E.rank_x(), E.rank_y());
    const DyadicSet2D e = refine(E, rx, ry);
    CombinedSums out;
    out.mode = "direct";
    sweep_rect(coeffs, cuts, rx, ry, [&](Freq, Freq, const Grid2D& g) {
        out.rect_max = std::max(out.rect_max, restricted_l1(g, e));
        ++out.rect_cuts;
    });
    sweep_sph(coeffs, cuts, rx, ry, [&](std::int64_t, const Grid2D& g) {
        out.sph_max = std::max(out.sph_max, restricted_l1(g, e));
        ++out.sph_cuts;
    });
    out.excess = out.rect_max + out.sph_max;
    return out;
}

CombinedSums combined_sums_density(std::span<const Coefficient2D> coeffs, const DistinctCuts& raw,
                                   const DyadicSet2D& E, const Grid2D& density, const PairLimits& limits) {
    const DistinctCuts cuts = with_defaults(raw);
    auto [rx, ry] = working_ranks(coeffs, std::max(E.rank_x(), density.rank_x()),
                                  std::max(E.rank_y(), density.rank_y()));
    const DyadicSet2D e = refine(E, rx, ry);
    const Grid2D d = refine(density, rx, ry);
    const std::vector<std::size_t> idx = cells_of(e);
    const double area = std::ldexp(1.0, -(rx + ry));

    CombinedSums out;
    out.rect_cuts = cuts.rect_count();
    out.sph_cuts = cuts.sph.size();
    const std::size_t pairs = out.rect_cuts * out.sph_cuts;
    const bool pair_mode = pairs <= limits.max_pairs &&
                           out.sph_cuts * idx.size() <= limits.max_stored_values &&
                           static_cast<double>(pairs) * static_cast<double>(idx.size()) <= limits.max_work;

    if (pair_mode) {
        out.mode = "pairs";
        std::vector<double> stored;
        stored.reserve(out.sph_cuts * idx.size());
        sweep_sph(coeffs, cuts, rx, ry, [&](std::int64_t, const Grid2D& g) {
            double s = 0.0;
            for (std::size_t c : idx) {
                stored.push_back(std::abs(g[c]));
                s += std::abs(g[c]);
            }
            out.sph_max = std::max(out.sph_max, s * area);
        });
        out.excess = 0.0;
        sweep_rect(coeffs, cuts, rx, ry, [&](Freq, Freq, const Grid2D& g) {
            double s = 0.0;
            for (std::size_t c : idx) s += std::abs(g[c]);
            out.rect_max = std::max(out.rect_max, s * area);
            const double* row = stored.data();
            for (std::size_t p = 0; p < out.sph_cuts; ++p, row += idx.size()) {
                double acc = 0.0;
                for (std::size_t t = 0; t < idx.size(); ++t)
                    acc += std::max(0.0, std::abs(g[idx[t]]) + row[t] - d[idx[t]]);
                out.excess = std::max(out.excess, acc * area);
            }
        });
        return out;
    }

    out.mode = "split";
    double rect_margin = 0.0, sph_margin = 0.0;
    auto margin = [&](const Grid2D& g) {
        double s = 0.0, l = 0.0;
        for (std::size_t c : idx) {
            s += std::max(0.0, std::abs(g[c]) - d[c]);
            l += std::abs(g[c]);
        }
        return std::pair{s * area, l * area};
    };
    sweep_rect(coeffs, cuts, rx, ry, [&](Freq, Freq, const Grid2D& g) {
        auto [m, l] = margin(g);
        rect_margin = std::max(rect_margin, m);
        out.rect_max = std::max(out.rect_max, l);
    });
    sweep_sph(coeffs, cuts, rx, ry, [&](std::int64_t, const Grid2D& g) {
        auto [m, l] = margin(g);
        sph_margin = std::max(sph_margin, m);
        out.sph_max = std::max(out.sph_max, l);
    });
    out.excess = std::min(rect_margin + out.sph_max, sph_margin + out.rect_max);
    return out;
}

}  // namespace uniwalsh
