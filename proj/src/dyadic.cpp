#include "uniwalsh/dyadic.hpp"

#include "uniwalsh/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace uniwalsh {

namespace {

constexpr int kMaxGridRank = 30;

void check_rank(int rank, const char* what) {
    if (rank < 0 || rank > kMaxGridRank)
        throw std::invalid_argument(std::string(what) + ": rank out of range");
}

// In-place natural-order Hadamard butterfly over n = 2^rank elements.
void hadamard_inplace(double* a, std::size_t n) {
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            double* lo = a + i;
            double* hi = a + i + h;
            for (std::size_t j = 0; j < h; ++j) {
                const double u = lo[j];
                const double v = hi[j];
                lo[j] = u + v;
                hi[j] = u - v;
            }
        }
    }
}

// Bit reversal is an involution, so the permutation is a set of swaps.
void reverse_permute(double* a, int rank) {
    const std::size_t n = std::size_t{1} << rank;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t r = reverse_bits(j, rank);
        if (j < r) std::swap(a[j], a[r]);
    }
}

// Paley analysis or synthesis of a strided line of length 2^rank.
void paley_line(double* data, std::size_t stride, int rank, bool analysis,
                std::vector<double>& buf) {
    const std::size_t n = std::size_t{1} << rank;
    double* line = data;
    if (stride != 1) {
        buf.resize(n);
        for (std::size_t i = 0; i < n; ++i) buf[i] = data[i * stride];
        line = buf.data();
    }
    if (analysis) {
        hadamard_inplace(line, n);
        reverse_permute(line, rank);
        const double scale = std::ldexp(1.0, -rank);
        for (std::size_t j = 0; j < n; ++j) line[j] *= scale;
    } else {
        reverse_permute(line, rank);
        hadamard_inplace(line, n);
    }
    if (stride != 1)
        for (std::size_t i = 0; i < n; ++i) data[i * stride] = buf[i];
}

void transform2d(std::vector<double>& v, int rx, int ry, bool analysis) {
    std::vector<double> buf;
    const std::size_t rows = std::size_t{1} << rx;
    const std::size_t cols = std::size_t{1} << ry;
    for (std::size_t i = 0; i < rows; ++i) paley_line(v.data() + i * cols, 1, ry, analysis, buf);
    for (std::size_t j = 0; j < cols; ++j) paley_line(v.data() + j, cols, rx, analysis, buf);
}

// Largest total rank at which the overlap check paints a mask.
constexpr int kPaintRank = 24;

bool is_valid(const DyadicInterval& iv) {
    return iv.rank >= 0 && iv.rank <= kMaxGridRank && iv.index >= 0 &&
           iv.index < (std::int64_t{1} << iv.rank);
}

}  // namespace

int rank_for_frequency(Freq n) {
    if (n < 0) throw std::invalid_argument("negative frequency");
    int p = 0;
    while ((Freq{1} << p) <= n) ++p;
    return p;
}

std::uint64_t reverse_bits(std::uint64_t v, int bits) {
    if (bits <= 0) return 0;
    v = ((v >> 1) & 0x5555555555555555ULL) | ((v & 0x5555555555555555ULL) << 1);
    v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
    v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
    v = __builtin_bswap64(v);
    return v >> (64 - bits);
}

// ---------------------------------------------------------------------------

DyadicRational::DyadicRational(std::int64_t num, int exp) : num_(num), exp_(exp) {
    while (exp_ < 0) {
        num_ *= 2;
        ++exp_;
    }
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    while (exp_ > 0 && num_ % 2 == 0) {
        num_ /= 2;
        --exp_;
    }
}

DyadicRational DyadicRational::parse(std::string_view text) {
    auto fail = [&]() -> DyadicRational {
        throw ParseError("not a dyadic rational: '" + std::string(text) + "'");
    };
    const auto slash = text.find('/');
    std::string_view ns = text.substr(0, slash);
    if (!ns.empty() && ns.front() == '+') ns.remove_prefix(1);
    std::int64_t num = 0;
    auto [p, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), num);
    if (ec != std::errc() || p != ns.data() + ns.size() || ns.empty()) return fail();
    if (slash == std::string_view::npos) return {num, 0};
    std::string_view ds = text.substr(slash + 1);
    std::int64_t den = 0;
    auto [q, ec2] = std::from_chars(ds.data(), ds.data() + ds.size(), den);
    if (ec2 != std::errc() || q != ds.data() + ds.size() || den <= 0 || (den & (den - 1)) != 0)
        return fail();
    int e = 0;
    while ((std::int64_t{1} << e) < den) ++e;
    return {num, e};
}

double DyadicRational::to_double() const { return std::ldexp(static_cast<double>(num_), -exp_); }

std::string DyadicRational::str() const {
    if (exp_ == 0) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(std::int64_t{1} << exp_);
}

std::strong_ordering DyadicRational::operator<=>(const DyadicRational& other) const {
    const int e = std::max(exp_, other.exp_);
    const __int128 a = static_cast<__int128>(num_) << (e - exp_);
    const __int128 b = static_cast<__int128>(other.num_) << (e - other.exp_);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

double DyadicInterval::length() const { return std::ldexp(1.0, -rank); }

bool DyadicInterval::contains(const DyadicInterval& other) const {
    if (other.rank < rank) return false;
    return (other.index >> (other.rank - rank)) == index;
}

bool DyadicInterval::overlaps(const DyadicInterval& other) const {
    return contains(other) || other.contains(*this);
}

std::pair<DyadicInterval, DyadicInterval> DyadicInterval::halves() const {
    return {{rank + 1, index * 2}, {rank + 1, index * 2 + 1}};
}

// ---------------------------------------------------------------------------

Grid1D::Grid1D(int rank, double fill) : rank_(rank) {
    check_rank(rank, "Grid1D");
    values_.assign(std::size_t{1} << rank, fill);
}

Grid1D::Grid1D(int rank, std::vector<double> values) : rank_(rank), values_(std::move(values)) {
    check_rank(rank, "Grid1D");
    if (values_.size() != (std::size_t{1} << rank))
        throw std::invalid_argument("Grid1D: value count must be 2^rank");
}

double Grid1D::cell_length() const { return std::ldexp(1.0, -rank_); }

Grid2D::Grid2D(int rank_x, int rank_y, double fill) : rank_x_(rank_x), rank_y_(rank_y) {
    check_rank(rank_x + rank_y, "Grid2D");
    check_rank(rank_x, "Grid2D");
    check_rank(rank_y, "Grid2D");
    values_.assign(std::size_t{1} << (rank_x + rank_y), fill);
}

Grid2D::Grid2D(int rank_x, int rank_y, std::vector<double> values)
    : rank_x_(rank_x), rank_y_(rank_y), values_(std::move(values)) {
    check_rank(rank_x, "Grid2D");
    check_rank(rank_y, "Grid2D");
    if (values_.size() != (std::size_t{1} << (rank_x + rank_y)))
        throw std::invalid_argument("Grid2D: value count must be 2^(p+q)");
}

double Grid2D::cell_area() const { return std::ldexp(1.0, -(rank_x_ + rank_y_)); }

Grid2D Grid2D::tensor(const Grid1D& gx, const Grid1D& gy) {
    Grid2D out(gx.rank(), gy.rank());
    for (std::size_t i = 0; i < gx.size(); ++i)
        for (std::size_t j = 0; j < gy.size(); ++j) out.at(i, j) = gx[i] * gy[j];
    return out;
}

DyadicSet1D::DyadicSet1D(int rank, bool fill) : rank_(rank) {
    check_rank(rank, "DyadicSet1D");
    mask_.assign(std::size_t{1} << rank, fill ? 1 : 0);
}

DyadicSet1D::DyadicSet1D(int rank, std::vector<std::uint8_t> mask) : rank_(rank), mask_(std::move(mask)) {
    check_rank(rank, "DyadicSet1D");
    if (mask_.size() != (std::size_t{1} << rank))
        throw std::invalid_argument("DyadicSet1D: mask size must be 2^rank");
    for (auto& m : mask_) m = m ? 1 : 0;
}

std::size_t DyadicSet1D::count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double DyadicSet1D::measure() const { return std::ldexp(static_cast<double>(count()), -rank_); }

DyadicSet2D::DyadicSet2D(int rank_x, int rank_y, bool fill) : rank_x_(rank_x), rank_y_(rank_y) {
    check_rank(rank_x, "DyadicSet2D");
    check_rank(rank_y, "DyadicSet2D");
    mask_.assign(std::size_t{1} << (rank_x + rank_y), fill ? 1 : 0);
}

DyadicSet2D::DyadicSet2D(int rank_x, int rank_y, std::vector<std::uint8_t> mask)
    : rank_x_(rank_x), rank_y_(rank_y), mask_(std::move(mask)) {
    check_rank(rank_x, "DyadicSet2D");
    check_rank(rank_y, "DyadicSet2D");
    if (mask_.size() != (std::size_t{1} << (rank_x + rank_y)))
        throw std::invalid_argument("DyadicSet2D: mask size must be 2^(p+q)");
    for (auto& m : mask_) m = m ? 1 : 0;
}

std::size_t DyadicSet2D::count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

double DyadicSet2D::measure() const {
    return std::ldexp(static_cast<double>(count()), -(rank_x_ + rank_y_));
}

// ---------------------------------------------------------------------------

StepFunction1D::StepFunction1D(std::vector<StepPiece1D> pieces) : pieces_(std::move(pieces)) {
    int r = 0;
    for (const auto& p : pieces_) {
        if (!is_valid(p.interval)) throw std::invalid_argument("StepFunction1D: bad interval");
        r = std::max(r, p.interval.rank);
    }
    if (r <= kPaintRank) {
        // Paint the cells; on disjoint pieces the work is bounded by 2^r.
        std::vector<std::uint8_t> used(std::size_t{1} << r, 0);
        for (const auto& p : pieces_) {
            const int shift = r - p.interval.rank;
            const std::size_t lo = static_cast<std::size_t>(p.interval.index) << shift;
            for (std::size_t i = lo; i < lo + (std::size_t{1} << shift); ++i)
                if (std::exchange(used[i], 1)) throw std::invalid_argument("StepFunction1D: overlapping intervals");
        }
        return;
    }
    for (std::size_t a = 0; a < pieces_.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
            if (pieces_[a].interval.overlaps(pieces_[b].interval))
                throw std::invalid_argument("StepFunction1D: overlapping intervals");
}

bool StepFunction1D::is_zero() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const auto& p) { return p.value.is_zero(); });
}

int StepFunction1D::resolution_rank() const {
    int r = 0;
    for (const auto& p : pieces_)
        if (!p.value.is_zero()) r = std::max(r, p.interval.rank);
    return r;
}

StepFunction2D::StepFunction2D(std::vector<StepPiece2D> pieces) : pieces_(std::move(pieces)) {
    int rx = 0, ry = 0;
    for (const auto& p : pieces_) {
        if (!is_valid(p.rect.x) || !is_valid(p.rect.y)) throw std::invalid_argument("StepFunction2D: bad rectangle");
        rx = std::max(rx, p.rect.x.rank);
        ry = std::max(ry, p.rect.y.rank);
    }
    if (rx + ry <= kPaintRank) {
        std::vector<std::uint8_t> used(std::size_t{1} << (rx + ry), 0);
        for (const auto& p : pieces_) {
            const int sx = rx - p.rect.x.rank, sy = ry - p.rect.y.rank;
            const std::size_t i0 = static_cast<std::size_t>(p.rect.x.index) << sx;
            const std::size_t j0 = static_cast<std::size_t>(p.rect.y.index) << sy;
            for (std::size_t i = i0; i < i0 + (std::size_t{1} << sx); ++i)
                for (std::size_t j = j0; j < j0 + (std::size_t{1} << sy); ++j)
                    if (std::exchange(used[(i << ry) | j], 1))
                        throw std::invalid_argument("StepFunction2D: overlapping rectangles");
        }
        return;
    }
    for (std::size_t a = 0; a < pieces_.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
            if (pieces_[a].rect.overlaps(pieces_[b].rect))
                throw std::invalid_argument("StepFunction2D: overlapping rectangles");
}

bool StepFunction2D::is_zero() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const auto& p) { return p.value.is_zero(); });
}

std::pair<int, int> StepFunction2D::resolution_ranks() const {
    int rx = 0, ry = 0;
    for (const auto& p : pieces_) {
        if (p.value.is_zero()) continue;
        rx = std::max(rx, p.rect.x.rank);
        ry = std::max(ry, p.rect.y.rank);
    }
    return {rx, ry};
}

double StepFunction2D::l1_norm() const {
    double s = 0.0;
    for (const auto& p : pieces_) s += std::abs(p.value.to_double()) * p.rect.area();
    return s;
}

double StepFunction2D::sup_norm() const {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max(m, std::abs(p.value.to_double()));
    return m;
}

// ---------------------------------------------------------------------------

Grid1D rademacher(int k, int rank) {
    if (k < 0) throw std::invalid_argument("rademacher: negative index");
    if (rank <= k) throw ResolutionError("rademacher: rank must exceed k");
    Grid1D g(rank);
    const int bit = rank - 1 - k;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = ((i >> bit) & 1) ? -1.0 : 1.0;
    return g;
}

Grid1D walsh(Freq n, int rank) {
    if (n < 0) throw std::invalid_argument("walsh: negative index");
    if (rank_for_frequency(n) > rank) throw ResolutionError("walsh: 2^rank must exceed n");
    Grid1D g(rank);
    const std::uint64_t rn = reverse_bits(static_cast<std::uint64_t>(n), rank);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = __builtin_parityll(rn & i) ? -1.0 : 1.0;
    return g;
}

std::vector<double> fwht(const Grid1D& g) {
    std::vector<double> v(g.values().begin(), g.values().end());
    std::vector<double> buf;
    paley_line(v.data(), 1, g.rank(), true, buf);
    return v;
}

Grid1D inverse_fwht(std::span<const double> coeffs) {
    const std::size_t n = coeffs.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("inverse_fwht: size must be 2^p");
    const int rank = rank_for_frequency(static_cast<Freq>(n)) - 1;
    std::vector<double> v(coeffs.begin(), coeffs.end());
    std::vector<double> buf;
    paley_line(v.data(), 1, rank, false, buf);
    return Grid1D(rank, std::move(v));
}

std::vector<double> fwht2d(const Grid2D& g) {
    std::vector<double> v(g.values().begin(), g.values().end());
    transform2d(v, g.rank_x(), g.rank_y(), true);
    return v;
}

Grid2D inverse_fwht2d(std::span<const double> coeffs, int rank_x, int rank_y) {
    if (coeffs.size() != (std::size_t{1} << (rank_x + rank_y)))
        throw std::invalid_argument("inverse_fwht2d: size must be 2^(p+q)");
    std::vector<double> v(coeffs.begin(), coeffs.end());
    transform2d(v, rank_x, rank_y, false);
    return Grid2D(rank_x, rank_y, std::move(v));
}

Grid1D dirichlet_packet(int m, int rank) {
    if (m < 0 || rank < m) throw ResolutionError("dirichlet_packet: need 0 <= m <= rank");
    Grid1D g(rank);
    const double height = std::ldexp(1.0, m);
    const std::size_t width = std::size_t{1} << (rank - m);
    for (std::size_t i = 0; i < width; ++i) g[i] = height;
    return g;
}

// ---------------------------------------------------------------------------

Grid1D rasterize(const StepFunction1D& f, int rank) {
    Grid1D g(rank);
    for (const auto& p : f.pieces()) {
        if (p.interval.rank > rank) throw ResolutionError("rasterize: piece finer than grid");
        const int shift = rank - p.interval.rank;
        const std::size_t lo = static_cast<std::size_t>(p.interval.index) << shift;
        const std::size_t hi = lo + (std::size_t{1} << shift);
        const double v = p.value.to_double();
        for (std::size_t i = lo; i < hi; ++i) g[i] = v;
    }
    return g;
}

Grid2D rasterize(const StepFunction2D& f, int rank_x, int rank_y) {
    Grid2D g(rank_x, rank_y);
    for (const auto& p : f.pieces()) {
        if (p.rect.x.rank > rank_x || p.rect.y.rank > rank_y)
            throw ResolutionError("rasterize: piece finer than grid");
        const int sx = rank_x - p.rect.x.rank;
        const int sy = rank_y - p.rect.y.rank;
        const std::size_t x0 = static_cast<std::size_t>(p.rect.x.index) << sx;
        const std::size_t y0 = static_cast<std::size_t>(p.rect.y.index) << sy;
        const double v = p.value.to_double();
        for (std::size_t i = x0; i < x0 + (std::size_t{1} << sx); ++i)
            for (std::size_t j = y0; j < y0 + (std::size_t{1} << sy); ++j) g.at(i, j) = v;
    }
    return g;
}

Grid1D refine(const Grid1D& g, int rank) {
    if (rank < g.rank()) throw RankMismatch("refine: target rank coarser than grid");
    if (rank == g.rank()) return g;
    Grid1D out(rank);
    const int s = rank - g.rank();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i >> s];
    return out;
}

Grid2D refine(const Grid2D& g, int rank_x, int rank_y) {
    if (rank_x < g.rank_x() || rank_y < g.rank_y())
        throw RankMismatch("refine: target ranks coarser than grid");
    if (rank_x == g.rank_x() && rank_y == g.rank_y()) return g;
    Grid2D out(rank_x, rank_y);
    const int sx = rank_x - g.rank_x();
    const int sy = rank_y - g.rank_y();
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) = g.at(i >> sx, j >> sy);
    return out;
}

DyadicSet1D refine(const DyadicSet1D& s, int rank) {
    if (rank < s.rank()) throw RankMismatch("refine: target rank coarser than set");
    if (rank == s.rank()) return s;
    std::vector<std::uint8_t> m(std::size_t{1} << rank);
    const int sh = rank - s.rank();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = s.contains(i >> sh);
    return DyadicSet1D(rank, std::move(m));
}

DyadicSet2D refine(const DyadicSet2D& s, int rank_x, int rank_y) {
    if (rank_x < s.rank_x() || rank_y < s.rank_y())
        throw RankMismatch("refine: target ranks coarser than set");
    if (rank_x == s.rank_x() && rank_y == s.rank_y()) return s;
    std::vector<std::uint8_t> m(std::size_t{1} << (rank_x + rank_y));
    const int sx = rank_x - s.rank_x();
    const int sy = rank_y - s.rank_y();
    const std::size_t cols = std::size_t{1} << rank_y;
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = s.contains((k / cols) >> sx, (k % cols) >> sy);
    return DyadicSet2D(rank_x, rank_y, std::move(m));
}

double l1_norm(const Grid1D& g) {
    double s = 0.0;
    for (double v : g.values()) s += std::abs(v);
    return s * g.cell_length();
}

double l1_norm(const Grid2D& g) {
    double s = 0.0;
    for (double v : g.values()) s += std::abs(v);
    return s * g.cell_area();
}

double weighted_l1(const Grid2D& g, const Grid2D& w) {
    const int rx = std::max(g.rank_x(), w.rank_x());
    const int ry = std::max(g.rank_y(), w.rank_y());
    const Grid2D a = refine(g, rx, ry);
    const Grid2D b = refine(w, rx, ry);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k]) * b[k];
    return s * a.cell_area();
}

double sup_norm(const Grid1D& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

double sup_norm(const Grid2D& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Op>
DyadicSet2D combine(const DyadicSet2D& a, const DyadicSet2D& b, Op op) {
    const int rx = std::max(a.rank_x(), b.rank_x());
    const int ry = std::max(a.rank_y(), b.rank_y());
    const DyadicSet2D ra = refine(a, rx, ry);
    const DyadicSet2D rb = refine(b, rx, ry);
    std::vector<std::uint8_t> m(ra.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = op(ra.contains(k), rb.contains(k));
    return DyadicSet2D(rx, ry, std::move(m));
}

}  // namespace

DyadicSet2D intersect(const DyadicSet2D& a, const DyadicSet2D& b) {
    return combine(a, b, [](bool x, bool y) { return x && y; });
}

DyadicSet2D unite(const DyadicSet2D& a, const DyadicSet2D& b) {
    return combine(a, b, [](bool x, bool y) { return x || y; });
}

DyadicSet2D complement(const DyadicSet2D& a) {
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = !a.contains(k);
    return DyadicSet2D(a.rank_x(), a.rank_y(), std::move(m));
}

DyadicSet2D product(const DyadicSet1D& x, const DyadicSet1D& y) {
    std::vector<std::uint8_t> m(x.size() * y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) m[i * y.size() + j] = x.contains(i) && y.contains(j);
    return DyadicSet2D(x.rank(), y.rank(), std::move(m));
}

double measure(const DyadicSet2D& s) { return s.measure(); }

}  // namespace uniwalsh
