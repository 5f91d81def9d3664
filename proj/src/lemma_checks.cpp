#include "uniwalsh/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace uniwalsh {

namespace {

Check support_check(std::span<const Coefficient2D> P, Freq lo, Freq hi) {
    bool ok = true;
    for (const auto& c : P)
        if (c.k < lo || c.k > hi || c.v < lo || c.v > hi) ok = false;
    return boolean_check("support in [N,M]^2", ok);
}

// Largest |P - target| over cells of E, at ranks resolving everything.
double deviation_on(std::span<const Coefficient2D> P, const Grid2D& target, const DyadicSet2D& E) {
    const auto [rx, ry] = working_ranks(P, std::max(target.rank_x(), E.rank_x()),
                                        std::max(target.rank_y(), E.rank_y()));
    const Grid2D p = synthesize(P, rx, ry);
    const Grid2D t = refine(target, rx, ry);
    const DyadicSet2D e = refine(E, rx, ry);
    double dev = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (e.contains(k)) dev = std::max(dev, std::abs(p[k] - t[k]));
    return dev;
}

// c_{k,v} = a_k b_v on the full product of the row and column supports.
bool is_product(std::span<const Coefficient2D> P) {
    if (P.empty()) return true;
    std::map<Freq, double> rows, cols;
    const Coefficient2D* pivot = &P[0];
    for (const auto& c : P)
        if (std::abs(c.value) > std::abs(pivot->value)) pivot = &c;
    for (const auto& c : P) {
        if (c.v == pivot->v) rows[c.k] = c.value;
        if (c.k == pivot->k) cols[c.v] = c.value / pivot->value;
    }
    if (rows.size() * cols.size() != P.size()) return false;
    const double scale = std::abs(pivot->value);
    for (const auto& c : P) {
        auto a = rows.find(c.k);
        auto b = cols.find(c.v);
        if (a == rows.end() || b == cols.end()) return false;
        if (std::abs(c.value - a->second * b->second) > 1e-12 * std::max(1.0, scale)) return false;
    }
    return true;
}

}  // namespace

Report lemma2_check(const DyadicRational& gamma, double delta, Freq N, const DyadicRect& rect,
                    std::span<const Coefficient2D> P, const DyadicSet2D& E, Freq M, Mode mode) {
    Report rep;
    rep.add(support_check(P, N, M));
    rep.add(boolean_check("product structure", is_product(P)));
    if (mode == Mode::strict && !P.empty()) {
        Freq n1 = 0, vmin = std::numeric_limits<Freq>::max();
        for (const auto& c : P) {
            n1 = std::max(n1, c.k);
            vmin = std::min(vmin, c.v);
        }
        const Freq m0 = 2 * (n1 * n1 + 1);
        rep.add(boolean_check("gap M0 = 2(N1^2+1)", vmin >= m0,
                              "N1=" + std::to_string(n1) + " M0=" + std::to_string(m0) +
                                  " min y-frequency=" + std::to_string(vmin)));
    }
    rep.add(strict_greater("|E| > 1 - delta", E.measure(), 1 - delta));
    rep.add(strict_less("sum|c|^(2+delta) < delta", coeff_power_norm(P, 2 + delta), delta));

    const StepFunction2D f({{rect, gamma}});
    const Grid2D fg = rasterize(f, rect.x.rank, rect.y.rank);
    rep.add(less_equal("P = gamma chi on E", deviation_on(P, fg, E), 0.0));

    const double budget = 16.0 * std::abs(gamma.to_double()) * rect.area();
    CutRange range{N, M};
    if (mode == Mode::strict) {
        const auto sums = combined_sums_constant(P, distinct_cuts(P, range, range), E);
        rep.add(less_equal("rect max + sph max", sums.excess, budget,
                           "rect=" + std::to_string(sums.rect_max) + " sph=" + std::to_string(sums.sph_max) +
                               " cuts=" + std::to_string(sums.rect_cuts) + "+" + std::to_string(sums.sph_cuts)));
    } else {
        const auto sums = combined_sums_constant(P, distinct_cuts(P, range, CutRange{1, 0}), E);
        rep.add(less_equal("rect max", sums.rect_max, budget));
        rep.add(not_claimed("sph max", "rect mode"));
    }
    return rep;
}

Report lemma3_check(const StepFunction2D& f, double eps, Freq N, std::span<const Coefficient2D> P,
                    const DyadicSet2D& E, Freq M, Mode mode, const PairLimits& pairs) {
    Report rep;
    rep.add(support_check(P, N, M));
    const auto [fx, fy] = f.resolution_ranks();
    const Grid2D fg = rasterize(f, fx, fy);
    rep.add(less_equal("P = f on E", deviation_on(P, fg, E), 0.0));
    rep.add(strict_greater("|E| > 1 - eps", E.measure(), 1 - eps));
    rep.add(strict_less("sum|c|^(2+eps) < eps", coeff_power_norm(P, 2 + eps), eps));

    Grid2D density = fg;
    for (double& v : density.values()) v = 2 * std::abs(v);
    const CutRange rect{N, M - 1};
    const CutRange sph = mode == Mode::strict ? CutRange{N, M} : CutRange{1, 0};
    const auto sums = combined_sums_density(P, distinct_cuts(P, rect, sph), E, density, pairs);
    rep.add(less_equal(mode == Mode::strict ? "partial sums vs 2|f| + eps" : "partial sums vs 2|f| + eps",
                       sums.excess, eps,
                       "mode=" + sums.mode + " cuts=" + std::to_string(sums.rect_cuts) + "x" +
                           std::to_string(sums.sph_cuts)));
    if (mode == Mode::rect) rep.add(not_claimed("sph partial sums", "rect mode"));
    return rep;
}

}  // namespace uniwalsh
