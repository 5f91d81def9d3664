#include "uniwalsh/universal.hpp"

#include "uniwalsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uniwalsh {

int weight_n0(double eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("weight: eps must lie in (0,1)");
    const double x = -std::log2(eps);
    const double r = std::round(x);
    const double fl = std::abs(x - r) < 1e-12 ? r : std::floor(x);
    return static_cast<int>(fl) + 1;
}

Grid2D weight_values(const std::vector<DyadicSet2D>& omega, int n0, const std::vector<double>& mu) {
    if (omega.empty()) throw std::invalid_argument("weight_values: no levels");
    int rx = 0, ry = 0;
    for (const auto& o : omega) {
        rx = std::max(rx, o.rank_x());
        ry = std::max(ry, o.rank_y());
    }
    std::vector<DyadicSet2D> levels;
    for (const auto& o : omega) levels.push_back(refine(o, rx, ry));
    Grid2D w(rx, ry, 1.0);
    const std::size_t S = levels.size() - 1;  // levels[S] is Omega_S
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (levels[0].contains(k) || !levels[S].contains(k)) continue;
        for (std::size_t i = 1; i <= S; ++i) {
            if (levels[i].contains(k)) {
                w[k] = mu[static_cast<std::size_t>(n0) + i - 1];
                break;
            }
        }
    }
    return w;
}

WeightFunction build_weight(const std::vector<BlockRecord>& blocks, double eps) {
    WeightFunction w;
    w.eps = eps;
    w.n0 = weight_n0(eps);
    w.depth = blocks.size();
    if (blocks.size() < static_cast<std::size_t>(w.n0) + 1)
        throw InsufficientDepth("build_weight: need at least " + std::to_string(w.n0 + 1) + " blocks for eps = " +
                                std::to_string(eps) + ", have " + std::to_string(blocks.size()));
    int rx = 0, ry = 0;
    for (const auto& b : blocks) {
        rx = std::max(rx, b.E.rank_x());
        ry = std::max(ry, b.E.rank_y());
    }
    const std::size_t S = blocks.size();
    const std::size_t n0 = static_cast<std::size_t>(w.n0);
    // Omega_n = intersection of E_s for s = n..S, built from the top down.
    std::vector<DyadicSet2D> omega(S - n0 + 1);
    DyadicSet2D acc = refine(blocks[S - 1].E, rx, ry);
    omega[S - n0] = acc;
    for (std::size_t n = S - 1; n >= n0; --n) {
        acc = intersect(acc, refine(blocks[n - 1].E, rx, ry));
        omega[n - n0] = acc;
    }
    w.omega = std::move(omega);
    w.E = w.omega.front();

    double log_prod = 0.0;
    for (std::size_t n = 1; n <= S; ++n) {
        log_prod += std::log(blocks[n - 1].h);
        w.mu.push_back(std::exp(-(2.0 * static_cast<double>(n) * std::log(2.0) + log_prod)));
    }
    w.values = weight_values(w.omega, w.n0, w.mu);
    return w;
}

Report weight_check(const WeightFunction& w) {
    Report rep;
    double lo = HUGE_VAL, hi = 0.0;
    std::size_t off = 0;
    for (double v : w.values.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (v != 1.0) ++off;
    }
    rep.add(boolean_check("0 < mu <= 1", lo > 0 && hi <= 1.0,
                          "min=" + std::to_string(lo) + " max=" + std::to_string(hi)));
    rep.add(strict_less("|{mu != 1}| < eps", std::ldexp(static_cast<double>(off), -(w.values.rank_x() + w.values.rank_y())),
                        w.eps));
    rep.add(strict_greater("|E| > 1 - eps", w.E.measure(), 1 - w.eps));

    bool one_on_e = true;
    if (!w.omega.empty()) {
        const auto& vals = w.values;
        const DyadicSet2D e = refine(w.E, vals.rank_x(), vals.rank_y());
        const DyadicSet2D b = refine(w.omega.back(), vals.rank_x(), vals.rank_y());
        for (std::size_t k = 0; k < vals.size(); ++k)
            if ((e.contains(k) || !b.contains(k)) && vals[k] != 1.0) one_on_e = false;
    }
    rep.add(boolean_check("mu = 1 on E and off B", one_on_e));

    bool decreasing = true, bounded = true;
    for (std::size_t n = 1; n <= w.mu.size(); ++n) {
        if (w.mu[n - 1] > std::ldexp(1.0, -2 * static_cast<int>(n))) bounded = false;
        if (n > 1 && !(w.mu[n - 1] < w.mu[n - 2])) decreasing = false;
    }
    rep.add(boolean_check("mu_n <= 2^-2n", bounded));
    rep.add(boolean_check("mu_n strictly decreasing", decreasing));
    return rep;
}

}  // namespace uniwalsh
