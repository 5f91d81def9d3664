#include "uniwalsh/universal.hpp"

#include "uniwalsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uniwalsh {

double block_eps(std::size_t s) { return std::ldexp(1.0, -2 * static_cast<int>(s + 1)); }

namespace {

double block_eta(std::size_t s) { return std::ldexp(1.0, -2 * static_cast<int>(s)); }

Grid2D raster(const StepFunction2D& f) {
    const auto [rx, ry] = f.resolution_ranks();
    return rasterize(f, rx, ry);
}

}  // namespace

Report block_check(const BlockRecord& b, Mode mode, const PairLimits& pairs) {
    Report rep;
    const double eps = block_eps(b.s);
    const double eta = block_eta(b.s);
    bool inside = true;
    for (const auto& c : b.P)
        if (c.k < b.start || c.k >= b.end || c.v < b.start || c.v >= b.end) inside = false;
    rep.add(boolean_check("support in [N_{s-1},N_s)^2", inside));

    const Grid2D fg = raster(b.f);
    const auto [rx, ry] = working_ranks(b.P, std::max(fg.rank_x(), b.E.rank_x()), std::max(fg.rank_y(), b.E.rank_y()));
    const Grid2D pg = synthesize(b.P, rx, ry);
    const Grid2D ff = refine(fg, rx, ry);
    const DyadicSet2D e = refine(b.E, rx, ry);
    double dev = 0.0;
    for (std::size_t k = 0; k < pg.size(); ++k)
        if (e.contains(k)) dev = std::max(dev, std::abs(pg[k] - ff[k]));
    rep.add(less_equal("P_s = f_s on E_s", dev, 0.0));
    rep.add(strict_greater("|E_s| > 1 - 2^-2(s+1)", b.E.measure(), 1 - eps));
    rep.add(strict_less("sum|c|^(2+2^-2s) < 2^-2s", coeff_power_norm(b.P, 2 + eta), eta));

    Grid2D density = fg;
    for (double& v : density.values()) v = 2 * std::abs(v);
    const CutRange rect{b.start, b.end - 1};
    const CutRange sph = mode == Mode::strict ? CutRange{b.start, b.end} : CutRange{1, 0};
    const auto sums = combined_sums_density(b.P, distinct_cuts(b.P, rect, sph), b.E, density, pairs);
    rep.add(less_equal("partial sums vs 2|f_s| + eps_s", sums.excess, eps,
                       "mode=" + sums.mode + " cuts=" + std::to_string(sums.rect_cuts) + "x" +
                           std::to_string(sums.sph_cuts)));
    if (mode == Mode::rect) rep.add(not_claimed("sph partial sums", "rect mode"));
    return rep;
}

double block_h(const BlockRecord& b, Mode) {
    double rect = 0.0, sph = 0.0;
    if (!b.P.empty()) {
        const auto cuts = distinct_cuts(b.P, CutRange{b.start, b.end - 1}, CutRange{b.start, b.end});
        const auto [rx, ry] = working_ranks(b.P, 0, 0);
        sweep_rect(b.P, cuts, rx, ry, [&](Freq, Freq, const Grid2D& g) { rect = std::max(rect, sup_norm(g)); });
        sweep_sph(b.P, cuts, rx, ry, [&](std::int64_t, const Grid2D& g) { sph = std::max(sph, sup_norm(g)); });
    }
    return b.f.sup_norm() + rect + sph + 1.0;
}

BuildResult build_universal(const Catalog& catalog, const BuildOptions& opt) {
    if (opt.depth > catalog.entries.size())
        throw std::invalid_argument("build_universal: depth exceeds the catalog length");
    BuildResult out;
    Freq start = 1;
    for (std::size_t s = 1; s <= opt.depth; ++s) {
        const StepFunction2D& f = catalog.entries[s - 1];
        Limits limits = opt.limits;
        limits.seed = opt.limits.seed + 7919ULL * s;
        try {
            Lemma3Result l3 = lemma3_build(f, block_eps(s), start, limits);
            BlockRecord b;
            b.s = s;
            b.f = f;
            b.P = std::move(l3.P);
            b.E = std::move(l3.E);
            b.start = start;
            b.end = l3.M + 1;
            if (b.end <= b.start) b.end = b.start + 1;
            b.report = block_check(b, opt.limits.mode, opt.limits.pairs);
            b.h = block_h(b, opt.limits.mode);
            out.series.append_block(b.P, b.end);
            start = b.end;
            out.blocks.push_back(std::move(b));
        } catch (const Error& e) {
            out.failure = "block " + std::to_string(s) + ": " + e.what() + " (deepest completed block " +
                          std::to_string(s - 1) + ")";
            out.failure_kind = dynamic_cast<const FrequencyBudgetExceeded*>(&e) ? "FrequencyBudgetExceeded"
                               : dynamic_cast<const ConstructionFailed*>(&e) ? "ConstructionFailed"
                                                                              : "Error";
            out.certificate = block_certificate(f, block_eps(s), block_eta(s), block_eta(s), opt.limits.fmax);
            break;
        }
    }
    return out;
}

Report power_norms(const WalshSeries2D& series) {
    Report rep;
    for (double q : {2.1, 2.5, 3.0}) {
        const double v = coeff_power_norm(series.coefficients(), q);
        char name[48];
        std::snprintf(name, sizeof name, "sum|c|^%.1f finite", q);
        rep.add(Check{name, v, 0.0, 0.0, std::isfinite(v), "nnz=" + std::to_string(series.nnz())});
    }
    return rep;
}

Report verify_construction(const WalshSeries2D& series, const std::vector<BlockRecord>& blocks,
                           const WeightFunction& w, Mode mode) {
    Report rep;
    if (blocks.empty()) return rep;
    bool same = series.depth() == blocks.size();
    for (std::size_t s = 1; same && s <= blocks.size(); ++s) {
        const auto blk = series.block(s);
        same = std::equal(blk.begin(), blk.end(), blocks[s - 1].P.begin(), blocks[s - 1].P.end()) &&
               series.boundaries()[s] == blocks[s - 1].end;
    }
    rep.add(boolean_check("series matches block records", same));
    rep.add(boolean_check("block-diagonal support", series.block_diagonal()));

    for (std::size_t s = static_cast<std::size_t>(std::max(w.n0, 1)); s <= blocks.size(); ++s) {
        const BlockRecord& b = blocks[s - 1];
        const std::string tag = "s=" + std::to_string(s) + " ";
        const double tail = std::ldexp(1.0, -2 * static_cast<int>(s));
        const DyadicSet2D& omega = w.omega[s - static_cast<std::size_t>(w.n0)];

        const Grid2D fg = raster(b.f);
        auto [rx, ry] = working_ranks(b.P, std::max({fg.rank_x(), w.values.rank_x(), omega.rank_x()}),
                                      std::max({fg.rank_y(), w.values.rank_y(), omega.rank_y()}));
        const Grid2D mu = refine(w.values, rx, ry);
        const Grid2D ff = refine(fg, rx, ry);
        const DyadicSet2D outside = refine(complement(omega), rx, ry);
        const double area = std::ldexp(1.0, -(rx + ry));

        auto weighted = [&](const Grid2D& g, bool off_omega) {
            double acc = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k)
                if (!off_omega || outside.contains(k)) acc += std::abs(g[k]) * mu[k];
            return acc * area;
        };
        const double f_mu = weighted(ff, false);
        const auto cuts = distinct_cuts(b.P, CutRange{b.start, b.end - 1}, CutRange{b.start, b.end});
        double rect_off = 0.0, rect_all = 0.0, sph_off = 0.0, sph_all = 0.0;
        sweep_rect(b.P, cuts, rx, ry, [&](Freq, Freq, const Grid2D& g) {
            rect_off = std::max(rect_off, weighted(g, true));
            rect_all = std::max(rect_all, weighted(g, false));
        });
        sweep_sph(b.P, cuts, rx, ry, [&](std::int64_t, const Grid2D& g) {
            sph_off = std::max(sph_off, weighted(g, true));
            sph_all = std::max(sph_all, weighted(g, false));
        });
        Grid2D diff = synthesize(b.P, rx, ry);
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= ff[k];

        rep.add(strict_less(tag + "rect tail off Omega_s", rect_off, tail / 3));
        if (mode == Mode::strict)
            rep.add(strict_less(tag + "sph tail off Omega_s", sph_off, tail / 3));
        else
            rep.add(not_claimed(tag + "sph tail off Omega_s", "rect mode"));
        rep.add(strict_less(tag + "|P_s - f_s|_mu", weighted(diff, false), tail));
        rep.add(strict_less(tag + "rect partial sums_mu", rect_all, 2 * f_mu + tail));
        if (mode == Mode::strict)
            rep.add(strict_less(tag + "sph partial sums_mu", sph_all, 2 * f_mu + tail));
        else
            rep.add(not_claimed(tag + "sph partial sums_mu", "rect mode"));
    }
    rep.append(power_norms(series));
    return rep;
}

}  // namespace uniwalsh
