#include "uniwalsh/universal.hpp"

#include "uniwalsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uniwalsh {

bool ApproxTrace::all_verified() const {
    if (failure || steps.empty()) return false;
    return std::all_of(steps.begin(), steps.end(), [](const ApproxStep& s) { return s.status == "verified"; });
}

namespace {

struct Workspace {
    int rx = 0, ry = 0;
    Grid2D mu;
    double area = 0.0;

    double norm(const Grid2D& g) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) acc += std::abs(g[k]) * mu[k];
        return acc * area;
    }
    double norm_diff(const Grid2D& a, const Grid2D& b) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]) * mu[k];
        return acc * area;
    }
};

Grid2D raster_at(const StepFunction2D& f, int rx, int ry) {
    const auto [fx, fy] = f.resolution_ranks();
    return refine(rasterize(f, fx, fy), rx, ry);
}

}  // namespace

ApproxTrace greedy_subseries(const Grid2D& target, const std::vector<BlockRecord>& blocks,
                             const WeightFunction& w, int steps, Mode mode) {
    if (steps < 1) throw std::invalid_argument("greedy_subseries: steps must be >= 1");
    Workspace ws;
    ws.rx = std::max(target.rank_x(), w.values.rank_x());
    ws.ry = std::max(target.rank_y(), w.values.rank_y());
    for (const auto& b : blocks) {
        const auto [px, py] = working_ranks(b.P, 0, 0);
        const auto [fx, fy] = b.f.resolution_ranks();
        ws.rx = std::max({ws.rx, px, fx});
        ws.ry = std::max({ws.ry, py, fy});
    }
    ws.mu = refine(w.values, ws.rx, ws.ry);
    ws.area = std::ldexp(1.0, -(ws.rx + ws.ry));

    std::vector<Grid2D> catalog;
    catalog.reserve(blocks.size());
    for (const auto& b : blocks) catalog.push_back(raster_at(b.f, ws.rx, ws.ry));

    ApproxTrace trace;
    Grid2D residual = refine(target, ws.rx, ws.ry);
    std::size_t prev = static_cast<std::size_t>(std::max(w.n0 + 1, 0));
    for (int q = 1; q <= steps; ++q) {
        const double pick_bound = q == 1 ? 0.25 : 2 * std::ldexp(1.0, -2 * q);
        std::size_t chosen = 0;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_n = 0;
        for (std::size_t n = prev + 1; n <= blocks.size(); ++n) {
            const double d = ws.norm_diff(residual, catalog[n - 1]);
            if (d < best) {
                best = d;
                best_n = n;
            }
            if (d < pick_bound) {
                chosen = n;
                break;
            }
        }
        if (chosen == 0) {
            ApproxStep row;
            row.q = q;
            row.n = best_n;
            row.err_mu = ws.norm(residual);
            row.bound_mu = 2 * std::ldexp(1.0, -2 * q);
            row.bound_ps = 21 * std::ldexp(1.0, -2 * q);
            row.status = "unapproximable";
            trace.steps.push_back(row);
            trace.failure = TargetNotApproximable(
                                "step " + std::to_string(q) + ": no catalog index in (" + std::to_string(prev) + ", " +
                                std::to_string(blocks.size()) + "] within " + std::to_string(pick_bound) +
                                " (best " + (best_n ? std::to_string(best) + " at n=" + std::to_string(best_n) : "none") +
                                ", residual " + std::to_string(row.err_mu) + ")")
                                .what();
            break;
        }

        const BlockRecord& b = blocks[chosen - 1];
        ApproxStep row;
        row.q = q;
        row.n = chosen;
        row.bound_mu = 2 * std::ldexp(1.0, -2 * q);
        row.bound_ps = 21 * std::ldexp(1.0, -2 * q);

        // Partial sums of P_{n_q} at every distinct cut, against the residual before this step.
        if (b.P.empty()) {
            row.err_rect = ws.norm(residual);
            row.err_sph = mode == Mode::strict ? row.err_rect : 0.0;
        } else {
            const CutRange sph = mode == Mode::strict ? CutRange{b.start, b.end} : CutRange{1, 0};
            const auto cuts = distinct_cuts(b.P, CutRange{b.start, b.end - 1}, sph);
            sweep_rect(b.P, cuts, ws.rx, ws.ry, [&](Freq, Freq, const Grid2D& g) {
                row.err_rect = std::max(row.err_rect, ws.norm_diff(residual, g));
            });
            if (mode == Mode::strict)
                sweep_sph(b.P, cuts, ws.rx, ws.ry, [&](std::int64_t, const Grid2D& g) {
                    row.err_sph = std::max(row.err_sph, ws.norm_diff(residual, g));
                });
        }

        const Grid2D p = synthesize(b.P, ws.rx, ws.ry);
        for (std::size_t k = 0; k < residual.size(); ++k) residual[k] -= p[k];
        row.err_mu = ws.norm(residual);
        const bool ok = row.err_mu < row.bound_mu && row.err_rect < row.bound_ps &&
                        (mode == Mode::rect || row.err_sph < row.bound_ps);
        row.status = ok ? "verified" : "unverified";
        trace.steps.push_back(row);
        prev = chosen;
    }
    return trace;
}

}  // namespace uniwalsh
