#include "uniwalsh/error.hpp"
#include "uniwalsh/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace uniwalsh {

namespace {

// sup over sets X of measure eps of integral_X g, for a nonnegative grid
// with equal cells: fill the largest cells first.
double top_mass(std::vector<double> cells, double cell, double eps) {
    std::sort(cells.begin(), cells.end(), std::greater<>());
    double left = eps, s = 0.0;
    for (double v : cells) {
        if (left <= 0) break;
        const double take = std::min(cell, left);
        s += v * take;
        left -= take;
    }
    return s;
}

// Lower bound on integral P^2 when P equals g off a set of measure < eps and
// integrates to zero over every strip listed in `strips`.
double energy_bound(std::span<const double> g, double cell, double eps,
                    const std::vector<std::vector<std::size_t>>& strips) {
    double total_sq = 0.0, sup = 0.0;
    std::vector<double> sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        sq[i] = g[i] * g[i];
        total_sq += sq[i] * cell;
        sup = std::max(sup, std::abs(g[i]));
    }
    const double on_e = std::max(0.0, total_sq - top_mass(sq, cell, eps));
    double strip_mass = 0.0;
    for (const auto& s : strips) {
        double m = 0.0;
        for (std::size_t i : s) m += g[i] * cell;
        strip_mass += std::abs(m);
    }
    const double deficit = std::max(0.0, strip_mass - sup * eps);
    return on_e + deficit * deficit / eps;
}

double holder_bound(double energy, double q, double terms) {
    if (energy <= 0) return 0.0;
    if (terms <= 0) return HUGE_VAL;
    return std::pow(energy, q / 2) * std::pow(terms, 1 - q / 2);
}

}  // namespace

Lemma1Certificate lemma1_certificate(const StepFunction1D& f, Freq N0, double eps, int max_rank) {
    Lemma1Certificate c;
    const int fr = f.resolution_rank();
    // Annihilating W_j for j < N0 forces zero mean on every rank-a cell, 2^a <= N0.
    int a = 0;
    while ((Freq{1} << (a + 1)) <= N0) ++a;
    const int r = std::max(fr, a);
    const Grid1D g = rasterize(f, r);
    std::vector<std::vector<std::size_t>> strips(std::size_t{1} << a);
    for (std::size_t i = 0; i < g.size(); ++i) strips[i >> (r - a)].push_back(i);
    c.energy = energy_bound(g.values(), g.cell_length(), eps, strips);

    const double q = 2 + eps;
    const int base = std::max(fr, rank_for_frequency(N0));
    c.max_terms = max_rank >= 0 && max_rank < 62 ? (std::int64_t{1} << max_rank) - N0 : 0;
    c.power_bound = holder_bound(c.energy, q, static_cast<double>(c.max_terms));
    c.infeasible = c.power_bound >= eps + kStrictSlack || (fr > max_rank && !f.is_zero());
    c.min_rank = -1;
    for (int p = base; p <= max_rank; ++p) {
        if (holder_bound(c.energy, q, std::ldexp(1.0, p) - static_cast<double>(N0)) < eps) {
            c.min_rank = p;
            break;
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "energy >= %.6g, sum|c|^%.4g >= %.6g with at most %lld terms (need < %.6g)%s",
                  c.energy, q, c.power_bound, static_cast<long long>(c.max_terms), eps,
                  fr > max_rank ? ", target finer than the rank cap" : "");
    c.summary = buf;
    return c;
}

BlockCertificate block_certificate(const StepFunction2D& f, double eps, double eta, double bound, Freq fmax) {
    BlockCertificate c;
    c.required = bound;
    auto [rx, ry] = f.resolution_ranks();
    const Grid2D g = rasterize(f, rx, ry);
    // Frequencies >= 1 on both axes: zero mean along every x line and y line.
    std::vector<std::vector<std::size_t>> rows(g.rows()), cols(g.cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
            rows[i].push_back((i << ry) | j);
            cols[j].push_back((i << ry) | j);
        }
    c.energy = std::max(energy_bound(g.values(), g.cell_area(), eps, rows),
                        energy_bound(g.values(), g.cell_area(), eps, cols));
    const double terms = static_cast<double>(fmax - 1) * static_cast<double>(fmax - 1);
    c.power_bound = holder_bound(c.energy, 2 + eta, terms);
    c.infeasible = c.power_bound >= bound + kStrictSlack;
    char buf[256];
    std::snprintf(buf, sizeof buf, "energy >= %.6g, sum|c|^%.6g >= %.6g over <= %.0f terms (need < %.6g)",
                  c.energy, 2 + eta, c.power_bound, terms, bound);
    c.summary = buf;
    return c;
}

}  // namespace uniwalsh
