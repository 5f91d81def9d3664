#include "uniwalsh/error.hpp"
#include "uniwalsh/lemma.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

namespace uniwalsh {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(unit(rng) * n); }

enum class Placement { cover, stratified, spread };

const char* name(Placement p) {
    switch (p) {
        case Placement::cover: return "cover";
        case Placement::stratified: return "stratified";
        default: return "spread";
    }
}

// Cells of the exceptional set X at rank p, sorted.
std::vector<std::size_t> place(const Grid1D& f, std::size_t budget, Freq N0, Placement how,
                               std::mt19937_64& rng) {
    const std::size_t n = f.size();
    std::vector<std::uint8_t> in(n, 0);
    std::size_t used = 0;
    auto take = [&](std::size_t i) {
        if (!in[i] && used < budget) {
            in[i] = 1;
            ++used;
        }
    };
    if (how == Placement::spread) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t k = 0; k < budget && k < n; ++k) {
            std::swap(idx[k], idx[k + below(rng, n - k)]);
            take(idx[k]);
        }
    } else {
        if (how == Placement::stratified) {
            int a = rank_for_frequency(std::max<Freq>(N0 - 1, 0));
            a = std::min(a, f.rank());
            const std::size_t blocks = std::size_t{1} << a;
            const std::size_t width = n / blocks;
            for (std::size_t b = 0; b < blocks; ++b) take(b * width + below(rng, width));
        }
        std::vector<double> key(n);
        for (std::size_t i = 0; i < n; ++i) key[i] = std::abs(f[i]) + 1e-6 * unit(rng);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
        for (std::size_t i : idx) take(i);
    }
    std::vector<std::size_t> X;
    for (std::size_t i = 0; i < n; ++i)
        if (in[i]) X.push_back(i);
    return X;
}

struct Attempt {
    bool solved = false;
    double power = HUGE_VAL;
    std::vector<double> coeffs;  // full Paley spectrum at rank p
    std::vector<std::size_t> X;
};

// Minimize sum |c_j|^q over corrections v on X subject to c_j = 0 for j < N0.
Attempt correct(const Grid1D& f, Freq N0, double eps, std::vector<std::size_t> X, int iterations) {
    Attempt out;
    out.X = std::move(X);
    const int p = f.rank();
    const std::size_t n = f.size();
    const double inv_n = std::ldexp(1.0, -p);
    const std::size_t m = static_cast<std::size_t>(std::min<Freq>(N0, static_cast<Freq>(n)));
    const std::size_t nx = out.X.size();
    const double q = 2 + eps;

    Grid1D base = f;
    for (std::size_t x : out.X) base[x] = 0.0;
    const std::vector<double> base_hat = fwht(base);

    MatrixXd A(m, nx);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t c = 0; c < nx; ++c) A(j, c) = walsh_sign(static_cast<Freq>(j), out.X[c], p) * inv_n;
    VectorXd b(m);
    for (std::size_t j = 0; j < m; ++j) b(j) = -base_hat[j];

    VectorXd v = VectorXd::Zero(nx);
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
    if (m > 0 && nx > 0) {
        cod.compute(A * A.transpose());
        v = A.transpose() * cod.solve(b);
    }
    const double residual = m > 0 ? (A * v - b).norm() : 0.0;
    if (residual > 1e-10 * (1.0 + b.norm())) return out;
    out.solved = true;

    auto project = [&](const VectorXd& g) -> VectorXd {
        if (m == 0 || nx == 0) return g;
        return g - A.transpose() * cod.solve(A * g);
    };
    auto evaluate = [&](const VectorXd& vv, std::vector<double>& c) {
        Grid1D P = base;
        for (std::size_t k = 0; k < nx; ++k) P[out.X[k]] = vv(static_cast<Eigen::Index>(k));
        c = fwht(P);
        double s = 0.0;
        for (double x : c) s += std::pow(std::abs(x), q);
        return s;
    };

    std::vector<double> c, cn;
    double F = evaluate(v, c);
    double step = 1.0;
    for (int it = 0; it < iterations && nx > 0; ++it) {
        std::vector<double> gc(n);
        for (std::size_t j = 0; j < n; ++j)
            gc[j] = c[j] == 0.0 ? 0.0 : q * std::pow(std::abs(c[j]), q - 1) * (c[j] > 0 ? 1.0 : -1.0);
        const Grid1D gs = inverse_fwht(gc);
        VectorXd g(nx);
        for (std::size_t k = 0; k < nx; ++k) g(static_cast<Eigen::Index>(k)) = gs[out.X[k]] * inv_n;
        g = project(g);
        const double gn = g.squaredNorm();
        if (gn < 1e-30) break;
        bool moved = false;
        while (step > 1e-20) {
            VectorXd trial = v - step * g;
            const double Fn = evaluate(trial, cn);
            if (Fn <= F - 1e-4 * step * gn) {
                v = std::move(trial);
                F = Fn;
                c.swap(cn);
                step *= 2;
                moved = true;
                break;
            }
            step /= 2;
        }
        if (!moved) break;
    }
    if (m > 0 && nx > 0) v -= A.transpose() * cod.solve(A * v - b);
    evaluate(v, c);
    for (std::size_t j = 0; j < m; ++j) c[j] = 0.0;
    double s = 0.0;
    for (auto& x : c) {
        if (std::abs(x) < 1e-15) x = 0.0;
        s += std::pow(std::abs(x), q);
    }
    out.power = s;
    out.coeffs = std::move(c);
    return out;
}

}  // namespace

Lemma1Result lemma1_build(const StepFunction1D& f, Freq N0, double eps, const Lemma1Options& opt) {
    if (N0 < 1) throw std::invalid_argument("lemma1_build: N0 must be >= 1");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("lemma1_build: eps must lie in (0,1)");

    Lemma1Result res;
    res.N0 = N0;
    res.eps = eps;
    if (f.is_zero()) {
        res.E = DyadicSet1D(0, true);
        res.N = N0;
        res.placement = "none";
        res.report = lemma1_check(f, N0, eps, res.P, res.E);
        return res;
    }
    if (f.resolution_rank() > opt.max_rank)
        throw ResolutionError("lemma1_build: target finer than the working-rank cap");

    const Lemma1Certificate cert = lemma1_certificate(f, N0, eps, opt.max_rank);
    if (cert.infeasible || cert.min_rank < 0)
        throw ConstructionFailed("lemma1_build: unattainable below rank " + std::to_string(opt.max_rank) +
                                 ": " + cert.summary);

    const int start = std::max(opt.min_rank, cert.min_rank);
    std::string best = "no attempt";
    double best_power = HUGE_VAL;
    for (int p = start; p <= opt.max_rank; ++p) {
        const Grid1D g = rasterize(f, p);
        const double cells = std::ldexp(eps, p);
        const auto budget = static_cast<std::size_t>(std::ceil(cells)) - 1;
        for (int t = 0; t < opt.retries; ++t) {
            ++res.attempts;
            std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(p) * 1000003ULL +
                                static_cast<std::uint64_t>(t));
            const auto how = static_cast<Placement>(t % 3);
            Attempt a = correct(g, N0, eps, place(g, budget, N0, how, rng), opt.iterations);
            if (!a.solved) continue;
            if (a.power < best_power) {
                best_power = a.power;
                char buf[160];
                std::snprintf(buf, sizeof buf, "best sum|c|^%.4g = %.6g at rank %d (need < %.6g)", 2 + eps,
                              a.power, p, eps);
                best = buf;
            }
            if (!(a.power < eps)) continue;

            std::vector<Coefficient1D> P;
            for (std::size_t j = 0; j < a.coeffs.size(); ++j)
                if (a.coeffs[j] != 0.0) P.push_back({static_cast<Freq>(j), a.coeffs[j]});
            std::vector<std::uint8_t> mask(g.size(), 1);
            for (std::size_t x : a.X) mask[x] = 0;
            DyadicSet1D E(p, std::move(mask));
            Report rep = lemma1_check(f, N0, eps, P, E);
            if (!rep.all_passed()) {
                best = "rank " + std::to_string(p) + " failed " + rep.failures();
                continue;
            }
            res.P = std::move(P);
            res.E = std::move(E);
            res.rank = p;
            res.N = res.P.empty() ? N0 : res.P.back().k;
            res.placement = name(how);
            res.report = std::move(rep);
            return res;
        }
    }
    throw ConstructionFailed("lemma1_build: no admissible polynomial up to rank " + std::to_string(opt.max_rank) +
                             "; " + best + "; lower bound " + cert.summary);
}

Report lemma1_check(const StepFunction1D& f, Freq N0, double eps, std::span<const Coefficient1D> P,
                    const DyadicSet1D& E) {
    Report rep;
    Freq lo = std::numeric_limits<Freq>::max(), hi = -1;
    for (const auto& c : P) {
        lo = std::min(lo, c.k);
        hi = std::max(hi, c.k);
    }
    const Freq N = hi < 0 ? N0 : hi;
    rep.add(boolean_check("support in [N0,N]", hi < 0 || lo >= N0));

    const int r = std::max({E.rank(), f.resolution_rank(), hi < 0 ? 0 : rank_for_frequency(hi)});
    const Grid1D fg = rasterize(f, r);
    const Grid1D pg = synthesize(P, r);
    const DyadicSet1D e = refine(E, r);
    double dev = 0.0;
    for (std::size_t i = 0; i < fg.size(); ++i)
        if (e.contains(i)) dev = std::max(dev, std::abs(pg[i] - fg[i]));
    rep.add(less_equal("P = f on E", dev, 0.0));
    rep.add(strict_greater("|E| > 1 - eps", E.measure(), 1 - eps));
    rep.add(strict_less("sum|c|^(2+eps) < eps", coeff_power_norm(P, 2 + eps), eps));

    Grid1D budget(r);
    for (std::size_t i = 0; i < fg.size(); ++i) budget[i] = std::abs(fg[i]);
    double worst = 0.0;
    const auto cuts = distinct_cuts_1d(P, CutRange{N0, N - 1});
    sweep_prefix(P, cuts, r, [&](Freq, const Grid1D& s) {
        worst = std::max(worst, worst_subset_margin(s, budget, e));
    });
    rep.add(strict_less("partial sums on subsets", worst, eps,
                        std::to_string(cuts.size()) + " cuts"));
    return rep;
}

}  // namespace uniwalsh
