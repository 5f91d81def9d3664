#include "uniwalsh/error.hpp"
#include "uniwalsh/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uniwalsh {

const char* to_string(Mode m) { return m == Mode::strict ? "strict" : "rect"; }

Mode parse_mode(const std::string& s) {
    if (s == "strict") return Mode::strict;
    if (s == "rect") return Mode::rect;
    throw std::invalid_argument("unknown mode '" + s + "' (expected strict or rect)");
}

namespace {

int rank_cap(Freq fmax) {
    int p = 0;
    while ((Freq{2} << p) <= fmax) ++p;
    return p;
}

Lemma1Options options_for(const Limits& limits, int max_rank, std::uint64_t salt) {
    Lemma1Options o;
    o.max_rank = max_rank;
    o.retries = limits.retries;
    o.iterations = limits.iterations;
    o.seed = limits.seed * 6364136223846793005ULL + salt;
    return o;
}

}  // namespace

int strict_x_rank_cap(Freq fmax) {
    int p = 0;
    while (true) {
        const Freq n1 = (Freq{1} << (p + 1)) - 1;
        if (2 * (n1 * n1 + 1) >= fmax) return p;
        ++p;
    }
}

Lemma2Result lemma2_build(const DyadicRational& gamma, double delta, Freq N, const DyadicRect& rect,
                          const Limits& limits) {
    if (gamma.is_zero()) throw std::invalid_argument("lemma2_build: gamma must be nonzero");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("lemma2_build: delta must lie in (0,1)");
    if (N < 2) throw std::invalid_argument("lemma2_build: N must exceed 1");
    if (N >= limits.fmax) throw FrequencyBudgetExceeded("lemma2_build: N is already at the frequency cap");

    const int y_cap = std::min(rank_cap(limits.fmax), 30);
    const int x_cap = std::min(limits.mode == Mode::strict ? strict_x_rank_cap(limits.fmax) : y_cap,
                               limits.max_rank_1d);
    if (rect.x.rank > x_cap)
        throw FrequencyBudgetExceeded("lemma2_build: x interval rank " + std::to_string(rect.x.rank) +
                                      " exceeds the x-factor rank cap " + std::to_string(x_cap));

    std::string last;
    for (int attempt = 0; attempt < std::max(1, limits.retries); ++attempt) {
        Lemma2Result r;
        r.N = N;
        r.gamma = gamma;
        r.rect = rect;
        r.delta = delta;
        r.mode = limits.mode;

        const StepFunction1D fx({{rect.x, gamma}});
        r.x_factor = lemma1_build(fx, N, delta / 2, options_for(limits, x_cap, 2 * attempt + 1));
        r.N1 = r.x_factor.N;
        r.M0 = limits.mode == Mode::strict ? 2 * (r.N1 * r.N1 + 1) : r.N1 + 1;
        if (r.x_factor.P.empty()) {
            r.vacuous = true;
            r.M = N;
            r.y_factor.E = DyadicSet1D(0, true);
            r.y_factor.N0 = r.y_factor.N = r.M0;
            r.y_factor.eps = delta / 2;
        } else {
            if (r.M0 >= limits.fmax)
                throw FrequencyBudgetExceeded("lemma2_build: M0 = " + std::to_string(r.M0) +
                                              " reaches the cap " + std::to_string(limits.fmax));
            const StepFunction1D fy({{rect.y, DyadicRational(1)}});
            r.y_factor = lemma1_build(fy, r.M0, delta / 2, options_for(limits, y_cap, 2 * attempt + 2));
            for (const auto& a : r.x_factor.P)
                for (const auto& b : r.y_factor.P) r.P.push_back({a.k, b.k, a.value * b.value});
            normalize(r.P);
            r.M = r.P.empty() ? N : r.y_factor.N;
            r.vacuous = r.P.empty();
        }
        r.E = product(r.x_factor.E, r.y_factor.E);
        r.report = lemma2_check(gamma, delta, N, rect, r.P, r.E, r.M, limits.mode);
        if (r.report.all_passed()) return r;
        last = r.report.failures();
    }
    throw ConstructionFailed("lemma2_build: verification failed: " + last);
}

StepFunction2D presplit(const StepFunction2D& f, double bound) {
    std::vector<StepPiece2D> pieces;
    for (const auto& p : f.pieces())
        if (!p.value.is_zero()) pieces.push_back(p);
    auto weight = [](const StepPiece2D& p) { return std::abs(p.value.to_double()) * p.rect.area(); };
    while (!pieces.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pieces.size(); ++i)
            if (weight(pieces[i]) > weight(pieces[best])) best = i;
        if (weight(pieces[best]) < bound) break;
        const StepPiece2D p = pieces[best];
        StepPiece2D a = p, b = p;
        if (p.rect.x.rank <= p.rect.y.rank) {
            std::tie(a.rect.x, b.rect.x) = p.rect.x.halves();
        } else {
            std::tie(a.rect.y, b.rect.y) = p.rect.y.halves();
        }
        if (std::max(a.rect.x.rank, a.rect.y.rank) > 30) throw ResolutionError("presplit: rank overflow");
        pieces[best] = a;
        pieces.insert(pieces.begin() + static_cast<std::ptrdiff_t>(best) + 1, b);
    }
    return StepFunction2D(std::move(pieces));
}

double lemma3_delta(double eps, int nu, int nu0) {
    return std::min(std::ldexp(eps, -(nu + 4)), eps / (16.0 * nu0));
}

Lemma3Result lemma3_build(const StepFunction2D& f, double eps, Freq N, const Limits& limits) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("lemma3_build: eps must lie in (0,1)");
    if (N < 1) throw std::invalid_argument("lemma3_build: N must be >= 1");

    Lemma3Result r;
    r.N = N;
    r.eps = eps;
    r.split = presplit(f, eps / 32);
    const auto pieces = r.split.pieces();
    const int nu0 = static_cast<int>(pieces.size());
    r.E = DyadicSet2D(0, 0, true);
    Freq next = std::max<Freq>(N, 2);
    r.M = N;
    for (int nu = 1; nu <= nu0; ++nu) {
        const auto& piece = pieces[static_cast<std::size_t>(nu - 1)];
        Limits sub = limits;
        sub.seed = limits.seed * 1000003ULL + static_cast<std::uint64_t>(nu);
        Lemma2Result part = lemma2_build(piece.value, lemma3_delta(eps, nu, nu0), next, piece.rect, sub);
        r.P.insert(r.P.end(), part.P.begin(), part.P.end());
        r.E = intersect(r.E, part.E);
        r.M = part.M;
        next = part.M + 1;
        r.parts.push_back(std::move(part));
    }
    normalize(r.P);
    r.report = lemma3_check(f, eps, N, r.P, r.E, r.M, limits.mode, limits.pairs);

    bool disjoint = true;
    for (std::size_t i = 1; i < r.parts.size(); ++i)
        if (r.parts[i].N <= r.parts[i - 1].M) disjoint = false;
    r.report.add(boolean_check("chained supports disjoint", disjoint));
    if (!r.report.all_passed())
        throw ConstructionFailed("lemma3_build: verification failed: " + r.report.failures());
    return r;
}

}  // namespace uniwalsh
