#pragma once

// Builders for the one-dimensional correction polynomial, its tensor-product
// extension to a dyadic rectangle, and the step-function sum over rectangles.
// Every builder re-verifies its output with a checker that only uses the
// series and dyadic primitives.

#include "uniwalsh/dyadic.hpp"
#include "uniwalsh/report.hpp"
#include "uniwalsh/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uniwalsh {

enum class Mode { strict, rect };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct Limits {
    Mode mode = Mode::strict;
    /// Per-axis frequency cap for 2-D work: every frequency must be < fmax.
    Freq fmax = Freq{1} << 10;
    /// Working-rank cap for standalone 1-D builds.
    int max_rank_1d = 14;
    /// Attempts per working rank (exceptional-set placements).
    int retries = 3;
    /// Projected-gradient iterations per attempt.
    int iterations = 400;
    std::uint64_t seed = 1;
    PairLimits pairs;
};

// ---------------------------------------------------------------------------
// One-dimensional correction polynomial

struct Lemma1Options {
    int max_rank = 14;
    /// Starting working rank; 0 picks the smallest rank the lower bound allows.
    int min_rank = 0;
    int retries = 3;
    int iterations = 400;
    std::uint64_t seed = 1;
};

struct Lemma1Result {
    std::vector<Coefficient1D> P;  // frequencies in [N0, N]
    DyadicSet1D E;
    int rank = 0;
    Freq N0 = 1;
    Freq N = 1;
    double eps = 0.0;
    std::string placement;
    int attempts = 0;
    Report report;
};

/// Lower bound on sum |c|^(2+eps) over every admissible polynomial with
/// frequencies in [N0, 2^max_rank). infeasible is set when the bound reaches eps.
struct Lemma1Certificate {
    double energy = 0.0;       // lower bound on sum c^2
    double power_bound = 0.0;  // lower bound on sum |c|^(2+eps)
    std::int64_t max_terms = 0;
    int min_rank = 0;          // smallest rank at which the bound drops below eps (-1: none)
    bool infeasible = false;
    std::string summary;
};

Lemma1Certificate lemma1_certificate(const StepFunction1D& f, Freq N0, double eps, int max_rank);

/// Throws ConstructionFailed when every rank/attempt fails or the certificate
/// proves the target unattainable; ResolutionError when f is finer than max_rank.
Lemma1Result lemma1_build(const StepFunction1D& f, Freq N0, double eps, const Lemma1Options& opt = {});

/// Exact fit, set measure, power sum, partial sums on subsets and support, from raw data only.
Report lemma1_check(const StepFunction1D& f, Freq N0, double eps, std::span<const Coefficient1D> P,
                    const DyadicSet1D& E);

// ---------------------------------------------------------------------------
// Tensor product on one rectangle

struct Lemma2Result {
    std::vector<Coefficient2D> P;
    DyadicSet2D E;
    Freq N = 2;
    Freq N1 = 2;
    Freq M0 = 0;
    Freq M = 2;
    DyadicRational gamma;
    DyadicRect rect;
    double delta = 0.0;
    Mode mode = Mode::strict;
    Lemma1Result x_factor;
    Lemma1Result y_factor;
    bool vacuous = false;  // x factor vanished, so P = 0
    Report report;
};

/// Largest x-factor rank p with 2((2^p - 1)^2 + 1) < fmax (strict mode).
int strict_x_rank_cap(Freq fmax);

Lemma2Result lemma2_build(const DyadicRational& gamma, double delta, Freq N, const DyadicRect& rect,
                          const Limits& limits);

Report lemma2_check(const DyadicRational& gamma, double delta, Freq N, const DyadicRect& rect,
                    std::span<const Coefficient2D> P, const DyadicSet2D& E, Freq M, Mode mode);

// ---------------------------------------------------------------------------
// Step function over several rectangles

struct Lemma3Result {
    std::vector<Coefficient2D> P;
    DyadicSet2D E;
    Freq N = 2;
    Freq M = 2;
    double eps = 0.0;
    StepFunction2D split;  // f after the pre-splitting
    std::vector<Lemma2Result> parts;
    Report report;
};

/// Dyadic bisection of the largest |gamma||Delta| piece (x first when the
/// x rank is not finer) until every product is < bound. Zero pieces are dropped.
StepFunction2D presplit(const StepFunction2D& f, double bound);

/// delta for part nu (1-based) of nu0.
double lemma3_delta(double eps, int nu, int nu0);

Lemma3Result lemma3_build(const StepFunction2D& f, double eps, Freq N, const Limits& limits);

/// Exact fit, set measure, power sum and partial sums; the partial sums use
/// the rectangular range [N, M) and the
/// spherical range sqrt2 N <= R <= sqrt2 M.
Report lemma3_check(const StepFunction2D& f, double eps, Freq N, std::span<const Coefficient2D> P,
                    const DyadicSet2D& E, Freq M, Mode mode, const PairLimits& pairs = {});

// ---------------------------------------------------------------------------
// Builder-independent bound on a 2-D block

/// Lower bound on sum |c|^(2+eta) over any P with frequencies in [1, fmax)^2
/// that equals f off a set of measure < eps. infeasible when it reaches bound.
struct BlockCertificate {
    double energy = 0.0;
    double power_bound = 0.0;
    double required = 0.0;
    bool infeasible = false;
    std::string summary;
};

BlockCertificate block_certificate(const StepFunction2D& f, double eps, double eta, double bound, Freq fmax);

}  // namespace uniwalsh
