#pragma once

// Sparse double Walsh series, exact rectangular and spherical partial sums,
// distinct-cut enumeration and the worst-subset reduction.

#include "uniwalsh/dyadic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace uniwalsh {

struct Coefficient1D {
    Freq k = 0;
    double value = 0.0;
    bool operator==(const Coefficient1D&) const = default;
};

struct Coefficient2D {
    Freq k = 0;
    Freq v = 0;
    double value = 0.0;
    bool operator==(const Coefficient2D&) const = default;
};

/// Sort by (k, v) and drop exact zeros.
void normalize(std::vector<Coefficient2D>& coeffs);
void normalize(std::vector<Coefficient1D>& coeffs);

/// Largest frequency on either axis, or -1 when empty.
Freq max_frequency(std::span<const Coefficient2D> coeffs);
Freq max_frequency(std::span<const Coefficient1D> coeffs);

/// Block-structured double series: block s (1-based) owns [N_{s-1}, N_s)^2.
class WalshSeries2D {
public:
    WalshSeries2D() = default;

    /// Appends block S+1 covering [N_S, end)^2. Throws std::invalid_argument
    /// if end <= N_S or a coefficient leaves the square.
    void append_block(std::vector<Coefficient2D> coeffs, Freq end);

    std::size_t depth() const { return boundaries_.size() - 1; }
    /// N_0 = 1, N_1, ..., N_S.
    std::span<const Freq> boundaries() const { return boundaries_; }
    std::span<const Coefficient2D> coefficients() const { return coeffs_; }
    std::span<const Coefficient2D> block(std::size_t s) const;
    std::size_t nnz() const { return coeffs_.size(); }
    /// True iff every coefficient lies in its diagonal block square.
    bool block_diagonal() const;

    bool operator==(const WalshSeries2D&) const = default;

private:
    std::vector<Freq> boundaries_{1};
    std::vector<Coefficient2D> coeffs_;
    std::vector<std::size_t> offsets_{0};
};

// ---------------------------------------------------------------------------
// Direct partial sums (dense transform of the selected coefficients)

/// Sum over k <= n, v <= m. Requires 2^rank to exceed every included frequency.
Grid2D rect_partial_sum(std::span<const Coefficient2D> coeffs, Freq n, Freq m, int rank_x, int rank_y);

/// Sum over lower <= k^2 + v^2 <= upper (both inclusive).
Grid2D sph_partial_sum(std::span<const Coefficient2D> coeffs, std::int64_t upper,
                       std::int64_t lower, int rank_x, int rank_y);

/// floor(R^2) computed robustly for R given as a real radius.
std::int64_t radius_squared_floor(double radius);

/// Full synthesis sum c_k W_k on a rank-p grid.
Grid1D synthesize(std::span<const Coefficient1D> coeffs, int rank);
Grid2D synthesize(std::span<const Coefficient2D> coeffs, int rank_x, int rank_y);

// ---------------------------------------------------------------------------
// Distinct cuts

/// Inclusive index range lo <= n, m <= hi. The matching spherical range is
/// 2 lo^2 <= k^2 + v^2 <= R^2 with R^2 up to 2 hi^2.
struct CutRange {
    Freq lo = 1;
    Freq hi = 0;
};

/// Cuts at which a partial sum can change. A value of -1 means "no
/// coefficient selected on that axis" (an empty sum).
struct DistinctCuts {
    std::vector<Freq> rect_x;
    std::vector<Freq> rect_y;
    std::int64_t sph_lower = 0;
    std::vector<std::int64_t> sph;

    std::size_t rect_count() const { return rect_x.size() * rect_y.size(); }
};

DistinctCuts distinct_cuts(std::span<const Coefficient2D> coeffs, CutRange rect, CutRange sph);

/// Effective 1-D prefix cuts for m in [lo, hi].
std::vector<Freq> distinct_cuts_1d(std::span<const Coefficient1D> coeffs, CutRange range);

// ---------------------------------------------------------------------------
// Incremental sweeps over every distinct cut

using RectVisitor = std::function<void(Freq n, Freq m, const Grid2D&)>;
using SphVisitor = std::function<void(std::int64_t upper, const Grid2D&)>;
using PrefixVisitor = std::function<void(Freq m, const Grid1D&)>;

void sweep_rect(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts, int rank_x,
                int rank_y, const RectVisitor& visit);
void sweep_sph(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts, int rank_x,
               int rank_y, const SphVisitor& visit);
void sweep_prefix(std::span<const Coefficient1D> coeffs, std::span<const Freq> cuts, int rank,
                  const PrefixVisitor& visit);

// ---------------------------------------------------------------------------
// Norms and the worst-subset reduction

double coeff_power_norm(std::span<const Coefficient2D> coeffs, double exponent);
double coeff_power_norm(std::span<const Coefficient1D> coeffs, double exponent);

/// max over e in E of integral_e (|g| - budget), i.e. the positive-part cell sum.
double worst_subset_margin(const Grid2D& g, const Grid2D& budget, const DyadicSet2D& E);
double worst_subset_margin(const Grid1D& g, const Grid1D& budget, const DyadicSet1D& E);
/// integral over E of |g|.
double restricted_l1(const Grid2D& g, const DyadicSet2D& E);

// ---------------------------------------------------------------------------
// Subset conditions combining a rectangular and a spherical maximum

struct CombinedSums {
    double rect_max = 0.0;   // max over rect cuts of the per-cut quantity
    double sph_max = 0.0;    // max over spherical cuts
    double excess = 0.0;     // max over e of LHS - integral_e density
    std::string mode;        // "direct", "pairs" or "split"
    std::size_t rect_cuts = 0;
    std::size_t sph_cuts = 0;
};

struct PairLimits {
    std::size_t max_pairs = 1000000;
    std::size_t max_stored_values = std::size_t{1} << 25;
    double max_work = 2e9;
};

/// max over e in E of [max_rect int_e |S| + max_sph int_e |S|] for a budget
/// that does not depend on e; the worst e is E itself.
CombinedSums combined_sums_constant(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts,
                                    const DyadicSet2D& E);

/// max over e in E and over cut pairs of int_e (|S_rect| + |S_sph| - density).
/// Exact over pairs when within limits, otherwise the sufficient split bound.
CombinedSums combined_sums_density(std::span<const Coefficient2D> coeffs, const DistinctCuts& cuts,
                                   const DyadicSet2D& E, const Grid2D& density,
                                   const PairLimits& limits = {});

/// Ranks resolving every coefficient and the given extra ranks.
std::pair<int, int> working_ranks(std::span<const Coefficient2D> coeffs, int min_x, int min_y);

}  // namespace uniwalsh
