#pragma once

// Block-by-block construction of the universal double series, the layered
// weight, greedy subseries selection and the tail-estimate verifier.

#include "uniwalsh/dyadic.hpp"
#include "uniwalsh/lemma.hpp"
#include "uniwalsh/report.hpp"
#include "uniwalsh/series.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace uniwalsh {

// ---------------------------------------------------------------------------
// Catalog

struct CatalogParams {
    int max_rank = 1;       // strata t = 0..max_rank
    int value_range = 1;    // values j / 2^t with |j| <= value_range
    int repeats = 3;
    std::size_t max_entries = 100000;
    bool operator==(const CatalogParams&) const = default;
};

struct Catalog {
    CatalogParams params;
    std::vector<StepFunction2D> entries;
    std::size_t distinct = 0;
};

/// Zero first, then stratum by stratum: functions constant on the 2^t x 2^t
/// partition, lexicographic over row-major cells with values ascending,
/// skipping functions already listed. The whole list is repeated.
/// Throws std::length_error when the list would exceed max_entries.
Catalog generate_catalog(const CatalogParams& params);

/// Step function with one piece per nonzero cell of a rank-(p,q) grid of
/// exact values.
StepFunction2D step_from_cells(int rank_x, int rank_y, const std::vector<DyadicRational>& cells);

// ---------------------------------------------------------------------------
// Blocks

/// 2^-2(s+1): the step-function builder tolerance for block s.
double block_eps(std::size_t s);

struct BlockRecord {
    std::size_t s = 0;
    StepFunction2D f;
    std::vector<Coefficient2D> P;
    DyadicSet2D E;
    Freq start = 1;  // N_{s-1}
    Freq end = 2;    // N_s
    double h = 1.0;
    Report report;
    bool operator==(const BlockRecord&) const = default;
};

/// Per-block conditions (exact fit, set measure, power sum, partial sums), from raw data.
Report block_check(const BlockRecord& b, Mode mode, const PairLimits& pairs = {});

/// ||f||_C + max rect sup + max annulus sup + 1 over the block's cuts.
double block_h(const BlockRecord& b, Mode mode);

struct BuildOptions {
    std::size_t depth = 2;
    Limits limits;
};

struct BuildResult {
    WalshSeries2D series;
    std::vector<BlockRecord> blocks;
    /// Set when block (blocks.size() + 1) could not be built.
    std::optional<std::string> failure;
    std::string failure_kind;
    /// Builder-independent bound for the failing block, when it proves infeasibility.
    std::optional<BlockCertificate> certificate;
};

/// Throws std::invalid_argument if depth exceeds the catalog length. Build
/// errors stop the loop and are returned in `failure` with the completed prefix.
BuildResult build_universal(const Catalog& catalog, const BuildOptions& opt);

// ---------------------------------------------------------------------------
// Weight

struct WeightFunction {
    double eps = 0.0;
    int n0 = 0;
    std::size_t depth = 0;
    DyadicSet2D E;
    /// Omega_n for n = n0..S (index n - n0).
    std::vector<DyadicSet2D> omega;
    /// mu_n for n = 1..S (index n - 1).
    std::vector<double> mu;
    /// Cellwise weight at the common rank of all sets.
    Grid2D values;

    bool operator==(const WeightFunction&) const = default;
};

/// floor(log_{1/2} eps) + 1.
int weight_n0(double eps);

/// Throws InsufficientDepth when fewer than n0 + 1 blocks exist.
WeightFunction build_weight(const std::vector<BlockRecord>& blocks, double eps);

/// Assembles mu from explicit levels: 1 on Omega_n0 and off Omega_S,
/// mu_n on Omega_n minus Omega_{n-1}.
Grid2D weight_values(const std::vector<DyadicSet2D>& omega, int n0, const std::vector<double>& mu);

/// 0 < mu <= 1, measure{mu != 1} < eps, mu_n <= 2^-2n and decreasing.
Report weight_check(const WeightFunction& w);

// ---------------------------------------------------------------------------
// Greedy subseries

struct ApproxStep {
    int q = 0;
    std::size_t n = 0;
    double err_mu = 0.0;
    double bound_mu = 0.0;
    double err_rect = 0.0;
    double err_sph = 0.0;
    double bound_ps = 0.0;
    std::string status;
};

struct ApproxTrace {
    std::vector<ApproxStep> steps;
    std::optional<std::string> failure;
    bool all_verified() const;
};

ApproxTrace greedy_subseries(const Grid2D& target, const std::vector<BlockRecord>& blocks,
                             const WeightFunction& w, int steps, Mode mode = Mode::strict);

// ---------------------------------------------------------------------------
// Tail estimates

Report verify_construction(const WalshSeries2D& series, const std::vector<BlockRecord>& blocks,
                           const WeightFunction& w, Mode mode = Mode::strict);

/// sum |c|^q for q in {2.1, 2.5, 3}.
Report power_norms(const WalshSeries2D& series);

}  // namespace uniwalsh
