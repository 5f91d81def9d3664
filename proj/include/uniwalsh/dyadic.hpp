#pragma once

// Dyadic grids, Walsh-Paley evaluation, fast Walsh-Hadamard transforms,
// exact step functions and set algebra on [0,1] and [0,1]^2.
//
// Cell convention: a rank-p grid on [0,1] has 2^p half-open cells
// [i/2^p, (i+1)/2^p). A rank-(p,q) grid on the square stores cell (i,j)
// at row-major index i*2^q + j, with i along x.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uniwalsh {

using Freq = std::int64_t;

/// Smallest p with 2^p > n, i.e. the rank that resolves W_n exactly.
int rank_for_frequency(Freq n);

/// Reverse the low `bits` bits of v.
std::uint64_t reverse_bits(std::uint64_t v, int bits);

// ---------------------------------------------------------------------------
// Exact values and dyadic intervals

/// Exact value num / 2^exp, kept normalized (odd numerator or zero).
class DyadicRational {
public:
    DyadicRational() = default;
    DyadicRational(std::int64_t num, int exp = 0);

    /// Accepts "a" or "a/b" with b a positive power of two.
    static DyadicRational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    int exp() const { return exp_; }
    bool is_zero() const { return num_ == 0; }
    double to_double() const;
    std::string str() const;
    DyadicRational abs() const { return {num_ < 0 ? -num_ : num_, exp_}; }

    std::strong_ordering operator<=>(const DyadicRational& other) const;
    bool operator==(const DyadicRational& other) const = default;

private:
    std::int64_t num_ = 0;
    int exp_ = 0;
};

/// The interval [index/2^rank, (index+1)/2^rank), 0 <= index < 2^rank.
struct DyadicInterval {
    int rank = 0;
    std::int64_t index = 0;

    double length() const;
    bool contains(const DyadicInterval& other) const;
    bool overlaps(const DyadicInterval& other) const;
    std::pair<DyadicInterval, DyadicInterval> halves() const;
    bool operator==(const DyadicInterval&) const = default;
};

struct DyadicRect {
    DyadicInterval x;
    DyadicInterval y;

    double area() const { return x.length() * y.length(); }
    bool overlaps(const DyadicRect& other) const {
        return x.overlaps(other.x) && y.overlaps(other.y);
    }
    bool operator==(const DyadicRect&) const = default;
};

// ---------------------------------------------------------------------------
// Grids and sets

class Grid1D {
public:
    explicit Grid1D(int rank = 0, double fill = 0.0);
    Grid1D(int rank, std::vector<double> values);

    int rank() const { return rank_; }
    std::size_t size() const { return values_.size(); }
    double cell_length() const;
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    int rank_;
    std::vector<double> values_;
};

class Grid2D {
public:
    explicit Grid2D(int rank_x = 0, int rank_y = 0, double fill = 0.0);
    Grid2D(int rank_x, int rank_y, std::vector<double> values);

    int rank_x() const { return rank_x_; }
    int rank_y() const { return rank_y_; }
    std::size_t size() const { return values_.size(); }
    std::size_t cols() const { return std::size_t{1} << rank_y_; }
    std::size_t rows() const { return std::size_t{1} << rank_x_; }
    double cell_area() const;
    double at(std::size_t i, std::size_t j) const { return values_[(i << rank_y_) | j]; }
    double& at(std::size_t i, std::size_t j) { return values_[(i << rank_y_) | j]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Tensor product g(x) * h(y).
    static Grid2D tensor(const Grid1D& gx, const Grid1D& gy);
    bool operator==(const Grid2D&) const = default;

private:
    int rank_x_;
    int rank_y_;
    std::vector<double> values_;
};

class DyadicSet1D {
public:
    explicit DyadicSet1D(int rank = 0, bool fill = true);
    DyadicSet1D(int rank, std::vector<std::uint8_t> mask);

    int rank() const { return rank_; }
    std::size_t size() const { return mask_.size(); }
    bool contains(std::size_t i) const { return mask_[i] != 0; }
    void set(std::size_t i, bool v) { mask_[i] = v ? 1 : 0; }
    std::size_t count() const;
    double measure() const;
    std::span<const std::uint8_t> mask() const { return mask_; }

private:
    int rank_;
    std::vector<std::uint8_t> mask_;
};

class DyadicSet2D {
public:
    explicit DyadicSet2D(int rank_x = 0, int rank_y = 0, bool fill = true);
    DyadicSet2D(int rank_x, int rank_y, std::vector<std::uint8_t> mask);

    int rank_x() const { return rank_x_; }
    int rank_y() const { return rank_y_; }
    std::size_t size() const { return mask_.size(); }
    bool contains(std::size_t k) const { return mask_[k] != 0; }
    bool contains(std::size_t i, std::size_t j) const { return mask_[(i << rank_y_) | j] != 0; }
    void set(std::size_t k, bool v) { mask_[k] = v ? 1 : 0; }
    std::size_t count() const;
    /// count * 2^-(p+q), exact in binary floating point.
    double measure() const;
    std::span<const std::uint8_t> mask() const { return mask_; }
    bool operator==(const DyadicSet2D&) const = default;

private:
    int rank_x_;
    int rank_y_;
    std::vector<std::uint8_t> mask_;
};

// ---------------------------------------------------------------------------
// Step functions with exact values

struct StepPiece1D {
    DyadicInterval interval;
    DyadicRational value;
};

class StepFunction1D {
public:
    StepFunction1D() = default;
    /// Throws std::invalid_argument if intervals overlap or are malformed.
    explicit StepFunction1D(std::vector<StepPiece1D> pieces);

    std::span<const StepPiece1D> pieces() const { return pieces_; }
    bool is_zero() const;
    /// Finest interval rank among nonzero pieces (0 for the zero function).
    int resolution_rank() const;

private:
    std::vector<StepPiece1D> pieces_;
};

struct StepPiece2D {
    DyadicRect rect;
    DyadicRational value;
    bool operator==(const StepPiece2D&) const = default;
};

class StepFunction2D {
public:
    StepFunction2D() = default;
    /// Throws std::invalid_argument if rectangles overlap or are malformed.
    explicit StepFunction2D(std::vector<StepPiece2D> pieces);

    std::span<const StepPiece2D> pieces() const { return pieces_; }
    bool is_zero() const;
    std::pair<int, int> resolution_ranks() const;
    /// Exact sum of |gamma| * |Delta| over pieces.
    double l1_norm() const;
    double sup_norm() const;
    bool operator==(const StepFunction2D&) const = default;

private:
    std::vector<StepPiece2D> pieces_;
};

// ---------------------------------------------------------------------------
// Walsh-Paley system

/// r_k on a rank-p grid: cell i is +1 iff bit (p-1-k) of i is 0. Needs p > k.
Grid1D rademacher(int k, int rank);

/// W_n = product of r_m over set bits m of n. Needs 2^p > n.
Grid1D walsh(Freq n, int rank);

/// Value of W_n on cell `cell` of a rank-p grid, without range checks.
inline int walsh_sign(Freq n, std::uint64_t cell, int rank) {
    return __builtin_parityll(reverse_bits(static_cast<std::uint64_t>(n), rank) & cell) ? -1 : 1;
}

/// Walsh-Paley coefficients c_j = 2^-p * sum_i g(i) W_j(i), j < 2^p.
std::vector<double> fwht(const Grid1D& g);

/// Synthesis sum_j c_j W_j on a rank-p grid; c.size() must be 2^p.
Grid1D inverse_fwht(std::span<const double> coeffs);

/// Coefficients c_{k,v} = integral of g * W_k(x) W_v(y), row-major in (k, v).
std::vector<double> fwht2d(const Grid2D& g);

/// Synthesis of a row-major (k, v) coefficient array on a rank-(p,q) grid.
Grid2D inverse_fwht2d(std::span<const double> coeffs, int rank_x, int rank_y);

/// sum_{j<2^m} W_j on a rank-p grid; equals 2^m on [0, 2^-m) and 0 elsewhere.
Grid1D dirichlet_packet(int m, int rank);

// ---------------------------------------------------------------------------
// Rasterization, refinement, norms

Grid1D rasterize(const StepFunction1D& f, int rank);
Grid2D rasterize(const StepFunction2D& f, int rank_x, int rank_y);

Grid1D refine(const Grid1D& g, int rank);
Grid2D refine(const Grid2D& g, int rank_x, int rank_y);
DyadicSet1D refine(const DyadicSet1D& s, int rank);
DyadicSet2D refine(const DyadicSet2D& s, int rank_x, int rank_y);

double l1_norm(const Grid1D& g);
double l1_norm(const Grid2D& g);
/// sum over cells of |g| * w * area at the finer of the two grids' ranks.
double weighted_l1(const Grid2D& g, const Grid2D& w);
double sup_norm(const Grid1D& g);
double sup_norm(const Grid2D& g);

// ---------------------------------------------------------------------------
// Set algebra (operands are refined to common ranks first)

DyadicSet2D intersect(const DyadicSet2D& a, const DyadicSet2D& b);
DyadicSet2D unite(const DyadicSet2D& a, const DyadicSet2D& b);
DyadicSet2D complement(const DyadicSet2D& a);
DyadicSet2D product(const DyadicSet1D& x, const DyadicSet1D& y);
double measure(const DyadicSet2D& s);

}  // namespace uniwalsh
