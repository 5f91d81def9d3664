#include "uniwalsh/universal.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace uniwalsh {

StepFunction2D step_from_cells(int rank_x, int rank_y, const std::vector<DyadicRational>& cells) {
    if (cells.size() != (std::size_t{1} << (rank_x + rank_y)))
        throw std::invalid_argument("step_from_cells: cell count must be 2^(p+q)");
    std::vector<StepPiece2D> pieces;
    const std::size_t cols = std::size_t{1} << rank_y;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].is_zero()) continue;
        pieces.push_back({{{rank_x, static_cast<std::int64_t>(k / cols)}, {rank_y, static_cast<std::int64_t>(k % cols)}},
                          cells[k]});
    }
    return StepFunction2D(std::move(pieces));
}

namespace {

// Exact cell values of f at rank (t, t), as a comparable key.
std::string key_of(const std::vector<DyadicRational>& cells, int t, int t_max) {
    const std::size_t side = std::size_t{1} << t_max;
    const int shift = t_max - t;
    std::string key;
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            const auto& v = cells[((i >> shift) << t) | (j >> shift)];
            key += v.str();
            key += ',';
        }
    return key;
}

}  // namespace

Catalog generate_catalog(const CatalogParams& params) {
    if (params.max_rank < 0 || params.value_range < 0 || params.repeats < 1)
        throw std::invalid_argument("generate_catalog: bad parameters");
    double raw = 0.0;
    for (int t = 0; t <= params.max_rank; ++t)
        raw += std::pow(2.0 * params.value_range + 1.0, std::ldexp(1.0, 2 * t));
    if (raw * params.repeats > static_cast<double>(params.max_entries))
        throw std::length_error("generate_catalog: " + std::to_string(raw * params.repeats) +
                                " entries exceed the limit " + std::to_string(params.max_entries));

    Catalog cat;
    cat.params = params;
    std::vector<StepFunction2D> base;
    std::set<std::string> seen;
    const int V = params.value_range;
    {
        std::vector<DyadicRational> zero(std::size_t{1} << (2 * params.max_rank));
        seen.insert(key_of(zero, params.max_rank, params.max_rank));
        base.push_back(StepFunction2D{});
    }
    for (int t = 0; t <= params.max_rank; ++t) {
        const std::size_t cells = std::size_t{1} << (2 * t);
        std::vector<int> digit(cells, -V);
        while (true) {
            std::vector<DyadicRational> vals(cells);
            for (std::size_t k = 0; k < cells; ++k) vals[k] = DyadicRational(digit[k], t);
            if (seen.insert(key_of(vals, t, params.max_rank)).second) base.push_back(step_from_cells(t, t, vals));
            // Odometer with cell 0 most significant.
            std::size_t k = cells;
            while (k > 0 && digit[k - 1] == V) digit[--k] = -V;
            if (k == 0) break;
            ++digit[k - 1];
        }
    }
    cat.distinct = base.size();
    for (int r = 0; r < params.repeats; ++r) cat.entries.insert(cat.entries.end(), base.begin(), base.end());
    return cat;
}

}  // namespace uniwalsh
