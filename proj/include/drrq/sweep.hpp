#ifndef DRRQ_SWEEP_HPP
#define DRRQ_SWEEP_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "drrq/delay_bounds.hpp"
#include "drrq/geometry.hpp"
#include "drrq/model.hpp"

// Feasible-region sweeps over a quanta pair (i, j), holding the remaining
// quanta fixed. Each grid cell records both feasibility verdicts and which
// branch bound governs flow i's constraint there. The midpoint audit counts
// feasible cell pairs whose grid midpoint is infeasible; the modified set is
// convex so its count must be zero, while the exact set can violate it.

namespace drrq {

struct GridTooLarge : Error {
    GridTooLarge(std::size_t cells, std::size_t cap)
        : Error("sweep grid has " + std::to_string(cells) + " cells, cap is " +
                std::to_string(cap)) {}
};

struct SweepGrid {
    std::size_t flow_i = 0;
    std::size_t flow_j = 1;
    double i_min = 0, i_max = 0, i_step = 0;
    double j_min = 0, j_max = 0, j_step = 0;
    QuantaVector fixed; // values for the other quanta; entries i, j ignored
};

struct SweepCell {
    double q_i = 0, q_j = 0;
    bool exact_feasible = false;
    bool modified_feasible = false;
    int linear_term_sign = 0; // sign of a(q_i, k) for flow i
    int active_branch = 1;    // 1 when the linear term is inactive, else 2
};

struct SweepResult {
    std::vector<SweepCell> cells;
    std::size_t ni = 0, nj = 0;
    std::int64_t exact_pairs_checked = 0;
    std::int64_t exact_midpoint_violations = 0;
    std::int64_t modified_pairs_checked = 0;
    std::int64_t modified_midpoint_violations = 0;
};

namespace detail {

inline std::size_t axis_count(double lo, double hi, double step)
{
    if (!(step > 0))
        throw Error("sweep step must be positive");
    if (hi < lo)
        return 0;
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

// Counts feasible pairs with a grid midpoint whose midpoint cell is
// infeasible. Exhaustive for small cell sets, deterministically sampled
// above that.
inline void midpoint_audit(const std::vector<SweepCell>& cells, std::size_t ni,
                           std::size_t nj, bool use_exact, std::int64_t& pairs,
                           std::int64_t& violations)
{
    auto feasible = [&](std::size_t ix, std::size_t jx) {
        const SweepCell& c = cells[ix * nj + jx];
        return use_exact ? c.exact_feasible : c.modified_feasible;
    };
    std::vector<std::pair<std::size_t, std::size_t>> feas;
    for (std::size_t ix = 0; ix < ni; ++ix)
        for (std::size_t jx = 0; jx < nj; ++jx)
            if (feasible(ix, jx))
                feas.push_back({ix, jx});

    pairs = 0;
    violations = 0;
    auto check = [&](const auto& a, const auto& b) {
        if ((a.first + b.first) % 2 != 0 || (a.second + b.second) % 2 != 0)
            return;
        ++pairs;
        if (!feasible((a.first + b.first) / 2, (a.second + b.second) / 2))
            ++violations;
    };

    const std::size_t exhaustive_cap = 2000;
    if (feas.size() <= exhaustive_cap) {
        for (std::size_t a = 0; a < feas.size(); ++a)
            for (std::size_t b = a + 1; b < feas.size(); ++b)
                check(feas[a], feas[b]);
    } else {
        std::mt19937_64 rng(0x5eedu);
        std::uniform_int_distribution<std::size_t> pick(0, feas.size() - 1);
        for (int s = 0; s < 1000000; ++s) {
            const std::size_t a = pick(rng);
            const std::size_t b = pick(rng);
            if (a != b)
                check(feas[a], feas[b]);
        }
    }
}

} // namespace detail

inline SweepResult run_sweep(const SystemSpec& spec, const SweepGrid& grid,
                             std::size_t cell_cap = 10'000'000)
{
    const SystemSpec checked = validate(spec);
    const std::size_t n = checked.size();
    if (grid.flow_i >= n || grid.flow_j >= n || grid.flow_i == grid.flow_j)
        throw Error("sweep flow pair out of range");
    if (n > 2 && grid.fixed.size() != n)
        throw Error("sweep needs fixed quanta for the non-swept flows");

    SweepResult res;
    res.ni = detail::axis_count(grid.i_min, grid.i_max, grid.i_step);
    res.nj = detail::axis_count(grid.j_min, grid.j_max, grid.j_step);
    if (res.ni * res.nj > cell_cap)
        throw GridTooLarge(res.ni * res.nj, cell_cap);

    GeometryContext ctx(checked);
    QuantaVector q = grid.fixed;
    q.resize(n, 1.0);

    res.cells.reserve(res.ni * res.nj);
    for (std::size_t ix = 0; ix < res.ni; ++ix) {
        const double qi = grid.i_min + static_cast<double>(ix) * grid.i_step;
        for (std::size_t jx = 0; jx < res.nj; ++jx) {
            const double qj = grid.j_min + static_cast<double>(jx) * grid.j_step;
            q[grid.flow_i] = qi;
            q[grid.flow_j] = qj;

            SweepCell cell;
            cell.q_i = qi;
            cell.q_j = qj;
            cell.exact_feasible = is_feasible_exact(checked, q);
            cell.modified_feasible = is_feasible_modified(checked, q);
            double k = 0;
            for (std::size_t m = 0; m < n; ++m)
                if (m != grid.flow_i)
                    k += q[m];
            const double a = linear_term(ctx, grid.flow_i, qi, k);
            cell.linear_term_sign = a > 0 ? 1 : (a < 0 ? -1 : 0);
            cell.active_branch = a > 0 ? 2 : 1;
            res.cells.push_back(cell);
        }
    }

    detail::midpoint_audit(res.cells, res.ni, res.nj, true, res.exact_pairs_checked,
                           res.exact_midpoint_violations);
    detail::midpoint_audit(res.cells, res.ni, res.nj, false, res.modified_pairs_checked,
                           res.modified_midpoint_violations);
    return res;
}

} // namespace drrq

#endif // DRRQ_SWEEP_HPP
