#ifndef DRRQ_OPTIMIZE_HPP
#define DRRQ_OPTIMIZE_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "drrq/delay_bounds.hpp"
#include "drrq/geometry.hpp"
#include "drrq/model.hpp"

// Fixed-point solvers for the maximum-sum quanta problem.
//
// Two-flow case: iterate x <- T(x) with T = H_2 o H_1; the unique positive
// fixed point is q_1*, and q_2* = H_1(q_1*). n-flow case: iterate
// theta <- Gamma^{-1}(theta); the fixed point theta* is the optimal round
// size and q_i* = g_i^{-1}(theta*). Both maps are concave and increasing,
// so the iterates are monotone after the first step and converge from any
// positive start.

namespace drrq {

struct InfeasibleSystem : Error {
    using Error::Error;
};

struct NotTwoFlows : Error {
    explicit NotTwoFlows(std::size_t n)
        : Error("two-flow solver called with " + std::to_string(n) + " flows") {}
};

struct FixedPointTrace {
    std::vector<double> iterates; // x_0..x_K or theta_0..theta_K
    bool converged = false;
    double final_residual = 0;    // |x_K - x_{K-1}|
    std::size_t iterations = 0;
};

struct OptimizeResult {
    QuantaVector quanta;
    double objective = 0; // sum of quanta; equals theta* for the n-flow solver
    FixedPointTrace trace;
};

// T(x) = H_2(H_1(x)) for a two-flow context.
inline double T_map(const GeometryContext& ctx, double x)
{
    if (ctx.size() != 2)
        throw NotTwoFlows(ctx.size());
    return H(ctx, 1, H(ctx, 0, x));
}

namespace detail {

// The tolerance of the algorithms is absolute; the relative guard keeps the
// stop test meaningful for bit-scale quanta magnitudes.
inline bool fp_converged(double prev, double next, double tol)
{
    return std::abs(next - prev) <= tol + 1e-12 * std::abs(next);
}

template <typename Map>
FixedPointTrace iterate_fixed_point(Map&& map, double x0, double tol,
                                    std::size_t max_iter)
{
    FixedPointTrace trace;
    trace.iterates.push_back(x0);
    double x = x0;
    for (std::size_t k = 0; k < max_iter; ++k) {
        const double next = map(x);
        trace.iterates.push_back(next);
        trace.iterations = k + 1;
        trace.final_residual = std::abs(next - x);
        if (fp_converged(x, next, tol)) {
            trace.converged = true;
            return trace;
        }
        x = next;
    }
    return trace;
}

inline void check_feasible(const SystemSpec& spec, const GeometryContext& ctx)
{
    if (!necessary_condition(spec))
        throw InfeasibleSystem(
            "infeasible: required capacity sum_i (b_i + L)/d_i = " +
            std::to_string(required_capacity(spec)) + " exceeds c = " +
            std::to_string(spec.capacity));
    const double slope = Gamma_slope_at_zero(ctx);
    if (!(slope < 1.0))
        throw InfeasibleSystem(
            "infeasible: no positive fixed point, round-size map slope at 0 is " +
            std::to_string(slope) + " >= 1");
}

} // namespace detail

// Algorithm for n = 2: fixed-point iteration on T = H_2 o H_1.
inline OptimizeResult two_flow_optimize(const SystemSpec& spec, double x0 = 1.0,
                                        double tol = 1e-9, std::size_t max_iter = 10000)
{
    if (spec.size() != 2)
        throw NotTwoFlows(spec.size());
    if (!(x0 > 0))
        throw NonPositiveParameter("x0", 0, x0);
    GeometryContext ctx(validate(spec));
    detail::check_feasible(spec, ctx);
    // T'(0) = H_2'(0) H_1'(0); <= 1 leaves only the zero fixed point.
    const double t_slope = H_slope_at_zero(ctx, 0) * H_slope_at_zero(ctx, 1);
    if (!(t_slope > 1.0))
        throw InfeasibleSystem("infeasible: T'(0) = " + std::to_string(t_slope) +
                               " <= 1, the only fixed point is 0");

    OptimizeResult res;
    res.trace = detail::iterate_fixed_point(
        [&](double x) { return T_map(ctx, x); }, x0, tol, max_iter);
    if (!res.trace.converged)
        throw NoConvergence("two-flow iteration did not converge in " +
                            std::to_string(max_iter) + " steps, residual " +
                            std::to_string(res.trace.final_residual));
    const double q1 = res.trace.iterates.back();
    res.quanta = {q1, H(ctx, 0, q1)};
    res.objective = res.quanta[0] + res.quanta[1];
    return res;
}

// Algorithm for general n: fixed-point iteration on Gamma^{-1}.
inline OptimizeResult n_flow_optimize(const SystemSpec& spec, double theta0 = 0.5,
                                      double tol = 1e-9, std::size_t max_iter = 10000)
{
    if (!(theta0 > 0))
        throw NonPositiveParameter("theta0", 0, theta0);
    GeometryContext ctx(validate(spec));
    detail::check_feasible(spec, ctx);

    OptimizeResult res;
    res.trace = detail::iterate_fixed_point(
        [&](double th) { return Gamma_inv(ctx, th); }, theta0, tol, max_iter);
    if (!res.trace.converged)
        throw NoConvergence("n-flow iteration did not converge in " +
                            std::to_string(max_iter) + " steps, residual " +
                            std::to_string(res.trace.final_residual));
    const double theta = res.trace.iterates.back();
    res.quanta.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        res.quanta.push_back(g_inv(ctx, i, theta));
    res.objective = theta;
    return res;
}

} // namespace drrq

#endif // DRRQ_OPTIMIZE_HPP
