#ifndef DRRQ_GEOMETRY_HPP
#define DRRQ_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "drrq/model.hpp"

// Scalar geometry of the modified feasible set.
//
// With k = sum_{j != i} q_j and the effective deadline J_i = d_i - (n-2)L/c,
// the constraint f^i(q) <= 0 reduces to the two-variable inequality
// k <= H_i(q_i), where H_i is the pointwise minimum of the two concave
// branch bounds h1 (linear term inactive) and h2 (linear term active).
// g_i = H_i + q_i turns the per-flow constraints into sum_j q_j <= g_i(q_i);
// Gamma(theta) = sum_i g_i^{-1}(theta) is the map whose unique positive
// fixed point is the optimal round size theta* = sum_i q_i*.

namespace drrq {

struct NoConvergence : Error {
    using Error::Error;
};

// Minimum-bandwidth condition for a non-empty feasible set:
// sum_i (b_i + L)/d_i <= c.
inline double required_capacity(const SystemSpec& spec)
{
    double sum = 0;
    for (const FlowSpec& f : spec.flows)
        sum += (f.burst + spec.residual_deficit_cap) / f.deadline;
    return sum;
}

inline bool necessary_condition(const SystemSpec& spec)
{
    return required_capacity(spec) <= spec.capacity;
}

class GeometryContext {
public:
    explicit GeometryContext(SystemSpec spec) : spec_(std::move(spec))
    {
        const double c = spec_.capacity;
        const double L = spec_.residual_deficit_cap;
        const double n = static_cast<double>(spec_.size());
        effective_deadline_.reserve(spec_.size());
        for (std::size_t i = 0; i < spec_.size(); ++i) {
            const double J = spec_.flows[i].deadline - (n - 2.0) * L / c;
            const double bL = spec_.flows[i].burst + L;
            if (!(c * J > bL))
                throw DeadlineUnachievable(i, c * J, bL);
            effective_deadline_.push_back(J);
        }
    }

    const SystemSpec& spec() const { return spec_; }
    std::size_t size() const { return spec_.size(); }
    double capacity() const { return spec_.capacity; }
    double deficit_cap() const { return spec_.residual_deficit_cap; }
    double effective_deadline(std::size_t i) const { return effective_deadline_[i]; }
    double burst_work(std::size_t i) const
    {
        return spec_.flows[i].burst + spec_.residual_deficit_cap;
    }
    double rate(std::size_t i) const { return spec_.flows[i].rate; }

private:
    SystemSpec spec_;
    std::vector<double> effective_deadline_; // J_i, seconds
};

// a(q_i, k) = q_i (r_i - c)/(r_i c) + k/c, the linear term deciding which
// branch bound governs.
inline double linear_term(const GeometryContext& ctx, std::size_t i, double q_i, double k)
{
    const double c = ctx.capacity();
    const double r = ctx.rate(i);
    return q_i * (r - c) / (r * c) + k / c;
}

// Branch bound with the linear term inactive:
// h1(q) = q (cJ - b - L) / ((b + L) + q).
inline double h1(const GeometryContext& ctx, std::size_t i, double q_i)
{
    const double bL = ctx.burst_work(i);
    const double span = ctx.capacity() * ctx.effective_deadline(i) - bL;
    return q_i * span / (bL + q_i);
}

// Branch bound with the linear term active:
// h2(q) = (q^2 (c - r) + q r (cJ - b - L)) / (r (b + L) + 2 r q).
inline double h2(const GeometryContext& ctx, std::size_t i, double q_i)
{
    const double c = ctx.capacity();
    const double r = ctx.rate(i);
    const double bL = ctx.burst_work(i);
    const double span = c * ctx.effective_deadline(i) - bL;
    return (q_i * q_i * (c - r) + q_i * r * span) / (r * bL + 2.0 * r * q_i);
}

// H_i(q): the tight upper bound on sum_{j != i} q_j. When J_i r_i <= b_i + L
// the active-linear-term branch cannot bind, so h1 alone applies.
inline double H(const GeometryContext& ctx, std::size_t i, double q_i)
{
    if (ctx.effective_deadline(i) * ctx.rate(i) <= ctx.burst_work(i))
        return h1(ctx, i, q_i);
    return std::min(h1(ctx, i, q_i), h2(ctx, i, q_i));
}

// dH_i/dq at 0+: cJ_i/(b_i + L) - 1, strictly positive by construction.
inline double H_slope_at_zero(const GeometryContext& ctx, std::size_t i)
{
    return ctx.capacity() * ctx.effective_deadline(i) / ctx.burst_work(i) - 1.0;
}

// g_i(q) = H_i(q) + q; strictly increasing and concave with g_i(0+) = 0.
inline double g(const GeometryContext& ctx, std::size_t i, double q_i)
{
    return H(ctx, i, q_i) + q_i;
}

namespace detail {

// Inverts a strictly increasing continuous function with value 0 at 0:
// doubles an upper bracket, then bisects to 1e-12 relative width.
template <typename Fn>
double invert_increasing(Fn&& fn, double target)
{
    if (target <= 0)
        return 0.0;
    double hi = std::max(target, 1.0);
    int doublings = 0;
    while (fn(hi) < target) {
        hi *= 2.0;
        if (++doublings > 200)
            throw NoConvergence("bracketing failed to enclose target " +
                                std::to_string(target));
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fn(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi))
            break;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// Unique x >= 0 with g_i(x) = theta.
inline double g_inv(const GeometryContext& ctx, std::size_t i, double theta)
{
    return detail::invert_increasing([&](double x) { return g(ctx, i, x); }, theta);
}

// Gamma(theta) = sum_i g_i^{-1}(theta); increasing and convex.
inline double Gamma(const GeometryContext& ctx, double theta)
{
    double sum = 0;
    for (std::size_t i = 0; i < ctx.size(); ++i)
        sum += g_inv(ctx, i, theta);
    return sum;
}

// Unique x >= 0 with Gamma(x) = target.
inline double Gamma_inv(const GeometryContext& ctx, double target)
{
    return detail::invert_increasing([&](double x) { return Gamma(ctx, x); }, target);
}

// Slope of Gamma at 0+, equal to (1/c) sum_i (b_i + L)/J_i. A positive fixed
// point of Gamma exists iff this is < 1.
inline double Gamma_slope_at_zero(const GeometryContext& ctx)
{
    double sum = 0;
    for (std::size_t i = 0; i < ctx.size(); ++i)
        sum += 1.0 / (1.0 + H_slope_at_zero(ctx, i));
    return sum;
}

} // namespace drrq

#endif // DRRQ_GEOMETRY_HPP
