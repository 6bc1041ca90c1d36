#ifndef DRRQ_DELAY_BOUNDS_HPP
#define DRRQ_DELAY_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "drrq/model.hpp"

// Worst-case DRR delay bounds under leaky-bucket arrivals.
//
// exact_delay_bound computes the network-calculus bound
//     D_i = max( Psi_i(b_i)/c, Psi_i(alpha_i(tau_i))/c - tau_i )
// with the floor-based interference terms phi/psi. modified_delay_bound
// computes the floor-free relaxation D^_i >= D_i whose sublevel sets are
// convex; deviation is D^_i - d_i, the constraint function of the quanta
// optimization.

namespace drrq {

struct SameFlow : Error {
    explicit SameFlow(std::size_t i)
        : Error("interference term needs two distinct flows, got i = j = " +
                std::to_string(i)) {}
};

// Feasibility comparisons use a relative slack so that boundary points (the
// optimum sits exactly on the boundary) count as feasible.
inline constexpr double kFeasibilitySlack = 1e-9;

// x - floor(x/m)*m, the remainder extended to real-valued divisors.
inline double real_mod(double x, double m)
{
    return x - std::floor(x / m) * m;
}

// Time for flow i's arrivals to fill the quantum gap left by the burst:
// tau_i = (q_i - (b_i + L) mod q_i) / r_i, in (0, q_i/r_i].
inline double tau(const SystemSpec& spec, const QuantaVector& q, std::size_t i)
{
    const double bL = spec.flows[i].burst + spec.residual_deficit_cap;
    return (q[i] - real_mod(bL, q[i])) / spec.flows[i].rate;
}

// Interference of flow j on flow i while flow i clears x bits:
// phi_{i,j}(x) = floor((x + L)/q_i) q_j + q_j + L.
inline double phi(const SystemSpec& spec, const QuantaVector& q,
                  std::size_t i, std::size_t j, double x)
{
    if (i == j)
        throw SameFlow(i);
    const double L = spec.residual_deficit_cap;
    return std::floor((x + L) / q[i]) * q[j] + q[j] + L;
}

// Total service demand ahead of flow i's last bit of x:
// Psi_i(x) = x + sum_{j != i} phi_{i,j}(x).
inline double psi(const SystemSpec& spec, const QuantaVector& q,
                  std::size_t i, double x)
{
    double acc = x;
    for (std::size_t j = 0; j < spec.size(); ++j)
        if (j != i)
            acc += phi(spec, q, i, j, x);
    return acc;
}

// Arrivals of flow i by time tau_i: alpha_i(tau_i) = b_i + r_i tau_i, which
// telescopes to b_i + q_i - (b_i + L) mod q_i.
inline double alpha_at_tau(const SystemSpec& spec, const QuantaVector& q, std::size_t i)
{
    const FlowSpec& f = spec.flows[i];
    const double bL = f.burst + spec.residual_deficit_cap;
    return f.burst + q[i] - real_mod(bL, q[i]);
}

inline double exact_delay_bound(const SystemSpec& spec, const QuantaVector& q,
                                std::size_t i)
{
    const double c = spec.capacity;
    const double at_burst = psi(spec, q, i, spec.flows[i].burst) / c;
    const double t = tau(spec, q, i);
    const double at_tau = psi(spec, q, i, alpha_at_tau(spec, q, i)) / c - t;
    return std::max(at_burst, at_tau);
}

// Argument of the (.)^+ term of the modified bound; positive iff flow i's
// own arrivals outpace the service it receives per round.
inline double modified_bound_linear_term(const SystemSpec& spec, const QuantaVector& q,
                                         std::size_t i)
{
    const double c = spec.capacity;
    const double r = spec.flows[i].rate;
    double others = 0;
    for (std::size_t j = 0; j < spec.size(); ++j)
        if (j != i)
            others += q[j];
    return q[i] * (r - c) / (r * c) + others / c;
}

inline double modified_delay_bound(const SystemSpec& spec, const QuantaVector& q,
                                   std::size_t i)
{
    const double c = spec.capacity;
    const double L = spec.residual_deficit_cap;
    const double bL = spec.flows[i].burst + L;
    const double n = static_cast<double>(spec.size());
    double others = 0;
    for (std::size_t j = 0; j < spec.size(); ++j)
        if (j != i)
            others += q[j];
    const double base = bL / c * (1.0 + others / q[i]) + others / c + (n - 2.0) * L / c;
    return base + std::max(modified_bound_linear_term(spec, q, i), 0.0);
}

// f^i(q) = D^_i(q) - d_i; the quanta are feasible for flow i iff f^i <= 0.
inline double deviation(const SystemSpec& spec, const QuantaVector& q, std::size_t i)
{
    return modified_delay_bound(spec, q, i) - spec.flows[i].deadline;
}

inline bool is_feasible_modified(const SystemSpec& spec, const QuantaVector& q)
{
    if (q.size() != spec.size())
        return false;
    for (double v : q)
        if (!(v > 0))
            return false;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double d = spec.flows[i].deadline;
        if (deviation(spec, q, i) > kFeasibilitySlack * std::max(1.0, d))
            return false;
    }
    return true;
}

inline bool is_feasible_exact(const SystemSpec& spec, const QuantaVector& q)
{
    if (q.size() != spec.size())
        return false;
    for (double v : q)
        if (!(v > 0))
            return false;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double d = spec.flows[i].deadline;
        if (exact_delay_bound(spec, q, i) > d + kFeasibilitySlack * std::max(1.0, d))
            return false;
    }
    return true;
}

struct BoundReport {
    std::size_t flow_index = 0;
    double exact_bound = 0;     // D_i, seconds
    double modified_bound = 0;  // D^_i, seconds
    double deviation = 0;       // D^_i - d_i
    bool branch_active = false; // (.)^+ argument strictly positive
};

inline BoundReport make_bound_report(const SystemSpec& spec, const QuantaVector& q,
                                     std::size_t i)
{
    BoundReport rep;
    rep.flow_index = i;
    rep.exact_bound = exact_delay_bound(spec, q, i);
    rep.modified_bound = modified_delay_bound(spec, q, i);
    rep.deviation = rep.modified_bound - spec.flows[i].deadline;
    rep.branch_active = modified_bound_linear_term(spec, q, i) > 0;
    return rep;
}

} // namespace drrq

#endif // DRRQ_DELAY_BOUNDS_HPP
