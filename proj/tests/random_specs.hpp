#ifndef DRRQ_TESTS_RANDOM_SPECS_HPP
#define DRRQ_TESTS_RANDOM_SPECS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "drrq/geometry.hpp"
#include "drrq/model.hpp"

// Shared generators for the property tests: random systems that pass
// validation, have usable effective deadlines, and (optionally) admit a
// positive optimum.

namespace drrq::testing {

inline SystemSpec make_spec(double c, double L, std::vector<double> b, std::vector<double> r,
                            std::vector<double> d, double packet_len = 0)
{
    SystemSpec spec;
    spec.capacity = c;
    spec.residual_deficit_cap = L;
    for (std::size_t i = 0; i < b.size(); ++i)
        spec.flows.push_back({b[i], r[i], d[i], packet_len > 0 ? packet_len : L});
    return spec;
}

// The two-flow system with a visibly non-convex exact feasible set, used
// throughout the tests.
inline SystemSpec counterexample_spec()
{
    return make_spec(40, 3, {10, 10}, {1, 1}, {1, 1});
}

inline SystemSpec two_flow_example_spec()
{
    return make_spec(50, 1, {10, 15}, {1, 2}, {1, 0.5});
}

inline SystemSpec three_flow_example_spec()
{
    return make_spec(100, 1, {10, 15, 10}, {1, 2, 1}, {1, 1, 0.5});
}

// A random system that validates and admits a positive optimum: capacity is
// inflated until the minimum-bandwidth condition and the round-size map
// slope condition both hold with margin.
template <typename Rng>
SystemSpec random_feasible_spec(Rng& rng, std::size_t n)
{
    std::uniform_real_distribution<double> uL(1.0, 5.0);
    std::uniform_real_distribution<double> ub(0.0, 20.0);
    std::uniform_real_distribution<double> ur(0.5, 5.0);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    std::uniform_real_distribution<double> umargin(1.1, 3.0);

    const double L = uL(rng);
    SystemSpec spec;
    spec.residual_deficit_cap = L;
    for (std::size_t i = 0; i < n; ++i) {
        FlowSpec f;
        f.burst = L + ub(rng); // keeps burst >= packet_len for the simulator
        f.rate = ur(rng);
        f.deadline = ud(rng);
        f.packet_len = L;
        spec.flows.push_back(f);
    }

    double needed = 0;
    for (const FlowSpec& f : spec.flows) {
        needed = std::max(needed,
                          (f.burst + static_cast<double>(n) * L) / f.deadline);
        }
    needed = std::max(needed, required_capacity(spec));
    spec.capacity = needed * umargin(rng);

    for (int attempt = 0; attempt < 64; ++attempt) {
        try {
            GeometryContext ctx(validate(spec));
            if (Gamma_slope_at_zero(ctx) < 0.97)
                return spec;
        } catch (const Error&) {
        }
        spec.capacity *= 1.3;
    }
    return spec;
}

// Random positive quanta, roughly on the scale of the burst sizes.
template <typename Rng>
QuantaVector random_quanta(Rng& rng, const SystemSpec& spec)
{
    std::uniform_real_distribution<double> u(0.05, 3.0);
    QuantaVector q;
    for (const FlowSpec& f : spec.flows)
        q.push_back(u(rng) * (f.burst + spec.residual_deficit_cap));
    return q;
}

// Along a ray q = s*u the deviation f^i(s*u) is affine and increasing in s,
// so each ray is feasible on an interval (0, s_max]. Sampling a random
// direction and a random scale below s_max yields feasible points without
// running the optimizer. Returns an empty vector when the sampled direction
// never enters the feasible set.
template <typename Rng>
QuantaVector random_feasible_quanta(Rng& rng, const SystemSpec& spec)
{
    const double c = spec.capacity;
    const double L = spec.residual_deficit_cap;
    const double n = static_cast<double>(spec.size());
    std::uniform_real_distribution<double> dir(0.1, 1.0);
    std::uniform_real_distribution<double> scale(0.05, 1.0);

    for (int attempt = 0; attempt < 50; ++attempt) {
        QuantaVector u;
        for (std::size_t i = 0; i < spec.size(); ++i)
            u.push_back(dir(rng));

        double s_max = -1;
        bool ok = true;
        for (std::size_t i = 0; i < spec.size() && ok; ++i) {
            const FlowSpec& f = spec.flows[i];
            double k = 0;
            for (std::size_t j = 0; j < spec.size(); ++j)
                if (j != i)
                    k += u[j];
            const double bL = f.burst + L;
            const double c0 = bL / c * (1.0 + k / u[i]) + (n - 2.0) * L / c - f.deadline;
            const double lin = u[i] * (f.rate - c) / (f.rate * c) + k / c;
            const double c1 = k / c + std::max(lin, 0.0);
            if (c0 >= 0) {
                ok = false;
                break;
            }
            const double cap = -c0 / c1;
            if (s_max < 0 || cap < s_max)
                s_max = cap;
        }
        if (ok && s_max > 0) {
            QuantaVector q = u;
            const double s = scale(rng) * s_max;
            for (double& v : q)
                v *= s;
            return q;
        }
    }
    return {};
}

// Integer-valued system and quanta where q_i divides b_i + L exactly, so the
// floor arguments inside the exact bound are whole numbers and the premise
// "(b_i + L) mod q_i = 0" holds without floating-point slop.
struct DivisibleCase {
    SystemSpec spec;
    QuantaVector quanta;
    std::size_t flow = 0;
};

template <typename Rng>
DivisibleCase random_divisible_case(Rng& rng, std::size_t n)
{
    std::uniform_int_distribution<int> uL(1, 5);
    std::uniform_int_distribution<int> uq(1, 40);
    std::uniform_int_distribution<int> um(1, 12);
    std::uniform_int_distribution<int> ub(0, 20);
    std::uniform_int_distribution<int> ur(1, 5);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    std::uniform_int_distribution<std::size_t> uflow(0, n - 1);

    const int L = uL(rng);
    DivisibleCase cs;
    cs.flow = uflow(rng);
    cs.spec.residual_deficit_cap = L;
    for (std::size_t i = 0; i < n; ++i) {
        const int qi = uq(rng);
        FlowSpec f;
        if (i == cs.flow) {
            int m = um(rng);
            while (m * qi < 2 * L) // keep burst >= packet_len
                ++m;
            f.burst = m * qi - L;
        } else {
            f.burst = L + ub(rng);
        }
        f.rate = ur(rng);
        f.deadline = ud(rng);
        f.packet_len = L;
        cs.spec.flows.push_back(f);
        cs.quanta.push_back(qi);
    }
    double needed = 0;
    for (const FlowSpec& f : cs.spec.flows)
        needed = std::max(needed, (f.burst + L) / f.deadline);
    cs.spec.capacity = std::ceil(2.0 * needed);
    return cs;
}

} // namespace drrq::testing

#endif // DRRQ_TESTS_RANDOM_SPECS_HPP
