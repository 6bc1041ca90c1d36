#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "drrq/delay_bounds.hpp"
#include "drrq/simulate.hpp"
#include "random_specs.hpp"

using namespace drrq;
using Catch::Approx;
using testing::make_spec;

namespace {

SystemSpec row1_bits()
{
    return make_spec(40000, 3000, {10000, 10000}, {1000, 1000}, {1, 1}, 3000);
}

} // namespace

TEST_CASE("quantize floors real quanta")
{
    const IntQuanta q = quantize({3.181, 8.749});
    CHECK(q == IntQuanta{3, 8});
}

TEST_CASE("quantize snaps values a hair below an integer")
{
    const IntQuanta q = quantize({13999.999999999924, 14000.0});
    CHECK(q == IntQuanta{14000, 14000});
    CHECK(quantize({2.9999999})[0] == 2); // gap 1e-7 is too wide to snap
}

TEST_CASE("quantize rejects quanta below one bit")
{
    CHECK_THROWS_AS(quantize({0.5, 2.0}), QuantumUnderflow);
    CHECK_THROWS_AS(quantize({2.0, -1.0}), QuantumUnderflow);
}

TEST_CASE("greedy arrivals saturate the leaky-bucket envelope")
{
    FlowSpec f{10000, 1000, 1.0, 5000};
    const std::vector<Packet> pk = generate_greedy_arrivals(f, 10.0);
    REQUIRE(pk.size() == 4);
    CHECK(pk[0].arrival == 0.0);
    CHECK(pk[1].arrival == 0.0);
    CHECK(pk[2].arrival == Approx(5.0));
    CHECK(pk[3].arrival == Approx(10.0));
    for (const Packet& p : pk)
        CHECK(p.length == 5000);
}

TEST_CASE("greedy arrivals with burst equal to one packet")
{
    FlowSpec f{3000, 1000, 1.0, 3000};
    const std::vector<Packet> pk = generate_greedy_arrivals(f, 9.0);
    REQUIRE(pk.size() == 4);
    CHECK(pk[0].arrival == 0.0);
    CHECK(pk[1].arrival == Approx(3.0));
    CHECK(pk[3].arrival == Approx(9.0));
}

TEST_CASE("property: greedy arrivals conform to the envelope b + r t")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const SystemSpec spec = testing::random_feasible_spec(rng, 2);
        const FlowSpec& f = spec.flows[0];
        const std::vector<Packet> pk = generate_greedy_arrivals(f, 15.0);
        double cum = 0;
        for (const Packet& p : pk) {
            cum += p.length;
            CHECK(cum <= f.burst + f.rate * p.arrival + 1e-6);
        }
        // saturation: one more packet at each arrival instant would overflow
        if (!pk.empty()) {
            const Packet& last = pk.back();
            CHECK(cum + f.packet_len > f.burst + f.rate * last.arrival - 1e-6);
        }
    }
}

TEST_CASE("the symmetric system meets its bounds under greedy arrivals")
{
    const SystemSpec spec = row1_bits();
    const SimReport rep = simulate(spec, {14000, 14000}, 20.0);
    REQUIRE(rep.flows.size() == 2);
    CHECK_FALSE(rep.horizon_too_short);

    const QuantaVector q = {14000, 14000};
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(rep.flows[i].packets_served > 0);
        CHECK(rep.flows[i].worst_delay > 0);
        CHECK(rep.flows[i].worst_delay <=
              exact_delay_bound(spec, q, i) + kFeasibilitySlack);
        CHECK(rep.flows[i].worst_delay <= 1.0 + kFeasibilitySlack);
    }
    // flow 0 is served first; flow 1 waits behind its burst
    CHECK(rep.flows[0].worst_delay == Approx(0.225));
    CHECK(rep.flows[1].worst_delay == Approx(0.45));
}

TEST_CASE("simulation is deterministic")
{
    const SystemSpec spec = row1_bits();
    const SimReport a = simulate(spec, {5000, 7000}, 25.0);
    const SimReport b = simulate(spec, {5000, 7000}, 25.0);
    REQUIRE(a.flows.size() == b.flows.size());
    CHECK(a.rounds == b.rounds);
    CHECK(a.flow_switches == b.flow_switches);
    for (std::size_t i = 0; i < a.flows.size(); ++i) {
        CHECK(a.flows[i].worst_delay == b.flows[i].worst_delay);
        CHECK(a.flows[i].packets_served == b.flows[i].packets_served);
        CHECK(a.flows[i].max_residual_deficit == b.flows[i].max_residual_deficit);
    }
}

TEST_CASE("a single backlogged flow is served at link speed")
{
    const SystemSpec spec = row1_bits();
    ArrivalSchedule sched(2);
    sched[0] = generate_greedy_arrivals(spec.flows[0], 20.0);
    const SimReport rep = simulate(spec, {14000, 14000}, 20.0, sched);
    CHECK(rep.flows[1].packets_served == 0);
    // the burst holds floor(10000/3000) = 3 packets; the last one finishes
    // after 9000 bits at 40000 bits/s
    CHECK(rep.flows[0].worst_delay == Approx(9000.0 / 40000.0));
    CHECK(rep.flow_switches == 0);
}

TEST_CASE("per-visit service and residual deficits respect the DRR invariants")
{
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const SystemSpec spec = testing::random_feasible_spec(rng, 2 + trial % 3);
        IntQuanta quanta;
        std::uniform_real_distribution<double> uq(1.0, 4.0);
        for (std::size_t i = 0; i < spec.size(); ++i)
            quanta.push_back(static_cast<std::int64_t>(
                std::ceil(uq(rng) * spec.flows[i].packet_len)));
        const SimReport rep = simulate(spec, quanta, 10.0);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            CHECK(rep.flows[i].max_residual_deficit <
                  spec.flows[i].packet_len + 1e-9);
            CHECK(rep.flows[i].max_bits_per_visit <=
                  static_cast<double>(quanta[i]) + spec.residual_deficit_cap + 1e-9);
        }
    }
}

TEST_CASE("validate_quanta reports success for workable quanta")
{
    const QuantaValidation v = validate_quanta(row1_bits(), {14000.0, 14000.0});
    CHECK(v.quanta == IntQuanta{14000, 14000});
    CHECK(v.all_met);
    for (const FlowValidation& fv : v.flows) {
        CHECK(fv.met_deadline);
        CHECK(fv.within_modified_bound);
        CHECK(fv.worst_delay <= fv.exact_bound + kFeasibilitySlack);
        CHECK(fv.exact_bound <= fv.modified_bound + 1e-12);
    }
}

TEST_CASE("validate_quanta reports violations for starved quanta")
{
    // tight deadlines: single-packet quanta stretch the burst drain past 0.4 s
    const SystemSpec tight =
        make_spec(40000, 3000, {10000, 10000}, {1000, 1000}, {0.4, 0.4}, 3000);
    const QuantaValidation v = validate_quanta(tight, {3000.0, 3000.0}, 30.0);
    bool any_violation = false;
    for (const FlowValidation& fv : v.flows)
        any_violation = any_violation || !fv.met_deadline;
    CHECK(any_violation);
    CHECK_FALSE(v.all_met);
}

TEST_CASE("mismatched vector sizes are rejected")
{
    const SystemSpec spec = row1_bits();
    CHECK_THROWS_AS(simulate(spec, {14000}, 5.0), Error);
    ArrivalSchedule sched(3);
    CHECK_THROWS_AS(simulate(spec, {14000, 14000}, 5.0, sched), Error);
}

TEST_CASE("horizon flag is raised for an overloaded link")
{
    // sum of rates 60000 > c = 40000: the backlog at the end of the arrival
    // window takes far longer than one deadline to drain
    const SystemSpec spec =
        make_spec(40000, 3000, {10000, 10000}, {30000, 30000}, {1, 1}, 3000);
    const SimReport rep = simulate(spec, {14000, 14000}, 5.0);
    CHECK(rep.horizon_too_short);

    // a system that keeps up never trips the flag
    CHECK_FALSE(simulate(row1_bits(), {14000, 14000}, 5.0).horizon_too_short);
}
