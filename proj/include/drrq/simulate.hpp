#ifndef DRRQ_SIMULATE_HPP
#define DRRQ_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "drrq/delay_bounds.hpp"
#include "drrq/model.hpp"

// Deterministic packet-level DRR simulator with greedy leaky-bucket sources.
//
// The clock runs in "bit time" (seconds scaled by the capacity c), so packet
// transmissions advance time by integer bit counts and Table-style scenarios
// with integer parameters evaluate exactly in doubles.

namespace drrq {

struct QuantumUnderflow : Error {
    QuantumUnderflow(std::size_t flow, double value)
        : Error("quantum for flow " + std::to_string(flow) + " floors below 1: " +
                std::to_string(value)) {}
};

using IntQuanta = std::vector<std::int64_t>;

// Floor quantization with an upward snap for values a hair below an integer,
// so fixed-point iterates that converge to an integer limit from below land
// on the limit instead of one unit short.
inline IntQuanta quantize(const QuantaVector& q)
{
    IntQuanta out;
    out.reserve(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        double v = std::floor(q[i]);
        const double up = std::ceil(q[i]);
        if (up - q[i] <= 1e-9 * std::max(1.0, q[i]))
            v = up;
        if (v < 1.0)
            throw QuantumUnderflow(i, q[i]);
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

struct Packet {
    double arrival = 0; // seconds
    double length = 0;  // bits
};

// Per-flow packet lists; flow i's cumulative arrivals never exceed b_i + r_i t.
using ArrivalSchedule = std::vector<std::vector<Packet>>;

// Worst-case source saturating the envelope: floor(b/l) packets at t = 0,
// then one packet of l bits every l/r seconds. Packet k (1-based) arrives at
// max(0, (k l - b)/r); partial packets are never emitted.
inline std::vector<Packet> generate_greedy_arrivals(const FlowSpec& flow, double horizon)
{
    std::vector<Packet> out;
    const double l = flow.packet_len;
    for (std::size_t k = 1;; ++k) {
        const double t = std::max(0.0, (static_cast<double>(k) * l - flow.burst) / flow.rate);
        if (t > horizon)
            break;
        out.push_back({t, l});
    }
    return out;
}

inline ArrivalSchedule build_greedy_schedule(const SystemSpec& spec, double horizon)
{
    ArrivalSchedule sched;
    sched.reserve(spec.size());
    for (const FlowSpec& f : spec.flows)
        sched.push_back(generate_greedy_arrivals(f, horizon));
    return sched;
}

struct FlowSimStats {
    double worst_delay = 0;            // seconds, over every packet in the schedule
    std::int64_t packets_served = 0;   // completed within the horizon
    std::int64_t packets_unserved = 0; // completed after the horizon (still measured)
    double max_residual_deficit = 0;   // bits, over visits leaving the queue backlogged
    double max_bits_per_visit = 0;     // bits transmitted in one visit
};

struct SimReport {
    std::vector<FlowSimStats> flows;
    std::int64_t rounds = 0;
    std::int64_t flow_switches = 0; // transitions between distinct flows' service periods
    // The drain tail ran more than one deadline past the horizon: the system
    // was not keeping up with its arrivals when they stopped.
    bool horizon_too_short = false;
};

// Event-driven DRR: the server visits backlogged queues in flow-index order,
// adds q_i to the deficit on each visit, transmits head packets
// non-preemptively at rate c while the deficit covers them, and resets the
// deficit when the queue empties. Packets arriving during a visit are
// eligible within it. Skipped empty queues keep their (zero) deficit, and an
// idle server keeps its round-robin position until the next arrival.
//
// The horizon bounds the arrival window; the server then drains every queue
// (the scheduler is work-conserving, so this terminates), and every packet's
// delay counts toward worst_delay.
inline SimReport simulate(const SystemSpec& spec, const IntQuanta& quanta,
                          double horizon, const ArrivalSchedule& schedule)
{
    const std::size_t n = spec.size();
    if (quanta.size() != n || schedule.size() != n)
        throw Error("simulate: quanta/schedule size does not match flow count");
    for (std::size_t i = 0; i < n; ++i)
        if (quanta[i] < 1)
            throw QuantumUnderflow(i, static_cast<double>(quanta[i]));

    const double c = spec.capacity;
    const double horizon_bits = horizon * c;

    struct Queued {
        double arrival_bits;
        double length;
    };
    std::vector<std::deque<Queued>> queue(n);
    std::vector<std::size_t> next_arrival(n, 0);
    std::vector<double> deficit(n, 0.0);

    SimReport rep;
    rep.flows.resize(n);

    auto ingest = [&](std::size_t i, double now_bits) {
        const auto& packets = schedule[i];
        while (next_arrival[i] < packets.size()) {
            const double abits = packets[next_arrival[i]].arrival * c;
            if (abits > now_bits)
                break;
            queue[i].push_back({abits, packets[next_arrival[i]].length});
            ++next_arrival[i];
        }
    };

    auto total_pending = [&] {
        std::size_t pending = 0;
        for (std::size_t i = 0; i < n; ++i)
            pending += queue[i].size() + (schedule[i].size() - next_arrival[i]);
        return pending;
    };

    double now = 0; // bit time
    std::size_t pos = 0;
    std::int64_t last_served = -1;

    while (total_pending() > 0) {
        for (std::size_t i = 0; i < n; ++i)
            ingest(i, now);

        bool any_backlog = false;
        for (std::size_t i = 0; i < n; ++i)
            any_backlog |= !queue[i].empty();
        if (!any_backlog) {
            // idle until the next arrival, keeping the round-robin position
            double next_bits = -1;
            for (std::size_t i = 0; i < n; ++i)
                if (next_arrival[i] < schedule[i].size()) {
                    const double abits = schedule[i][next_arrival[i]].arrival * c;
                    if (next_bits < 0 || abits < next_bits)
                        next_bits = abits;
                }
            now = std::max(now, next_bits);
            continue;
        }

        if (!queue[pos].empty()) {
            const std::size_t i = pos;
            deficit[i] += static_cast<double>(quanta[i]);
            double served_this_visit = 0;
            while (!queue[i].empty() && deficit[i] >= queue[i].front().length) {
                const Queued pkt = queue[i].front();
                queue[i].pop_front();
                if (last_served >= 0 && last_served != static_cast<std::int64_t>(i))
                    ++rep.flow_switches;
                last_served = static_cast<std::int64_t>(i);
                now += pkt.length;
                deficit[i] -= pkt.length;
                served_this_visit += pkt.length;
                FlowSimStats& st = rep.flows[i];
                if (now <= horizon_bits)
                    ++st.packets_served;
                else
                    ++st.packets_unserved;
                st.worst_delay = std::max(st.worst_delay, (now - pkt.arrival_bits) / c);
                ingest(i, now);
            }
            FlowSimStats& st = rep.flows[i];
            st.max_bits_per_visit = std::max(st.max_bits_per_visit, served_this_visit);
            if (queue[i].empty())
                deficit[i] = 0.0;
            else
                st.max_residual_deficit = std::max(st.max_residual_deficit, deficit[i]);
        }

        ++pos;
        if (pos == n) {
            pos = 0;
            ++rep.rounds;
        }
    }

    double max_deadline = 0;
    for (const FlowSpec& f : spec.flows)
        max_deadline = std::max(max_deadline, f.deadline);
    rep.horizon_too_short = now > horizon_bits + max_deadline * c;
    return rep;
}

inline SimReport simulate(const SystemSpec& spec, const IntQuanta& quanta, double horizon)
{
    return simulate(spec, quanta, horizon, build_greedy_schedule(spec, horizon));
}

struct FlowValidation {
    std::int64_t quantum = 0;
    double deadline = 0;
    double worst_delay = 0;
    double exact_bound = 0;    // D_i at the floored quanta
    double modified_bound = 0; // D^_i at the floored quanta
    bool met_deadline = false;
    bool within_modified_bound = false;
};

struct QuantaValidation {
    IntQuanta quanta;
    SimReport report;
    std::vector<FlowValidation> flows;
    bool all_met = false;
};

// End-to-end check of real-valued quanta: floor, drive the system with
// greedy arrivals, and compare observed worst delays against the deadlines
// and the analytic bounds at the floored quanta. Violations are reported,
// not thrown.
inline QuantaValidation validate_quanta(const SystemSpec& spec, const QuantaVector& q_real,
                                        double horizon = 0)
{
    const SystemSpec checked = validate(spec);
    if (horizon <= 0) {
        for (const FlowSpec& f : checked.flows)
            horizon = std::max(horizon, 20.0 * f.deadline);
    }
    QuantaValidation out;
    out.quanta = quantize(q_real);
    out.report = simulate(checked, out.quanta, horizon);

    QuantaVector floored;
    floored.reserve(out.quanta.size());
    for (std::int64_t v : out.quanta)
        floored.push_back(static_cast<double>(v));

    out.all_met = true;
    for (std::size_t i = 0; i < checked.size(); ++i) {
        FlowValidation fv;
        fv.quantum = out.quanta[i];
        fv.deadline = checked.flows[i].deadline;
        fv.worst_delay = out.report.flows[i].worst_delay;
        fv.exact_bound = exact_delay_bound(checked, floored, i);
        fv.modified_bound = modified_delay_bound(checked, floored, i);
        fv.met_deadline = fv.worst_delay <= fv.deadline + kFeasibilitySlack;
        fv.within_modified_bound = fv.worst_delay <= fv.modified_bound + kFeasibilitySlack;
        out.all_met = out.all_met && fv.met_deadline;
        out.flows.push_back(fv);
    }
    return out;
}

} // namespace drrq

#endif // DRRQ_SIMULATE_HPP
