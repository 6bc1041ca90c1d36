#ifndef DRRQ_MODEL_HPP
#define DRRQ_MODEL_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types for the DRR quanta toolkit.
//
// Units are fixed toolkit-wide: bits, seconds, bits/second. Scenario files
// may use other units (Kb, ms); conversion happens once at load time, see
// scenario.hpp.

namespace drrq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveParameter : Error {
    NonPositiveParameter(const std::string& field, std::size_t flow, double value)
        : Error("non-positive parameter '" + field + "' for flow " +
                std::to_string(flow) + ": " + std::to_string(value)),
          field(field), flow(flow), value(value) {}
    std::string field;
    std::size_t flow;
    double value;
};

struct TooFewFlows : Error {
    explicit TooFewFlows(std::size_t n)
        : Error("system needs at least 2 flows, got " + std::to_string(n)), count(n) {}
    std::size_t count;
};

struct DeadlineUnachievable : Error {
    DeadlineUnachievable(std::size_t flow, double work_budget, double burst_work)
        : Error("flow " + std::to_string(flow) + ": capacity*deadline = " +
                std::to_string(work_budget) + " does not exceed burst + L = " +
                std::to_string(burst_work)),
          flow(flow), work_budget(work_budget), burst_work(burst_work) {}
    std::size_t flow;
    double work_budget;   // c * d_i (or c * J_i for the effective-deadline check)
    double burst_work;    // b_i + L
};

struct ResidualDeficitTooSmall : Error {
    ResidualDeficitTooSmall(double cap, double max_packet)
        : Error("residual deficit cap " + std::to_string(cap) +
                " is below the largest packet length " + std::to_string(max_packet)),
          cap(cap), max_packet(max_packet) {}
    double cap;
    double max_packet;
};

// One flow's leaky-bucket envelope (burst b_i, sustained rate r_i), its delay
// target d_i, and the packet length used by the simulator.
struct FlowSpec {
    double burst = 0;       // bits, b_i >= 0
    double rate = 0;        // bits/s, r_i > 0
    double deadline = 0;    // seconds, d_i > 0
    double packet_len = 0;  // bits, l_i > 0

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

// Constant-rate server of capacity c serving n >= 2 flows under DRR with
// residual-deficit cap L.
struct SystemSpec {
    double capacity = 0;             // bits/s, c > 0
    double residual_deficit_cap = 0; // bits, L > 0
    std::vector<FlowSpec> flows;

    std::size_t size() const { return flows.size(); }

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

// Real-valued positive quanta, one entry per flow, in bits.
using QuantaVector = std::vector<double>;

// Checks all type invariants plus the per-flow achievability condition
// c*d_i > b_i + L (strict: equality leaves the feasible set with empty
// interior). Returns the spec bit-identical on success.
inline SystemSpec validate(const SystemSpec& spec)
{
    if (spec.size() < 2)
        throw TooFewFlows(spec.size());
    if (!(spec.capacity > 0))
        throw NonPositiveParameter("capacity", 0, spec.capacity);
    if (!(spec.residual_deficit_cap > 0))
        throw NonPositiveParameter("residual_deficit_cap", 0, spec.residual_deficit_cap);

    double max_packet = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const FlowSpec& f = spec.flows[i];
        if (!(f.burst >= 0))
            throw NonPositiveParameter("burst", i, f.burst);
        if (!(f.rate > 0))
            throw NonPositiveParameter("rate", i, f.rate);
        if (!(f.deadline > 0))
            throw NonPositiveParameter("deadline", i, f.deadline);
        if (!(f.packet_len > 0))
            throw NonPositiveParameter("packet_len", i, f.packet_len);
        if (f.packet_len > max_packet)
            max_packet = f.packet_len;
    }
    if (spec.residual_deficit_cap < max_packet)
        throw ResidualDeficitTooSmall(spec.residual_deficit_cap, max_packet);

    for (std::size_t i = 0; i < spec.size(); ++i) {
        const FlowSpec& f = spec.flows[i];
        const double budget = spec.capacity * f.deadline;
        const double burst_work = f.burst + spec.residual_deficit_cap;
        if (!(budget > burst_work))
            throw DeadlineUnachievable(i, budget, burst_work);
    }
    return spec;
}

inline void require_quanta(const SystemSpec& spec, const QuantaVector& q)
{
    if (q.size() != spec.size())
        throw Error("quanta vector has " + std::to_string(q.size()) +
                    " entries for " + std::to_string(spec.size()) + " flows");
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!(q[i] > 0))
            throw NonPositiveParameter("quantum", i, q[i]);
}

} // namespace drrq

#endif // DRRQ_MODEL_HPP
