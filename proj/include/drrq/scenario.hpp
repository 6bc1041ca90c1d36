#ifndef DRRQ_SCENARIO_HPP
#define DRRQ_SCENARIO_HPP

#include <string>

#include <json.hpp>

#include "drrq/model.hpp"

// Scenario files are JSON:
//
//   {
//     "name": "table-row-1",                 // optional
//     "units": {"data": "Kb", "time": "s"},  // optional, default bits/s
//     "capacity": 40,
//     "residual_deficit_cap": 3,
//     "flows": [
//       {"burst": 10, "rate": 1, "deadline": 1, "packet_len": 3},
//       ...
//     ]
//   }
//
// Units are normalized exactly once at load; the in-memory SystemSpec is
// always bits / seconds / bits-per-second. Unknown fields are rejected.

namespace drrq {

struct ParseError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct Scenario {
    std::string name;
    SystemSpec spec;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            known |= it.key() == k;
        if (!known)
            throw SchemaError("unknown field '" + it.key() + "' in " + where);
    }
}

inline double number_field(const nlohmann::json& obj, const char* key,
                           const std::string& where)
{
    if (!obj.contains(key))
        throw SchemaError("missing field '" + std::string(key) + "' in " + where);
    if (!obj[key].is_number())
        throw SchemaError("field '" + std::string(key) + "' in " + where +
                          " must be a number");
    return obj[key].get<double>();
}

} // namespace detail

inline Scenario load_scenario(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario parse error: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("scenario root must be an object");
    detail::reject_unknown(doc, {"name", "units", "capacity", "residual_deficit_cap", "flows"},
                           "scenario");

    double data_scale = 1.0; // -> bits
    double time_scale = 1.0; // -> seconds
    if (doc.contains("units")) {
        const auto& units = doc["units"];
        if (!units.is_object())
            throw SchemaError("'units' must be an object");
        detail::reject_unknown(units, {"data", "time"}, "units");
        if (units.contains("data")) {
            const std::string d = units["data"].get<std::string>();
            if (d == "bits")
                data_scale = 1.0;
            else if (d == "Kb")
                data_scale = 1000.0;
            else
                throw SchemaError("units.data must be 'bits' or 'Kb', got '" + d + "'");
        }
        if (units.contains("time")) {
            const std::string t = units["time"].get<std::string>();
            if (t == "s")
                time_scale = 1.0;
            else if (t == "ms")
                time_scale = 1e-3;
            else
                throw SchemaError("units.time must be 's' or 'ms', got '" + t + "'");
        }
    }
    const double rate_scale = data_scale / time_scale;

    Scenario sc;
    if (doc.contains("name"))
        sc.name = doc["name"].get<std::string>();
    sc.spec.capacity = detail::number_field(doc, "capacity", "scenario") * rate_scale;
    sc.spec.residual_deficit_cap =
        detail::number_field(doc, "residual_deficit_cap", "scenario") * data_scale;

    if (!doc.contains("flows") || !doc["flows"].is_array())
        throw SchemaError("scenario needs a 'flows' array");
    for (std::size_t i = 0; i < doc["flows"].size(); ++i) {
        const auto& jf = doc["flows"][i];
        const std::string where = "flows[" + std::to_string(i) + "]";
        if (!jf.is_object())
            throw SchemaError(where + " must be an object");
        detail::reject_unknown(jf, {"burst", "rate", "deadline", "packet_len"}, where);
        FlowSpec f;
        f.burst = detail::number_field(jf, "burst", where) * data_scale;
        f.rate = detail::number_field(jf, "rate", where) * rate_scale;
        f.deadline = detail::number_field(jf, "deadline", where) * time_scale;
        f.packet_len = detail::number_field(jf, "packet_len", where) * data_scale;
        sc.spec.flows.push_back(f);
    }

    sc.spec = validate(sc.spec);
    return sc;
}

// Emits the normalized (bits / seconds) form; load_scenario round-trips it
// bit-exactly.
inline std::string serialize_scenario(const SystemSpec& spec, const std::string& name = "")
{
    nlohmann::json doc;
    if (!name.empty())
        doc["name"] = name;
    doc["capacity"] = spec.capacity;
    doc["residual_deficit_cap"] = spec.residual_deficit_cap;
    doc["flows"] = nlohmann::json::array();
    for (const FlowSpec& f : spec.flows)
        doc["flows"].push_back({{"burst", f.burst},
                                {"rate", f.rate},
                                {"deadline", f.deadline},
                                {"packet_len", f.packet_len}});
    return doc.dump(2);
}

} // namespace drrq

#endif // DRRQ_SCENARIO_HPP
