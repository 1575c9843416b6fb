#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dris/federation.hpp"
#include "dris/simnet.hpp"

namespace dris {

struct LatencyStats {
    double min_s = 0.0;
    double mean_s = 0.0;
    double max_s = 0.0;
};

// Machine-readable outcome of one simulated run. The canonical JSON form is
// the contract: identical inputs must produce byte-identical reports.
struct RunReport {
    std::string scenario_id;  // digest of the exact run inputs
    std::string trace_hash;   // digest of the event trace
    double coverage = 1.0;
    double max_staleness_s = 0.0;
    // Bytes sent per message type, drops included; every type appears.
    std::map<std::string, std::uint64_t> bytes_on_wire;
    // Absent when the scenario issued no queries.
    std::optional<double> topk_exact_rate;
    std::optional<double> mean_overlap;
    // Absent when no query ran to completion.
    std::optional<LatencyStats> per_query_latency;
};

std::string report_json(const RunReport& r);
std::string report_table(const RunReport& r);

RunReport build_report(const Simulation& sim, std::string scenario_id);

// Operator-level inputs for one run; the raw texts are hashed into
// scenario_id so a report names exactly what produced it.
struct RunInputs {
    std::string topology_text;
    std::string scenario_text;
    SimConfig config;
    std::uint32_t width = 0;  // 0 = every collection
    MergeMode mode = MergeMode::GlobalStats;
};

std::string scenario_id(const RunInputs& in);

struct RunOutput {
    RunReport report;
    Simulation sim;
};

RunOutput execute_run(const RunInputs& in);

// End-of-run node state re-rooted in the synchronous wrapper, so it can be
// snapshotted and queried offline.
Federation freeze(const Simulation& sim);

}  // namespace dris
