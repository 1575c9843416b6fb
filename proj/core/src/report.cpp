#include "dris/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "dris/canonical_json.hpp"
#include "dris/corpus.hpp"
#include "dris/errors.hpp"

namespace dris {

namespace {

constexpr wire::MsgType kAllTypes[] = {
    wire::MsgType::SearchRequest,   wire::MsgType::SearchResponse,
    wire::MsgType::HarvestRequest,  wire::MsgType::HarvestResponse,
    wire::MsgType::RegisterDescription, wire::MsgType::Ack,
    wire::MsgType::Error,
};

}  // namespace

std::string report_json(const RunReport& r) {
    JsonWriter w;
    w.begin_object();
    w.key("bytes_on_wire").begin_object();
    for (const auto& [type, bytes] : r.bytes_on_wire) w.key(type).value(bytes);
    w.end_object();
    w.key("coverage").value(r.coverage);
    w.key("max_staleness_s").value(r.max_staleness_s);
    if (r.mean_overlap) w.key("mean_overlap").value(*r.mean_overlap);
    if (r.per_query_latency) {
        w.key("per_query_latency").begin_object();
        w.key("max_s").value(r.per_query_latency->max_s);
        w.key("mean_s").value(r.per_query_latency->mean_s);
        w.key("min_s").value(r.per_query_latency->min_s);
        w.end_object();
    }
    w.key("scenario_id").value(r.scenario_id);
    if (r.topk_exact_rate) w.key("topk_exact_rate").value(*r.topk_exact_rate);
    w.key("trace_hash").value(r.trace_hash);
    w.end_object();
    std::string out = w.take();
    out.push_back('\n');
    return out;
}

std::string report_table(const RunReport& r) {
    std::ostringstream out;
    out << std::left;
    out << std::setw(22) << "scenario_id" << r.scenario_id << '\n';
    out << std::setw(22) << "trace_hash" << r.trace_hash << '\n';
    out << std::setw(22) << "coverage" << format_double(r.coverage) << '\n';
    out << std::setw(22) << "max_staleness_s" << format_double(r.max_staleness_s) << '\n';
    std::uint64_t total = 0;
    for (const auto& [type, bytes] : r.bytes_on_wire) total += bytes;
    out << std::setw(22) << "bytes_on_wire" << total << '\n';
    for (const auto& [type, bytes] : r.bytes_on_wire)
        out << "  " << std::setw(22) << type << bytes << '\n';
    if (r.topk_exact_rate)
        out << std::setw(22) << "topk_exact_rate" << format_double(*r.topk_exact_rate) << '\n';
    if (r.mean_overlap)
        out << std::setw(22) << "mean_overlap" << format_double(*r.mean_overlap) << '\n';
    if (r.per_query_latency) {
        const LatencyStats& lat = *r.per_query_latency;
        out << std::setw(22) << "query_latency_s"
            << format_double(lat.min_s) << " / " << format_double(lat.mean_s) << " / "
            << format_double(lat.max_s) << " (min/mean/max)\n";
    }
    return out.str();
}

RunReport build_report(const Simulation& sim, std::string scenario_id) {
    const SimMetrics& m = sim.metrics();
    RunReport r;
    r.scenario_id = std::move(scenario_id);
    r.trace_hash = hex16(sim.trace().hash());
    r.coverage = sim.coverage();

    const SimTime end = sim.config().end_time_s * kMicrosPerSecond;
    SimTime worst = 0;
    for (const auto& [doc_id, times] : m.docs) {
        SimTime seen = times.covered.value_or(end);
        if (seen < times.upserted) continue;  // covered before a late re-upsert
        worst = std::max(worst, seen - times.upserted);
    }
    r.max_staleness_s = double(worst) / double(kMicrosPerSecond);

    for (wire::MsgType type : kAllTypes) r.bytes_on_wire[std::string(wire::msg_type_name(type))] = 0;
    for (const auto& [type, bytes] : m.bytes_by_type) r.bytes_on_wire[type] = bytes;

    if (!m.queries.empty()) {
        double exact = 0.0;
        double overlap = 0.0;
        LatencyStats lat{};
        std::size_t completed = 0;
        double latency_sum = 0.0;
        for (const QueryRecord& q : m.queries) {
            exact += q.vs_oracle.exact_match ? 1.0 : 0.0;
            overlap += q.vs_oracle.overlap;
            if (!q.completed) continue;
            double s = double(q.finished - q.issued) / double(kMicrosPerSecond);
            if (completed == 0) {
                lat.min_s = lat.max_s = s;
            } else {
                lat.min_s = std::min(lat.min_s, s);
                lat.max_s = std::max(lat.max_s, s);
            }
            latency_sum += s;
            ++completed;
        }
        r.topk_exact_rate = exact / double(m.queries.size());
        r.mean_overlap = overlap / double(m.queries.size());
        if (completed > 0) {
            lat.mean_s = latency_sum / double(completed);
            r.per_query_latency = lat;
        }
    }
    return r;
}

std::string scenario_id(const RunInputs& in) {
    JsonWriter w;
    w.begin_object();
    w.key("config").begin_object();
    w.key("drop_probability").value(in.config.drop_probability);
    w.key("end_time_s").value(in.config.end_time_s);
    w.key("harvest_period_s").value(in.config.harvest_period_s);
    w.key("latency_max_ms").value(std::uint64_t{in.config.latency_max_ms});
    w.key("latency_min_ms").value(std::uint64_t{in.config.latency_min_ms});
    w.key("push_period_s").value(in.config.push_period_s);
    w.key("query_timeout_s").value(in.config.query_timeout_s);
    w.key("rpc_timeout_s").value(in.config.rpc_timeout_s);
    w.key("seed").value(in.config.seed);
    w.end_object();
    w.key("mode").value(in.mode == MergeMode::Raw ? "raw" : "global");
    w.key("scenario").value(in.scenario_text);
    w.key("topology").value(in.topology_text);
    w.key("width").value(std::uint64_t{in.width});
    w.end_object();
    return hex16(fnv1a64(w.str()));
}

RunOutput execute_run(const RunInputs& in) {
    validate_config(in.config);
    std::vector<DomainName> nodes = parse_topology(in.topology_text);
    std::vector<Stimulus> scenario = parse_scenario(in.scenario_text);

    Simulation sim(in.config);
    for (const DomainName& d : nodes) sim.register_node(d);
    sim.set_query_defaults(in.width, in.mode);
    sim.run(scenario);

    RunReport report = build_report(sim, scenario_id(in));
    return RunOutput{std::move(report), std::move(sim)};
}

Federation freeze(const Simulation& sim) {
    // Roots, then hubs, then orgs, so every parent registers first. Sorting
    // by name would not do: dotted-text order puts a.com.cn before com.cn.
    std::vector<DomainName> names;
    for (const auto& [d, node] : sim.roots()) names.push_back(d);
    for (const auto& [d, node] : sim.hubs()) names.push_back(d);
    for (const auto& [d, node] : sim.orgs()) names.push_back(d);

    Federation f;
    for (const DomainName& d : names) f.register_node(d);
    for (const auto& [d, node] : sim.orgs()) f.org(d) = node;
    for (const auto& [d, node] : sim.hubs()) f.hub(d) = node;
    for (const auto& [d, node] : sim.roots()) f.root(d) = node;
    return f;
}

}  // namespace dris
