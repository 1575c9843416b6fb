#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "dris/oracle.hpp"
#include "dris/rng.hpp"
#include "dris/root_broker.hpp"
#include "dris/wire.hpp"

namespace dris {

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint32_t latency_min_ms = 5;
    std::uint32_t latency_max_ms = 50;
    std::uint64_t harvest_period_s = 86'400;
    std::uint64_t push_period_s = 86'400;
    double drop_probability = 0.0;
    std::uint64_t end_time_s = 0;
    // Abandon an unanswered harvest page or fanout leg after this long.
    std::uint64_t rpc_timeout_s = 30;
    std::uint64_t query_timeout_s = 30;
};

void validate_config(const SimConfig& config);

// External inputs to the simulation, in file order.
struct Stimulus {
    enum class Op { Upsert, Delete, Query };
    SimTime t = 0;
    Op op = Op::Upsert;
    Document doc;        // Upsert
    DomainName owner;    // Delete
    std::string doc_id;  // Delete
    Query query;         // Query
};

struct TraceEvent {
    SimTime t = 0;
    std::string kind;
    std::string detail;
};

// Append-only event log with a running digest over the canonical line
// encoding of each event. Two runs are equivalent iff their hashes match.
class EventTrace {
public:
    void record(SimTime t, std::string_view kind, std::string_view detail);

    const std::vector<TraceEvent>& events() const { return events_; }
    std::uint64_t hash() const { return hash_; }

    static std::string canonical_line(const TraceEvent& e);

private:
    std::vector<TraceEvent> events_;
    std::uint64_t hash_ = 0xcbf29ce484222325ull;  // running FNV-1a over the lines
};

// Everything measured during a run; reports are derived from this.
struct SendRecord {
    SimTime t = 0;
    wire::MsgType type = wire::MsgType::Ack;
    std::uint64_t bytes = 0;
    bool dropped = false;
};

struct QueryRecord {
    SimTime issued = 0;
    SimTime finished = 0;
    bool completed = false;  // reached the merge step (possibly degraded)
    bool degraded = false;
    std::size_t result_count = 0;
    TopkComparison vs_oracle;
};

struct DocTimes {
    SimTime upserted = 0;
    std::optional<SimTime> applied;  // live at the owning subnet's union
    std::optional<SimTime> covered;  // counted by a description the root accepted
};

struct SimMetrics {
    std::vector<SendRecord> sends;
    std::map<std::string, std::uint64_t> bytes_by_type;  // includes dropped messages
    std::map<std::string, DocTimes> docs;                // by doc_id, live docs only
    std::vector<QueryRecord> queries;
    std::uint64_t node_errors = 0;
};

// Single-threaded discrete-event run over one topology. Time is integer
// microseconds; every random draw comes from one seeded generator in event
// order, so a (config, topology order, scenario) triple fixes the trace.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    // Topology construction, parent before child. Throws RoleMismatch,
    // OrphanDomain, DuplicateDomain.
    void register_node(const DomainName& domain, Level role);
    void register_node(const DomainName& domain);  // role derived from the name

    // Scenario queries run with these; set before run().
    void set_query_defaults(std::uint32_t width, MergeMode mode);

    // Queue the scenario (in file order) and all periodic schedules, then
    // process events until the queue drains or end_time passes.
    void run(const std::vector<Stimulus>& scenario);

    const SimConfig& config() const { return config_; }
    const EventTrace& trace() const { return trace_; }
    const SimMetrics& metrics() const { return metrics_; }

    // Post-run inspection.
    const std::map<DomainName, OrgNode>& orgs() const { return orgs_; }
    const std::map<DomainName, HarvestNode>& hubs() const { return hubs_; }
    const std::map<DomainName, RootBroker>& roots() const { return roots_; }
    OrgNode& org(const DomainName& d);
    HarvestNode& hub(const DomainName& d);
    RootBroker& root(const DomainName& d);

    // Live metadata across every org, extracted fresh (doc_id order).
    std::vector<MetadataRecord> current_metadata() const;

    double coverage() const;  // fraction of live docs the root can account for

private:
    enum class EvKind { Stimulus, Deliver, HarvestTick, PushTick, RpcTimeout, QueryTimeout };

    struct Event {
        SimTime t = 0;
        std::uint64_t seq = 0;
        EvKind kind = EvKind::Stimulus;
        std::size_t stimulus = 0;           // Stimulus
        wire::Envelope env;                 // Deliver
        DomainName node;                    // HarvestTick, PushTick
        std::uint64_t request_id = 0;       // RpcTimeout, QueryTimeout
    };

    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };

    struct PendingHarvest {
        DomainName hub;
        HarvestSession session;
    };

    struct PendingQuery {
        SimTime issued = 0;
        Query query;
        RootBroker::PendingSearch state;
        DomainName root;
        std::vector<ScoredHit> oracle_hits;
    };

    void push_event(Event e);
    void send(wire::Envelope env, SimTime now);
    std::uint64_t next_request_id() { return ++last_request_id_; }

    void on_stimulus(const Stimulus& s, SimTime now);
    void start_query(const Query& q, SimTime now);
    void on_deliver(const wire::Envelope& env, SimTime now);
    void on_harvest_tick(const DomainName& hub, SimTime now);
    void on_push_tick(const DomainName& hub, SimTime now);
    void on_rpc_timeout(std::uint64_t request_id, SimTime now);
    void on_query_timeout(std::uint64_t request_id, SimTime now);

    void org_handle(OrgNode& org, const wire::Envelope& env, SimTime now);
    void hub_handle(HarvestNode& hub, const wire::Envelope& env, SimTime now);
    void root_handle(RootBroker& root, const wire::Envelope& env, SimTime now);

    void send_harvest_poll(HarvestNode& hub, HarvestSession session, const HarvestPoll& poll, SimTime now);
    void push_description(HarvestNode& hub, SimTime now);
    void finish_query(std::uint64_t query_id, SimTime now);
    void node_error(const DomainName& where, const std::string& what, SimTime now);

    DomainName hub_of(const DomainName& org) const;

    SimConfig config_;
    Rng rng_;
    EventTrace trace_;
    SimMetrics metrics_;

    std::map<DomainName, Level> registered_;
    std::vector<DomainName> hub_order_;  // schedule creation order
    std::map<DomainName, OrgNode> orgs_;
    std::map<DomainName, HarvestNode> hubs_;
    std::map<DomainName, RootBroker> roots_;
    std::vector<DomainName> root_order_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t next_event_seq_ = 0;
    std::uint64_t last_request_id_ = 0;
    SimTime end_time_us_ = 0;

    std::uint32_t query_width_ = 0;  // 0 = every collection
    MergeMode query_mode_ = MergeMode::GlobalStats;

    std::map<std::uint64_t, PendingHarvest> pending_harvests_;      // by request_id
    std::map<std::uint64_t, std::uint64_t> query_rpcs_;             // request_id -> query_id
    std::map<std::uint64_t, DomainName> query_rpc_targets_;         // request_id -> target
    std::map<std::uint64_t, PendingQuery> pending_queries_;         // by query_id
    std::uint64_t last_query_id_ = 0;

    // doc_id -> apply time, per hub, for coverage bookkeeping.
    std::map<DomainName, std::map<std::string, SimTime>> hub_applies_;
};

}  // namespace dris
