#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dris/errors.hpp"
#include "dris/org_node.hpp"

namespace dris {

// Per-collection summary statistics: everything a broker needs to rank
// collections without holding any records itself.
struct CollectionDescription {
    DomainName collection;
    std::uint64_t live_count = 0;
    std::map<std::string, std::uint64_t> term_df;
    SimTime as_of = 0;
};

// Union of harvested metadata records with incrementally maintained
// document frequencies over the live (non-tombstone) records.
class UnionIndex {
public:
    // Upsert or tombstone, replay semantics: the latest applied record for a
    // doc_id wins. Returns true when the record left the doc live.
    bool apply(const MetadataRecord& record);

    // Drops every record owned by (or under) the given domain.
    void purge_owner(const DomainName& owner);

    // Top-k by sum of key-term weight * ln(1 + live/df); tombstones never
    // surface; zero-score hits excluded; ties by doc_id ascending.
    // k == 0 means "no limit".
    std::vector<ScoredHit> search(const Query& q, const DomainName& answered_by, std::uint32_t k) const;

    std::uint64_t live_count() const { return live_count_; }
    const std::map<std::string, MetadataRecord>& records() const { return records_; }
    const std::map<std::string, std::uint64_t>& term_df() const { return term_df_; }

private:
    std::map<std::string, MetadataRecord> records_;
    std::map<std::string, std::uint64_t> term_df_;
    std::uint64_t live_count_ = 0;
};

struct ChildCursor {
    std::uint64_t last_seq = 0;  // never decreases
    SimTime last_harvest_time = 0;
    std::uint32_t consecutive_failures = 0;
};

// What to ask a child for next.
struct HarvestPoll {
    std::uint64_t from_seq = 0;
    std::string token;  // empty when starting from from_seq
};

// In-flight harvest of one child; pages until exhausted, commits the cursor
// only on completion. A stale cursor triggers one full re-harvest from zero.
struct HarvestSession {
    DomainName child;
    std::uint64_t started_from = 0;
    std::uint64_t applied = 0;
    std::uint64_t high_seq = 0;
    bool restarted = false;
};

struct HarvestOutcome {
    std::uint64_t records_applied = 0;
    bool completed = false;
};

// Pulls one page per call; throws DrisError (e.g. ChildUnreachable,
// StaleToken) to signal transport or protocol failures.
using HarvestEndpoint = std::function<HarvestBatch(std::uint64_t from_seq, const std::string& token)>;

// Layer-2 node: maintains the union metadata index over its children,
// answers metadata queries, and exports a collection description upward.
class HarvestNode {
public:
    explicit HarvestNode(DomainName me) : me_(std::move(me)) {}

    const DomainName& domain() const { return me_; }
    const UnionIndex& index() const { return union_; }
    const std::map<DomainName, ChildCursor>& cursors() const { return cursors_; }

    void register_child(const DomainName& child);
    bool has_child(const DomainName& child) const { return cursors_.count(child) > 0; }

    // --- message-driven harvesting (one page at a time) ---
    HarvestSession begin_harvest(const DomainName& child);
    HarvestPoll poll_for(const HarvestSession& session) const;

    struct BatchResult {
        std::vector<std::pair<std::string, bool>> applied;  // doc_id, live after apply
        std::optional<HarvestPoll> next;                    // more pages to pull
        bool done = false;
    };
    BatchResult on_batch(HarvestSession& session, const HarvestBatch& batch, SimTime now);

    // Failure handling: a stale cursor purges the child's records and
    // restarts from zero (once); anything else counts a failure.
    std::optional<HarvestPoll> on_harvest_error(HarvestSession& session, ErrorCode code);

    // --- synchronous harvesting over a direct endpoint ---
    // Endpoint failures beyond one recoverable stale cursor end the attempt
    // with completed == false and the child's failure counter bumped.
    HarvestOutcome run_harvest(const DomainName& child, SimTime now, const HarvestEndpoint& endpoint);

    // Explicit-cap form serves the wire protocol, where k == 0 asks for every
    // match; the operator form applies the query's own (validated) k.
    std::vector<ScoredHit> search(const Query& q, std::uint32_t k) const;
    std::vector<ScoredHit> search(const Query& q) const;

    CollectionDescription description(SimTime now) const;

    // Snapshot support.
    void restore_cursor(const DomainName& child, ChildCursor cursor) { cursors_[child] = cursor; }
    UnionIndex& mutable_index() { return union_; }

private:
    void commit(HarvestSession& session, SimTime now);

    DomainName me_;
    UnionIndex union_;
    std::map<DomainName, ChildCursor> cursors_;
};

}  // namespace dris
