#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dris/harvest_node.hpp"

namespace dris {

// Everything the root knows about the federation: one description per
// collection, nothing else. Holds no records and no documents.
class CollectionRegistry {
public:
    // Insert or refresh. A description older than the stored one (by as_of)
    // is rejected; equal as_of is accepted so idempotent re-sends are cheap.
    void register_collection(const CollectionDescription& desc);

    bool contains(const DomainName& collection) const { return by_name_.count(collection) > 0; }
    const CollectionDescription& at(const DomainName& collection) const;

    bool empty() const { return by_name_.empty(); }
    std::size_t size() const { return by_name_.size(); }

    const std::map<DomainName, CollectionDescription>& descriptions() const { return by_name_; }
    const std::vector<DomainName>& registration_order() const { return order_; }

private:
    std::map<DomainName, CollectionDescription> by_name_;
    std::vector<DomainName> order_;  // first-registration order, for snapshots
};

struct FanoutPlan {
    Query query;
    std::vector<DomainName> targets;  // selection score descending, ties by name
    std::uint32_t width = 0;
};

// Rank collections by sum over query terms of df_c(t)/live_count_c *
// ln(1 + C/cf(t)), where C is the registry size and cf(t) counts the
// collections holding t at all. Zero scorers are dropped unless every
// collection scored zero, in which case all are kept (fail-open: a term
// unknown to the registry must not silently lose recall).
FanoutPlan select_collections(const CollectionRegistry& reg, const Query& q, std::uint32_t width);

enum class MergeMode {
    Raw,          // trust each collection's own scores
    GlobalStats,  // rescore against federation-wide df/N summed from the registry
};

// Federation-wide statistics, summed across registered descriptions.
struct FederationStats {
    std::uint64_t doc_count = 0;
    std::map<std::string, std::uint64_t> term_df;
};

FederationStats federation_stats(const CollectionRegistry& reg);

// Merge per-collection result lists into one ranking. Duplicate doc_ids keep
// the higher-scoring replica; ties order by doc_id; zero scores drop out.
// k == 0 means "no limit".
std::vector<ScoredHit> merge_results(const std::vector<std::vector<ScoredHit>>& lists, const Query& q,
                                     std::uint32_t k, MergeMode mode, const FederationStats& stats);

// Layer-1 node: selects collections, fans a query out, merges what comes
// back. Pure state machine; transports live elsewhere.
class RootBroker {
public:
    explicit RootBroker(DomainName me) : me_(std::move(me)) {}

    const DomainName& domain() const { return me_; }
    const CollectionRegistry& registry() const { return registry_; }

    void register_collection(const CollectionDescription& desc) { registry_.register_collection(desc); }

    // One in-flight fanout. Complete when nothing is outstanding.
    struct PendingSearch {
        Query query;
        FanoutPlan plan;
        MergeMode mode = MergeMode::GlobalStats;
        std::uint32_t fanout_k = 0;  // k each target is asked for
        std::map<DomainName, std::vector<ScoredHit>> answered;
        std::set<DomainName> outstanding;
        bool degraded = false;
    };

    struct SearchResult {
        std::vector<ScoredHit> hits;
        bool degraded = false;
    };

    // width == 0 means "every registered collection". GlobalStats fanouts ask
    // targets for exhaustive lists (k = 0): a hit ranked low by one
    // collection's local statistics may rank high globally, so truncating at
    // the children would make the merged ranking approximate.
    PendingSearch begin_search(const Query& q, std::uint32_t width, MergeMode mode) const;

    // Returns true when the fanout is complete. Answers from targets that are
    // not outstanding (late, duplicate, unsolicited) are ignored.
    bool on_response(PendingSearch& s, const DomainName& from, std::vector<ScoredHit> hits) const;
    bool on_target_failed(PendingSearch& s, const DomainName& from) const;

    // Merge and stamp paths: every hit leaves as [root, subnet, owner].
    SearchResult finish(const PendingSearch& s) const;

private:
    DomainName me_;
    CollectionRegistry registry_;
};

// Direct in-process fanout; nullopt from the transport marks the target
// unreachable and degrades the result rather than failing it.
using SearchTransport =
    std::function<std::optional<std::vector<ScoredHit>>(const DomainName& target, const Query& q, std::uint32_t k)>;

RootBroker::SearchResult federated_search(const RootBroker& broker, const Query& q, std::uint32_t width,
                                          MergeMode mode, const SearchTransport& transport);

}  // namespace dris
