#include "dris/root_broker.hpp"

#include <algorithm>

#include "dris/errors.hpp"

namespace dris {

void CollectionRegistry::register_collection(const CollectionDescription& desc) {
    auto it = by_name_.find(desc.collection);
    if (it == by_name_.end()) {
        by_name_.emplace(desc.collection, desc);
        order_.push_back(desc.collection);
        return;
    }
    if (desc.as_of < it->second.as_of)
        throw_error(ErrorCode::StaleDescription,
                    "description for " + desc.collection.str() + " is older than the stored one");
    it->second = desc;
}

const CollectionDescription& CollectionRegistry::at(const DomainName& collection) const {
    auto it = by_name_.find(collection);
    if (it == by_name_.end())
        throw_error(ErrorCode::UnknownRecipient, "no description registered for " + collection.str());
    return it->second;
}

FanoutPlan select_collections(const CollectionRegistry& reg, const Query& q, std::uint32_t width) {
    if (reg.empty()) throw_error(ErrorCode::EmptyRegistry, "no collections registered");
    if (width == 0) throw_error(ErrorCode::InvalidArgument, "selection width must be at least 1");

    // cf(t): how many collections hold the term at all.
    std::map<std::string, std::uint64_t> cf;
    for (const auto& term : q.terms) {
        if (cf.count(term)) continue;
        std::uint64_t n = 0;
        for (const auto& [name, desc] : reg.descriptions()) {
            auto it = desc.term_df.find(term);
            if (it != desc.term_df.end() && it->second >= 1) ++n;
        }
        cf[term] = n;
    }

    const std::uint64_t total = reg.size();
    std::vector<std::pair<double, DomainName>> scored;
    scored.reserve(reg.size());
    bool any_positive = false;
    for (const auto& [name, desc] : reg.descriptions()) {
        double score = 0.0;
        if (desc.live_count > 0) {
            for (const auto& term : q.terms) {
                auto it = desc.term_df.find(term);
                if (it == desc.term_df.end() || it->second == 0) continue;
                score += static_cast<double>(it->second) / static_cast<double>(desc.live_count) *
                         idf(total, cf.at(term));
            }
        }
        if (score > 0.0) any_positive = true;
        scored.emplace_back(score, name);
    }

    if (any_positive) {
        std::erase_if(scored, [](const auto& e) { return e.first <= 0.0; });
    }
    // else fail-open: a query the registry knows nothing about goes everywhere.

    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > width) scored.resize(width);

    FanoutPlan plan;
    plan.query = q;
    plan.width = width;
    plan.targets.reserve(scored.size());
    for (const auto& [score, name] : scored) plan.targets.push_back(name);
    return plan;
}

FederationStats federation_stats(const CollectionRegistry& reg) {
    FederationStats stats;
    for (const auto& [name, desc] : reg.descriptions()) {
        stats.doc_count += desc.live_count;
        for (const auto& [term, df] : desc.term_df) stats.term_df[term] += df;
    }
    return stats;
}

std::vector<ScoredHit> merge_results(const std::vector<std::vector<ScoredHit>>& lists, const Query& q,
                                     std::uint32_t k, MergeMode mode, const FederationStats& stats) {
    std::map<std::string, ScoredHit> best;
    for (const auto& list : lists) {
        for (const auto& hit : list) {
            ScoredHit h = hit;
            if (mode == MergeMode::GlobalStats) {
                double score = 0.0;
                for (const auto& term : q.terms) {
                    auto w = h.term_weights.find(term);
                    if (w == h.term_weights.end()) continue;
                    auto df = stats.term_df.find(term);
                    if (df == stats.term_df.end() || df->second == 0) continue;
                    score += w->second * idf(stats.doc_count, df->second);
                }
                h.score = score;
            }
            if (h.score <= 0.0) continue;
            auto it = best.find(h.doc_id);
            if (it == best.end()) {
                best.emplace(h.doc_id, std::move(h));
            } else if (h.score > it->second.score) {
                it->second = std::move(h);
            }
        }
    }

    std::vector<ScoredHit> merged;
    merged.reserve(best.size());
    for (auto& [doc_id, hit] : best) merged.push_back(std::move(hit));
    std::stable_sort(merged.begin(), merged.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (k != 0 && merged.size() > k) merged.resize(k);
    return merged;
}

RootBroker::PendingSearch RootBroker::begin_search(const Query& q, std::uint32_t width, MergeMode mode) const {
    std::uint32_t effective = width;
    if (effective == 0 || effective > registry_.size())
        effective = static_cast<std::uint32_t>(registry_.size());
    PendingSearch s;
    s.query = q;
    s.plan = select_collections(registry_, q, effective == 0 ? 1 : effective);
    s.mode = mode;
    s.fanout_k = mode == MergeMode::GlobalStats ? 0 : q.k;
    for (const auto& t : s.plan.targets) s.outstanding.insert(t);
    return s;
}

bool RootBroker::on_response(PendingSearch& s, const DomainName& from, std::vector<ScoredHit> hits) const {
    auto it = s.outstanding.find(from);
    if (it != s.outstanding.end()) {
        s.outstanding.erase(it);
        s.answered[from] = std::move(hits);
    }
    return s.outstanding.empty();
}

bool RootBroker::on_target_failed(PendingSearch& s, const DomainName& from) const {
    auto it = s.outstanding.find(from);
    if (it != s.outstanding.end()) {
        s.outstanding.erase(it);
        s.degraded = true;
    }
    return s.outstanding.empty();
}

RootBroker::SearchResult RootBroker::finish(const PendingSearch& s) const {
    std::vector<std::vector<ScoredHit>> lists;
    lists.reserve(s.answered.size());
    for (const auto& target : s.plan.targets) {
        auto it = s.answered.find(target);
        if (it != s.answered.end()) lists.push_back(it->second);
    }
    FederationStats stats;
    if (s.mode == MergeMode::GlobalStats) stats = federation_stats(registry_);

    SearchResult result;
    result.hits = merge_results(lists, s.query, s.query.k, s.mode, stats);
    result.degraded = s.degraded || !s.outstanding.empty();
    for (auto& hit : result.hits) hit.path.insert(hit.path.begin(), me_);
    return result;
}

RootBroker::SearchResult federated_search(const RootBroker& broker, const Query& q, std::uint32_t width,
                                          MergeMode mode, const SearchTransport& transport) {
    RootBroker::PendingSearch pending = broker.begin_search(q, width, mode);
    std::vector<DomainName> targets = pending.plan.targets;
    Query child_query = q;
    child_query.k = pending.fanout_k;
    for (const auto& target : targets) {
        std::optional<std::vector<ScoredHit>> hits = transport(target, child_query, pending.fanout_k);
        if (hits) {
            broker.on_response(pending, target, std::move(*hits));
        } else {
            broker.on_target_failed(pending, target);
        }
    }
    return broker.finish(pending);
}

}  // namespace dris
