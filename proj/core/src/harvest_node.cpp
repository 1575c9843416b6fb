#include "dris/harvest_node.hpp"

#include <algorithm>

#include "dris/errors.hpp"

namespace dris {

bool UnionIndex::apply(const MetadataRecord& record) {
    auto it = records_.find(record.doc_id);
    if (it != records_.end() && !it->second.deleted) {
        --live_count_;
        for (const auto& [term, _] : it->second.key_terms) {
            auto df = term_df_.find(term);
            if (df != term_df_.end() && --df->second == 0) term_df_.erase(df);
        }
    }
    bool live = !record.deleted;
    if (live) {
        ++live_count_;
        for (const auto& [term, _] : record.key_terms) ++term_df_[term];
    }
    records_[record.doc_id] = record;
    return live;
}

void UnionIndex::purge_owner(const DomainName& owner) {
    for (auto it = records_.begin(); it != records_.end();) {
        if (it->second.owner.under(owner)) {
            if (!it->second.deleted) {
                --live_count_;
                for (const auto& [term, _] : it->second.key_terms) {
                    auto df = term_df_.find(term);
                    if (df != term_df_.end() && --df->second == 0) term_df_.erase(df);
                }
            }
            it = records_.erase(it);
        } else {
            ++it;
        }
    }
}

std::vector<ScoredHit> UnionIndex::search(const Query& q, const DomainName& answered_by, std::uint32_t k) const {
    std::vector<ScoredHit> hits;
    for (const auto& [doc_id, record] : records_) {
        if (record.deleted) continue;
        double score = 0.0;
        std::map<std::string, double> matched;
        for (const auto& term : q.terms) {
            auto df = term_df_.find(term);
            if (df == term_df_.end()) continue;
            // key_terms is small and sorted by weight, scan linearly
            for (const auto& [kt, w] : record.key_terms) {
                if (kt == term) {
                    score += w * idf(live_count_, df->second);
                    matched[term] = w;
                    break;
                }
            }
        }
        if (score <= 0.0) continue;
        ScoredHit h;
        h.doc_id = doc_id;
        h.score = score;
        h.owner = record.owner;
        h.path = {answered_by, record.owner};
        h.term_weights = std::move(matched);
        hits.push_back(std::move(h));
    }
    std::stable_sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (k > 0 && hits.size() > k) hits.resize(k);
    return hits;
}

void HarvestNode::register_child(const DomainName& child) {
    cursors_.emplace(child, ChildCursor{});
}

HarvestSession HarvestNode::begin_harvest(const DomainName& child) {
    auto it = cursors_.find(child);
    if (it == cursors_.end()) throw_error(ErrorCode::InvalidArgument, "unregistered child " + child.str());
    HarvestSession s;
    s.child = child;
    s.started_from = it->second.last_seq;
    s.high_seq = it->second.last_seq;
    return s;
}

HarvestPoll HarvestNode::poll_for(const HarvestSession& session) const {
    return HarvestPoll{session.started_from, {}};
}

HarvestNode::BatchResult HarvestNode::on_batch(HarvestSession& session, const HarvestBatch& batch, SimTime now) {
    BatchResult result;
    for (const auto& record : batch.records) {
        bool live = union_.apply(record);
        result.applied.emplace_back(record.doc_id, live);
        ++session.applied;
    }
    session.high_seq = std::max(session.high_seq, batch.high_seq);
    if (batch.next_token) {
        result.next = HarvestPoll{0, *batch.next_token};
    } else {
        commit(session, now);
        result.done = true;
    }
    return result;
}

std::optional<HarvestPoll> HarvestNode::on_harvest_error(HarvestSession& session, ErrorCode code) {
    if (code == ErrorCode::StaleToken && !session.restarted) {
        union_.purge_owner(session.child);
        session.restarted = true;
        session.started_from = 0;
        session.high_seq = 0;
        session.applied = 0;
        return HarvestPoll{0, {}};
    }
    ++cursors_[session.child].consecutive_failures;
    return std::nullopt;
}

void HarvestNode::commit(HarvestSession& session, SimTime now) {
    ChildCursor& cursor = cursors_[session.child];
    cursor.last_seq = std::max(cursor.last_seq, session.high_seq);
    cursor.last_harvest_time = now;
    cursor.consecutive_failures = 0;
}

HarvestOutcome HarvestNode::run_harvest(const DomainName& child, SimTime now, const HarvestEndpoint& endpoint) {
    HarvestSession session = begin_harvest(child);
    HarvestPoll poll = poll_for(session);
    for (;;) {
        HarvestBatch batch;
        try {
            batch = endpoint(poll.from_seq, poll.token);
        } catch (const DrisError& e) {
            auto retry = on_harvest_error(session, e.code());
            if (!retry) return HarvestOutcome{session.applied, false};
            poll = *retry;
            continue;
        }
        auto result = on_batch(session, batch, now);
        if (result.done) return HarvestOutcome{session.applied, true};
        poll = *result.next;
    }
}

std::vector<ScoredHit> HarvestNode::search(const Query& q, std::uint32_t k) const {
    validate_query_terms(q);
    return union_.search(q, me_, k);
}

std::vector<ScoredHit> HarvestNode::search(const Query& q) const {
    validate_query(q);
    return union_.search(q, me_, q.k);
}

CollectionDescription HarvestNode::description(SimTime now) const {
    CollectionDescription d;
    d.collection = me_;
    d.live_count = union_.live_count();
    d.term_df = union_.term_df();
    d.as_of = now;
    return d;
}

}  // namespace dris
