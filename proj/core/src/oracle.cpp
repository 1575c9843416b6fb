#include "dris/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dris {

namespace {

void sort_and_trim(std::vector<ScoredHit>& hits, std::uint32_t k) {
    std::stable_sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (k > 0 && hits.size() > k) hits.resize(k);
}

}  // namespace

GlobalOracle GlobalOracle::full_text(std::vector<Document> docs) {
    GlobalOracle o(OracleMode::FullText);
    o.docs_ = std::move(docs);
    return o;
}

GlobalOracle GlobalOracle::metadata(std::vector<MetadataRecord> records) {
    GlobalOracle o(OracleMode::Metadata);
    o.records_ = std::move(records);
    return o;
}

std::size_t GlobalOracle::size() const {
    return mode_ == OracleMode::FullText ? docs_.size() : records_.size();
}

std::vector<ScoredHit> GlobalOracle::search(const Query& q, std::uint32_t k) const {
    validate_query_terms(q);
    std::uint32_t k_eff = k != 0 ? k : q.k;
    std::vector<ScoredHit> hits =
        mode_ == OracleMode::FullText ? search_full_text(q) : search_metadata(q);
    sort_and_trim(hits, k_eff);
    return hits;
}

std::vector<ScoredHit> GlobalOracle::search_full_text(const Query& q) const {
    // Last write per doc_id wins, like an index fed the same stream.
    std::map<std::string, const Document*> live;
    for (const auto& d : docs_) live[d.doc_id] = &d;

    std::map<std::string, std::map<std::string, std::uint64_t>> counts;  // doc_id -> term -> tf
    for (const auto& [doc_id, doc] : live) {
        auto& c = counts[doc_id];
        for (auto& t : tokenize(doc->body)) ++c[t];
    }

    const std::uint64_t n = live.size();
    std::map<std::string, std::uint64_t> df;
    for (const auto& term : q.terms) {
        if (df.count(term)) continue;
        std::uint64_t d = 0;
        for (const auto& [doc_id, c] : counts)
            if (c.count(term)) ++d;
        df[term] = d;
    }

    std::vector<ScoredHit> hits;
    for (const auto& [doc_id, c] : counts) {
        double score = 0.0;
        for (const auto& term : q.terms) {
            auto tf = c.find(term);
            if (tf == c.end()) continue;
            score += static_cast<double>(tf->second) * idf(n, df.at(term));
        }
        if (score <= 0.0) continue;
        ScoredHit h;
        h.doc_id = doc_id;
        h.score = score;
        h.owner = live.at(doc_id)->owner;
        hits.push_back(std::move(h));
    }
    return hits;
}

std::vector<ScoredHit> GlobalOracle::search_metadata(const Query& q) const {
    std::map<std::string, const MetadataRecord*> latest;
    for (const auto& r : records_) latest[r.doc_id] = &r;

    std::uint64_t live = 0;
    std::map<std::string, std::uint64_t> df;
    for (const auto& [doc_id, r] : latest) {
        if (r->deleted) continue;
        ++live;
        for (const auto& [term, w] : r->key_terms) ++df[term];
    }

    std::vector<ScoredHit> hits;
    for (const auto& [doc_id, r] : latest) {
        if (r->deleted) continue;
        double score = 0.0;
        std::map<std::string, double> matched;
        for (const auto& term : q.terms) {
            auto d = df.find(term);
            if (d == df.end()) continue;
            for (const auto& [kt, w] : r->key_terms) {
                if (kt == term) {
                    score += w * idf(live, d->second);
                    matched[term] = w;
                    break;
                }
            }
        }
        if (score <= 0.0) continue;
        ScoredHit h;
        h.doc_id = doc_id;
        h.score = score;
        h.owner = r->owner;
        h.term_weights = std::move(matched);
        hits.push_back(std::move(h));
    }
    return hits;
}

TopkComparison compare_topk(const std::vector<ScoredHit>& a, const std::vector<ScoredHit>& b, std::uint32_t k) {
    std::vector<std::string> ids_a, ids_b;
    for (std::size_t i = 0; i < a.size() && i < k; ++i) ids_a.push_back(a[i].doc_id);
    for (std::size_t i = 0; i < b.size() && i < k; ++i) ids_b.push_back(b[i].doc_id);

    TopkComparison cmp;
    cmp.exact_match = ids_a == ids_b;
    if (ids_a.empty() && ids_b.empty()) {
        cmp.overlap = 1.0;
        return cmp;
    }
    if (ids_a.empty() || ids_b.empty()) {
        cmp.overlap = 0.0;
        return cmp;
    }
    std::set<std::string> sa(ids_a.begin(), ids_a.end());
    std::size_t common = 0;
    std::set<std::string> seen;
    for (const auto& id : ids_b) {
        if (sa.count(id) && seen.insert(id).second) ++common;
    }
    cmp.overlap = static_cast<double>(common) / static_cast<double>(std::min(ids_a.size(), ids_b.size()));
    return cmp;
}

}  // namespace dris
