#include "dris/org_node.hpp"

#include <algorithm>
#include <charconv>

#include "dris/errors.hpp"
#include "dris/wire.hpp"

namespace dris {

namespace {

constexpr std::string_view kTokenPrefix = "s:";

std::string make_token(std::uint64_t after_seq) { return std::string(kTokenPrefix) + std::to_string(after_seq); }

std::uint64_t parse_token(const std::string& token) {
    std::uint64_t after = 0;
    if (token.size() > kTokenPrefix.size() && token.compare(0, kTokenPrefix.size(), kTokenPrefix) == 0) {
        auto* first = token.data() + kTokenPrefix.size();
        auto* last = token.data() + token.size();
        auto res = std::from_chars(first, last, after);
        if (res.ec == std::errc() && res.ptr == last) return after;
    }
    throw_error(ErrorCode::StaleToken, "unrecognized resumption token '" + token + "'");
}

// Drop trailing bytes without splitting a UTF-8 sequence.
void chop_utf8(std::string& s, std::size_t bytes) {
    std::size_t target = s.size() > bytes ? s.size() - bytes : 0;
    while (target > 0 && (static_cast<unsigned char>(s[target]) & 0xc0) == 0x80) --target;
    s.resize(target);
}

}  // namespace

OrgNode::OrgNode(DomainName owner, OrgConfig config) : owner_(std::move(owner)), config_(config) {}

void OrgNode::log_change(const std::string& doc_id, ChangeOp op, SimTime now) {
    // One live entry per doc_id: a new change supersedes the old one under a
    // fresh, strictly larger sequence number.
    auto it = log_seq_by_doc_.find(doc_id);
    if (it != log_seq_by_doc_.end()) log_.erase(it->second);
    std::uint64_t seq = next_seq_++;
    log_[seq] = ChangeLogEntry{seq, doc_id, op, now};
    log_seq_by_doc_[doc_id] = seq;
}

void OrgNode::unindex(const std::string& doc_id, const StoredDoc& doc) {
    for (const auto& [term, _] : doc.term_counts) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        it->second.erase(doc_id);
        if (it->second.empty()) postings_.erase(it);
    }
}

void OrgNode::upsert(const Document& doc, SimTime now) {
    validate_document(doc);
    if (!(doc.owner == owner_))
        throw_error(ErrorCode::WrongOwner, "document " + doc.doc_id + " owned by " + doc.owner.str() +
                                               ", index belongs to " + owner_.str());

    auto existing = docs_.find(doc.doc_id);
    if (existing == docs_.end() && doc_count() >= config_.doc_cap)
        throw_error(ErrorCode::CapacityExceeded, "doc cap " + std::to_string(config_.doc_cap) + " reached");

    if (existing != docs_.end()) unindex(doc.doc_id, existing->second);

    StoredDoc stored;
    stored.url = doc.url;
    stored.title = doc.title;
    stored.modified = doc.modified;
    auto tokens = tokenize(doc.body);
    stored.length = static_cast<std::uint32_t>(tokens.size());
    for (auto& t : tokens) ++stored.term_counts[t];

    for (const auto& [term, tf] : stored.term_counts) postings_[term][doc.doc_id] = tf;
    docs_[doc.doc_id] = std::move(stored);
    log_change(doc.doc_id, ChangeOp::Upsert, now);
}

void OrgNode::remove(const std::string& doc_id, SimTime now) {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw_error(ErrorCode::UnknownDoc, "no document '" + doc_id + "'");
    unindex(doc_id, it->second);
    docs_.erase(it);
    log_change(doc_id, ChangeOp::Delete, now);
}

std::uint64_t OrgNode::df(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

std::vector<ScoredHit> OrgNode::search(const Query& q) const {
    validate_query(q);
    std::map<std::string, double> scores;  // doc_id -> score, ordered for determinism
    std::uint64_t n = doc_count();
    for (const auto& term : q.terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        double w = idf(n, it->second.size());
        for (const auto& [doc_id, tf] : it->second) scores[doc_id] += static_cast<double>(tf) * w;
    }

    std::vector<ScoredHit> hits;
    hits.reserve(scores.size());
    for (const auto& [doc_id, score] : scores) {
        if (score <= 0.0) continue;
        ScoredHit h;
        h.doc_id = doc_id;
        h.score = score;
        h.owner = owner_;
        h.path = {owner_};
        hits.push_back(std::move(h));
    }
    std::stable_sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > q.k) hits.resize(q.k);
    return hits;
}

MetadataRecord OrgNode::build_record(const std::string& doc_id, const StoredDoc& doc, std::uint64_t seq_no) const {
    MetadataRecord r;
    r.doc_id = doc_id;
    r.owner = owner_;
    r.url = doc.url;
    r.title = doc.title;
    r.modified = doc.modified;
    r.seq_no = seq_no;

    std::uint64_t n = doc_count();
    r.key_terms.reserve(doc.term_counts.size());
    for (const auto& [term, tf] : doc.term_counts)
        r.key_terms.emplace_back(term, static_cast<double>(tf) * idf(n, df(term)));
    std::sort(r.key_terms.begin(), r.key_terms.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (r.key_terms.size() > kMaxKeyTerms) r.key_terms.resize(kMaxKeyTerms);

    // Shed weight until the canonical encoding fits: lowest-weight terms
    // first, then the title. Identity fields are never touched, so a record
    // that still does not fit signals an oversized url or doc_id.
    while (wire::encode_record(r).size() > kMetadataByteCap) {
        if (!r.key_terms.empty()) {
            r.key_terms.pop_back();
        } else if (!r.title.empty()) {
            chop_utf8(r.title, 16);
        } else {
            throw_error(ErrorCode::UncompressibleRecord,
                        "record for '" + doc_id + "' cannot fit " + std::to_string(kMetadataByteCap) + " bytes");
        }
    }
    return r;
}

MetadataRecord OrgNode::extract_metadata(const std::string& doc_id, std::uint64_t seq_no) const {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw_error(ErrorCode::UnknownDoc, "no document '" + doc_id + "'");
    return build_record(doc_id, it->second, seq_no);
}

std::vector<MetadataRecord> OrgNode::metadata_snapshot() const {
    std::vector<MetadataRecord> records;
    records.reserve(docs_.size());
    for (const auto& [doc_id, stored] : docs_)
        records.push_back(build_record(doc_id, stored, log_seq_by_doc_.at(doc_id)));
    return records;
}

HarvestBatch OrgNode::list_records(std::uint64_t from_seq, const std::string& token) const {
    std::uint64_t after = token.empty() ? from_seq : parse_token(token);
    // A from-zero harvest is always complete; any other cursor below the
    // compaction floor may have missed a dropped tombstone.
    if (after != 0 && after < compact_floor_)
        throw_error(ErrorCode::StaleToken, "cursor " + std::to_string(after) + " predates log compaction at " +
                                               std::to_string(compact_floor_));

    HarvestBatch batch;
    batch.high_seq = after;
    auto it = log_.upper_bound(after);
    for (; it != log_.end() && batch.records.size() < config_.batch_size; ++it) {
        const ChangeLogEntry& e = it->second;
        if (e.op == ChangeOp::Delete) {
            MetadataRecord tomb;
            tomb.doc_id = e.doc_id;
            tomb.owner = owner_;
            tomb.modified = to_whole_seconds(e.at);
            tomb.seq_no = e.seq_no;
            tomb.deleted = true;
            batch.records.push_back(std::move(tomb));
        } else {
            batch.records.push_back(build_record(e.doc_id, docs_.at(e.doc_id), e.seq_no));
        }
        batch.high_seq = e.seq_no;
    }
    if (it != log_.end()) batch.next_token = make_token(batch.high_seq);
    return batch;
}

void OrgNode::compact_change_log() {
    for (auto it = log_.begin(); it != log_.end();) {
        if (it->second.op == ChangeOp::Delete) {
            compact_floor_ = std::max(compact_floor_, it->second.seq_no);
            log_seq_by_doc_.erase(it->second.doc_id);
            it = log_.erase(it);
        } else {
            ++it;
        }
    }
}

OrgNode OrgNode::restore(DomainName owner, OrgConfig config, std::map<std::string, StoredDoc> docs,
                         std::vector<ChangeLogEntry> log, std::uint64_t next_seq, std::uint64_t compact_floor) {
    OrgNode node(std::move(owner), config);
    node.docs_ = std::move(docs);
    for (const auto& [doc_id, stored] : node.docs_) {
        for (const auto& [term, tf] : stored.term_counts) node.postings_[term][doc_id] = tf;
    }
    for (auto& e : log) {
        node.log_seq_by_doc_[e.doc_id] = e.seq_no;
        node.log_[e.seq_no] = std::move(e);
    }
    node.next_seq_ = next_seq;
    node.compact_floor_ = compact_floor;
    return node;
}

}  // namespace dris
