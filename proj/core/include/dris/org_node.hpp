#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dris/domain.hpp"
#include "dris/time.hpp"

namespace dris {

// Compact, size-bounded surrogate of one document. The canonical encoding
// (wire::encode_record) of any record the system emits stays within
// kMetadataByteCap bytes.
struct MetadataRecord {
    std::string doc_id;
    DomainName owner;
    std::string url;
    std::string title;
    // Sorted by weight descending, ties by term ascending; at most 32 entries.
    std::vector<std::pair<std::string, double>> key_terms;
    std::uint64_t modified = 0;  // seconds
    std::uint64_t seq_no = 0;
    bool deleted = false;
};

constexpr std::size_t kMetadataByteCap = 1024;
constexpr std::size_t kMaxKeyTerms = 32;

struct HarvestBatch {
    std::vector<MetadataRecord> records;
    std::optional<std::string> next_token;  // present iff more records remain
    std::uint64_t high_seq = 0;             // largest seq_no in this page
};

enum class ChangeOp { Upsert, Delete };

struct ChangeLogEntry {
    std::uint64_t seq_no = 0;
    std::string doc_id;
    ChangeOp op = ChangeOp::Upsert;
    SimTime at = 0;
};

struct OrgConfig {
    std::uint64_t doc_cap = 1'000'000;
    std::size_t batch_size = 100;
};

// Layer-3 node: owns and centrally indexes its documents, answers local
// TF-IDF queries, and serves incremental metadata harvests from a
// sequence-numbered change log. Single writer; reads may run between
// mutations.
class OrgNode {
public:
    explicit OrgNode(DomainName owner, OrgConfig config = {});

    const DomainName& owner() const { return owner_; }
    std::uint64_t doc_count() const { return static_cast<std::uint64_t>(docs_.size()); }
    std::uint64_t max_seq() const { return next_seq_ - 1; }
    const OrgConfig& config() const { return config_; }

    // Replaces any previous version of doc_id entirely. Throws WrongOwner,
    // CapacityExceeded, InvalidArgument.
    void upsert(const Document& doc, SimTime now);

    // Throws UnknownDoc. Subsequent harvests emit a tombstone.
    void remove(const std::string& doc_id, SimTime now);

    // Top-k by sum of tf * ln(1 + N/df) over the query terms; zero-score
    // hits excluded, ties by doc_id ascending.
    std::vector<ScoredHit> search(const Query& q) const;

    // Up to 32 highest-weight terms, then trimmed until the canonical
    // encoding fits the 1024-byte cap. Throws UnknownDoc,
    // UncompressibleRecord.
    MetadataRecord extract_metadata(const std::string& doc_id, std::uint64_t seq_no) const;

    // Every live document's record at its current change-log sequence, in
    // doc_id order. This is what a fully caught-up harvester would hold.
    std::vector<MetadataRecord> metadata_snapshot() const;

    // One page of changes with seq_no > from_seq (or past the resumption
    // token). Throws StaleToken when the cursor predates a log compaction.
    HarvestBatch list_records(std::uint64_t from_seq, const std::string& token = "") const;

    // Optional maintenance: drops delete tombstones from the log. Cursors
    // pointing below the highest dropped entry go stale.
    void compact_change_log();

    // Introspection (snapshots, tests).
    struct StoredDoc {
        std::string url;
        std::string title;
        std::uint64_t modified = 0;
        std::uint32_t length = 0;  // tokens
        std::map<std::string, std::uint32_t> term_counts;
    };
    const std::map<std::string, StoredDoc>& docs() const { return docs_; }
    const std::map<std::uint64_t, ChangeLogEntry>& change_log() const { return log_; }
    std::uint64_t compact_floor() const { return compact_floor_; }
    std::uint64_t df(const std::string& term) const;

    // Rebuilds a node from snapshot state; inverse of the accessors above.
    static OrgNode restore(DomainName owner, OrgConfig config, std::map<std::string, StoredDoc> docs,
                           std::vector<ChangeLogEntry> log, std::uint64_t next_seq, std::uint64_t compact_floor);

private:
    MetadataRecord build_record(const std::string& doc_id, const StoredDoc& doc, std::uint64_t seq_no) const;
    void unindex(const std::string& doc_id, const StoredDoc& doc);
    void log_change(const std::string& doc_id, ChangeOp op, SimTime now);

    DomainName owner_;
    OrgConfig config_;
    std::map<std::string, StoredDoc> docs_;
    // term -> doc_id -> tf; df(term) is the size of the inner map.
    std::map<std::string, std::map<std::string, std::uint32_t>> postings_;
    // seq -> entry, at most one live entry per doc_id (its latest op).
    std::map<std::uint64_t, ChangeLogEntry> log_;
    std::map<std::string, std::uint64_t> log_seq_by_doc_;
    std::uint64_t next_seq_ = 1;
    std::uint64_t compact_floor_ = 0;
};

}  // namespace dris
