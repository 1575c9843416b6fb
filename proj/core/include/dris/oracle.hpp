#pragma once

#include <cstdint>
#include <vector>

#include "dris/org_node.hpp"

namespace dris {

enum class OracleMode { FullText, Metadata };

// Ground truth by brute force: one flat list over the whole federation's
// documents (or harvested metadata), scored by linear scan with the same
// formulas and tie-breaks the nodes use. No inverted index on purpose, so
// the implementation stays auditable.
class GlobalOracle {
public:
    static GlobalOracle full_text(std::vector<Document> docs);
    static GlobalOracle metadata(std::vector<MetadataRecord> records);

    OracleMode mode() const { return mode_; }
    std::size_t size() const;

    // k == 0 means "use q.k". Tombstones and zero scores never surface.
    std::vector<ScoredHit> search(const Query& q, std::uint32_t k = 0) const;

private:
    explicit GlobalOracle(OracleMode mode) : mode_(mode) {}

    std::vector<ScoredHit> search_full_text(const Query& q) const;
    std::vector<ScoredHit> search_metadata(const Query& q) const;

    OracleMode mode_;
    std::vector<Document> docs_;
    std::vector<MetadataRecord> records_;
};

struct TopkComparison {
    bool exact_match = false;  // id sequences agree up to k
    double overlap = 0.0;      // |ids(a[:k]) ∩ ids(b[:k])| / min(k, shorter length)
};

TopkComparison compare_topk(const std::vector<ScoredHit>& a, const std::vector<ScoredHit>& b, std::uint32_t k);

}  // namespace dris
