#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dris/time.hpp"

namespace dris {

// A position in the DNS-shaped tree. Labels are stored least-significant
// first, so "hust.edu.cn" is {"hust","edu","cn"} and its parent is obtained
// by dropping the first label.
class DomainName {
public:
    DomainName() = default;

    // Throws MalformedDomain on empty labels, illegal characters or more
    // than eight labels. Uppercase ASCII is folded to lowercase.
    static DomainName parse(std::string_view text);

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& str() const { return text_; }
    std::size_t depth() const { return labels_.size(); }

    bool is_root_label() const { return labels_.size() == 1; }
    DomainName parent() const;  // pre: depth() > 1
    bool under(const DomainName& ancestor) const;  // suffix match, proper or equal

    // Ordering follows the canonical dotted text so sorted output reads
    // naturally and ties break the same way everywhere.
    bool operator==(const DomainName& other) const { return text_ == other.text_; }
    std::strong_ordering operator<=>(const DomainName& other) const { return text_ <=> other.text_; }

private:
    std::vector<std::string> labels_;
    std::string text_;
};

enum class Level { Root = 0, Subnet = 1, Org = 2 };

std::string_view level_name(Level level);

// Maps label count to Level. Defaults follow the three-layer scheme:
// one label is a root, two a sub-network, three or more an organization.
struct LevelTable {
    std::size_t root_max_labels = 1;
    std::size_t subnet_max_labels = 2;
};

Level level_of(const DomainName& d, const LevelTable& table = {});

struct Document {
    std::string doc_id;
    DomainName owner;
    std::string url;
    std::string title;
    std::string body;
    std::uint64_t modified = 0;  // sim-time in whole seconds
};

constexpr std::size_t kMaxBodyBytes = std::size_t{1} << 22;

// Throws InvalidArgument when a field violates its bound.
void validate_document(const Document& doc);

struct Query {
    std::vector<std::string> terms;  // tokenizer-normalized
    std::uint32_t k = 10;            // 1..1000
};

constexpr std::uint32_t kMaxQueryK = 1000;

// Terms only: node-to-node fanout carries k = 0 ("everything"), which is not
// a legal operator k.
void validate_query_terms(const Query& q);
void validate_query(const Query& q);

struct ScoredHit {
    std::string doc_id;
    double score = 0.0;
    DomainName owner;
    std::vector<DomainName> path;  // starts at the node that answered
    // Per-query-term weights from the matched metadata record; lets a merge
    // step re-score the hit with federation-global statistics.
    std::map<std::string, double> term_weights;
};

struct SourceProfile {
    std::uint64_t doc_count = 0;
    std::uint32_t type_count = 1;  // distinct resource kinds (web/ftp/db/...)
    std::uint64_t metadata_bytes_estimate = 0;
};

enum class Architecture { Centralized, MetadataHarvest, Distributed };

std::string_view architecture_name(Architecture a);

struct ArchitectureThresholds {
    std::uint64_t size_small = 1'000'000;         // docs a single database handles comfortably
    std::uint64_t metadata_cap = 100'000'000;     // bytes a union metadata store may hold
};

// Small sources index centrally; larger ones harvest metadata while the
// union stays storable; anything beyond that is searched distributed.
Architecture select_architecture(const SourceProfile& p, const ArchitectureThresholds& thresholds = {});

// The shared ranking shape: ln(1 + n / df).
double idf(std::uint64_t n, std::uint64_t df);

// Lowercases and splits on any non-alphanumeric byte; no stemming, no
// stopwords. Shared by indexing, metadata extraction and the CLI.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace dris
