#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dris/simnet.hpp"

namespace dris {

// Document corpus: JSON Lines, one canonical object per line with exactly
// the fields body, doc_id, modified, owner, title, url. Parse errors carry
// 1-based line numbers.
std::vector<Document> parse_corpus(std::string_view text);
std::string write_corpus(const std::vector<Document>& docs);

// Topology spec: one JSON object {"nodes": [names...]}, parents first;
// roles derive from label depth.
std::vector<DomainName> parse_topology(std::string_view text);
std::string write_topology(const std::vector<DomainName>& nodes);

// All ancestors (roots, then sub-networks), then the orgs in given order.
std::vector<DomainName> derive_topology(const std::vector<DomainName>& orgs);

// Scenario: JSON Lines of stimuli ordered by time. "t" is in whole
// sim-seconds. Shapes:
//   {"doc":{...},"op":"upsert","t":N}
//   {"doc_id":"...","op":"delete","owner":"...","t":N}
//   {"k":N,"op":"query","t":N,"terms":[...]}
std::vector<Stimulus> parse_scenario(std::string_view text);
std::string write_scenario(const std::vector<Stimulus>& stimuli);

// Synthetic corpus: Zipf-distributed vocabulary, one globally unique marker
// token per document (so coverage can be probed with single-hit queries),
// deterministic for a given spec.
struct CorpusSpec {
    std::uint64_t seed = 0;
    std::vector<std::pair<DomainName, std::uint64_t>> org_docs;  // owner, doc count
    std::size_t vocabulary = 2000;
    double zipf_exponent = 1.1;
    std::size_t terms_per_doc_min = 20;
    std::size_t terms_per_doc_max = 80;
};

std::vector<Document> generate_corpus(const CorpusSpec& spec);

// The marker token generate_corpus plants in the i-th document overall.
std::string unique_marker(std::uint64_t ordinal);

}  // namespace dris
