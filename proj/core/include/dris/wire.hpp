#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dris/harvest_node.hpp"
#include "dris/org_node.hpp"

namespace dris::wire {

// Protocol version carried in every envelope; the decoder rejects anything
// else.
constexpr std::uint64_t kVersion = 1;

// Whole encoded messages larger than this are refused.
constexpr std::size_t kMaxMessageBytes = std::size_t{1} << 20;

enum class MsgType {
    SearchRequest,
    SearchResponse,
    HarvestRequest,
    HarvestResponse,
    RegisterDescription,
    Ack,
    Error,
};

std::string_view msg_type_name(MsgType t);

struct SearchRequestPayload {
    std::vector<std::string> terms;
    // k == 0 asks for every matching record (node-to-node fanout); user
    // queries stay within 1..1000.
    std::uint32_t k = 0;
};

struct SearchResponsePayload {
    std::vector<ScoredHit> hits;
    bool degraded = false;
};

struct HarvestRequestPayload {
    std::uint64_t from_seq = 0;
    std::string token;  // empty = start at from_seq
};

struct HarvestResponsePayload {
    std::vector<MetadataRecord> records;
    std::string next_token;  // empty = no more pages
    std::uint64_t high_seq = 0;
};

struct RegisterDescriptionPayload {
    CollectionDescription description;
};

struct AckPayload {};

struct ErrorPayload {
    std::string code;
    std::string message;
};

using Payload = std::variant<SearchRequestPayload, SearchResponsePayload, HarvestRequestPayload,
                             HarvestResponsePayload, RegisterDescriptionPayload, AckPayload, ErrorPayload>;

struct Envelope {
    MsgType msg_type = MsgType::Ack;
    DomainName sender;
    DomainName recipient;
    std::uint64_t request_id = 0;
    Payload payload = AckPayload{};
};

// Canonical bytes: one JSON object, keys in byte order, no whitespace, one
// trailing newline. Injective over valid envelopes. Throws PayloadTooLarge.
std::string encode(const Envelope& e);

// Strict inverse of encode: anything that does not re-encode to the exact
// input bytes is rejected (MalformedMessage, UnknownType,
// UnsupportedVersion, NonCanonical).
Envelope decode(std::string_view bytes);

// Canonical sub-encodings, shared with the metadata size cap and snapshots.
std::string encode_record(const MetadataRecord& r);
std::string encode_hit(const ScoredHit& h);
std::string encode_description(const CollectionDescription& d);

}  // namespace dris::wire
