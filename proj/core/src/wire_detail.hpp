#pragma once

// Library-private: JSON-level parsers shared between the wire codec and the
// snapshot loader. Not installed; nlohmann stays out of the public headers.

#include <json.hpp>

#include "dris/harvest_node.hpp"
#include "dris/org_node.hpp"

namespace dris::wire::detail {

MetadataRecord parse_record(const nlohmann::json& j);
ScoredHit parse_hit(const nlohmann::json& j);
CollectionDescription parse_description(const nlohmann::json& j);

// Strict helpers; all throw MalformedMessage.
void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const char* where);
std::string get_string(const nlohmann::json& obj, const char* key, const char* where);
std::uint64_t get_u64(const nlohmann::json& obj, const char* key, const char* where);
double get_double(const nlohmann::json& v, const char* where);
bool get_bool(const nlohmann::json& obj, const char* key, const char* where);
DomainName get_domain(const nlohmann::json& obj, const char* key, const char* where);

}  // namespace dris::wire::detail
