#include "dris/wire.hpp"

#include <cmath>
#include <initializer_list>

#include <json.hpp>

#include "dris/canonical_json.hpp"
#include "dris/errors.hpp"
#include "wire_detail.hpp"

namespace dris::wire {

using nlohmann::json;

std::string_view msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::SearchRequest: return "search_request";
        case MsgType::SearchResponse: return "search_response";
        case MsgType::HarvestRequest: return "harvest_request";
        case MsgType::HarvestResponse: return "harvest_response";
        case MsgType::RegisterDescription: return "register_description";
        case MsgType::Ack: return "ack";
        case MsgType::Error: return "error";
    }
    return "?";
}

namespace {

// --- encoding ---

void write_record(JsonWriter& w, const MetadataRecord& r) {
    w.begin_object();
    w.key("deleted").value(r.deleted);
    w.key("doc_id").value(r.doc_id);
    w.key("key_terms").begin_array();
    for (const auto& [term, weight] : r.key_terms) {
        w.begin_array().value(term).value(weight).end_array();
    }
    w.end_array();
    w.key("modified").value(r.modified);
    w.key("owner").value(r.owner.str());
    w.key("seq_no").value(r.seq_no);
    w.key("title").value(r.title);
    w.key("url").value(r.url);
    w.end_object();
}

void write_hit(JsonWriter& w, const ScoredHit& h) {
    w.begin_object();
    w.key("doc_id").value(h.doc_id);
    w.key("owner").value(h.owner.str());
    w.key("path").begin_array();
    for (const auto& d : h.path) w.value(d.str());
    w.end_array();
    w.key("score").value(h.score);
    w.key("term_weights").begin_object();
    for (const auto& [term, weight] : h.term_weights) w.key(term).value(weight);
    w.end_object();
    w.end_object();
}

void write_description(JsonWriter& w, const CollectionDescription& d) {
    w.begin_object();
    w.key("as_of").value(d.as_of);
    w.key("collection").value(d.collection.str());
    w.key("live_count").value(d.live_count);
    w.key("term_df").begin_object();
    for (const auto& [term, df] : d.term_df) w.key(term).value(df);
    w.end_object();
    w.end_object();
}

void write_payload(JsonWriter& w, const Payload& payload) {
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            w.begin_object();
            if constexpr (std::is_same_v<T, SearchRequestPayload>) {
                w.key("k").value(std::uint64_t{p.k});
                w.key("terms").begin_array();
                for (const auto& t : p.terms) w.value(t);
                w.end_array();
            } else if constexpr (std::is_same_v<T, SearchResponsePayload>) {
                w.key("degraded").value(p.degraded);
                w.key("hits").begin_array();
                for (const auto& h : p.hits) write_hit(w, h);
                w.end_array();
            } else if constexpr (std::is_same_v<T, HarvestRequestPayload>) {
                w.key("from_seq").value(p.from_seq);
                w.key("token").value(p.token);
            } else if constexpr (std::is_same_v<T, HarvestResponsePayload>) {
                w.key("high_seq").value(p.high_seq);
                w.key("next_token").value(p.next_token);
                w.key("records").begin_array();
                for (const auto& r : p.records) write_record(w, r);
                w.end_array();
            } else if constexpr (std::is_same_v<T, RegisterDescriptionPayload>) {
                w.key("description");
                write_description(w, p.description);
            } else if constexpr (std::is_same_v<T, ErrorPayload>) {
                w.key("code").value(p.code);
                w.key("message").value(p.message);
            }
            // AckPayload: empty object
            w.end_object();
        },
        payload);
}

[[noreturn]] void malformed(const std::string& what) { throw_error(ErrorCode::MalformedMessage, what); }

}  // namespace

// --- strict decoding helpers (shared with the snapshot loader) ---

namespace detail {

void check_keys(const json& obj, std::initializer_list<const char*> keys, const char* where) {
    if (!obj.is_object()) malformed(std::string(where) + " must be an object");
    for (const char* k : keys) {
        if (!obj.contains(k)) malformed(std::string(where) + " missing field '" + k + "'");
    }
    if (obj.size() != keys.size()) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* k : keys)
                if (it.key() == k) known = true;
            if (!known) malformed(std::string(where) + " has unknown field '" + it.key() + "'");
        }
    }
}

std::string get_string(const json& obj, const char* key, const char* where) {
    const json& v = obj.at(key);
    if (!v.is_string()) malformed(std::string(where) + "." + key + " must be a string");
    return v.get<std::string>();
}

std::uint64_t get_u64(const json& obj, const char* key, const char* where) {
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) malformed(std::string(where) + "." + key + " must be an unsigned integer");
    return v.get<std::uint64_t>();
}

double get_double(const json& v, const char* where) {
    if (!v.is_number()) malformed(std::string(where) + " must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) malformed(std::string(where) + " must be finite");
    return d;
}

bool get_bool(const json& obj, const char* key, const char* where) {
    const json& v = obj.at(key);
    if (!v.is_boolean()) malformed(std::string(where) + "." + key + " must be a boolean");
    return v.get<bool>();
}

DomainName get_domain(const json& obj, const char* key, const char* where) {
    std::string text = get_string(obj, key, where);
    try {
        return DomainName::parse(text);
    } catch (const DrisError& e) {
        malformed(std::string(where) + "." + key + ": " + e.what());
    }
}

MetadataRecord parse_record(const json& j) {
    check_keys(j, {"deleted", "doc_id", "key_terms", "modified", "owner", "seq_no", "title", "url"}, "record");
    MetadataRecord r;
    r.deleted = get_bool(j, "deleted", "record");
    r.doc_id = get_string(j, "doc_id", "record");
    const json& kt = j.at("key_terms");
    if (!kt.is_array()) malformed("record.key_terms must be an array");
    for (const json& pair : kt) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string())
            malformed("record.key_terms entries must be [term, weight] pairs");
        r.key_terms.emplace_back(pair[0].get<std::string>(), get_double(pair[1], "record.key_terms weight"));
    }
    r.modified = get_u64(j, "modified", "record");
    r.owner = get_domain(j, "owner", "record");
    r.seq_no = get_u64(j, "seq_no", "record");
    r.title = get_string(j, "title", "record");
    r.url = get_string(j, "url", "record");
    return r;
}

ScoredHit parse_hit(const json& j) {
    check_keys(j, {"doc_id", "owner", "path", "score", "term_weights"}, "hit");
    ScoredHit h;
    h.doc_id = get_string(j, "doc_id", "hit");
    h.owner = get_domain(j, "owner", "hit");
    const json& path = j.at("path");
    if (!path.is_array()) malformed("hit.path must be an array");
    for (const json& p : path) {
        if (!p.is_string()) malformed("hit.path entries must be strings");
        try {
            h.path.push_back(DomainName::parse(p.get<std::string>()));
        } catch (const DrisError& e) {
            malformed(std::string("hit.path: ") + e.what());
        }
    }
    h.score = get_double(j.at("score"), "hit.score");
    const json& tw = j.at("term_weights");
    if (!tw.is_object()) malformed("hit.term_weights must be an object");
    for (auto it = tw.begin(); it != tw.end(); ++it)
        h.term_weights[it.key()] = get_double(it.value(), "hit.term_weights value");
    return h;
}

CollectionDescription parse_description(const json& j) {
    check_keys(j, {"as_of", "collection", "live_count", "term_df"}, "description");
    CollectionDescription d;
    d.as_of = get_u64(j, "as_of", "description");
    d.collection = get_domain(j, "collection", "description");
    d.live_count = get_u64(j, "live_count", "description");
    const json& df = j.at("term_df");
    if (!df.is_object()) malformed("description.term_df must be an object");
    for (auto it = df.begin(); it != df.end(); ++it) {
        if (!it.value().is_number_unsigned()) malformed("description.term_df values must be unsigned integers");
        d.term_df[it.key()] = it.value().get<std::uint64_t>();
    }
    return d;
}

}  // namespace detail

namespace {

using namespace detail;

Payload parse_payload(MsgType type, const json& j) {
    switch (type) {
        case MsgType::SearchRequest: {
            check_keys(j, {"k", "terms"}, "search_request");
            SearchRequestPayload p;
            std::uint64_t k = get_u64(j, "k", "search_request");
            if (k > UINT32_MAX) malformed("search_request.k out of range");
            p.k = static_cast<std::uint32_t>(k);
            const json& terms = j.at("terms");
            if (!terms.is_array()) malformed("search_request.terms must be an array");
            for (const json& t : terms) {
                if (!t.is_string()) malformed("search_request.terms entries must be strings");
                p.terms.push_back(t.get<std::string>());
            }
            return p;
        }
        case MsgType::SearchResponse: {
            check_keys(j, {"degraded", "hits"}, "search_response");
            SearchResponsePayload p;
            p.degraded = get_bool(j, "degraded", "search_response");
            const json& hits = j.at("hits");
            if (!hits.is_array()) malformed("search_response.hits must be an array");
            for (const json& h : hits) p.hits.push_back(parse_hit(h));
            return p;
        }
        case MsgType::HarvestRequest: {
            check_keys(j, {"from_seq", "token"}, "harvest_request");
            HarvestRequestPayload p;
            p.from_seq = get_u64(j, "from_seq", "harvest_request");
            p.token = get_string(j, "token", "harvest_request");
            return p;
        }
        case MsgType::HarvestResponse: {
            check_keys(j, {"high_seq", "next_token", "records"}, "harvest_response");
            HarvestResponsePayload p;
            p.high_seq = get_u64(j, "high_seq", "harvest_response");
            p.next_token = get_string(j, "next_token", "harvest_response");
            const json& records = j.at("records");
            if (!records.is_array()) malformed("harvest_response.records must be an array");
            for (const json& r : records) p.records.push_back(parse_record(r));
            return p;
        }
        case MsgType::RegisterDescription: {
            check_keys(j, {"description"}, "register_description");
            return RegisterDescriptionPayload{parse_description(j.at("description"))};
        }
        case MsgType::Ack: {
            check_keys(j, {}, "ack");
            return AckPayload{};
        }
        case MsgType::Error: {
            check_keys(j, {"code", "message"}, "error");
            return ErrorPayload{get_string(j, "code", "error"), get_string(j, "message", "error")};
        }
    }
    malformed("unreachable payload type");
}

}  // namespace

std::string encode_record(const MetadataRecord& r) {
    JsonWriter w;
    write_record(w, r);
    return w.take();
}

std::string encode_hit(const ScoredHit& h) {
    JsonWriter w;
    write_hit(w, h);
    return w.take();
}

std::string encode_description(const CollectionDescription& d) {
    JsonWriter w;
    write_description(w, d);
    return w.take();
}

std::string encode(const Envelope& e) {
    JsonWriter w;
    w.begin_object();
    w.key("msg_type").value(msg_type_name(e.msg_type));
    w.key("payload");
    write_payload(w, e.payload);
    w.key("recipient").value(e.recipient.str());
    w.key("request_id").value(e.request_id);
    w.key("sender").value(e.sender.str());
    w.key("v").value(kVersion);
    w.end_object();
    std::string out = w.take();
    out.push_back('\n');
    if (out.size() > kMaxMessageBytes)
        throw_error(ErrorCode::PayloadTooLarge,
                    "encoded message is " + std::to_string(out.size()) + " bytes, cap is " +
                        std::to_string(kMaxMessageBytes));
    return out;
}

Envelope decode(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw_error(ErrorCode::MalformedMessage, std::string("JSON parse failed at byte ") +
                                                     std::to_string(e.byte) + ": " + e.what());
    }
    detail::check_keys(j, {"msg_type", "payload", "recipient", "request_id", "sender", "v"}, "envelope");

    std::uint64_t v = detail::get_u64(j, "v", "envelope");
    if (v != kVersion)
        throw_error(ErrorCode::UnsupportedVersion, "version " + std::to_string(v) + " not supported");

    std::string type_name = detail::get_string(j, "msg_type", "envelope");
    MsgType type;
    if (type_name == "search_request") type = MsgType::SearchRequest;
    else if (type_name == "search_response") type = MsgType::SearchResponse;
    else if (type_name == "harvest_request") type = MsgType::HarvestRequest;
    else if (type_name == "harvest_response") type = MsgType::HarvestResponse;
    else if (type_name == "register_description") type = MsgType::RegisterDescription;
    else if (type_name == "ack") type = MsgType::Ack;
    else if (type_name == "error") type = MsgType::Error;
    else throw_error(ErrorCode::UnknownType, "unknown msg_type '" + type_name + "'");

    Envelope e;
    e.msg_type = type;
    e.sender = detail::get_domain(j, "sender", "envelope");
    e.recipient = detail::get_domain(j, "recipient", "envelope");
    e.request_id = detail::get_u64(j, "request_id", "envelope");
    e.payload = parse_payload(type, j.at("payload"));

    // Canonical-form check: only the exact encoder output is accepted.
    if (encode(e) != bytes)
        throw_error(ErrorCode::NonCanonical, "message is valid JSON but not in canonical form");
    return e;
}

}  // namespace dris::wire
