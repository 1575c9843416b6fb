#include "dris/snapshot.hpp"

#include <json.hpp>

#include "dris/canonical_json.hpp"
#include "dris/errors.hpp"
#include "dris/wire.hpp"
#include "wire_detail.hpp"

namespace dris {

using nlohmann::json;
namespace wd = wire::detail;

namespace {

void write_org(JsonWriter& w, const OrgNode& org) {
    w.begin_object();
    w.key("compact_floor").value(org.compact_floor());
    w.key("docs").begin_object();
    for (const auto& [doc_id, doc] : org.docs()) {
        w.key(doc_id).begin_object();
        w.key("length").value(std::uint64_t{doc.length});
        w.key("modified").value(doc.modified);
        w.key("term_counts").begin_object();
        for (const auto& [term, tf] : doc.term_counts) w.key(term).value(std::uint64_t{tf});
        w.end_object();
        w.key("title").value(doc.title);
        w.key("url").value(doc.url);
        w.end_object();
    }
    w.end_object();
    w.key("log").begin_array();
    for (const auto& [seq, entry] : org.change_log()) {
        w.begin_object();
        w.key("at").value(entry.at);
        w.key("doc_id").value(entry.doc_id);
        w.key("op").value(entry.op == ChangeOp::Upsert ? "upsert" : "delete");
        w.key("seq_no").value(entry.seq_no);
        w.end_object();
    }
    w.end_array();
    w.key("next_seq").value(org.max_seq() + 1);
    w.end_object();
}

void write_hub(JsonWriter& w, const HarvestNode& hub) {
    w.begin_object();
    w.key("cursors").begin_object();
    for (const auto& [child, cursor] : hub.cursors()) {
        w.key(child.str()).begin_object();
        w.key("failures").value(std::uint64_t{cursor.consecutive_failures});
        w.key("last_harvest").value(cursor.last_harvest_time);
        w.key("last_seq").value(cursor.last_seq);
        w.end_object();
    }
    w.end_object();
    w.key("records").begin_array();
    for (const auto& [doc_id, record] : hub.index().records()) w.raw(wire::encode_record(record));
    w.end_array();
    w.end_object();
}

}  // namespace

std::string save_snapshot(const Federation& f) {
    JsonWriter w;
    w.begin_object();
    w.key("hubs").begin_object();
    for (const auto& [domain, hub] : f.hubs()) {
        w.key(domain.str());
        write_hub(w, hub);
    }
    w.end_object();
    w.key("orgs").begin_object();
    for (const auto& [domain, org] : f.orgs()) {
        w.key(domain.str());
        write_org(w, org);
    }
    w.end_object();
    w.key("roots").begin_object();
    for (const auto& [domain, root] : f.roots()) {
        w.key(domain.str()).begin_object();
        w.key("registry").begin_array();
        for (const auto& collection : root.registry().registration_order())
            w.raw(wire::encode_description(root.registry().at(collection)));
        w.end_array();
        w.end_object();
    }
    w.end_object();
    w.key("topology").begin_array();
    for (const auto& domain : f.registration_order()) w.value(domain.str());
    w.end_array();
    w.end_object();
    std::string out = w.take();
    out.push_back('\n');
    return out;
}

Federation load_snapshot(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_error(ErrorCode::MalformedMessage, std::string("snapshot: ") + e.what());
    }
    wd::check_keys(j, {"hubs", "orgs", "roots", "topology"}, "snapshot");

    Federation f;
    const json& topology = j.at("topology");
    if (!topology.is_array()) throw_error(ErrorCode::MalformedMessage, "snapshot.topology must be an array");
    for (const json& name : topology) {
        if (!name.is_string()) throw_error(ErrorCode::MalformedMessage, "snapshot.topology entries must be strings");
        f.register_node(DomainName::parse(name.get<std::string>()));
    }

    const json& orgs = j.at("orgs");
    if (!orgs.is_object()) throw_error(ErrorCode::MalformedMessage, "snapshot.orgs must be an object");
    for (auto it = orgs.begin(); it != orgs.end(); ++it) {
        DomainName owner = DomainName::parse(it.key());
        const json& o = it.value();
        wd::check_keys(o, {"compact_floor", "docs", "log", "next_seq"}, "snapshot org");

        std::map<std::string, OrgNode::StoredDoc> docs;
        const json& jd = o.at("docs");
        if (!jd.is_object()) throw_error(ErrorCode::MalformedMessage, "snapshot org docs must be an object");
        for (auto d = jd.begin(); d != jd.end(); ++d) {
            const json& doc = d.value();
            wd::check_keys(doc, {"length", "modified", "term_counts", "title", "url"}, "snapshot doc");
            OrgNode::StoredDoc stored;
            stored.length = static_cast<std::uint32_t>(wd::get_u64(doc, "length", "snapshot doc"));
            stored.modified = wd::get_u64(doc, "modified", "snapshot doc");
            stored.title = wd::get_string(doc, "title", "snapshot doc");
            stored.url = wd::get_string(doc, "url", "snapshot doc");
            const json& tc = doc.at("term_counts");
            if (!tc.is_object()) throw_error(ErrorCode::MalformedMessage, "term_counts must be an object");
            for (auto t = tc.begin(); t != tc.end(); ++t) {
                if (!t.value().is_number_unsigned())
                    throw_error(ErrorCode::MalformedMessage, "term counts must be unsigned integers");
                stored.term_counts[t.key()] = t.value().get<std::uint32_t>();
            }
            docs.emplace(d.key(), std::move(stored));
        }

        std::vector<ChangeLogEntry> log;
        const json& jl = o.at("log");
        if (!jl.is_array()) throw_error(ErrorCode::MalformedMessage, "snapshot org log must be an array");
        for (const json& e : jl) {
            wd::check_keys(e, {"at", "doc_id", "op", "seq_no"}, "snapshot log entry");
            ChangeLogEntry entry;
            entry.at = wd::get_u64(e, "at", "snapshot log entry");
            entry.doc_id = wd::get_string(e, "doc_id", "snapshot log entry");
            std::string op = wd::get_string(e, "op", "snapshot log entry");
            if (op == "upsert") entry.op = ChangeOp::Upsert;
            else if (op == "delete") entry.op = ChangeOp::Delete;
            else throw_error(ErrorCode::MalformedMessage, "unknown log op '" + op + "'");
            entry.seq_no = wd::get_u64(e, "seq_no", "snapshot log entry");
            log.push_back(std::move(entry));
        }

        f.org(owner) = OrgNode::restore(owner, OrgConfig{}, std::move(docs), std::move(log),
                                        wd::get_u64(o, "next_seq", "snapshot org"),
                                        wd::get_u64(o, "compact_floor", "snapshot org"));
    }

    const json& hubs = j.at("hubs");
    if (!hubs.is_object()) throw_error(ErrorCode::MalformedMessage, "snapshot.hubs must be an object");
    for (auto it = hubs.begin(); it != hubs.end(); ++it) {
        HarvestNode& hub = f.hub(DomainName::parse(it.key()));
        const json& h = it.value();
        wd::check_keys(h, {"cursors", "records"}, "snapshot hub");

        const json& records = h.at("records");
        if (!records.is_array()) throw_error(ErrorCode::MalformedMessage, "hub records must be an array");
        for (const json& r : records) hub.mutable_index().apply(wd::parse_record(r));

        const json& cursors = h.at("cursors");
        if (!cursors.is_object()) throw_error(ErrorCode::MalformedMessage, "hub cursors must be an object");
        for (auto c = cursors.begin(); c != cursors.end(); ++c) {
            wd::check_keys(c.value(), {"failures", "last_harvest", "last_seq"}, "snapshot cursor");
            ChildCursor cursor;
            cursor.consecutive_failures =
                static_cast<std::uint32_t>(wd::get_u64(c.value(), "failures", "snapshot cursor"));
            cursor.last_harvest_time = wd::get_u64(c.value(), "last_harvest", "snapshot cursor");
            cursor.last_seq = wd::get_u64(c.value(), "last_seq", "snapshot cursor");
            hub.restore_cursor(DomainName::parse(c.key()), cursor);
        }
    }

    const json& roots = j.at("roots");
    if (!roots.is_object()) throw_error(ErrorCode::MalformedMessage, "snapshot.roots must be an object");
    for (auto it = roots.begin(); it != roots.end(); ++it) {
        RootBroker& root = f.root(DomainName::parse(it.key()));
        wd::check_keys(it.value(), {"registry"}, "snapshot root");
        const json& registry = it.value().at("registry");
        if (!registry.is_array()) throw_error(ErrorCode::MalformedMessage, "root registry must be an array");
        for (const json& d : registry) root.register_collection(wd::parse_description(d));
    }

    return f;
}

}  // namespace dris
