#include "dris/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "dris/canonical_json.hpp"
#include "dris/errors.hpp"

namespace dris {

using nlohmann::json;

namespace {

[[noreturn]] void bad_line(const char* what_file, std::size_t line, const std::string& why) {
    throw_error(ErrorCode::InvalidArgument,
                std::string(what_file) + " line " + std::to_string(line) + ": " + why);
}

json parse_line(const char* what_file, std::size_t line, std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        bad_line(what_file, line, e.what());
    }
}

void need_fields(const char* what_file, std::size_t line, const json& obj,
                 std::initializer_list<const char*> fields) {
    if (!obj.is_object()) bad_line(what_file, line, "expected a JSON object");
    for (const char* f : fields)
        if (!obj.contains(f)) bad_line(what_file, line, std::string("missing field '") + f + "'");
    if (obj.size() != fields.size()) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* f : fields)
                if (it.key() == f) known = true;
            if (!known) bad_line(what_file, line, "unknown field '" + it.key() + "'");
        }
    }
}

std::string field_string(const char* what_file, std::size_t line, const json& obj, const char* f) {
    if (!obj.at(f).is_string()) bad_line(what_file, line, std::string("'") + f + "' must be a string");
    return obj.at(f).get<std::string>();
}

std::uint64_t field_u64(const char* what_file, std::size_t line, const json& obj, const char* f) {
    if (!obj.at(f).is_number_unsigned())
        bad_line(what_file, line, std::string("'") + f + "' must be an unsigned integer");
    return obj.at(f).get<std::uint64_t>();
}

DomainName field_domain(const char* what_file, std::size_t line, const json& obj, const char* f) {
    try {
        return DomainName::parse(field_string(what_file, line, obj, f));
    } catch (const DrisError& e) {
        bad_line(what_file, line, e.what());
    }
}

Document parse_document(const char* what_file, std::size_t line, const json& j) {
    need_fields(what_file, line, j, {"body", "doc_id", "modified", "owner", "title", "url"});
    Document d;
    d.body = field_string(what_file, line, j, "body");
    d.doc_id = field_string(what_file, line, j, "doc_id");
    d.modified = field_u64(what_file, line, j, "modified");
    d.owner = field_domain(what_file, line, j, "owner");
    d.title = field_string(what_file, line, j, "title");
    d.url = field_string(what_file, line, j, "url");
    return d;
}

void write_document(JsonWriter& w, const Document& d) {
    w.begin_object();
    w.key("body").value(d.body);
    w.key("doc_id").value(d.doc_id);
    w.key("modified").value(d.modified);
    w.key("owner").value(d.owner.str());
    w.key("title").value(d.title);
    w.key("url").value(d.url);
    w.end_object();
}

// Calls fn(line_number, line) for each non-empty line.
template <typename Fn>
void for_lines(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty()) fn(line_no, line);
        pos = eol + 1;
    }
}

}  // namespace

std::vector<Document> parse_corpus(std::string_view text) {
    std::vector<Document> docs;
    for_lines(text, [&](std::size_t line_no, std::string_view line) {
        docs.push_back(parse_document("corpus", line_no, parse_line("corpus", line_no, line)));
    });
    return docs;
}

std::string write_corpus(const std::vector<Document>& docs) {
    std::string out;
    for (const auto& d : docs) {
        JsonWriter w;
        write_document(w, d);
        out += w.take();
        out += '\n';
    }
    return out;
}

std::vector<DomainName> parse_topology(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_error(ErrorCode::InvalidArgument, std::string("topology: ") + e.what());
    }
    need_fields("topology", 1, j, {"nodes"});
    const json& nodes = j.at("nodes");
    if (!nodes.is_array()) throw_error(ErrorCode::InvalidArgument, "topology: 'nodes' must be an array");
    std::vector<DomainName> out;
    for (const json& n : nodes) {
        if (!n.is_string()) throw_error(ErrorCode::InvalidArgument, "topology: node names must be strings");
        out.push_back(DomainName::parse(n.get<std::string>()));
    }
    return out;
}

std::string write_topology(const std::vector<DomainName>& nodes) {
    JsonWriter w;
    w.begin_object();
    w.key("nodes").begin_array();
    for (const auto& n : nodes) w.value(n.str());
    w.end_array();
    w.end_object();
    std::string out = w.take();
    out.push_back('\n');
    return out;
}

std::vector<DomainName> derive_topology(const std::vector<DomainName>& orgs) {
    std::set<DomainName> roots, subnets;
    for (const auto& org : orgs) {
        if (org.depth() < 3)
            throw_error(ErrorCode::InvalidArgument, org.str() + " is too shallow to be an org");
        DomainName d = org;
        while (d.depth() > 2) d = d.parent();
        subnets.insert(d);
        roots.insert(d.parent());
    }
    std::vector<DomainName> out(roots.begin(), roots.end());
    out.insert(out.end(), subnets.begin(), subnets.end());
    out.insert(out.end(), orgs.begin(), orgs.end());
    return out;
}

std::vector<Stimulus> parse_scenario(std::string_view text) {
    std::vector<Stimulus> out;
    for_lines(text, [&](std::size_t line_no, std::string_view line) {
        json j = parse_line("scenario", line_no, line);
        if (!j.is_object() || !j.contains("op") || !j.at("op").is_string())
            bad_line("scenario", line_no, "missing string field 'op'");
        std::string op = j.at("op").get<std::string>();

        Stimulus s;
        if (op == "upsert") {
            need_fields("scenario", line_no, j, {"doc", "op", "t"});
            s.op = Stimulus::Op::Upsert;
            s.doc = parse_document("scenario", line_no, j.at("doc"));
        } else if (op == "delete") {
            need_fields("scenario", line_no, j, {"doc_id", "op", "owner", "t"});
            s.op = Stimulus::Op::Delete;
            s.doc_id = field_string("scenario", line_no, j, "doc_id");
            s.owner = field_domain("scenario", line_no, j, "owner");
        } else if (op == "query") {
            need_fields("scenario", line_no, j, {"k", "op", "t", "terms"});
            s.op = Stimulus::Op::Query;
            std::uint64_t k = field_u64("scenario", line_no, j, "k");
            if (k == 0 || k > kMaxQueryK) bad_line("scenario", line_no, "k out of range");
            s.query.k = static_cast<std::uint32_t>(k);
            const json& terms = j.at("terms");
            if (!terms.is_array()) bad_line("scenario", line_no, "'terms' must be an array");
            for (const json& t : terms) {
                if (!t.is_string()) bad_line("scenario", line_no, "terms must be strings");
                s.query.terms.push_back(t.get<std::string>());
            }
        } else {
            bad_line("scenario", line_no, "unknown op '" + op + "'");
        }
        s.t = field_u64("scenario", line_no, j, "t") * kMicrosPerSecond;
        out.push_back(std::move(s));
    });
    return out;
}

std::string write_scenario(const std::vector<Stimulus>& stimuli) {
    std::string out;
    for (const auto& s : stimuli) {
        JsonWriter w;
        w.begin_object();
        switch (s.op) {
            case Stimulus::Op::Upsert:
                w.key("doc");
                write_document(w, s.doc);
                w.key("op").value("upsert");
                break;
            case Stimulus::Op::Delete:
                w.key("doc_id").value(s.doc_id);
                w.key("op").value("delete");
                w.key("owner").value(s.owner.str());
                break;
            case Stimulus::Op::Query:
                w.key("k").value(std::uint64_t{s.query.k});
                w.key("op").value("query");
                break;
        }
        w.key("t").value(s.t / kMicrosPerSecond);
        if (s.op == Stimulus::Op::Query) {
            w.key("terms").begin_array();
            for (const auto& t : s.query.terms) w.value(t);
            w.end_array();
        }
        w.end_object();
        out += w.take();
        out += '\n';
    }
    return out;
}

std::string unique_marker(std::uint64_t ordinal) { return "uq" + std::to_string(ordinal); }

namespace {

// Pseudo-words "w0".."wN" ranked by Zipf frequency: w0 is the most common.
std::string vocab_word(std::size_t rank) { return "w" + std::to_string(rank); }

}  // namespace

std::vector<Document> generate_corpus(const CorpusSpec& spec) {
    if (spec.vocabulary == 0) throw_error(ErrorCode::InvalidArgument, "vocabulary must be non-empty");
    if (spec.terms_per_doc_min == 0 || spec.terms_per_doc_min > spec.terms_per_doc_max)
        throw_error(ErrorCode::InvalidArgument, "bad terms_per_doc range");

    // Zipf CDF over word ranks.
    std::vector<double> cdf(spec.vocabulary);
    double total = 0.0;
    for (std::size_t r = 0; r < spec.vocabulary; ++r) {
        total += 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
        cdf[r] = total;
    }
    for (auto& c : cdf) c /= total;

    Rng rng(spec.seed);
    auto draw_word = [&]() {
        double u = rng.next_unit();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t rank = it == cdf.end() ? spec.vocabulary - 1 : static_cast<std::size_t>(it - cdf.begin());
        return vocab_word(rank);
    };

    std::vector<Document> docs;
    std::uint64_t ordinal = 0;
    for (const auto& [owner, count] : spec.org_docs) {
        for (std::uint64_t i = 0; i < count; ++i, ++ordinal) {
            Document d;
            d.owner = owner;
            d.doc_id = owner.str() + "/" + std::to_string(i);
            d.url = "http://" + owner.str() + "/doc/" + std::to_string(i);
            d.modified = ordinal;

            std::size_t n_terms = static_cast<std::size_t>(
                rng.next_in(spec.terms_per_doc_min, spec.terms_per_doc_max));
            std::string body;
            std::string first_word;
            for (std::size_t t = 0; t < n_terms; ++t) {
                std::string word = draw_word();
                if (t == 0) first_word = word;
                if (!body.empty()) body += ' ';
                body += word;
            }
            body += ' ';
            body += unique_marker(ordinal);
            d.body = std::move(body);
            d.title = first_word + " " + std::to_string(ordinal);
            docs.push_back(std::move(d));
        }
    }
    return docs;
}

}  // namespace dris
