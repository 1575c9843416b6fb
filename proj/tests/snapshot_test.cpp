#include "dris/snapshot.hpp"

#include <doctest.h>

#include <functional>

#include "dris/errors.hpp"
#include "fixtures.hpp"

using namespace dris;
using fixtures::make_doc;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& f) {
    try {
        f();
    } catch (const DrisError& e) {
        return e.code() == code;
    }
    return false;
}

// A federation that has been through some churn: replacements, deletes,
// compaction, and a failed-child cursor, so the snapshot has something
// interesting to carry.
Federation worked_federation() {
    Federation f;
    f.register_node(DomainName::parse("cn"));
    f.register_node(DomainName::parse("edu.cn"));
    f.register_node(DomainName::parse("com.cn"));
    f.register_node(DomainName::parse("hust.edu.cn"));
    f.register_node(DomainName::parse("ibm.com.cn"));

    for (const Document& d : fixtures::three_docs()) f.ingest(d, seconds(d.modified));
    f.ingest(make_doc("ibm.com.cn/1", "ibm.com.cn", "cherry pie", 4), seconds(4));
    f.harvest_all(seconds(10));

    f.ingest(make_doc("d1", "hust.edu.cn", "apple cherry", 11), seconds(11));
    f.remove(DomainName::parse("hust.edu.cn"), "d3", seconds(12));
    f.harvest_all(seconds(20));
    f.org(DomainName::parse("hust.edu.cn")).compact_change_log();
    return f;
}

}  // namespace

TEST_CASE("snapshots are a byte-stable fixed point") {
    Federation f = worked_federation();
    std::string first = save_snapshot(f);

    Federation loaded = load_snapshot(first);
    std::string second = save_snapshot(loaded);
    CHECK(second == first);

    // And the loaded tree keeps behaving: load(save(load(x))) too.
    CHECK(save_snapshot(load_snapshot(second)) == first);
}

TEST_CASE("a loaded federation answers queries like the original") {
    Federation f = worked_federation();
    Federation loaded = load_snapshot(save_snapshot(f));

    for (const auto& terms : {std::vector<std::string>{"apple"},
                              std::vector<std::string>{"cherry"},
                              std::vector<std::string>{"apple", "cherry"}}) {
        Query q{terms, 10};
        auto got = loaded.federated(q, 0, MergeMode::GlobalStats);
        auto want = f.federated(q, 0, MergeMode::GlobalStats);
        REQUIRE(got.hits.size() == want.hits.size());
        for (std::size_t i = 0; i < want.hits.size(); ++i) {
            CHECK(got.hits[i].doc_id == want.hits[i].doc_id);
            CHECK(got.hits[i].score == want.hits[i].score);
            CHECK(got.hits[i].path == want.hits[i].path);
        }
    }
}

TEST_CASE("loaded state preserves compaction floors and cursors") {
    Federation f = worked_federation();
    const OrgNode& before = f.org(DomainName::parse("hust.edu.cn"));
    Federation loaded = load_snapshot(save_snapshot(f));
    OrgNode& after = loaded.org(DomainName::parse("hust.edu.cn"));

    CHECK(after.compact_floor() == before.compact_floor());
    CHECK(after.compact_floor() > 0);
    CHECK(after.change_log().size() == before.change_log().size());
    CHECK(after.docs().size() == before.docs().size());

    const HarvestNode& hub = loaded.hub(DomainName::parse("edu.cn"));
    auto cursor = hub.cursors().find(DomainName::parse("hust.edu.cn"));
    REQUIRE(cursor != hub.cursors().end());
    CHECK(cursor->second.last_seq > 0);
    CHECK(cursor->second.last_seq == before.max_seq());

    // Ingest keeps working after a reload, with sequence numbers continuing
    // where they left off.
    std::uint64_t seq = after.max_seq();
    CHECK(seq == before.max_seq());
    loaded.ingest(make_doc("d9", "hust.edu.cn", "durian", 30), seconds(30));
    CHECK(after.max_seq() == seq + 1);
    CHECK(after.change_log().rbegin()->second.doc_id == "d9");
}

TEST_CASE("garbage snapshots are rejected as malformed") {
    CHECK(throws_code(ErrorCode::MalformedMessage, [] { load_snapshot("not json"); }));
    CHECK(throws_code(ErrorCode::MalformedMessage, [] { load_snapshot("[1,2]"); }));
    CHECK(throws_code(ErrorCode::MalformedMessage, [] { load_snapshot("{\"v\":1}"); }));

    // Flipping one byte of a valid snapshot must not slip through.
    std::string text = save_snapshot(worked_federation());
    std::size_t at = text.find("\"docs\"");
    REQUIRE(at != std::string::npos);
    text[at + 1] = 'x';
    CHECK_THROWS_AS(load_snapshot(text), DrisError);
}
