#include "dris/federation.hpp"

#include <doctest.h>

#include <functional>

#include "dris/corpus.hpp"
#include "dris/errors.hpp"
#include "dris/oracle.hpp"
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

Federation three_doc_federation() {
    Federation f;
    f.register_node(DomainName::parse("cn"));
    f.register_node(DomainName::parse("edu.cn"));
    f.register_node(DomainName::parse("hust.edu.cn"));
    for (const Document& d : fixtures::three_docs()) f.ingest(d, seconds(d.modified));
    f.harvest_all(seconds(10));
    return f;
}

}  // namespace

TEST_CASE("federation registration mirrors the simulator's guard rails") {
    Federation f;
    CHECK(throws_code(ErrorCode::OrphanDomain,
                      [&] { f.register_node(DomainName::parse("edu.cn")); }));
    f.register_node(DomainName::parse("cn"));
    CHECK(throws_code(ErrorCode::DuplicateDomain,
                      [&] { f.register_node(DomainName::parse("cn")); }));
    CHECK(throws_code(ErrorCode::RoleMismatch,
                      [&] { f.register_node(DomainName::parse("edu.cn"), Level::Org); }));
    f.register_node(DomainName::parse("edu.cn"));
    f.register_node(DomainName::parse("hust.edu.cn"));
    CHECK(f.has_node(DomainName::parse("hust.edu.cn")));
    CHECK(f.registration_order().size() == 3);

    CHECK(throws_code(ErrorCode::UnknownOwner,
                      [&] { f.ingest(make_doc("d1", "pku.edu.cn", "apple", 0), 0); }));
}

TEST_CASE("a harvested federation answers the canonical query") {
    Federation f = three_doc_federation();

    RootBroker::SearchResult result = f.federated(Query{{"apple"}, 10}, 0, MergeMode::GlobalStats);
    CHECK_FALSE(result.degraded);
    REQUIRE(result.hits.size() == 2);
    CHECK(result.hits[0].doc_id == "d2");
    CHECK(result.hits[0].score == 2 * fixtures::kLnTwoPointFive * fixtures::kLnTwoPointFive);
    CHECK(result.hits[1].doc_id == "d1");
    CHECK(result.hits[1].score == fixtures::kLnTwoPointFive * fixtures::kLnTwoPointFive);

    // The full path from root to owner comes back with each hit.
    std::vector<std::string> path;
    for (const auto& d : result.hits[0].path) path.push_back(d.str());
    CHECK(path == std::vector<std::string>{"cn", "edu.cn", "hust.edu.cn"});
}

TEST_CASE("federated answers match the metadata oracle bitwise") {
    CorpusSpec spec;
    spec.seed = 9;
    spec.org_docs = {{DomainName::parse("hust.edu.cn"), 40},
                     {DomainName::parse("pku.edu.cn"), 30},
                     {DomainName::parse("ibm.com.cn"), 30}};
    spec.vocabulary = 150;
    spec.terms_per_doc_min = 10;
    spec.terms_per_doc_max = 30;
    std::vector<Document> docs = generate_corpus(spec);

    Federation f;
    std::vector<DomainName> owners;
    for (const auto& [owner, count] : spec.org_docs) owners.push_back(owner);
    for (const DomainName& d : derive_topology(owners)) f.register_node(d);
    for (const Document& d : docs) f.ingest(d, seconds(d.modified));
    f.harvest_all(seconds(1000));

    GlobalOracle oracle = GlobalOracle::metadata(f.current_metadata());
    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        Query q;
        q.terms.push_back("w" + std::to_string(rng.next_in(0, 149)));
        if (rng.next_bernoulli(0.5)) q.terms.push_back("w" + std::to_string(rng.next_in(0, 149)));
        q.k = kMaxQueryK;

        RootBroker::SearchResult got = f.federated(q, 0, MergeMode::GlobalStats);
        std::vector<ScoredHit> want = oracle.search(q);
        CHECK_FALSE(got.degraded);
        REQUIRE(got.hits.size() == want.size());
        for (std::size_t h = 0; h < want.size(); ++h) {
            CHECK(got.hits[h].doc_id == want[h].doc_id);
            CHECK(got.hits[h].score == want[h].score);
        }
    }
}

TEST_CASE("removals propagate on the next harvest") {
    Federation f = three_doc_federation();
    f.remove(DomainName::parse("hust.edu.cn"), "d2", seconds(20));

    // Not yet harvested: the union still serves the old record.
    CHECK(f.federated(Query{{"apple"}, 10}, 0, MergeMode::GlobalStats).hits.size() == 2);

    f.harvest_all(seconds(30));
    RootBroker::SearchResult result = f.federated(Query{{"apple"}, 10}, 0, MergeMode::GlobalStats);
    REQUIRE(result.hits.size() == 1);
    CHECK(result.hits[0].doc_id == "d1");

    CHECK(throws_code(ErrorCode::UnknownDoc,
                      [&] { f.remove(DomainName::parse("hust.edu.cn"), "nope", seconds(40)); }));
    CHECK(throws_code(ErrorCode::UnknownOwner,
                      [&] { f.remove(DomainName::parse("pku.edu.cn"), "d1", seconds(40)); }));
}

TEST_CASE("current metadata is live-only and ordered by doc_id") {
    Federation f = three_doc_federation();
    f.remove(DomainName::parse("hust.edu.cn"), "d1", seconds(20));

    std::vector<MetadataRecord> records = f.current_metadata();
    REQUIRE(records.size() == 2);
    CHECK(records[0].doc_id == "d2");
    CHECK(records[1].doc_id == "d3");
    for (const auto& r : records) CHECK_FALSE(r.deleted);
}

TEST_CASE("searching an empty federation reports the registry gap") {
    Federation f;
    f.register_node(DomainName::parse("cn"));
    CHECK(throws_code(ErrorCode::EmptyRegistry,
                      [&] { f.federated(Query{{"apple"}, 10}, 0, MergeMode::GlobalStats); }));
}
