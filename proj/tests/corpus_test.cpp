#include "dris/corpus.hpp"

#include <doctest.h>

#include <functional>
#include <set>
#include <string>

#include "dris/errors.hpp"
#include "fixtures.hpp"

using namespace dris;

namespace {

bool fails_with(const std::function<void()>& f, const std::string& fragment) {
    try {
        f();
    } catch (const DrisError& e) {
        return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("a corpus survives write/parse round trips byte for byte") {
    std::vector<Document> docs = fixtures::three_docs();
    std::string text = write_corpus(docs);
    std::vector<Document> back = parse_corpus(text);
    REQUIRE(back.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(back[i].doc_id == docs[i].doc_id);
        CHECK(back[i].owner == docs[i].owner);
        CHECK(back[i].body == docs[i].body);
        CHECK(back[i].title == docs[i].title);
        CHECK(back[i].url == docs[i].url);
        CHECK(back[i].modified == docs[i].modified);
    }
    CHECK(write_corpus(back) == text);
}

TEST_CASE("corpus parse errors point at the offending line") {
    std::string good = write_corpus({fixtures::three_docs()[0]});

    CHECK(fails_with([&] { parse_corpus(good + "not json\n"); }, "corpus line 2"));
    // Blank lines are skipped but still counted.
    CHECK(fails_with([&] { parse_corpus(good + "\nnot json\n"); }, "corpus line 3"));
    CHECK(fails_with([] { parse_corpus("{\"body\":\"x\"}\n"); }, "missing field 'doc_id'"));
    CHECK(fails_with(
        [] {
            parse_corpus(
                "{\"body\":\"x\",\"doc_id\":\"d\",\"extra\":1,\"modified\":0,"
                "\"owner\":\"a.edu.cn\",\"title\":\"\",\"url\":\"\"}\n");
        },
        "unknown field 'extra'"));
    CHECK(fails_with(
        [] {
            parse_corpus(
                "{\"body\":\"x\",\"doc_id\":\"d\",\"modified\":-1,"
                "\"owner\":\"a.edu.cn\",\"title\":\"\",\"url\":\"\"}\n");
        },
        "'modified' must be an unsigned integer"));
    CHECK(fails_with(
        [] {
            parse_corpus(
                "{\"body\":\"x\",\"doc_id\":\"d\",\"modified\":0,"
                "\"owner\":\"not a domain\",\"title\":\"\",\"url\":\"\"}\n");
        },
        "corpus line 1"));
}

TEST_CASE("topology files list parents before children") {
    std::vector<DomainName> nodes = {
        DomainName::parse("cn"),
        DomainName::parse("edu.cn"),
        DomainName::parse("hust.edu.cn"),
    };
    std::string text = write_topology(nodes);
    CHECK(text == "{\"nodes\":[\"cn\",\"edu.cn\",\"hust.edu.cn\"]}\n");
    CHECK(parse_topology(text) == nodes);

    CHECK(fails_with([] { parse_topology("not json"); }, "topology"));
    CHECK(fails_with([] { parse_topology("{\"x\":1}"); }, "missing field 'nodes'"));
    CHECK(fails_with([] { parse_topology("{\"nodes\":3}"); }, "'nodes' must be an array"));
    CHECK_THROWS_AS(parse_topology("{\"nodes\":[\"bad..name\"]}"), DrisError);
}

TEST_CASE("derived topologies put sorted ancestors first, orgs as given") {
    std::vector<DomainName> orgs = {
        DomainName::parse("hust.edu.cn"),
        DomainName::parse("ibm.com.cn"),
        DomainName::parse("pku.edu.cn"),
    };
    std::vector<DomainName> all = derive_topology(orgs);
    std::vector<std::string> names;
    for (const auto& d : all) names.push_back(d.str());
    CHECK(names == std::vector<std::string>{"cn", "com.cn", "edu.cn", "hust.edu.cn",
                                            "ibm.com.cn", "pku.edu.cn"});

    // Deep orgs contribute their second-level ancestor, not themselves.
    std::vector<DomainName> deep = {DomainName::parse("cs.hust.edu.cn")};
    names.clear();
    for (const auto& d : derive_topology(deep)) names.push_back(d.str());
    CHECK(names == std::vector<std::string>{"cn", "edu.cn", "cs.hust.edu.cn"});

    CHECK(fails_with([] { derive_topology({DomainName::parse("edu.cn")}); },
                     "too shallow to be an org"));
}

TEST_CASE("scenario stimuli round-trip with whole-second timestamps") {
    std::string text =
        "{\"doc\":{\"body\":\"apple banana\",\"doc_id\":\"d1\",\"modified\":1,"
        "\"owner\":\"hust.edu.cn\",\"title\":\"d1\",\"url\":\"http://x/1\"},"
        "\"op\":\"upsert\",\"t\":5}\n"
        "{\"doc_id\":\"d1\",\"op\":\"delete\",\"owner\":\"hust.edu.cn\",\"t\":9}\n"
        "{\"k\":3,\"op\":\"query\",\"t\":12,\"terms\":[\"apple\",\"banana\"]}\n";

    std::vector<Stimulus> stimuli = parse_scenario(text);
    REQUIRE(stimuli.size() == 3);
    CHECK(stimuli[0].op == Stimulus::Op::Upsert);
    CHECK(stimuli[0].t == 5 * kMicrosPerSecond);
    CHECK(stimuli[0].doc.doc_id == "d1");
    CHECK(stimuli[1].op == Stimulus::Op::Delete);
    CHECK(stimuli[1].t == 9 * kMicrosPerSecond);
    CHECK(stimuli[1].owner.str() == "hust.edu.cn");
    CHECK(stimuli[2].op == Stimulus::Op::Query);
    CHECK(stimuli[2].t == 12 * kMicrosPerSecond);
    CHECK(stimuli[2].query.k == 3);
    CHECK(stimuli[2].query.terms == std::vector<std::string>{"apple", "banana"});

    CHECK(write_scenario(stimuli) == text);
}

TEST_CASE("scenario parse errors are specific") {
    CHECK(fails_with([] { parse_scenario("{\"t\":1}\n"); }, "missing string field 'op'"));
    CHECK(fails_with([] { parse_scenario("{\"op\":\"zap\",\"t\":1}\n"); }, "unknown op 'zap'"));
    CHECK(fails_with([] { parse_scenario("{\"k\":0,\"op\":\"query\",\"t\":1,\"terms\":[\"x\"]}\n"); },
                     "k out of range"));
    CHECK(fails_with([] { parse_scenario("{\"k\":1001,\"op\":\"query\",\"t\":1,\"terms\":[\"x\"]}\n"); },
                     "k out of range"));
    CHECK(fails_with([] { parse_scenario("{\"k\":1,\"op\":\"query\",\"terms\":[\"x\"]}\n"); },
                     "missing field 't'"));
    CHECK(fails_with(
        [] {
            parse_scenario(
                "{\"k\":1,\"op\":\"query\",\"t\":1,\"terms\":[\"x\"]}\n"
                "{\"doc_id\":\"d\",\"op\":\"delete\",\"t\":2}\n");
        },
        "scenario line 2"));
}

TEST_CASE("the corpus generator is deterministic and plants unique markers") {
    CHECK(unique_marker(3) == "uq3");

    CorpusSpec spec;
    spec.seed = 42;
    spec.org_docs = {{DomainName::parse("hust.edu.cn"), 3},
                     {DomainName::parse("ibm.com.cn"), 2}};
    spec.vocabulary = 50;
    spec.terms_per_doc_min = 5;
    spec.terms_per_doc_max = 10;

    std::vector<Document> docs = generate_corpus(spec);
    REQUIRE(docs.size() == 5);
    CHECK(write_corpus(generate_corpus(spec)) == write_corpus(docs));

    CorpusSpec other = spec;
    other.seed = 43;
    CHECK(write_corpus(generate_corpus(other)) != write_corpus(docs));

    std::set<std::string> markers;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const Document& d = docs[i];
        CHECK(d.owner == spec.org_docs[i < 3 ? 0 : 1].first);
        CHECK(d.modified == i);

        std::vector<std::string> tokens = tokenize(d.body);
        REQUIRE(tokens.size() >= spec.terms_per_doc_min + 1);
        CHECK(tokens.size() <= spec.terms_per_doc_max + 1);
        CHECK(tokens.back() == unique_marker(i));
        markers.insert(tokens.back());
        for (std::size_t t = 0; t + 1 < tokens.size(); ++t) {
            CHECK(tokens[t][0] == 'w');
            CHECK(std::stoul(tokens[t].substr(1)) < spec.vocabulary);
        }
    }
    CHECK(markers.size() == docs.size());

    CHECK(docs[0].doc_id == "hust.edu.cn/0");
    CHECK(docs[3].doc_id == "ibm.com.cn/0");
    CHECK(docs[0].url == "http://hust.edu.cn/doc/0");

    CHECK(fails_with([&] {
        CorpusSpec bad = spec;
        bad.vocabulary = 0;
        generate_corpus(bad);
    }, "vocabulary"));
    CHECK(fails_with([&] {
        CorpusSpec bad = spec;
        bad.terms_per_doc_min = 11;
        generate_corpus(bad);
    }, "terms_per_doc"));
}
