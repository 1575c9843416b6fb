#include <cstdint>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dris/corpus.hpp"
#include "dris/harvest_node.hpp"
#include "dris/org_node.hpp"
#include "dris/root_broker.hpp"
#include "dris/wire.hpp"

namespace {

using namespace dris;

std::vector<Document> bench_docs(std::uint64_t count) {
    CorpusSpec spec;
    spec.seed = 1;
    spec.org_docs = {{DomainName::parse("bench.edu.cn"), count}};
    spec.vocabulary = 5000;
    spec.terms_per_doc_min = 30;
    spec.terms_per_doc_max = 120;
    return generate_corpus(spec);
}

OrgNode built_org(std::uint64_t count) {
    OrgNode org(DomainName::parse("bench.edu.cn"));
    for (const Document& d : bench_docs(count)) org.upsert(d, seconds(d.modified));
    return org;
}

HarvestNode built_hub(std::uint64_t count) {
    HarvestNode hub(DomainName::parse("edu.cn"));
    for (const MetadataRecord& r : built_org(count).metadata_snapshot()) hub.mutable_index().apply(r);
    return hub;
}

void org_index_build(benchmark::State& state) {
    const auto docs = bench_docs(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        OrgNode org(DomainName::parse("bench.edu.cn"));
        for (const Document& d : docs) org.upsert(d, seconds(d.modified));
        benchmark::DoNotOptimize(org.doc_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(org_index_build)->Arg(100)->Arg(1000);

void org_search(benchmark::State& state) {
    const OrgNode org = built_org(static_cast<std::uint64_t>(state.range(0)));
    const Query q{{"w3", "w40", "w500"}, 10};
    for (auto _ : state) benchmark::DoNotOptimize(org.search(q));
}
BENCHMARK(org_search)->Arg(1000)->Arg(10000);

void extract_metadata(benchmark::State& state) {
    const OrgNode org = built_org(1000);
    const std::string doc_id = org.docs().begin()->first;
    for (auto _ : state) benchmark::DoNotOptimize(org.extract_metadata(doc_id, 1));
}
BENCHMARK(extract_metadata);

void union_apply(benchmark::State& state) {
    const auto records = built_org(static_cast<std::uint64_t>(state.range(0))).metadata_snapshot();
    for (auto _ : state) {
        UnionIndex idx;
        for (const MetadataRecord& r : records) idx.apply(r);
        benchmark::DoNotOptimize(idx.live_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(union_apply)->Arg(100)->Arg(1000);

void union_search(benchmark::State& state) {
    const HarvestNode hub = built_hub(static_cast<std::uint64_t>(state.range(0)));
    const Query q{{"w3", "w40", "w500"}, 10};
    for (auto _ : state) benchmark::DoNotOptimize(hub.search(q));
}
BENCHMARK(union_search)->Arg(1000)->Arg(10000);

void merge_two_collections(benchmark::State& state) {
    const HarvestNode a = built_hub(5000);
    const Query q{{"w3", "w40"}, 10};
    std::vector<std::vector<ScoredHit>> lists = {a.search(q, 0), a.search(q, 0)};
    FederationStats stats;
    stats.doc_count = 2 * a.index().live_count();
    for (const auto& [term, df] : a.index().term_df()) stats.term_df[term] = 2 * df;
    for (auto _ : state) benchmark::DoNotOptimize(merge_results(lists, q, 10, MergeMode::GlobalStats, stats));
}
BENCHMARK(merge_two_collections);

void wire_encode_page(benchmark::State& state) {
    wire::Envelope env;
    env.msg_type = wire::MsgType::HarvestResponse;
    env.sender = DomainName::parse("bench.edu.cn");
    env.recipient = DomainName::parse("edu.cn");
    env.request_id = 7;
    wire::HarvestResponsePayload payload;
    payload.records = built_org(100).metadata_snapshot();
    payload.high_seq = 100;
    env.payload = payload;
    for (auto _ : state) benchmark::DoNotOptimize(wire::encode(env));
    state.SetBytesProcessed(state.iterations() * wire::encode(env).size());
}
BENCHMARK(wire_encode_page);

void wire_decode_page(benchmark::State& state) {
    wire::Envelope env;
    env.msg_type = wire::MsgType::HarvestResponse;
    env.sender = DomainName::parse("bench.edu.cn");
    env.recipient = DomainName::parse("edu.cn");
    env.request_id = 7;
    wire::HarvestResponsePayload payload;
    payload.records = built_org(100).metadata_snapshot();
    payload.high_seq = 100;
    env.payload = payload;
    const std::string bytes = wire::encode(env);
    for (auto _ : state) benchmark::DoNotOptimize(wire::decode(bytes));
    state.SetBytesProcessed(state.iterations() * bytes.size());
}
BENCHMARK(wire_decode_page);

void select_from_registry(benchmark::State& state) {
    CollectionRegistry reg;
    CollectionDescription desc = built_hub(1000).description(seconds(1));
    for (int i = 0; i < 100; ++i) {
        desc.collection = DomainName::parse("s" + std::to_string(i) + ".cn");
        reg.register_collection(desc);
    }
    const Query q{{"w3", "w40", "w500"}, 10};
    for (auto _ : state) benchmark::DoNotOptimize(select_collections(reg, q, 5));
}
BENCHMARK(select_from_registry);

}  // namespace

BENCHMARK_MAIN();
