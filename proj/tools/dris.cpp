#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dris/canonical_json.hpp"
#include "dris/corpus.hpp"
#include "dris/errors.hpp"
#include "dris/federation.hpp"
#include "dris/oracle.hpp"
#include "dris/report.hpp"
#include "dris/snapshot.hpp"

namespace {

using namespace dris;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw_error(ErrorCode::IoError, "cannot read " + path);
    return buf.str();
}

void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
}

std::string join_path(const std::vector<DomainName>& path) {
    if (path.empty()) return "-";
    std::string out;
    for (const DomainName& d : path) {
        if (!out.empty()) out += " > ";
        out += d.str();
    }
    return out;
}

void print_hits(const std::vector<ScoredHit>& hits) {
    if (hits.empty()) {
        std::cout << "no results\n";
        return;
    }
    std::size_t rank = 1;
    for (const ScoredHit& h : hits) {
        std::cout << rank++ << ". " << format_double(h.score) << "  " << h.doc_id << "  owner="
                  << h.owner.str() << "  path=" << join_path(h.path) << "\n";
    }
}

struct QueryFlags {
    std::vector<std::string> terms;
    std::uint32_t k = 10;
    std::uint32_t width = 0;
    std::string mode = "global";

    Query query() const { return Query{terms, k}; }
    MergeMode merge_mode() const { return mode == "raw" ? MergeMode::Raw : MergeMode::GlobalStats; }
};

void add_query_flags(CLI::App& cmd, QueryFlags& qf) {
    cmd.add_option("terms", qf.terms, "query terms")->required();
    cmd.add_option("-k,--k", qf.k, "results to return (1..1000)");
    cmd.add_option("--width", qf.width, "collections to fan out to, 0 = all");
    cmd.add_option("--merge-mode", qf.mode, "result merging strategy")
        ->check(CLI::IsMember({"raw", "global"}));
}

int cmd_ingest(const std::string& corpus_path, const std::string& topology_path,
               const std::string& snapshot_out) {
    std::vector<Document> docs = parse_corpus(read_file(corpus_path));
    std::vector<DomainName> nodes = parse_topology(read_file(topology_path));

    Federation f;
    for (const DomainName& d : nodes) f.register_node(d);

    std::string unknown;
    std::size_t unknown_count = 0;
    for (const Document& doc : docs) {
        if (f.orgs().count(doc.owner)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += doc.doc_id;
        ++unknown_count;
    }
    if (unknown_count > 0)
        throw_error(ErrorCode::UnknownOwner, std::to_string(unknown_count) +
                                                 " document(s) without a registered owner: " + unknown);

    for (const Document& doc : docs) f.ingest(doc, seconds(doc.modified));

    for (const auto& [domain, org] : f.orgs())
        std::cout << domain.str() << "  docs=" << org.doc_count() << "\n";
    std::cout << "loaded " << docs.size() << " document(s) into " << f.orgs().size()
              << " org node(s)\n";
    if (!snapshot_out.empty()) write_file(snapshot_out, save_snapshot(f));
    return 0;
}

struct RunFlags {
    std::string topology_path;
    std::string scenario_path;
    SimConfig config;
    std::uint32_t width = 0;
    std::string mode = "global";
    std::string latency = "5:50";
    std::string report_path;
    std::string trace_path;
    std::string snapshot_out;
};

void apply_latency(const std::string& text, SimConfig& config) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw_error(ErrorCode::InvalidArgument, "--latency wants MIN:MAX in ms, got " + text);
    try {
        config.latency_min_ms = static_cast<std::uint32_t>(std::stoul(text.substr(0, colon)));
        config.latency_max_ms = static_cast<std::uint32_t>(std::stoul(text.substr(colon + 1)));
    } catch (const std::exception&) {
        throw_error(ErrorCode::InvalidArgument, "--latency wants MIN:MAX in ms, got " + text);
    }
}

int cmd_run(const RunFlags& flags) {
    RunInputs in;
    in.topology_text = read_file(flags.topology_path);
    in.scenario_text = read_file(flags.scenario_path);
    in.config = flags.config;
    apply_latency(flags.latency, in.config);
    in.width = flags.width;
    in.mode = flags.mode == "raw" ? MergeMode::Raw : MergeMode::GlobalStats;

    RunOutput out = execute_run(in);
    std::cout << report_table(out.report);

    if (!flags.report_path.empty()) write_file(flags.report_path, report_json(out.report));
    if (!flags.trace_path.empty()) {
        std::string lines;
        for (const TraceEvent& e : out.sim.trace().events()) lines += EventTrace::canonical_line(e);
        write_file(flags.trace_path, lines);
    }
    if (!flags.snapshot_out.empty()) write_file(flags.snapshot_out, save_snapshot(freeze(out.sim)));
    return 0;
}

int cmd_query(const std::string& snapshot_path, const QueryFlags& qf) {
    Query q = qf.query();
    validate_query(q);
    Federation f = load_snapshot(read_file(snapshot_path));
    RootBroker::SearchResult result = f.federated(q, qf.width, qf.merge_mode());
    print_hits(result.hits);
    if (result.degraded) std::cout << "(degraded: some collections did not answer)\n";
    return 0;
}

struct GenFlags {
    std::vector<std::string> orgs;
    std::uint64_t seed = 0;
    std::size_t vocabulary = 2000;
    double zipf_exponent = 1.1;
    std::size_t terms_min = 20;
    std::size_t terms_max = 80;
    std::string corpus_out;
    std::string topology_out;
};

int cmd_gen_corpus(const GenFlags& flags) {
    CorpusSpec spec;
    spec.seed = flags.seed;
    spec.vocabulary = flags.vocabulary;
    spec.zipf_exponent = flags.zipf_exponent;
    spec.terms_per_doc_min = flags.terms_min;
    spec.terms_per_doc_max = flags.terms_max;

    std::vector<DomainName> owners;
    for (const std::string& entry : flags.orgs) {
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw_error(ErrorCode::InvalidArgument, "--org wants OWNER=COUNT, got " + entry);
        DomainName owner = DomainName::parse(entry.substr(0, eq));
        std::uint64_t count = 0;
        try {
            count = std::stoull(entry.substr(eq + 1));
        } catch (const std::exception&) {
            throw_error(ErrorCode::InvalidArgument, "--org wants OWNER=COUNT, got " + entry);
        }
        spec.org_docs.emplace_back(owner, count);
        owners.push_back(std::move(owner));
    }

    std::vector<Document> docs = generate_corpus(spec);
    write_file(flags.corpus_out, write_corpus(docs));
    std::cout << "wrote " << docs.size() << " document(s) to " << flags.corpus_out << "\n";
    if (!flags.topology_out.empty()) {
        write_file(flags.topology_out, write_topology(derive_topology(owners)));
        std::cout << "wrote topology to " << flags.topology_out << "\n";
    }
    return 0;
}

struct CompareFlags {
    std::string snapshot_path;
    std::string corpus_path;
    std::string topology_path;
    std::string oracle = "metadata";
    QueryFlags qf;
};

int cmd_compare(const CompareFlags& flags) {
    Query q = flags.qf.query();
    validate_query(q);

    Federation f;
    GlobalOracle oracle = GlobalOracle::metadata({});
    if (!flags.corpus_path.empty()) {
        std::vector<Document> docs = parse_corpus(read_file(flags.corpus_path));
        std::vector<DomainName> nodes = flags.topology_path.empty()
                                            ? std::vector<DomainName>{}
                                            : parse_topology(read_file(flags.topology_path));
        if (nodes.empty()) {
            std::vector<DomainName> owners;
            for (const Document& d : docs)
                if (std::find(owners.begin(), owners.end(), d.owner) == owners.end())
                    owners.push_back(d.owner);
            nodes = derive_topology(owners);
        }
        for (const DomainName& d : nodes) f.register_node(d);
        SimTime latest = 0;
        for (const Document& doc : docs) {
            f.ingest(doc, seconds(doc.modified));
            latest = std::max(latest, seconds(doc.modified));
        }
        f.harvest_all(latest + kMicrosPerSecond);
        oracle = flags.oracle == "fulltext" ? GlobalOracle::full_text(docs)
                                            : GlobalOracle::metadata(f.current_metadata());
    } else {
        if (flags.snapshot_path.empty())
            throw_error(ErrorCode::InvalidArgument, "compare needs --corpus or --snapshot");
        if (flags.oracle == "fulltext")
            throw_error(ErrorCode::InvalidArgument,
                        "full-text comparison needs document bodies; pass --corpus");
        f = load_snapshot(read_file(flags.snapshot_path));
        oracle = GlobalOracle::metadata(f.current_metadata());
    }

    RootBroker::SearchResult fed = f.federated(q, flags.qf.width, flags.qf.merge_mode());
    std::vector<ScoredHit> truth = oracle.search(q);
    TopkComparison cmp = compare_topk(fed.hits, truth, q.k);

    std::cout << "federated:\n";
    print_hits(fed.hits);
    std::cout << "oracle (" << flags.oracle << "):\n";
    print_hits(truth);
    std::cout << "exact_match=" << (cmp.exact_match ? "true" : "false")
              << " overlap=" << format_double(cmp.overlap) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical federated search over harvested metadata"};
    app.require_subcommand(1);

    std::string corpus_path;
    std::string topology_path;
    std::string snapshot_out;
    CLI::App* ingest = app.add_subcommand("ingest", "distribute a corpus across its org nodes");
    ingest->add_option("--corpus", corpus_path, "corpus JSONL")->required();
    ingest->add_option("--topology", topology_path, "topology JSON")->required();
    ingest->add_option("--snapshot", snapshot_out, "write loaded state here");

    RunFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "simulate a scenario and report metrics");
    run->add_option("--topology", run_flags.topology_path, "topology JSON")->required();
    run->add_option("--scenario", run_flags.scenario_path, "scenario JSONL")->required();
    run->add_option("--seed", run_flags.config.seed, "simulation seed");
    run->add_option("--harvest-period", run_flags.config.harvest_period_s, "seconds between harvests");
    run->add_option("--push-period", run_flags.config.push_period_s,
                    "seconds between description pushes");
    run->add_option("--end-time", run_flags.config.end_time_s, "simulation horizon in seconds")
        ->required();
    run->add_option("--drop-prob", run_flags.config.drop_probability, "message drop probability")
        ->check(CLI::Range(0.0, 1.0));
    run->add_option("--latency", run_flags.latency, "link latency MIN:MAX in ms");
    run->add_option("--width", run_flags.width, "collections per query, 0 = all");
    run->add_option("--merge-mode", run_flags.mode, "result merging strategy")
        ->check(CLI::IsMember({"raw", "global"}));
    run->add_option("--report", run_flags.report_path, "write the JSON report here");
    run->add_option("--trace", run_flags.trace_path, "write the event trace here");
    run->add_option("--snapshot", run_flags.snapshot_out, "write end-of-run state here");

    std::string query_snapshot;
    QueryFlags query_flags;
    CLI::App* query = app.add_subcommand("query", "search a saved federation state");
    query->add_option("--snapshot", query_snapshot, "state from ingest or run")->required();
    add_query_flags(*query, query_flags);

    GenFlags gen_flags;
    CLI::App* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
    gen->add_option("--org", gen_flags.orgs, "OWNER=COUNT, repeatable")->required();
    gen->add_option("--seed", gen_flags.seed, "generator seed");
    gen->add_option("--vocabulary", gen_flags.vocabulary, "distinct non-marker words");
    gen->add_option("--zipf-exponent", gen_flags.zipf_exponent, "word frequency skew");
    gen->add_option("--terms-min", gen_flags.terms_min, "min words per document");
    gen->add_option("--terms-max", gen_flags.terms_max, "max words per document");
    gen->add_option("--out", gen_flags.corpus_out, "corpus JSONL to write")->required();
    gen->add_option("--topology-out", gen_flags.topology_out, "derived topology to write");

    CompareFlags compare_flags;
    CLI::App* compare = app.add_subcommand("compare", "federated search vs the global oracle");
    compare->add_option("--snapshot", compare_flags.snapshot_path, "state from ingest or run");
    compare->add_option("--corpus", compare_flags.corpus_path, "corpus JSONL to load fresh");
    compare->add_option("--topology", compare_flags.topology_path,
                        "topology JSON (derived from owners when omitted)");
    compare->add_option("--oracle", compare_flags.oracle, "ranking ground truth")
        ->check(CLI::IsMember({"metadata", "fulltext"}));
    add_query_flags(*compare, compare_flags.qf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(corpus_path, topology_path, snapshot_out);
        if (*run) return cmd_run(run_flags);
        if (*query) return cmd_query(query_snapshot, query_flags);
        if (*gen) return cmd_gen_corpus(gen_flags);
        if (*compare) return cmd_compare(compare_flags);
    } catch (const DrisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
