#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int code = -1;
    std::string out;
};

const fs::path& work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "dris_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path capture = work_dir() / ("out" + std::to_string(counter++) + ".txt");
    std::string cmd = std::string(DRIS_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    CliResult r;
    r.out = slurp(capture);
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
}

std::string three_doc_topology() { return "{\"nodes\":[\"cn\",\"edu.cn\",\"hust.edu.cn\"]}\n"; }

std::string three_doc_scenario() {
    std::string out;
    out +=
        "{\"doc\":{\"body\":\"apple banana\",\"doc_id\":\"d1\",\"modified\":0,"
        "\"owner\":\"hust.edu.cn\",\"title\":\"d1\",\"url\":\"http://x/1\"},"
        "\"op\":\"upsert\",\"t\":0}\n";
    out +=
        "{\"doc\":{\"body\":\"apple apple\",\"doc_id\":\"d2\",\"modified\":1,"
        "\"owner\":\"hust.edu.cn\",\"title\":\"d2\",\"url\":\"http://x/2\"},"
        "\"op\":\"upsert\",\"t\":1}\n";
    out +=
        "{\"doc\":{\"body\":\"cherry\",\"doc_id\":\"d3\",\"modified\":2,"
        "\"owner\":\"hust.edu.cn\",\"title\":\"d3\",\"url\":\"http://x/3\"},"
        "\"op\":\"upsert\",\"t\":2}\n";
    out += "{\"k\":10,\"op\":\"query\",\"t\":200,\"terms\":[\"apple\"]}\n";
    return out;
}

}  // namespace

TEST_CASE("help and usage errors use the documented exit codes") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("query --help").code == 0);
    CHECK(run_cli("").code == 1);            // a subcommand is required
    CHECK(run_cli("run").code == 1);         // missing required options
    CHECK(run_cli("frobnicate").code == 1);  // unknown subcommand
}

TEST_CASE("gen-corpus, ingest, run, query, and compare fit together") {
    fs::path dir = work_dir();
    fs::path corpus = dir / "gen.jsonl";
    fs::path topology = dir / "gen_topology.json";

    CliResult gen = run_cli("gen-corpus --org hust.edu.cn=20 --org ibm.com.cn=15 --seed 7"
                            " --vocabulary 120 --terms-min 8 --terms-max 20 --out " +
                            corpus.string() + " --topology-out " + topology.string());
    CHECK(gen.code == 0);
    CHECK(gen.out.find("wrote 35 document(s)") != std::string::npos);
    REQUIRE(fs::exists(corpus));
    REQUIRE(fs::exists(topology));

    CliResult ingest = run_cli("ingest --corpus " + corpus.string() + " --topology " +
                               topology.string() + " --snapshot " + (dir / "ingest.snap").string());
    CHECK(ingest.code == 0);
    CHECK(ingest.out.find("loaded 35 document(s) into 2 org node(s)") != std::string::npos);

    // An ingest snapshot has never been harvested, so a query against it
    // honestly reports an empty routing registry.
    CliResult unharvested = run_cli("query --snapshot " + (dir / "ingest.snap").string() + " w0");
    CHECK(unharvested.code == 1);
    CHECK(unharvested.out.find("empty_registry") != std::string::npos);

    CliResult cmp = run_cli("compare --corpus " + corpus.string() + " w0 w1 -k 10");
    CHECK(cmp.code == 0);
    CHECK(cmp.out.find("exact_match=true overlap=1") != std::string::npos);

    CliResult cmp_full = run_cli("compare --corpus " + corpus.string() +
                                 " --oracle fulltext --topology " + topology.string() + " w0");
    CHECK(cmp_full.code == 0);
    CHECK(cmp_full.out.find("oracle (fulltext):") != std::string::npos);
}

TEST_CASE("a simulated run is reproducible and its snapshot is queryable") {
    fs::path dir = work_dir();
    spit(dir / "topology.json", three_doc_topology());
    spit(dir / "scenario.jsonl", three_doc_scenario());

    std::string base = "run --topology " + (dir / "topology.json").string() + " --scenario " +
                       (dir / "scenario.jsonl").string() +
                       " --seed 11 --harvest-period 60 --push-period 90 --end-time 300";

    CliResult first = run_cli(base + " --report " + (dir / "r1.json").string() + " --trace " +
                              (dir / "t1.txt").string() + " --snapshot " + (dir / "s1.snap").string());
    CHECK(first.code == 0);
    CHECK(first.out.find("coverage") != std::string::npos);

    CliResult second = run_cli(base + " --report " + (dir / "r2.json").string());
    CHECK(second.code == 0);
    std::string r1 = slurp(dir / "r1.json");
    CHECK(r1 == slurp(dir / "r2.json"));
    CHECK(r1.find("\"coverage\":1,") != std::string::npos);
    CHECK(r1.find("\"topk_exact_rate\":1,") != std::string::npos);

    std::string trace = slurp(dir / "t1.txt");
    CHECK(trace.find("\"kind\":\"deliver\"") != std::string::npos);
    CHECK(trace.find("\"kind\":\"query_done\"") != std::string::npos);

    // A different seed moves the trace, and with it the report.
    std::string reseeded = "run --topology " + (dir / "topology.json").string() + " --scenario " +
                           (dir / "scenario.jsonl").string() +
                           " --seed 12 --harvest-period 60 --push-period 90 --end-time 300";
    CliResult other = run_cli(reseeded + " --report " + (dir / "r3.json").string());
    CHECK(other.code == 0);
    CHECK(slurp(dir / "r3.json") != r1);

    // The frozen snapshot answers the canonical query in canonical order.
    CliResult q = run_cli("query --snapshot " + (dir / "s1.snap").string() + " apple");
    CHECK(q.code == 0);
    std::size_t d2 = q.out.find("1. ");
    std::size_t d1 = q.out.find("2. ");
    REQUIRE(d2 != std::string::npos);
    REQUIRE(d1 != std::string::npos);
    CHECK(q.out.substr(d2, q.out.find('\n', d2) - d2).find("d2") != std::string::npos);
    CHECK(q.out.substr(d1, q.out.find('\n', d1) - d1).find("d1") != std::string::npos);
    CHECK(q.out.find("path=cn > edu.cn > hust.edu.cn") != std::string::npos);

    // Compare against the stored snapshot agrees with the oracle too.
    CliResult cmp = run_cli("compare --snapshot " + (dir / "s1.snap").string() + " apple");
    CHECK(cmp.code == 0);
    CHECK(cmp.out.find("exact_match=true") != std::string::npos);
}

TEST_CASE("bad inputs fail with exit 1 and a reason, not a stack trace") {
    fs::path dir = work_dir();
    spit(dir / "t.json", three_doc_topology());
    spit(dir / "s.jsonl", three_doc_scenario());

    CliResult missing = run_cli("query --snapshot " + (dir / "nope.snap").string() + " apple");
    CHECK(missing.code == 1);
    CHECK(missing.out.find("error: io_error: cannot open") != std::string::npos);

    CliResult zero_k = run_cli("query --snapshot " + (dir / "nope.snap").string() + " apple -k 0");
    CHECK(zero_k.code == 1);
    CHECK(zero_k.out.find("error: invalid_argument:") != std::string::npos);

    CliResult bad_latency = run_cli("run --topology " + (dir / "t.json").string() + " --scenario " +
                                    (dir / "s.jsonl").string() + " --end-time 300 --latency oops");
    CHECK(bad_latency.code == 1);
    CHECK(bad_latency.out.find("--latency wants MIN:MAX") != std::string::npos);

    CliResult bad_org = run_cli("gen-corpus --org nocount --out " + (dir / "x.jsonl").string());
    CHECK(bad_org.code == 1);
    CHECK(bad_org.out.find("--org wants OWNER=COUNT") != std::string::npos);

    CliResult late = run_cli("run --topology " + (dir / "t.json").string() + " --scenario " +
                             (dir / "s.jsonl").string() + " --end-time 100");
    CHECK(late.code == 1);
    CHECK(late.out.find("is not before end_time") != std::string::npos);

    spit(dir / "orphan.jsonl",
         "{\"body\":\"x\",\"doc_id\":\"d\",\"modified\":0,\"owner\":\"pku.edu.cn\","
         "\"title\":\"\",\"url\":\"\"}\n");
    CliResult orphan = run_cli("ingest --corpus " + (dir / "orphan.jsonl").string() +
                               " --topology " + (dir / "t.json").string());
    CHECK(orphan.code == 1);
    CHECK(orphan.out.find("1 document(s) without a registered owner: d") != std::string::npos);
}
