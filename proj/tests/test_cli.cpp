#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "atch/cli.hpp"
#include "atch/fixtures.hpp"

using namespace atch;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("atch_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        store_ = (dir_ / "store.log").string();
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliResult run(std::vector<std::string> args) {
        args.insert(args.begin(), {"--store", store_});
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    CliResult ingest(const std::string& fixture) {
        return run({"ingest", (fs::path(ATCH_FIXTURE_DIR) / (fixture + ".log")).string()});
    }

    std::string write(const std::string& name, const std::string& text) {
        auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    fs::path dir_;
    std::string store_;
};

}  // namespace

TEST_F(CliTest, IngestCountsByType) {
    CliResult r = run({"--format", "canonical", "ingest", (fs::path(ATCH_FIXTURE_DIR) / "it_incident.log").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("\"AddHyperedge\":3"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"AddCausalLink\":2"), std::string::npos) << r.out;
    CliResult stats = run({"stats"});
    EXPECT_NE(stats.out.find("edges"), std::string::npos);
}

TEST_F(CliTest, IngestEmptyFile) {
    CliResult r = run({"--format", "canonical", "ingest", write("empty.log", "")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("\"appended\":0"), std::string::npos);
    EXPECT_NE(r.out.find("\"AddHyperedge\":0"), std::string::npos);
}

TEST_F(CliTest, IngestMalformedLineLeavesStoreUntouched) {
    std::istringstream lines(fixtures::it_incident().serialize());
    std::string text;
    int n = 0;
    for (std::string l; std::getline(lines, l);) text += (++n == 7 ? std::string("7\tgarbage") : l) + "\n";
    CliResult r = run({"ingest", write("bad.log", text)});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("ParseError"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(store_) && fs::file_size(store_) > 0);
}

TEST_F(CliTest, QueryTableAndErrors) {
    ASSERT_EQ(ingest("benchmark").code, kExitOk);
    CliResult q3 = run({"query", "--edges-only", "match (x) where conf > 0.8"});
    ASSERT_EQ(q3.code, kExitOk) << q3.err;
    EXPECT_NE(q3.out.find("8 edge(s)"), std::string::npos) << q3.out;
    EXPECT_NE(q3.out.find("windows_update_e2"), std::string::npos);
    EXPECT_EQ(q3.out.find("print_failure_e3"), std::string::npos);

    CliResult early = run({"query", "--at-time", "1999-01-01", "match (x)"});
    EXPECT_EQ(early.code, kExitOk);
    EXPECT_NE(early.out.find("0 binding(s)"), std::string::npos);

    CliResult bad = run({"query", "match (x,"});
    EXPECT_EQ(bad.code, kExitUsage);
    EXPECT_NE(bad.err.find("SyntaxError"), std::string::npos);

    CliResult cyc = run({"query", "match (a, b) (b, c) (c, a)"});
    EXPECT_EQ(cyc.code, kExitDomain);
    CliResult forced = run({"query", "--force-bruteforce", "match (a, b) (b, c) (c, a)"});
    EXPECT_EQ(forced.code, kExitOk);
    CliResult conf = run({"query", "--min-conf", "abc", "match (x)"});
    EXPECT_EQ(conf.code, kExitUsage);
}

TEST_F(CliTest, QueryOutputIsDeterministic) {
    ASSERT_EQ(ingest("benchmark").code, kExitOk);
    std::vector<std::string> args{"--format", "canonical", "query", "match (x, y) (y, z)"};
    CliResult a = run(args), b = run(args);
    EXPECT_EQ(a.code, kExitOk);
    EXPECT_EQ(a.out, b.out);
    CliResult c = run({"--format", "canonical", "query", "--no-pushdown", "match (x, y) (y, z)"});
    EXPECT_EQ(a.out, c.out);
}

TEST_F(CliTest, TraceMalpractice) {
    ASSERT_EQ(ingest("malpractice").code, kExitOk);
    CliResult r = run({"trace", "malpractice_finding", "--depth", "3", "--as-of", "2024-08-15", "--confidence"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out,
              "prescription(0.73) --[0.89]--> reaction(0.95) --[0.78]--> finding(0.62)\n"
              "Chain confidence: 0.51\n");
    CliResult zero = run({"trace", "malpractice_finding", "--depth", "0"});
    EXPECT_EQ(zero.out, "finding\n");
    CliResult unknown = run({"trace", "nope"});
    EXPECT_EQ(unknown.code, kExitDomain);
    EXPECT_NE(unknown.err.find("UnknownEdge"), std::string::npos);
    CliResult early = run({"trace", "malpractice_finding", "--as-of", "2024-07-01"});
    EXPECT_EQ(early.code, kExitDomain);
}

TEST_F(CliTest, TimeCommands) {
    ASSERT_EQ(ingest("it_incident").code, kExitOk);
    CliResult at = run({"at-time", "2024-03-18T02:00:00Z"});
    EXPECT_NE(at.out.find("2 edge(s)"), std::string::npos) << at.out;
    CliResult floor = run({"at-time", "2024-03-18T09:00:00Z", "--min-conf", "0.9"});
    EXPECT_NE(floor.out.find("1 edge(s)"), std::string::npos) << floor.out;
    CliResult during = run({"during", "2024-03-18T00:00:00Z", "2024-03-18T04:00:00Z"});
    EXPECT_NE(during.out.find("2 edge(s)"), std::string::npos);
    CliResult backwards = run({"during", "2024-03-19", "2024-03-18"});
    EXPECT_EQ(backwards.code, kExitDomain);
    CliResult badtime = run({"at-time", "soon"});
    EXPECT_EQ(badtime.code, kExitUsage);
}

TEST_F(CliTest, DiscoverAndSplit) {
    ASSERT_EQ(ingest("tickets").code, kExitOk);
    std::string prop(fixtures::kTicketProposition);
    CliResult r = run({"discover", prop});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("Best attribute: driver_version (IG 1.000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("0.99683"), std::string::npos);
    EXPECT_NE(r.out.find("0.99104"), std::string::npos);

    CliResult none = run({"discover", "printers are fine"});
    EXPECT_EQ(none.code, kExitOk);
    EXPECT_NE(none.out.find("no signal"), std::string::npos);

    auto size = fs::file_size(store_);
    CliResult split = run({"discover", prop, "--split", "--tx-time", "2024-03-20T00:00:00Z"});
    ASSERT_EQ(split.code, kExitOk) << split.err;
    EXPECT_NE(split.out.find("2 context-specific edge(s) appended"), std::string::npos);
    EXPECT_GT(fs::file_size(store_), size);
}

TEST_F(CliTest, DiscoverWithoutSeparator) {
    Store s(StoreOptions{ConfidencePolicy::LatestAssessment, [] { return Timestamp(0); }});
    s.add_vertex({"X", {}});
    for (int i = 0; i < 2; ++i) {
        Hyperedge e;
        e.id = "c" + std::to_string(i);
        e.participants = participants_of({"X"});
        e.confidence = 0.95;
        e.attributes = {{"k", true}};
        e.claim = ClaimTag{"P", i ? Polarity::Refutes : Polarity::Supports};
        s.add_edge(e);
    }
    ASSERT_EQ(run({"ingest", write("flat.log", s.serialize())}).code, kExitOk);
    CliResult r = run({"discover", "P"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("NoSeparator"), std::string::npos) << r.out;
}

TEST_F(CliTest, BenchAndLoss) {
    ASSERT_EQ(ingest("benchmark").code, kExitOk);
    CliResult bench = run({"bench"});
    EXPECT_EQ(bench.code, kExitOk) << bench.out << bench.err;
    EXPECT_EQ(bench.out.find("FAIL"), std::string::npos);
    EXPECT_NE(bench.out.find("0.506766"), std::string::npos);

    std::ostringstream out, err;
    EXPECT_EQ(run_cli({"--store", (dir_ / "none.log").string(), "loss"}, out, err), kExitOk) << err.str();
    EXPECT_NE(out.str().find("Ambiguity: 0 bits"), std::string::npos) << out.str();
}

TEST_F(CliTest, LossOnOctonary) {
    ASSERT_EQ(ingest("octonary").code, kExitOk);
    CliResult r = run({"loss", "--missing", "P1"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("Ambiguity: 28 bits"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("Gap without P1: 28 bits"), std::string::npos);
    EXPECT_EQ(run({"loss", "--missing", "P9"}).code, kExitUsage);
}

TEST_F(CliTest, ResolveAndAudit) {
    ASSERT_EQ(ingest("tickets").code, kExitOk);
    CliResult r = run({"resolve", "ticket_T-01", "ticket_T-21"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("prefer_b (tier: temporal)"), std::string::npos) << r.out;
    EXPECT_EQ(run({"resolve", "ticket_T-01", "ticket_T-02"}).code, kExitDomain);
    CliResult audit = run({"audit", "ticket_T-01", "ticket_T-21"});
    EXPECT_EQ(audit.code, kExitOk);
    EXPECT_NE(audit.out.find("Recommendation:"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    std::ostringstream out, err;
    EXPECT_EQ(run_cli({}, out, err), kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"trace"}).code, kExitUsage);
    EXPECT_EQ(run({"trace", "x", "--depth", "-1"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"stats"}, out, err), kExitUsage);
    std::ostringstream hout, herr;
    EXPECT_EQ(run_cli({"--help"}, hout, herr), kExitOk);
    EXPECT_NE(hout.str().find("ingest"), std::string::npos);
}

TEST_F(CliTest, StoreFromEnvironment) {
    ::setenv("ATCH_STORE", store_.c_str(), 1);
    std::ostringstream out, err;
    int code = run_cli({"ingest", (fs::path(ATCH_FIXTURE_DIR) / "octonary.log").string()}, out, err);
    ::unsetenv("ATCH_STORE");
    EXPECT_EQ(code, kExitOk) << err.str();
    EXPECT_TRUE(fs::exists(store_));
}
