#include "helpers.hpp"

#include "sparsecand/cli.hpp"
#include "sparsecand/network.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace sparsecand;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sparsecand");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

} // namespace

TEST_CASE("synth, learn, sample and eval end to end") {
    testing_util::TempDir dir;
    const std::string net = dir.file("g.net"), data = dir.file("d.tsv");
    REQUIRE(cli({"synth", "--vars", "8", "--max-parents", "2", "--seed", "3", "--n", "1500", "--net", net, "--out", data})
                .code == 0);
    CHECK(count_lines(slurp(data)) == 1501);

    const std::string learned = dir.file("l.net"), report = dir.file("r.tsv");
    Run r = cli({"learn", "--data", data, "--method", "sc", "--measure", "score", "--k", "3", "--out", learned, "--report",
                 report, "--ref", net, "--kl-samples", "2000"});
    CHECK(r.code == 0);
    const std::string rep = slurp(report);
    CHECK(rep.rfind("iter\ttime_s\tscore_per_instance\tkl\tstats\n", 0) == 0);
    CHECK(count_lines(rep) >= 3);
    CHECK(rep.find("NA") == std::string::npos);

    // Learned network re-parses to an equal network.
    const BayesianNetwork b = read_network_file(learned);
    std::ostringstream again;
    write_network(again, b);
    CHECK(again.str() == slurp(learned));

    r = cli({"learn", "--data", data, "--method", "greedy", "--score", "bde", "--ess", "10", "--out", dir.file("g2.net"),
             "--report", dir.file("g2.tsv")});
    CHECK(r.code == 0);
    CHECK(count_lines(slurp(dir.file("g2.tsv"))) == 2);

    r = cli({"eval", "--net", learned, "--data", data, "--ref", net, "--kl-samples", "1000"});
    CHECK(r.code == 0);
    CHECK(r.out.find("score_per_instance\t-") != std::string::npos);
    CHECK(r.out.find("kl\t") != std::string::npos);

    r = cli({"eval", "--net", net, "--ref", net});
    CHECK(r.code == 0);
    CHECK(r.out.find("kl\t0\nkl_mode\texact\n") != std::string::npos);

    r = cli({"sample", "--net", net, "--n", "300", "--seed", "7", "--out", dir.file("s1.tsv")});
    CHECK(r.code == 0);
    cli({"sample", "--net", net, "--n", "300", "--seed", "7", "--out", dir.file("s2.tsv")});
    CHECK(slurp(dir.file("s1.tsv")) == slurp(dir.file("s2.tsv")));
    CHECK(count_lines(slurp(dir.file("s1.tsv"))) == 301);
}

TEST_CASE("determinism of synth and learn outputs") {
    testing_util::TempDir dir;
    for (int t = 0; t < 2; ++t) {
        const std::string suffix = std::to_string(t);
        REQUIRE(cli({"synth", "--vars", "6", "--seed", "11", "--n", "400", "--net", dir.file("n" + suffix), "--out",
                     dir.file("d" + suffix)})
                    .code == 0);
        REQUIRE(cli({"learn", "--data", dir.file("d" + suffix), "--measure", "disc", "--k", "2", "--out",
                     dir.file("l" + suffix), "--report", dir.file("r" + suffix)})
                    .code == 0);
    }
    CHECK(slurp(dir.file("n0")) == slurp(dir.file("n1")));
    CHECK(slurp(dir.file("d0")) == slurp(dir.file("d1")));
    CHECK(slurp(dir.file("l0")) == slurp(dir.file("l1")));
}

TEST_CASE("minimal synth") {
    testing_util::TempDir dir;
    CHECK(cli({"synth", "--vars", "2", "--net", dir.file("a.net"), "--out", dir.file("a.tsv")}).code == 0);
    CHECK(read_network_file(dir.file("a.net")).size() == 2);
}

TEST_CASE("exit codes") {
    testing_util::TempDir dir;
    CHECK(cli({}).code == 1);
    CHECK(cli({"learn"}).code == 1);
    CHECK(cli({"learn", "--data", "x", "--bogus", "1"}).code == 1);
    CHECK(cli({"learn", "--data", "x", "--measure", "nope"}).code == 1);
    CHECK(cli({"sample", "--net", "x.net", "--n", "0"}).code == 1);
    CHECK(cli({"eval", "--net", "x.net"}).code == 1);

    Run missing = cli({"learn", "--data", dir.file("missing.tsv")});
    CHECK(missing.code == 2);
    CHECK_FALSE(missing.err.empty());

    std::ofstream(dir.file("bad.tsv")) << "A\tB\n0\t1\n1\n";
    CHECK(cli({"learn", "--data", dir.file("bad.tsv"), "--out", dir.file("o.net"), "--report", dir.file("o.tsv")}).code ==
          2);

    // Three copies of a 300-state column: once one arc is in, scoring a second
    // parent needs a 2.7e7-cell table, over the cache's per-table cap.
    {
        std::ofstream wide(dir.file("wide.tsv"));
        wide << "X\tY\tZ\n";
        for (int r = 0; r < 600; ++r) wide << r % 300 << '\t' << r % 300 << '\t' << r % 300 << '\n';
    }
    Run limit = cli({"learn", "--data", dir.file("wide.tsv"), "--method", "greedy", "--out", dir.file("w.net"), "--report",
                     dir.file("w.tsv")});
    CHECK(limit.code == 3);
    CHECK_FALSE(limit.err.empty());

    CHECK(cli({"--help"}).code == 0);
}
