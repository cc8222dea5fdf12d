#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reconlab/exact.hpp"
#include "reconlab/graph.hpp"
#include "reconlab/model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = RECONLAB_CLI_PATH;

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("reconlab_cli_tests_" + std::to_string(static_cast<long>(getpid())));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    std::string cmd = std::string(kCli) + " " + args;
    int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& body) {
    std::vector<std::string> lines;
    std::istringstream is(body);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
    auto out = work_dir() / "version.txt";
    CHECK(run("--version > " + out.string()) == 0);
    CHECK(slurp(out).find("0.1.0") != std::string::npos);
    CHECK(run("--help > /dev/null") == 0);
    CHECK(run("gen --help > /dev/null") == 0);
}

TEST_CASE("argument errors exit with status 2") {
    CHECK(run("2> /dev/null") == 2);                               // missing subcommand
    CHECK(run("gen poisson --gamma 1 2> /dev/null") == 2);         // missing required options
    CHECK(run("gen poisson --n 5 --gamma 1 --frob 3 --out " +
              (work_dir() / "x.graph").string() + " 2> /dev/null") == 2);
    CHECK(run("exact --graph g --model nosuch 2> /dev/null") == 2);
}

TEST_CASE("missing input files exit with status 1") {
    CHECK(run("exact --graph " + (work_dir() / "absent.graph").string() + " 2> /dev/null") == 1);
}

TEST_CASE("graph generation is reproducible and manifested") {
    auto a = work_dir() / "a.graph";
    auto b = work_dir() / "b.graph";
    REQUIRE(run("gen poisson --n 30 --gamma 1.5 --seed 7 --out " + a.string()) == 0);
    REQUIRE(run("gen poisson --n 30 --gamma 1.5 --seed 7 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    auto g = reconlab::read_graph_file(a.string());
    CHECK(g.n == 30);

    json m = json::parse(slurp(a.string() + ".manifest.json"));
    CHECK(m["tool"] == "reconlab");
    CHECK(m["subcommand"] == "gen poisson");
    CHECK(m["seed"] == 7);
    CHECK(m["outputs"][0] == a.string());
    CHECK(m.contains("written_at_utc"));

    auto c = work_dir() / "c.graph";
    REQUIRE(run("gen poisson --n 30 --gamma 1.5 --seed 8 --out " + c.string()) == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("regular graphs from the command line have the advertised degree") {
    auto p = work_dir() / "reg.graph";
    REQUIRE(run("gen regular --n 12 --k 2 --seed 4 --out " + p.string()) == 0);
    auto g = reconlab::read_graph_file(p.string());
    std::vector<int> deg(g.n, 0);
    for (const auto& e : g.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    for (int d : deg) CHECK(d == 3);
}

TEST_CASE("tree generation writes loadable trees") {
    auto t1 = work_dir() / "gw.tree";
    REQUIRE(run("gen gw --gamma 0.8 --depth 3 --seed 5 --out " + t1.string()) == 0);
    auto gw = reconlab::read_tree_file(t1.string());
    CHECK(gw.size() >= 1);

    auto t2 = work_dir() / "rt.tree";
    REQUIRE(run("gen regular-tree --k 2 --depth 3 --out " + t2.string()) == 0);
    auto rt = reconlab::read_tree_file(t2.string());
    CHECK(rt.size() == 22);  // 1 + 3 + 6 + 12
}

TEST_CASE("the seed environment override takes precedence") {
    auto a = work_dir() / "env_a.graph";
    auto b = work_dir() / "env_b.graph";
    REQUIRE(run("gen poisson --n 20 --gamma 1.0 --seed 123 --out " + a.string()) == 0);
    std::string cmd = "RECONLAB_SEED=123 " + std::string(kCli) +
                      " gen poisson --n 20 --gamma 1.0 --seed 1 --out " + b.string();
    int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    REQUIRE(WEXITSTATUS(rc) == 0);
    CHECK(slurp(a) == slurp(b));

    std::string bad = "RECONLAB_SEED=abc " + std::string(kCli) +
                      " gen poisson --n 20 --gamma 1.0 --out " + b.string() + " 2> /dev/null";
    rc = std::system(bad.c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 2);
}

TEST_CASE("exact quantities match the library on the same input") {
    auto gpath = work_dir() / "small.graph";
    REQUIRE(run("gen poisson --n 6 --gamma 1.2 --seed 9 --out " + gpath.string()) == 0);
    auto csv = work_dir() / "exact.csv";
    REQUIRE(run("exact --graph " + gpath.string() +
                " --model ising --theta 0.6 --lambda 0.1 --root 0 --t 1 --marginal --out " +
                csv.string()) == 0);
    auto lines = lines_of(slurp(csv));
    REQUIRE(lines.size() >= 4);
    CHECK(lines[0] == "quantity,value");

    auto g = reconlab::read_graph_file(gpath.string());
    auto gm = reconlab::ising_model(g, 0.6, 0.1);
    double expect_logz = reconlab::exact_log_partition(gm);
    double expect_m0 = reconlab::exact_marginal(gm, {0})[0];
    double expect_tv = reconlab::exact_joint_product_tv(gm, 0, 1);

    auto value_of = [&](const std::string& key) {
        for (const auto& line : lines)
            if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
        FAIL("missing row: " << key);
        return 0.0;
    };
    CHECK(value_of("log_partition") == doctest::Approx(expect_logz).epsilon(1e-14));
    CHECK(value_of("marginal_0_0") == doctest::Approx(expect_m0).epsilon(1e-14));
    CHECK(value_of("tv_0_1") == doctest::Approx(expect_tv).epsilon(1e-14));
}

TEST_CASE("exact without --out prints the same table to stdout") {
    auto gpath = work_dir() / "stdout.graph";
    REQUIRE(run("gen poisson --n 5 --gamma 1.0 --seed 2 --out " + gpath.string()) == 0);
    auto captured = work_dir() / "stdout.txt";
    REQUIRE(run("exact --graph " + gpath.string() + " --model coloring --q 3 --eps 0.5 > " +
                captured.string()) == 0);
    auto lines = lines_of(slurp(captured));
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "quantity,value");
    CHECK(lines[1].rfind("log_partition,", 0) == 0);
}

TEST_CASE("tree scans expand grids, honor job counts, and stay byte-stable") {
    auto a = work_dir() / "scan_a.csv";
    auto b = work_dir() / "scan_b.csv";
    REQUIRE(run("tree-scan ising --k 2 --theta 0.5,0.9 --t 1..2 --trials 40 --seed 1 --jobs 2 "
                "--out " + a.string()) == 0);
    REQUIRE(run("tree-scan ising --k 2 --theta 0.5,0.9 --t 1..2 --trials 40 --seed 1 --jobs 1 "
                "--out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    auto lines = lines_of(slurp(a));
    REQUIRE(lines.size() == 5);  // header + 2 thetas x 2 depths
    CHECK(lines[0] == "ensemble,k_or_gamma,theta,lambda,t,trials,bias_mean,bias_stderr,seed");
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i].rfind("regular,2,", 0) == 0);

    // the glass variant records the coupling magnitude in the theta column
    auto c = work_dir() / "scan_c.csv";
    REQUIRE(run("tree-scan spinglass --gamma 0.8 --eps 0.25 --t 1 --trials 40 --seed 1 --out " +
                c.string()) == 0);
    auto glass = lines_of(slurp(c));
    REQUIRE(glass.size() == 2);
    CHECK(glass[1].rfind("gw,0.80000000000000004,0.5,0,1,", 0) == 0);

    CHECK(run("tree-scan ising --k 2 --gamma 1.0 --theta 0.5 --t 1 --out " +
              (work_dir() / "bad.csv").string() + " 2> /dev/null") == 2);
    CHECK(run("tree-scan ising --theta 0.5 --t 1 --out " +
              (work_dir() / "bad2.csv").string() + " 2> /dev/null") == 2);
}

TEST_CASE("graph scans write companion tree rows and the proxy side file") {
    auto out = work_dir() / "gscan.csv";
    REQUIRE(run("graph-scan --k 2 --theta 0.3 --n 8 --t 1 --trials 8 --sweeps 50 --seed 3 "
                "--jobs 2 --proxy --proxy-runs 4 --proxy-sweeps 20 --out " + out.string()) == 0);
    auto lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 3);  // header + graph row + tree row
    CHECK(lines[0].rfind("model,ensemble,N,", 0) == 0);
    CHECK(lines[1].rfind("ising,regular,8,", 0) == 0);
    CHECK(lines[2].rfind("ising,regular_tree,0,", 0) == 0);

    auto proxy_lines = lines_of(slurp(out.string() + ".proxy.csv"));
    REQUIRE(proxy_lines.size() == 2);
    CHECK(proxy_lines[0] ==
          "k,theta,N,runs,threshold,exceed_fraction,mean_abs_magnetization,split_disagreement,"
          "seed");

    json m = json::parse(slurp(out.string() + ".manifest.json"));
    REQUIRE(m["outputs"].size() == 2);
    CHECK(m["outputs"][1] == out.string() + ".proxy.csv");
}

TEST_CASE("replica subcommands write their tables") {
    auto sph = work_dir() / "sph.csv";
    auto dump = work_dir() / "sph_dump.txt";
    REQUIRE(run("replica sphericity --model spinglass --gamma 0.8 --eps 0.3 --n 8,10 "
                "--trials 16 --seed 2 --jobs 2 --out " + sph.string() +
                " --dump " + dump.string()) == 0);
    auto lines = lines_of(slurp(sph));
    REQUIRE(lines.size() == 5);  // header + 2 sizes x 2 states
    CHECK(lines[0] == "model,N,param1,param2,xi,EQ2_mean,EQ2_stderr,trials,seed");
    CHECK(lines[1].rfind("spinglass,8,", 0) == 0);
    auto dump_lines = lines_of(slurp(dump));
    CHECK(dump_lines.size() == 2 * 16 * 2);  // two replicas per trial per size
    CHECK(dump_lines[0].size() == 8);        // one digit per vertex

    auto gap = work_dir() / "gap.csv";
    REQUIRE(run("replica phi-gap --q 3 --gamma 0.8,1.0 --eps 0.5 --delta 0.12 --deltap 0.01 "
                "--resolution 6 --out " + gap.string()) == 0);
    auto gap_lines = lines_of(slurp(gap));
    REQUIRE(gap_lines.size() == 3);
    CHECK(gap_lines[0] == "q,gamma,eps,delta,deltap,gap,argmin_nu");
    CHECK(gap_lines[1].rfind("3,0.8", 0) == 0);

    CHECK(run("replica phi-gap --q 3 --gamma 1.0 --resolution 10 --out " +
              (work_dir() / "gapbad.csv").string() + " 2> /dev/null") == 2);
}

TEST_CASE("the glass scan writes its three tables and lists them in the manifest") {
    auto out = work_dir() / "sg.csv";
    REQUIRE(run("sg-scan --gamma 0.5,1.0 --eps 0.35 --n 8 --t 1 --trials 8 --sweeps 50 --seed 6 "
                "--jobs 2 --out " + out.string()) == 0);
    auto recon_lines = lines_of(slurp(out));
    REQUIRE(recon_lines.size() == 3);  // header + 2 gammas x 1 size
    auto sph_lines = lines_of(slurp(out.string() + ".sphericity.csv"));
    REQUIRE(sph_lines.size() == 5);  // header + 2 gammas x 1 size x 2 states
    auto flag_lines = lines_of(slurp(out.string() + ".flags.csv"));
    REQUIRE(flag_lines.size() == 3);
    CHECK(flag_lines[0] == "gamma,two_gamma_theta_sq,supercritical");
    CHECK(flag_lines[1].back() == '0');  // 2 * 0.5 * 0.09 stays subcritical

    json m = json::parse(slurp(out.string() + ".manifest.json"));
    REQUIRE(m["outputs"].size() == 3);
}

TEST_CASE("csv bodies are byte-identical for any job count on every scan tool") {
    auto a = work_dir() / "jobs_a.csv";
    auto b = work_dir() / "jobs_b.csv";
    REQUIRE(run("sg-scan --gamma 0.6 --eps 0.35 --n 8 --t 1 --trials 8 --sweeps 30 --seed 11 "
                "--jobs 1 --out " + a.string()) == 0);
    REQUIRE(run("sg-scan --gamma 0.6 --eps 0.35 --n 8 --t 1 --trials 8 --sweeps 30 --seed 11 "
                "--jobs 8 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a.string() + ".sphericity.csv") == slurp(b.string() + ".sphericity.csv"));
    CHECK(slurp(a.string() + ".flags.csv") == slurp(b.string() + ".flags.csv"));
}
