#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpskr/sweep.hpp"
#include "test_util.hpp"

using dpskr::sweep::parse_grid;

namespace {

// --- harness for driving the installed binary ---

std::string out_dir() {
    static std::string dir = [] {
        std::string d = "cli_test_out";
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the sweep binary with the given arguments, muting its streams, and
// returns the process exit code.
int run_cli(const std::string& args) {
    std::string cmd = std::string(DPSKR_CLI_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> comments;         // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    double num(std::size_t row, const std::string& column) const {
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c] == column) return std::stod(rows.at(row).at(c));
        throw std::out_of_range("no column " + column);
    }

    std::string comment_value(const std::string& key) const {
        std::string prefix = key + " = ";
        for (const auto& c : comments)
            if (c.rfind(prefix, 0) == 0) return c.substr(prefix.size());
        return {};
    }
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    Csv csv;
    std::string line;
    bool saw_columns = false;
    auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::size_t start = 0;
        for (;;) {
            std::size_t pos = s.find(',', start);
            if (pos == std::string::npos) {
                f.push_back(s.substr(start));
                return f;
            }
            f.push_back(s.substr(start, pos - start));
            start = pos + 1;
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            csv.comments.push_back(line.substr(2));
        } else if (!saw_columns) {
            csv.columns = split(line);
            saw_columns = true;
        } else {
            csv.rows.push_back(split(line));
        }
    }
    REQUIRE(saw_columns);
    return csv;
}

}  // namespace

TEST_CASE("grid grammar parses and validates") {
    std::vector<double> lin = parse_grid("0:2:3");
    REQUIRE(lin.size() == 3);
    CHECK(lin[0] == 0.0);
    CHECK(lin[1] == 1.0);
    CHECK(lin[2] == 2.0);

    std::vector<double> lg = parse_grid("log:0.0001:0.1:31");
    REQUIRE(lg.size() == 31);
    CHECK(lg.front() == 0.0001);
    CHECK(lg.back() == 0.1);
    for (std::size_t i = 0; i + 2 < lg.size(); ++i)
        CHECK_NEAR(lg[i + 2] / lg[i + 1], lg[i + 1] / lg[i], 1e-10);

    std::vector<double> one = parse_grid("6:6:1");
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 6.0);

    std::vector<double> scalar = parse_grid("0.03");
    REQUIRE(scalar.size() == 1);
    CHECK(scalar[0] == 0.03);

    CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("5:1:3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("log:0:1:5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("log:1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:2:3:4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("nan"), std::invalid_argument);
}

TEST_CASE("csv fields round-trip doubles") {
    for (double x : {0.0375063183018937, 1.0 / 3.0, 2.2250738585072014e-308, 123456789.25, 0.0,
                     -0.5, 6.0}) {
        std::string field = dpskr::sweep::format_field(x);
        CHECK(std::stod(field) == x);
    }
    std::string doc = dpskr::sweep::assemble_csv({"alpha = 1"}, {"a", "b"}, {"1,2", "3,4"});
    CHECK(doc == "# alpha = 1\na,b\n1,2\n3,4\n");
}

TEST_CASE("parallel map is index-ordered and propagates failures") {
    auto square = [](std::size_t i) { return static_cast<double>(i) * static_cast<double>(i); };
    std::vector<double> one_worker = dpskr::sweep::parallel_map(257, 1, square);
    std::vector<double> four_workers = dpskr::sweep::parallel_map(257, 4, square);
    REQUIRE(one_worker.size() == 257);
    CHECK(one_worker == four_workers);
    CHECK(one_worker[200] == 40000.0);

    CHECK(dpskr::sweep::parallel_map(0, 4, square).empty());

    auto sometimes = [](std::size_t i) -> int {
        if (i == 37) throw std::invalid_argument("boom");
        return static_cast<int>(i);
    };
    CHECK_THROWS_AS(dpskr::sweep::parallel_map(100, 4, sometimes), std::invalid_argument);
}

TEST_CASE("output path resolution honors the environment") {
    CHECK(dpskr::sweep::resolve_output_path("explicit.csv", "d.csv") == "explicit.csv");
    ::setenv("DPSKR_OUTPUT_DIR", "/somewhere", 1);
    CHECK(dpskr::sweep::resolve_output_path("", "d.csv") == "/somewhere/d.csv");
    CHECK(dpskr::sweep::resolve_output_path("x.csv", "d.csv") == "x.csv");
    ::unsetenv("DPSKR_OUTPUT_DIR");
    CHECK(dpskr::sweep::resolve_output_path("", "d.csv") == "d.csv");
}

TEST_CASE("omega command reproduces closed-form rows") {
    std::string path = out_dir() + "/omega_nu0.csv";
    REQUIRE(run_cli("omega --n 4 --nu 0 --lambda 0:2:3 --output " + path) == 0);
    Csv csv = read_csv(path);
    CHECK(csv.comment_value("command") == "omega");
    CHECK(csv.comment_value("n") == "4");
    CHECK(csv.comment_value("nonincreasing") == "1");
    REQUIRE(csv.rows.size() == 3);
    CHECK_NEAR(csv.num(0, "lambda"), 0.0, 0.0);
    CHECK_NEAR(csv.num(0, "omega"), 0.5, 1e-10);
    CHECK_NEAR(csv.num(1, "omega"), 0.0, 1e-10);
    CHECK_NEAR(csv.num(2, "omega"), -0.5, 1e-10);

    // Single-photon bound vanishes at lambda = 6: the one-point grid form.
    std::string path6 = out_dir() + "/omega_nu1.csv";
    REQUIRE(run_cli("omega --n 9 --nu 1 --lambda 6:6:1 --output " + path6) == 0);
    Csv at6 = read_csv(path6);
    REQUIRE(at6.rows.size() == 1);
    CHECK_NEAR(at6.num(0, "omega"), 0.0, 1e-9);

    // A dense two-photon sweep must come out convex and non-increasing.
    std::string path2 = out_dir() + "/omega_nu2.csv";
    REQUIRE(run_cli("omega --n 9 --nu 2 --lambda 0:12:301 --output " + path2) == 0);
    Csv dense = read_csv(path2);
    CHECK(dense.comment_value("convex") == "1");
    CHECK(dense.comment_value("nonincreasing") == "1");
    REQUIRE(dense.rows.size() == 301);
    CHECK(dense.columns == std::vector<std::string>{"lambda", "omega", "argmax_pattern",
                                                    "first_slot", "branch"});
}

TEST_CASE("region command emits the boundary and the sentinel") {
    std::string path = out_dir() + "/region_nu1.csv";
    REQUIRE(run_cli("region --n 9 --nu 1 --lambda 0:12:241 --output " + path) == 0);
    Csv csv = read_csv(path);
    CHECK(csv.comment_value("all-achievable") == "0");
    REQUIRE(csv.rows.size() == 241);
    // Ascending in e, and the kink of the single-photon curve at lambda = 6
    // puts its midpoint row exactly on the slope-6 line.
    bool found_kink = false;
    for (std::size_t r = 0; r + 1 < csv.rows.size(); ++r) {
        CHECK(csv.num(r, "e") <= csv.num(r + 1, "e") + 1e-12);
        if (std::abs(csv.num(r, "lambda") - 6.0) < 1e-12) {
            found_kink = true;
            CHECK(csv.num(r, "e") > 0.01);
            CHECK_NEAR(csv.num(r, "e_ph") / csv.num(r, "e"), 6.0, 1e-6);
        }
    }
    CHECK(found_kink);

    std::string sentinel_path = out_dir() + "/region_nu3.csv";
    REQUIRE(run_cli("region --n 4 --nu 3 --lambda 0:12:121 --output " + sentinel_path) == 0);
    Csv sentinel = read_csv(sentinel_path);
    CHECK(sentinel.comment_value("all-achievable") == "1");
    REQUIRE(sentinel.rows.size() == 1);
    CHECK(sentinel.num(0, "e") == 0.0);
    CHECK(sentinel.num(0, "e_ph") == 1.0);

    CHECK(run_cli("region --n 4 --nu 0 --lambda 0:12:11 --output " + path) == 2);
}

TEST_CASE("keyrate command orders truncations and echoes the policy") {
    std::string path = out_dir() + "/keyrate.csv";
    REQUIRE(run_cli("keyrate --n 9 --nubar 1 --nubar 3 --e 0.03 --eta log:0.01:0.1:4 "
                    "--lambda 0:40:401 --policy fixed:0.02 --output " +
                    path) == 0);
    Csv csv = read_csv(path);
    CHECK(csv.comment_value("policy") == "fixed:0.02");
    REQUIRE(csv.rows.size() == 4);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        // Block mean fixed at 0.02: per-pulse means are 0.02 / 9.
        CHECK_NEAR(csv.num(r, "alpha_sq_nubar1"), 0.02 / 9, 1e-15);
        // Deeper truncation never loses key: h_ph minimizes over coarser
        // splits, so G is monotone in the truncation at equal alpha_sq.
        CHECK(csv.num(r, "G_nubar3") >= csv.num(r, "G_nubar1") - 1e-15);
        CHECK(csv.num(r, "h_ph_nubar3") <= csv.num(r, "h_ph_nubar1") + 1e-12);
        CHECK(csv.num(r, "Q_nubar1") == csv.num(r, "Q_nubar3"));
    }
    // The detected fraction grows with eta, so the later rows carry key.
    CHECK(csv.num(3, "G_nubar3") > 0.0);
    CHECK(csv.num(3, "G_nubar3") > csv.num(3, "G_nubar1"));
}

TEST_CASE("asymptotic command carries coefficients and thresholds") {
    std::string path = out_dir() + "/asymptotic.csv";
    REQUIRE(run_cli("asymptotic --n 4 --e 0:0.04:9 --lambda 0:40:401 --output " + path) == 0);
    Csv csv = read_csv(path);
    REQUIRE(csv.rows.size() == 9);
    CHECK(csv.columns.back() == "thresholds");

    // Quadratic coefficient at zero error has the closed form (n-1)^2/(2n^2).
    CHECK_NEAR(csv.num(0, "d2_single"), 9.0 / 32.0, 1e-9);
    CHECK(csv.num(0, "d2_two") > csv.num(0, "d2_single"));

    // Thresholds column: single-photon cutoff, two-photon cutoff, split
    // pinning onset (zero for this block length).
    CHECK_NEAR(csv.num(0, "thresholds"), 0.0375063183, 5e-4);
    CHECK_NEAR(csv.num(1, "thresholds"), 0.0041274, 5e-4);
    CHECK_NEAR(csv.num(2, "thresholds"), 0.0, 0.0);
    CHECK(csv.rows.at(3).back().empty());

    // Coefficients vanish beyond their windows.
    CHECK(csv.num(8, "d2_single") == 0.0);  // e = 0.04 > 0.0375
    CHECK(csv.num(8, "d2_two") == 0.0);
    CHECK(csv.num(4, "d32_two") == 0.0);  // e = 0.02 > 0.0041
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    std::string path = out_dir() + "/repeat.csv";
    std::string args = "omega --n 5 --nu 2 --lambda 0:12:101 --output " + path;
    REQUIRE(run_cli(args + " --workers 1") == 0);
    std::string first = slurp(path);
    REQUIRE(run_cli(args + " --workers 3") == 0);
    CHECK(first == slurp(path));
    REQUIRE(run_cli(args + " --workers 3") == 0);
    CHECK(first == slurp(path));
}

TEST_CASE("config files mirror flags and the command line wins") {
    std::string conf = out_dir() + "/omega.conf";
    {
        std::ofstream out(conf);
        out << "# comment line\n";
        out << "n = 4\n";
        out << "nu=0\n";
        out << "lambda = 0:2:3\n";
    }
    std::string path = out_dir() + "/from_config.csv";
    REQUIRE(run_cli("omega --config " + conf + " --output " + path) == 0);
    Csv csv = read_csv(path);
    CHECK(csv.comment_value("n") == "4");
    CHECK(csv.comment_value("nu") == "0");
    REQUIRE(csv.rows.size() == 3);
    CHECK_NEAR(csv.num(0, "omega"), 0.5, 1e-10);

    REQUIRE(run_cli("omega --config " + conf + " --nu 1 --output " + path) == 0);
    CHECK(read_csv(path).comment_value("nu") == "1");

    std::string bad = out_dir() + "/bad.conf";
    {
        std::ofstream out(bad);
        out << "n = 4\nunknown_key = 1\n";
    }
    CHECK(run_cli("omega --config " + bad + " --output " + path) == 2);
    CHECK(run_cli("omega --config " + out_dir() + "/missing.conf --output " + path) == 2);
}

TEST_CASE("environment variable redirects default output") {
    std::string cmd = std::string("DPSKR_OUTPUT_DIR=") + out_dir() +
                      " " DPSKR_CLI_BIN " omega --n 4 --nu 0 --lambda 0:1:2 >/dev/null 2>&1";
    std::filesystem::remove(out_dir() + "/omega.csv");
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(out_dir() + "/omega.csv"));
}

TEST_CASE("exit codes separate config errors from verify failures") {
    CHECK(run_cli("omega") == 2);                                     // missing required flag
    CHECK(run_cli("omega --n 4 --nu 1 --lambda 5:1:3") == 2);         // bad grid
    CHECK(run_cli("omega --n 2 --nu 1 --lambda 0:1:2") == 2);         // block too short
    CHECK(run_cli("keyrate --n 9 --policy fancy:3") == 2);            // unknown policy
    CHECK(run_cli("verify --n 9") == 2);                              // dense route cap
    CHECK(run_cli("nonsense") == 2);                                  // unknown subcommand
    CHECK(run_cli("omega --n 4 --nu 1 --lambda 0:1:2 --output /nonexistent/x.csv") == 2);

    CHECK(run_cli("verify --n 4") == 0);
    CHECK(run_cli("verify --n 4 --mutate") == 1);
}
