#include "mach/cli.hpp"

#include "mach/errors.hpp"
#include "mach/tensor.hpp"
#include "mach/tensor_io.hpp"
#include "mach/tucker.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace mach;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("mach_cli_test_" + std::to_string(++counter));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    CliResult r;
    r.code = run_cli(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string value_of(const std::string& text, const std::string& key) {
    const std::string needle = key + " = ";
    std::size_t pos;
    if (text.rfind(needle, 0) == 0) {
        pos = needle.size();
    } else {
        const std::size_t hit = text.find('\n' + needle);
        REQUIRE(hit != std::string::npos);
        pos = hit + 1 + needle.size();
    }
    return text.substr(pos, text.find('\n', pos) - pos);
}

bool files_equal(const std::string& a, const std::string& b) {
    return read_text(a) == read_text(b);
}

const std::vector<std::string> kModelFiles = {"core", "factor_1", "factor_2", "factor_3",
                                              "metadata"};

}  // namespace

TEST_CASE("full-rank decomposition compared against itself is perfect") {
    TempDir dir;
    const std::string tensor = dir.file("t.tensor");
    const std::string model = dir.file("model");
    const std::string report = dir.file("report.txt");
    REQUIRE(run({"synth", "--n", "5", "--output", tensor}).code == 0);
    REQUIRE(run({"hosvd", "--input", tensor, "--ranks", "5,5,5", "--output", model}).code == 0);
    const CliResult r =
        run({"compare", "--exact", model, "--approx", model, "--reference", tensor, "--output",
             report});
    REQUIRE(r.code == 0);
    const std::string text = read_text(report);
    CHECK(value_of(text, "mode_1.rho") == "1");
    CHECK(value_of(text, "mode_2.rho") == "1");
    CHECK(value_of(text, "mode_3.rho") == "1");
    CHECK(value_of(text, "mode_1.flipped") == "false");
    CHECK(value_of(text, "mode_1.tied") == "false");
    CHECK(value_of(text, "accuracy_exact") == value_of(text, "accuracy_mach"));
    CHECK(std::stod(value_of(text, "accuracy_exact")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value_of(text, "core_exact") == value_of(text, "core_mach"));
    CHECK(r.out.find("wrote " + report) != std::string::npos);
}

TEST_CASE("sampling with everything kept reproduces the exact pipeline byte for byte") {
    TempDir dir;
    const std::string tensor = dir.file("t.tensor");
    REQUIRE(run({"synth", "--n", "6", "--output", tensor}).code == 0);
    REQUIRE(run({"hosvd", "--input", tensor, "--ranks", "3,2,4", "--output", dir.file("exact")})
                .code == 0);
    REQUIRE(run({"mach-hosvd", "--input", tensor, "--ranks", "3,2,4", "--p", "1.0", "--seed",
                 "123", "--output", dir.file("sampled")})
                .code == 0);
    for (const std::string& f : kModelFiles)
        CHECK(files_equal(dir.file("exact/" + f), dir.file("sampled/" + f)));
}

TEST_CASE("repeating an invocation reproduces its artifacts byte for byte") {
    TempDir dir;
    const std::string tensor = dir.file("t.tensor");
    REQUIRE(run({"synth", "--n", "12", "--output", tensor}).code == 0);

    const std::vector<std::string> common = {"--input", tensor, "--ranks", "2,3,2",
                                             "--p",     "0.35", "--seed",  "7"};
    for (const std::string& tag : {"a", "b"}) {
        std::vector<std::string> args = {"mach-hooi"};
        args.insert(args.end(), common.begin(), common.end());
        args.insert(args.end(),
                    {"--output", dir.file(tag), "--sparsified", dir.file(tag + ".sparse")});
        REQUIRE(run(args).code == 0);
    }
    for (const std::string& f : kModelFiles) CHECK(files_equal(dir.file("a/" + f), dir.file("b/" + f)));
    CHECK(files_equal(dir.file("a.sparse"), dir.file("b.sparse")));

    for (const std::string& tag : {"1", "2"}) {
        REQUIRE(run({"bench", "--input", tensor, "--ranks", "2,2,2", "--p", "0.5", "--seed", "3",
                     "--output", dir.file("bench" + tag + ".csv"), "--timing",
                     dir.file("timing" + tag + ".csv")})
                    .code == 0);
    }
    CHECK(files_equal(dir.file("bench1.csv"), dir.file("bench2.csv")));
    const std::string bench = read_text(dir.file("bench1.csv"));
    CHECK(bench.rfind("p,accuracy_exact,accuracy_mach,core_exact,core_mach,rho_1,rho_2,rho_3\n",
                      0) == 0);
    CHECK(bench.substr(bench.find('\n') + 1).rfind("0.5,", 0) == 0);
    const std::string timing = read_text(dir.file("timing1.csv"));
    CHECK(timing.rfind("exact_seconds,mach_seconds,speedup\n", 0) == 0);
}

TEST_CASE("the monitoring pipeline runs end to end") {
    TempDir dir;
    const std::string csv = dir.file("stream.csv");
    const std::string tensor = dir.file("stream.tensor");
    const std::string labels = dir.file("labels.txt");
    REQUIRE(run({"synth", "--stream", "--machines", "12", "--metrics", "5", "--buckets", "40",
                 "--gap", "0.05", "--anomaly", "3", "--seed", "11", "--output", csv})
                .code == 0);
    REQUIRE(run({"ingest", "--input", csv, "--output", tensor, "--missing", "carry_forward",
                 "--labels", labels})
                .code == 0);
    const std::string label_text = read_text(labels);
    int machine_lines = 0;
    for (std::size_t pos = label_text.find("machine: "); pos != std::string::npos;
         pos = label_text.find("machine: ", pos + 1))
        ++machine_lines;
    CHECK(machine_lines == 12);

    REQUIRE(run({"hooi", "--input", tensor, "--ranks", "2,2,2", "--output", dir.file("exact")})
                .code == 0);
    REQUIRE(run({"mach-hooi", "--input", tensor, "--ranks", "2,2,2", "--p", "0.5", "--seed", "2",
                 "--output", dir.file("sampled")})
                .code == 0);
    const CliResult r = run({"compare", "--exact", dir.file("exact"), "--approx",
                             dir.file("sampled"), "--reference", tensor, "--output",
                             dir.file("report.txt")});
    REQUIRE(r.code == 0);
    const std::string text = read_text(dir.file("report.txt"));
    CHECK(std::stod(value_of(text, "mode_1.rho")) > 0.5);
    CHECK(std::stod(value_of(text, "accuracy_exact")) > 0.0);
    CHECK(text.find("mode_3.tied") != std::string::npos);
}

TEST_CASE("bound runs from files and from dimensions alone") {
    TempDir dir;
    const std::string tensor = dir.file("t.tensor");
    const std::string sparse = dir.file("t.sparse");
    REQUIRE(run({"synth", "--n", "8", "--output", tensor}).code == 0);
    REQUIRE(run({"sparsify", "--input", tensor, "--p", "0.4", "--seed", "3", "--output", sparse})
                .code == 0);
    REQUIRE(run({"bound", "--input", tensor, "--sparsified", sparse, "--ranks", "2,2,2", "--p",
                 "0.4", "--output", dir.file("full.txt")})
                .code == 0);
    const std::string full = read_text(dir.file("full.txt"));
    CHECK(value_of(full, "b") == "0.3333333333333333");
    CHECK(std::stod(value_of(full, "t")) > 0.0);
    CHECK(value_of(full, "mode_3.rank") == "2");

    REQUIRE(run({"bound", "--dims", "200,200,200", "--p", "0.1", "--output", dir.file("dims.txt")})
                .code == 0);
    const std::string dims = read_text(dir.file("dims.txt"));
    CHECK(std::stod(value_of(dims, "p_min")) > 1.0);
    CHECK(value_of(dims, "conditions_met") == "false");
    CHECK(value_of(dims, "dims_large_enough") == "true");
    CHECK(dims.find("\nt = ") == std::string::npos);
    CHECK(dims.rfind("b = ", 0) == std::string::npos);
}

TEST_CASE("usage errors exit with status 2 and a diagnostic") {
    TempDir dir;
    const std::string tensor = dir.file("t.tensor");
    REQUIRE(run({"synth", "--n", "4", "--output", tensor}).code == 0);

    CHECK(run({}).code == 2);
    CHECK(run({"transmogrify"}).code == 2);
    CHECK(run({"hosvd", "--input", tensor, "--output", dir.file("m")}).code == 2);
    CHECK(run({"synth", "--output", dir.file("x")}).code == 2);
    CHECK(run({"synth", "--n", "4", "--stream", "--output", dir.file("x")}).code == 2);
    CHECK(run({"hosvd", "--input", tensor, "--ranks", "two,2,2", "--output", dir.file("m")})
              .code == 2);
    CHECK(run({"bound", "--p", "0.5", "--output", dir.file("b.txt")}).code == 2);

    const CliResult bad_p =
        run({"sparsify", "--input", tensor, "--p", "1.5", "--seed", "1", "--output", dir.file("s")});
    CHECK(bad_p.code == 2);
    CHECK(bad_p.err.rfind("mach: ", 0) == 0);

    const CliResult bad_ranks =
        run({"hosvd", "--input", tensor, "--ranks", "9,1,1", "--output", dir.file("m")});
    CHECK(bad_ranks.code == 2);
    CHECK(bad_ranks.err.find("rank") != std::string::npos);

    const CliResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("Subcommands") != std::string::npos);
}

TEST_CASE("data errors exit with status 3 and a diagnostic") {
    TempDir dir;
    CHECK(run({"hosvd", "--input", dir.file("missing.tensor"), "--ranks", "2,2", "--output",
               dir.file("m")})
              .code == 3);

    write_text(dir.file("broken.tensor"), "dims: 2 2\n1 2\n3\n");
    const CliResult broken = run({"hosvd", "--input", dir.file("broken.tensor"), "--ranks", "2,2",
                                  "--output", dir.file("m")});
    CHECK(broken.code == 3);
    CHECK(broken.err.find("line") != std::string::npos);

    const std::string small = dir.file("small.tensor");
    const std::string big = dir.file("big.tensor");
    REQUIRE(run({"synth", "--n", "4", "--output", small}).code == 0);
    REQUIRE(run({"synth", "--n", "5", "--output", big}).code == 0);
    REQUIRE(run({"hosvd", "--input", small, "--ranks", "2,2,2", "--output", dir.file("m")})
                .code == 0);
    CHECK(run({"compare", "--exact", dir.file("m"), "--approx", dir.file("m"), "--reference", big,
               "--output", dir.file("r.txt")})
              .code == 3);

    std::filesystem::remove(dir.file("m/factor_2"));
    CHECK(run({"compare", "--exact", dir.file("m"), "--approx", dir.file("m"), "--reference",
               small, "--output", dir.file("r.txt")})
              .code == 3);
}

TEST_CASE("the thread-count override is validated before any work") {
    TempDir dir;
    setenv("MACH_THREADS", "not-a-number", 1);
    const CliResult bad = run({"synth", "--n", "3", "--output", dir.file("t.tensor")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("MACH_THREADS") != std::string::npos);
    CHECK(!std::filesystem::exists(dir.file("t.tensor")));

    setenv("MACH_THREADS", "0", 1);
    CHECK(run({"synth", "--n", "3", "--output", dir.file("t.tensor")}).code == 2);

    setenv("MACH_THREADS", "2", 1);
    CHECK(run({"synth", "--n", "3", "--output", dir.file("t.tensor")}).code == 0);
    unsetenv("MACH_THREADS");
    CHECK(std::filesystem::exists(dir.file("t.tensor")));
}
