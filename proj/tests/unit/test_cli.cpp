#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "texcls_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = std::string("\"") + TEXCLS_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + (scratch() / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

/// Texture images shared by all cases, written once.
const fs::path& dataset() {
    static const fs::path root = [] {
        const fs::path r = scratch() / "data";
        synth::write_pgm_dataset(r, synth::texture_dataset(16, 32, 5));
        return r;
    }();
    return root;
}

const fs::path& cache() {
    static const fs::path file = [] {
        const fs::path f = scratch() / "features.csv";
        const auto r = run_cli("extract --dataset \"" + dataset().string() + "\" --out \"" + f.string() +
                              "\" --workers 1");
        REQUIRE(r.code == 0);
        return f;
    }();
    return file;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path f = scratch() / (name + ".cfg");
    std::ofstream(f) << body;
    return f;
}

} // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("classify --cache x.csv --case 40 --seed 1").code == 2);
    CHECK(run_cli("experiment --config \"" + (scratch() / "missing.cfg").string() + "\"").code == 2);
    const auto bad = write_config("bad", "permutations = 0\n");
    CHECK(run_cli("experiment --config \"" + bad.string() + "\"").code == 2);
    const auto unknown = write_config("unknown", "colour = blue\n");
    CHECK(run_cli("experiment --config \"" + unknown.string() + "\"").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("unreadable images exit with 3") {
    const fs::path root = scratch() / "broken";
    fs::create_directories(root / "a");
    fs::create_directories(root / "b");
    std::ofstream(root / "a" / "x.pgm") << "not an image";
    std::ofstream(root / "b" / "y.pgm") << "not an image";
    CHECK(run_cli("extract --dataset \"" + root.string() + "\" --out \"" + (scratch() / "o.csv").string() + "\"")
              .code == 3);
}

TEST_CASE("extract writes a 520-column cache") {
    const std::string text = slurp(cache());
    const auto header = text.substr(0, text.find('\n'));
    std::size_t commas = 0;
    for (char c : header) commas += c == ',';
    CHECK(commas == 521);
    std::size_t rows = 0;
    for (char c : text) rows += c == '\n';
    CHECK(rows == 81);
}

TEST_CASE("classify prints every requested stage") {
    const auto cfg = write_config("classify", "ga.population = 8\nga.max_generations = 4\n");
    const auto r = run_cli("classify --cache \"" + cache().string() + "\" --case 3 --seed 7 --workers 1 --config \"" +
                          cfg.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("case 3 seed 7") != std::string::npos);
    CHECK(r.out.find("raw ") != std::string::npos);
    CHECK(r.out.find("pca ") != std::string::npos);
    CHECK(r.out.find("ga  ") != std::string::npos);
    const auto again = run_cli("classify --cache \"" + cache().string() + "\" --case 3 --seed 7 --workers 1 --config \"" +
                              cfg.string() + "\"");
    CHECK(again.out == r.out);
    const auto raw = run_cli("classify --cache \"" + cache().string() + "\" --case 3 --seed 7 --stages raw");
    REQUIRE(raw.code == 0);
    CHECK(raw.out.find("ga ") == std::string::npos);
}

TEST_CASE("experiment and reports") {
    const fs::path out = scratch() / "sweep";
    const auto cfg = write_config("sweep", "cache = " + cache().string() + "\noutput = " + out.string() +
                                               "\ncases = 1,2,4,8,16\npermutations = 3\nseed = 9\n"
                                               "ga.population = 8\nga.max_generations = 4\nworkers = 1\n");
    const auto r = run_cli("experiment --quiet --config \"" + cfg.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(out / "results.csv"));

    const auto corr = run_cli("report correlations --results \"" + out.string() + "\" --stage ga");
    REQUIRE(corr.code == 0);
    for (const char* name : {"Original,", "Variance,", "Entropy,", "Canny,", "Gaussian,"}) {
        CHECK(corr.out.find(name) != std::string::npos);
    }

    const auto rel = run_cli("report relevance --results \"" + out.string() + "\" --top 3");
    REQUIRE(rel.code == 0);
    CHECK(rel.out.find("rank,group,name,mean_selection_frequency") != std::string::npos);

    const auto conf = run_cli("report confusion --results \"" + out.string() + "\" --case 4");
    REQUIRE(conf.code == 0);
    CHECK(conf.out.find("case 4, stage ga") != std::string::npos);
    CHECK(run_cli("report confusion --results \"" + out.string() + "\" --case 5").code == 2);
}

TEST_CASE("correlations over two cases exit with 4") {
    const fs::path out = scratch() / "pair";
    const auto cfg = write_config("pair", "cache = " + cache().string() + "\noutput = " + out.string() +
                                              "\ncases = 1,2\npermutations = 2\nstages = raw\nworkers = 1\n");
    REQUIRE(run_cli("experiment --quiet --config \"" + cfg.string() + "\"").code == 0);
    CHECK(run_cli("report correlations --results \"" + out.string() + "\"").code == 4);
}
