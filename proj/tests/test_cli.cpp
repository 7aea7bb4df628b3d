#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qexcess/manifest.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::path(QEXCESS_TEST_DIR) / "cli_work";

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + QEXCESS_BINARY + " " + args + " > " + (kDir / "stdout.txt").string() +
                            " 2> " + (kDir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = kDir / name;
    std::ofstream(p) << text;
    return p;
}

std::vector<double> last_row(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            last = line;
        }
    }
    std::vector<double> out;
    std::istringstream cells(last);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
        out.push_back(std::stod(cell));
    }
    return out;
}

struct Workspace {
    Workspace() {
        fs::remove_all(kDir);
        fs::create_directories(kDir);
    }
};

} // namespace

TEST_CASE_FIXTURE(Workspace, "usage errors exit with 2") {
    const auto conf = write_config("empty.conf", "");
    CHECK(run("") == 2);
    CHECK(run("simulate --config " + conf.string() + " --out x.csv --bogus") == 2);
    CHECK(slurp(kDir / "stderr.txt").find("bogus") != std::string::npos);
    CHECK(run("frobnicate --config " + conf.string() + " --out x.csv") == 2);
    CHECK(run("simulate --out x.csv") == 2);
    CHECK(run("simulate --config " + (kDir / "missing.conf").string() + " --out x.csv") == 2);
    CHECK(run("simulate --config " + conf.string() + " --out x.csv --mode loud") == 2);
    CHECK(run("simulate --config " + conf.string() + " --out x.csv --threads 0") == 2);
    CHECK(run("steady --config " + conf.string() + " --out x.csv", "QEXCESS_THREADS=abc") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE_FIXTURE(Workspace, "config errors exit with 2 and cite the problem") {
    const auto unstable = write_config("unstable.conf", "coupling_normalized = 1.5\n");
    CHECK(run("steady --config " + unstable.string() + " --out " + (kDir / "u.csv").string()) == 2);
    CHECK(slurp(kDir / "stderr.txt").find("stability invariant") != std::string::npos);
    CHECK_FALSE(fs::exists(kDir / "u.csv"));

    const auto typo = write_config("typo.conf", "mass1 = 1e-23\ntemprature = 4\n");
    CHECK(run("steady --config " + typo.string() + " --out " + (kDir / "t.csv").string()) == 2);
    CHECK(slurp(kDir / "stderr.txt").find(":2:") != std::string::npos);
}

TEST_CASE_FIXTURE(Workspace, "simulate and steady agree and reruns are byte-identical") {
    const auto conf = write_config("short.conf",
                                   "coupling_normalized = 0.2\ntemperature1 = 30\n"
                                   "t_stop_gamma = 60\nt_count = 4\n");
    const fs::path sim = kDir / "sim.csv";
    REQUIRE(run("simulate --config " + conf.string() + " --out " + sim.string()) == 0);
    REQUIRE(fs::exists(sim));
    REQUIRE(fs::exists(sim.string() + ".manifest.json"));
    CHECK_FALSE(fs::exists(sim.string() + ".tmp"));
    const std::string text = slurp(sim);
    CHECK(text.find("t_seconds,t_gamma_units,excess_x1x1,excess_x1p1,excess_x1x2") != std::string::npos);
    CHECK(text.find("normalized_x1x2") != std::string::npos);

    const fs::path steady = kDir / "steady.csv";
    REQUIRE(run("steady --config " + conf.string() + " --out " + steady.string()) == 0);
    const auto a = last_row(sim);
    const auto b = last_row(steady);
    REQUIRE(a.size() == b.size());
    for (std::size_t k : {2u, 4u, 9u, 11u}) {
        CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-3));
    }

    const fs::path again = kDir / "again.csv";
    REQUIRE(run("simulate --config " + sim.string() + " --out " + again.string() + " --threads 3") == 0);
    CHECK(slurp(again) == text);
    const fs::path from_json = kDir / "json.csv";
    REQUIRE(run("simulate --config " + sim.string() + ".manifest.json --out " + from_json.string(),
                "QEXCESS_THREADS=2") == 0);
    CHECK(slurp(from_json) == text);

    const fs::path quantum = kDir / "quantum.csv";
    REQUIRE(run("simulate --config " + conf.string() + " --out " + quantum.string() + " --mode quantum") == 0);
    const std::string qtext = slurp(quantum);
    CHECK(qtext.find("# mode = quantum") != std::string::npos);
    CHECK(qtext.find("quantum_x1x1") != std::string::npos);
    CHECK(qtext.find("normalized_") == std::string::npos);
}

TEST_CASE_FIXTURE(Workspace, "sweep and validate") {
    const auto conf = write_config("sweep.conf", "sweep.couplings = 0.01, 0.2\nsweep.temperatures = 5, 100\n");
    const fs::path out = kDir / "sweep.csv";
    REQUIRE(run("sweep --config " + conf.string() + " --out " + out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("temperature_K,coupling_normalized,excess_x1x2,normalizer1,normalizer2,normalized_x1x2\n5,0.01,") !=
          std::string::npos);

    const auto defaults = write_config("defaults.conf", "");
    const fs::path report = kDir / "validate.csv";
    CHECK(run("validate --config " + defaults.string() + " --out " + report.string()) == 0);
    const std::string out_text = slurp(kDir / "stdout.txt");
    CHECK(out_text.find("PASS greens_residues_vs_ode") != std::string::npos);
    CHECK(out_text.find("FAIL") == std::string::npos);
    CHECK(slurp(report).find("check,passed,metric,tolerance") != std::string::npos);
}
