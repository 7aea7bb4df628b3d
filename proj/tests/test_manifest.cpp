#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qexcess/dataset.hpp"
#include "qexcess/errors.hpp"
#include "qexcess/manifest.hpp"

using namespace qexcess;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int error_line(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("empty config resolves to the standard system") {
    const auto m = parse_config("");
    CHECK(m.config == SystemConfig::reference_system());
    CHECK(m.hbar_scale == 1.0);
    CHECK(m.grid == TimeGrid::standard(SystemConfig::reference_system()));
    CHECK(m.sweep == SweepSpec::standard());
    CHECK(m.mode == OutputMode::excess);
    CHECK(m.normalization == Normalization::fdt);
    CHECK(m.omega_max_factor == 50.0);
    CHECK(m.classical_initial == ClassicalInitial::zero);
    CHECK(m.fdt_reference == FdtReference::isolated);
    CHECK(m.inputs.empty());
    CHECK(parse_config("# only a comment\n\n   \n") == m);
}

TEST_CASE("normalized inputs are translated and recorded") {
    const auto m = parse_config(
        "coupling_normalized = 0.2\n"
        "temperature1 = 30\n"
        "gamma1_ratio = 0.02\n"
        "t_stop_gamma = 10   # in units of 1/gamma1\n");
    CHECK(normalized_coupling(m.config) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(m.config.bath(0).temperature == 30.0);
    CHECK(m.config.bath(1).temperature == 300.0);
    CHECK(m.config.osc1().damping == doctest::Approx(2e11));
    CHECK(m.grid.stop == doctest::Approx(10.0 / 2e11));
    CHECK(m.inputs.at("coupling_normalized") == "0.2");
    CHECK(m.inputs.at("t_stop_gamma") == "10");
    const std::string text = serialize(m);
    CHECK(text.find("coupling = ") != std::string::npos);
    CHECK(text.find("input.coupling_normalized = 0.2") != std::string::npos);
    CHECK(text.find("derived.coupling_normalized = ") != std::string::npos);
}

TEST_CASE("stability violation names the invariant") {
    try {
        (void)parse_config("coupling_normalized = 1.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("stability invariant") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("coupling = 1e6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("temperature = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("hbar_scale = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("t_count = 1\n"), ConfigError);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(error_line("mass1 = 1e-23\nbogus = 3\n") == 2);
    CHECK(error_line("\n\nmass1 = abc\n") == 3);
    CHECK(error_line("mass1 = 1e-23\nmass1 = 2e-23\n") == 2);
    CHECK(error_line("just words\n") == 1);
    CHECK(error_line("coupling = 1\n\ncoupling_normalized = 0.1\n") == 3);
    CHECK(error_line("t_count = 4.5\n") == 1);
    CHECK(error_line("mode = loud\n") == 1);
    CHECK(error_line("sigma0.x1x1 = 1\n") == 1);
    CHECK(error_line("mass1 =\n") == 1);
}

TEST_CASE("serialization round trip") {
    auto m = parse_config(
        "command = sweep\n"
        "name = round trip\n"
        "coupling_normalized = -0.3\n"
        "temperature = 12.5\n"
        "hbar_scale = 0.25\n"
        "t_start = 1e-13\nt_stop = 2e-10\nt_count = 7\nt_spacing = log\n"
        "mode = quantum\nnormalization = none\nomega_max_factor = 80\n"
        "classical_initial = shared\nfdt_reference = coupled\nroute = resolvent\n"
        "sweep.couplings = 0.01, 0.1\nsweep.temperatures = 7\n"
        "check.threshold = 0.05\n");
    m.initial_policy = InitialPolicy::explicit_matrix;
    m.initial = CovarianceMatrix::from_matrix(1.7 * ground_state_covariance(m.config).matrix());
    const auto back = parse_config(serialize(m));
    CHECK(back == m);
    CHECK(serialize(back) == serialize(m));
    CHECK(back.checks.at("threshold") == 0.05);
    CHECK(parse_config(serialize(parse_config(""))) == parse_config(""));
}

TEST_CASE("number formatting is lossless") {
    for (double v : {0.1, 1.0 / 3.0, 11.536897329871667, 1e-300, -2.5e-24, 5e-324}) {
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(300.0) == "300");
}

TEST_CASE("datasets embed their manifest and are written atomically") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qexcess_manifest_test";
    fs::create_directories(dir);
    const auto m = parse_config("coupling_normalized = 0.2\ntemperature1 = 30\nname = sample\n");

    Table t;
    t.columns = {"a", "b"};
    t.rows = {{1.0, 1.0 / 3.0}, {std::numeric_limits<double>::infinity(), -0.0}};
    const std::string csv = render_dataset(m, t);
    CHECK(csv.rfind("# qexcess dataset\n# manifest-begin\n", 0) == 0);
    CHECK(csv.find("# manifest-end\na,b\n1,0.33333333333333331\ninf,-0\n") != std::string::npos);

    const fs::path out = dir / "data.csv";
    write_atomic(out, csv);
    write_atomic(sidecar_path(out), manifest_json(m, out.string(), t.rows.size()));
    CHECK(slurp(out) == csv);
    CHECK_FALSE(fs::exists(dir / "data.csv.tmp"));
    CHECK(load_manifest(out.string()) == m);
    CHECK(load_manifest(sidecar_path(out).string()) == m);

    const fs::path conf = dir / "plain.conf";
    write_atomic(conf, serialize(m));
    CHECK(load_manifest(conf.string()) == m);
    CHECK_THROWS_AS(load_manifest((dir / "missing.conf").string()), ConfigError);
    CHECK_THROWS_AS(write_atomic(dir / "no_such_dir" / "x.csv", "x"), Error);

    Table labelled;
    labelled.label_column = "check";
    labelled.labels = {"first"};
    labelled.columns = {"passed"};
    labelled.rows = {{1.0}};
    CHECK(render_dataset(m, labelled).find("check,passed\nfirst,1\n") != std::string::npos);
    fs::remove_all(dir);
}
