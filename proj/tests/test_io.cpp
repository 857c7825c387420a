#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spectool/config.hpp"
#include "spectool/csv.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace spectool;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "spectool_io_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fmt_double round-trips arbitrary doubles") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 500; ++i) {
        const double v = u(gen) * std::pow(10.0, static_cast<int>(gen() % 13) - 6);
        CHECK(io::parse_double(io::fmt_double(v)) == v);
    }
    CHECK(io::fmt_double(2.49) == "2.49");  // shortest form, no digit noise
    CHECK_THROWS_AS(io::parse_double("not-a-number"), io::IoError);
}

TEST_CASE("spectrum files round-trip with their unit") {
    const auto dir = temp_dir();
    std::vector<double> nm = {430.0, 431.0, 432.5};
    std::vector<double> in = {1.5, 2.25, 0.125};
    core::Spectrum s(nm, in, core::AxisUnit::Nanometer);
    io::write_spectrum(dir / "s.csv", s);
    auto back = io::read_spectrum(dir / "s.csv");
    CHECK(back.unit == core::AxisUnit::Nanometer);
    CHECK(back.axis == s.axis);
    CHECK(back.intensities == s.intensities);

    SUBCASE("unknown unit rejected") {
        std::ofstream out(dir / "bad.csv");
        out << "frequency_Hz,intensity\n1,2\n2,3\n3,4\n";
        out.close();
        CHECK_THROWS_AS(io::read_spectrum(dir / "bad.csv"), io::IoError);
    }
}

TEST_CASE("grid reader rejects ragged rows") {
    const auto dir = temp_dir();
    {
        std::ofstream out(dir / "ragged.csv");
        out << "1,2,3\n4,5\n";
    }
    CHECK_THROWS_AS(io::read_grid(dir / "ragged.csv"), io::IoError);
    {
        std::ofstream out(dir / "empty.csv");
    }
    CHECK_THROWS_AS(io::read_grid(dir / "empty.csv"), io::IoError);
    io::write_grid(dir / "ok.csv", {1.0, 2.0, 3.0, 4.0}, 2, 2);
    auto g = io::read_grid(dir / "ok.csv");
    CHECK(g.rows == 2);
    CHECK(g.cols == 2);
    CHECK(g.values == std::vector<double>{1.0, 2.0, 3.0, 4.0});
}

TEST_CASE("trace and g2 files round-trip") {
    const auto dir = temp_dir();
    core::CountTrace t(0.01, {1, 5, 0, 42});
    io::write_trace(dir / "t.csv", t);
    auto tb = io::read_trace(dir / "t.csv");
    CHECK(tb.bin_width_s == t.bin_width_s);
    CHECK(tb.counts == t.counts);

    core::G2Histogram g(2e-10, {-4e-10, -2e-10, 0.0, 2e-10, 4e-10}, {1.0, 2.0, 0.5, 2.0, 1.0});
    io::write_g2(dir / "g.csv", g);
    auto gb = io::read_g2(dir / "g.csv");
    CHECK(gb.bin_width_s == g.bin_width_s);
    CHECK(gb.delays == g.delays);
    CHECK(gb.coincidences == g.coincidences);
}

TEST_CASE("transitions files rewrite byte-identically") {
    const auto dir = temp_dir();
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(2.34, 2.88);
    std::vector<fitting::TransitionSet> sets;
    for (int i = 0; i < 25; ++i) {
        fitting::TransitionSet ts;
        ts.emitter_id = i;
        ts.zpl_energy = 2.1 + 0.001 * i;
        const int n = static_cast<int>(gen() % 4);
        for (int k = 0; k < n; ++k) ts.transitions.push_back(u(gen));
        std::sort(ts.transitions.begin(), ts.transitions.end());
        sets.push_back(std::move(ts));
    }
    io::write_transitions(dir / "a.csv", sets);
    auto back = io::read_transitions(dir / "a.csv");
    io::write_transitions(dir / "b.csv", back);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    // pairwise diffs are rebuilt on read
    for (const auto& ts : back)
        CHECK(ts.pairwise_diffs.size() == ts.transitions.size() * (ts.transitions.size() - 1) / 2);
}

TEST_CASE("manifest round-trips and load_record honors absent fields") {
    const auto dir = temp_dir() / "ds";
    fs::create_directories(dir);
    core::Spectrum ple({430.0, 431.0, 432.0}, {1.0, 2.0, 1.5}, core::AxisUnit::Nanometer);
    io::write_spectrum(dir / "p.csv", ple);
    std::vector<io::ManifestEntry> entries(1);
    entries[0].id = 3;
    entries[0].ple = "p.csv";
    io::write_manifest(dir / "manifest.csv", entries);
    auto back = io::read_manifest(dir / "manifest.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].id == 3);
    CHECK(back[0].ple == "p.csv");
    CHECK(back[0].pl.empty());

    auto rec = io::load_record(dir, back[0]);
    CHECK(rec.id == 3);
    CHECK(rec.ple.has_value());
    CHECK_FALSE(rec.pl.has_value());
    CHECK_FALSE(rec.trace.has_value());
    CHECK(rec.optimization_traces.empty());
}

TEST_CASE("config file loading") {
    const auto dir = temp_dir();
    SUBCASE("values override defaults, unknown keys rejected") {
        {
            std::ofstream out(dir / "cfg.json");
            out << R"({"ple_window": 12, "sim_jitter": 0.02, "raw_density": true,
                       "sim_modes": [[0.16, 10], [0.1, 1]]})";
        }
        cli::PipelineConfig cfg;
        cli::load_config_file(cfg, dir / "cfg.json");
        CHECK(cfg.ple_window == 12);
        CHECK(cfg.sim_jitter == 0.02);
        CHECK(cfg.raw_density);
        REQUIRE(cfg.sim_modes.size() == 2);
        CHECK(cfg.sim_modes[0].first == 0.16);
        CHECK(cfg.pl_window == 25);  // untouched default

        {
            std::ofstream out(dir / "bad.json");
            out << R"({"no_such_key": 1})";
        }
        cli::PipelineConfig cfg2;
        CHECK_THROWS_AS(cli::load_config_file(cfg2, dir / "bad.json"), cli::ConfigError);
    }
    SUBCASE("malformed json rejected") {
        {
            std::ofstream out(dir / "syntax.json");
            out << "{not json";
        }
        cli::PipelineConfig cfg;
        CHECK_THROWS_AS(cli::load_config_file(cfg, dir / "syntax.json"), cli::ConfigError);
    }
    SUBCASE("validation catches bad values") {
        cli::PipelineConfig cfg;
        cfg.ple_window = 0;
        CHECK_THROWS_AS(cfg.validate(), cli::ConfigError);
        cfg = {};
        cfg.density_step = -1.0;
        CHECK_THROWS_AS(cfg.validate(), cli::ConfigError);
        cfg = {};
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("mode list flag parser") {
    auto modes = cli::parse_modes("0.165:25,0.19:2,0.1:2");
    REQUIRE(modes.size() == 3);
    CHECK(modes[0].first == 0.165);
    CHECK(modes[0].second == 25.0);
    CHECK(modes[2].second == 2.0);
    CHECK_THROWS_AS(cli::parse_modes("garbage"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_modes(""), cli::ConfigError);
}
