#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsa/bench.hpp"
#include "irsa/cli.hpp"
#include "irsa/settings.hpp"

using namespace irsa;

namespace {

Settings parse(const std::string& text) {
    std::istringstream is(text);
    return parse_settings(is, "test");
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto dir = std::filesystem::temp_directory_path() / "irsa_test_bench";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

int cli(std::vector<std::string> args, std::string& out) {
    std::ostringstream o, e;
    const int rc = run_cli(args, o, e);
    out = o.str();
    return rc;
}

const char* kSmall = R"(# small test scenario
[scenario]
num_res = 10
load = 1.2
num_antennas = 8
degree = soliton:6
[chest]
estimator = lcmmse
pilot_len = 4
[run]
seed = 3
trials = 6
[sweep]
axis = pilot_len
values = 2,4
[de]
theta_source = empirical
theta_r_max = 6
theta_trials = 200
loads = 0.5,1.5
inflection = true
inflection_lo = 0.2
inflection_hi = 3
inflection_tol = 1e-2
)";

}  // namespace

TEST_CASE("rate metric") {
    CHECK(compute_rate(2.0, 10, 100, 10.0) == doctest::Approx(0.9 * 2.0 * std::log2(11.0)).epsilon(1e-14));
    CHECK(compute_rate(2.0, 10, 100, 10.0) == doctest::Approx(6.227).epsilon(1e-4));
    CHECK(compute_rate(3.0, 100, 100, 10.0) == 0.0);
    CHECK(compute_rate(3.0, 5, 100, 0.0) == 0.0);
    CHECK_THROWS_AS(compute_rate(1.0, 101, 100, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_rate(1.0, 1, 0, 10.0), std::invalid_argument);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-HUGE_VAL) == "-inf");
}

TEST_CASE("config parsing") {
    SUBCASE("defaults mirror the reference configuration") {
        const auto s = parse("");
        CHECK(s.system.num_res == 50);
        CHECK(s.system.num_antennas == 16);
        CHECK(s.system.sinr_threshold == 10.0);
        CHECK(s.system.rzf_regularizer == 1e-2);
        CHECK(s.system.msbl_prune_threshold == 1e-6);
        CHECK(s.system.degree_distribution.max_degree() == 27);
        CHECK(s.system.pilot_power == doctest::Approx(100.0));
        CHECK(*s.system.cell_edge_snr_db == 10.0);
        CHECK(s.trials == 1000);
        CHECK(s.packet_len == 100);
    }
    SUBCASE("values are read and converted") {
        const auto s = parse(kSmall);
        CHECK(s.system.num_res == 10);
        CHECK(*s.system.load == 1.2);
        CHECK(s.system.estimator == Estimator::LCMMSE);
        CHECK(s.system.seed == 3);
        CHECK(s.trials == 6);
        CHECK(*s.sweep_axis == SweepAxis::PilotLen);
        CHECK(s.sweep_values == std::vector<double>{2, 4});
        CHECK(s.de.loads == std::vector<double>{0.5, 1.5});
        CHECK(s.de.find_inflection);
        const auto d = parse("[scenario]\nnoise_power_dbm = -90\npilot_power_dbm = 20\n");
        CHECK(*d.system.noise_power == doctest::Approx(1e-9));
        CHECK_FALSE(d.system.cell_edge_snr_db.has_value());
        const auto g = parse("[sic]\nsinr_threshold_db = 10\n");
        CHECK(g.system.sinr_threshold == doctest::Approx(10.0));
    }
    SUBCASE("unknown keys and sections are errors") {
        CHECK_THROWS_AS(parse("[scenario]\nnum_antenas = 4\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse("[bogus]\nx = 1\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse("[chest]\nestimator = lmmse\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse("[scenario]\nnum_users = 4\nload = 1\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse("[scenario]\nnum_res = ten\n"), std::invalid_argument);
    }
    SUBCASE("degree distribution syntax") {
        CHECK(parse_degree_distribution("regular:3").mean() == 3.0);
        CHECK(parse_degree_distribution("soliton:3").masses()[0].probability == doctest::Approx(0.75));
        const auto m = parse_degree_distribution("masses:2:0.75,3:0.25");
        CHECK(m.mean() == doctest::Approx(2.25));
        CHECK_THROWS(parse_degree_distribution("poisson:3"));
        CHECK_THROWS(parse_degree_distribution("masses:2:0.5"));
        CHECK(parse_number_list("1, 2.5,1e-2") == std::vector<double>{1, 2.5, 1e-2});
        CHECK_THROWS(parse_number_list("1,,2"));
    }
}

TEST_CASE("shipped presets") {
    const auto presets = list_presets();
    REQUIRE(presets.size() >= 6);
    bool seen_default = false;
    for (const auto& p : presets) {
        INFO(p.name);
        CHECK_FALSE(p.description.empty());
        CHECK_NOTHROW(load_settings(p.path));
        CHECK(resolve_config(p.name) == p.path);
        seen_default = seen_default || p.name == "default";
    }
    CHECK(seen_default);
    CHECK_THROWS(resolve_config("no_such_preset"));
    const auto f9 = load_settings(resolve_config("de_lcmmse"));
    const auto spec = theta_spec_from(f9);
    CHECK(spec.snr == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(spec.sinr_threshold == 16.0);
    CHECK(spec.estimator == Estimator::LCMMSE);
}

TEST_CASE("sweep runner") {
    SweepSpec spec;
    spec.base = parse(kSmall).system;
    spec.axis = SweepAxis::Load;
    spec.values = {1.0};
    spec.trials = 1;
    SUBCASE("single point, single trial") {
        const auto rows = run_sweep(spec);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].status == "single_trial");
        CHECK(rows[0].throughput_ci95 == 0.0);
        CHECK(rows[0].trials == 1);
    }
    SUBCASE("deterministic CSV") {
        spec.values = {0.8, 2.0};
        spec.trials = 5;
        std::ostringstream a, b;
        write_sweep_csv(a, run_sweep(spec));
        spec.threads = 2;
        write_sweep_csv(b, run_sweep(spec));
        CHECK(a.str() == b.str());
        const auto lines = split_lines(a.str());
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "axis,value,trials,throughput,throughput_ci95,plr,plr_ci95,rate,rate_ci95,status");
        CHECK(lines[1].rfind("load,0.8,5,", 0) == 0);
        CHECK(a.str().find("nan") == std::string::npos);
        CHECK(a.str().find("inf") == std::string::npos);
    }
    SUBCASE("bad axis value is flagged, the run continues") {
        spec.axis = SweepAxis::PilotLen;
        spec.values = {0, 3};
        spec.trials = 2;
        const auto rows = run_sweep(spec);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].status.rfind("error:", 0) == 0);
        CHECK(rows[0].throughput == 0.0);
        CHECK(rows[1].status == "ok");
        std::ostringstream os;
        write_sweep_csv(os, rows);
        CHECK(os.str().find("nan") == std::string::npos);
    }
    SUBCASE("every axis applies") {
        const auto base = spec.base;
        CHECK(apply_axis(base, SweepAxis::PilotLen, 7).pilot_len == 7);
        CHECK(apply_axis(base, SweepAxis::Antennas, 32).num_antennas == 32);
        CHECK(*apply_axis(base, SweepAxis::EdgeSnr, 5).cell_edge_snr_db == 5.0);
        CHECK(*apply_axis(base, SweepAxis::Load, 2.5).load == 2.5);
        CHECK(apply_axis(base, SweepAxis::RzfLambda, 0.5).rzf_regularizer == 0.5);
        CHECK(*apply_axis(base, SweepAxis::PowerControlZeta, 1.0).power_control_exponent == 1.0);
        CHECK(apply_axis(base, SweepAxis::NumRes, 20).num_res == 20);
        for (auto a : {SweepAxis::PilotLen, SweepAxis::Antennas, SweepAxis::EdgeSnr, SweepAxis::Load,
                       SweepAxis::RzfLambda, SweepAxis::PowerControlZeta, SweepAxis::NumRes})
            CHECK(parse_sweep_axis(to_string(a)) == a);
    }
    SUBCASE("rate column follows the throughput column") {
        spec.trials = 4;
        spec.packet_len = 50;
        const auto row = run_sweep(spec)[0];
        CHECK(row.rate == doctest::Approx(compute_rate(row.throughput, spec.base.pilot_len, 50,
                                                       spec.base.sinr_threshold)));
        CHECK(row.rate_ci95 == doctest::Approx(compute_rate(row.throughput_ci95, spec.base.pilot_len, 50,
                                                            spec.base.sinr_threshold)));
    }
    SUBCASE("pilots longer than the packet leave throughput valid, rate undefined") {
        spec.trials = 4;
        spec.packet_len = 50;
        spec.axis = SweepAxis::PilotLen;
        spec.values = {4, 60};
        const auto rows = run_sweep(spec);
        CHECK(rows[0].status == "ok");
        CHECK(rows[1].status == "rate_undefined");
        CHECK(rows[1].throughput > 0.0);
        CHECK(std::isnan(rows[1].rate));
        std::ostringstream os;
        write_sweep_csv(os, rows);
        CHECK(os.str().find(",nan,nan,rate_undefined") != std::string::npos);
    }
}

TEST_CASE("confidence intervals shrink with trials") {
    SweepSpec spec;
    spec.base = parse(kSmall).system;
    spec.base.load = 2.0;
    spec.base.pilot_len = 2;
    spec.axis = SweepAxis::Load;
    spec.values = {2.0};
    spec.trials = 100;
    const double ci100 = run_sweep(spec)[0].throughput_ci95;
    spec.trials = 400;
    const double ci400 = run_sweep(spec)[0].throughput_ci95;
    REQUIRE(ci400 > 0.0);
    CHECK(std::abs(ci100 / ci400 - 2.0) < 0.3 * 2.0);
}

TEST_CASE("density evolution runner") {
    auto s = parse(kSmall);
    SUBCASE("theta = 1") {
        s.de.theta_source = ThetaSource::Ones;
        s.de.loads = {1.5};
        const auto run = run_de(s, build_theta(s));
        REQUIRE(run.rows.size() == 1);
        CHECK(run.rows[0].result.throughput == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(run.rows[0].result.plr < 1e-12);
        CHECK(run.inflection.at_boundary);
    }
    SUBCASE("CSV schema") {
        s.de.theta_source = ThetaSource::Gamma;
        const auto run = run_de(s, build_theta(s));
        std::ostringstream os, tr;
        write_de_csv(os, run);
        write_de_trace_csv(tr, run);
        const auto lines = split_lines(os.str());
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "load,cbar,p_infty,plr,throughput,rate,converged,iterations,theta_extended,monotone");
        CHECK(split_lines(tr.str())[0] == "load,iteration,q,p");
        CHECK(os.str().find("nan") == std::string::npos);
    }
    SUBCASE("every theta source builds") {
        for (auto src : {ThetaSource::Gamma, ThetaSource::Normal, ThetaSource::Deterministic, ThetaSource::Theta12,
                         ThetaSource::Ones, ThetaSource::Collision, ThetaSource::Empirical}) {
            s.de.theta_source = src;
            const auto t = build_theta(s);
            CHECK(t.r_max() == 6);
            CHECK(parse_theta_source(to_string(src)) == src);
        }
    }
}

TEST_CASE("command line") {
    const auto cfg = write_temp("small.ini", kSmall).string();
    std::string out1, out2;
    SUBCASE("presets") {
        CHECK(cli({"presets"}, out1) == 0);
        CHECK(out1.rfind("name,description,path\n", 0) == 0);
        CHECK(out1.find("pilot_sweep_mmse,") != std::string::npos);
    }
    SUBCASE("every subcommand is reproducible") {
        for (std::string sub : {"simulate", "sweep", "theta", "de"}) {
            INFO(sub);
            CHECK(cli({sub, "--config", cfg, "--seed", "11", "--trials", "3"}, out1) == 0);
            CHECK(cli({sub, "--config", cfg, "--seed", "11", "--trials", "3"}, out2) == 0);
            CHECK(out1 == out2);
            CHECK(split_lines(out1).size() >= 2);
        }
        CHECK(cli({"sweep", "--config", cfg, "--seed", "12", "--trials", "3"}, out2) == 0);
        CHECK(cli({"sweep", "--config", cfg, "--seed", "11", "--trials", "3"}, out1) == 0);
        CHECK(out1 != out2);
    }
    SUBCASE("--out writes the file") {
        const auto path = (std::filesystem::temp_directory_path() / "irsa_test_bench" / "out.csv").string();
        std::filesystem::remove(path);
        CHECK(cli({"simulate", "--config", cfg, "--trials", "2", "--out", path, "--threads", "2"}, out1) == 0);
        CHECK(out1.empty());
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("axis,value,trials", 0) == 0);
    }
    SUBCASE("errors") {
        CHECK(cli({}, out1) != 0);
        CHECK(cli({"simulate"}, out1) != 0);
        CHECK(cli({"frobnicate"}, out1) != 0);
        CHECK(cli({"simulate", "--config", "/nonexistent.ini"}, out1) == 2);
        CHECK(cli({"simulate", "--config", cfg, "--trials", "0"}, out1) != 0);
        const auto bad = write_temp("bad.ini", "[scenario]\nnum_antenas = 8\n").string();
        CHECK(cli({"simulate", "--config", bad}, out1) == 2);
    }
}
