#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "irsa/sic.hpp"

using namespace irsa;

namespace {

SystemConfig hand_config(Estimator est, Combiner comb, int antennas, double noise) {
    SystemConfig c;
    c.num_res = 3;
    c.num_users = 3;
    c.load.reset();
    c.num_antennas = antennas;
    c.pilot_len = 4;
    c.cell_edge_snr_db.reset();
    c.noise_power = noise;
    c.estimator = est;
    c.combiner = comb;
    c.degree_distribution = DegreeDistribution::regular(2);
    return c;
}

/// A frame with the given APM and channels; pilots random, noise zero.
FrameRealization hand_frame(const ApmMatrix& apm, const std::vector<CMatrix>& channels, int tau) {
    FrameRealization f;
    const int m = static_cast<int>(apm.cols());
    f.positions.assign(m, 100.0);
    f.path_loss.assign(m, 1.0);
    f.transmit_power.assign(m, 100.0);
    f.effective_gain.assign(m, 1.0);
    f.apm = apm;
    auto rng = make_stream(77);
    f.pilots = complex_normal_matrix(rng, tau, m, 1.0);
    f.channels = channels;
    for (std::size_t t = 0; t < channels.size(); ++t) {
        f.noise.push_back(CMatrix::Zero(channels[t].rows(), tau));
        CMatrix y = f.noise.back();
        for (int u = 0; u < m; ++u)
            if (apm(t, u)) y += channels[t].col(u) * f.pilots.col(u).adjoint();
        f.pilot_signals.push_back(y);
    }
    return f;
}

SystemConfig small_random_config(Estimator est, double load, int pilot_len) {
    SystemConfig c;
    c.num_res = 20;
    c.load = load;
    c.num_antennas = 8;
    c.pilot_len = pilot_len;
    c.estimator = est;
    c.degree_distribution = soliton_distribution(8);
    return c;
}

void check_outcome_invariants(const DecodeOutcome& d, const SystemConfig& cfg) {
    const double load = double(d.num_users) / d.num_res;
    CHECK(d.throughput >= 0.0);
    CHECK(d.throughput <= load + 1e-12);
    CHECK(d.plr >= 0.0);
    CHECK(d.plr <= 1.0);
    CHECK(std::abs(d.throughput - double(d.decoded_users.size()) / d.num_res) < 1e-12);
    CHECK(std::abs(d.plr - (1.0 - double(d.decoded_users.size()) / d.num_users)) < 1e-12);
    CHECK(std::is_sorted(d.decoded_users.begin(), d.decoded_users.end()));
    std::set<int> seen;
    int last_k = 0;
    for (const auto& e : d.log) {
        CHECK(seen.insert(e.user).second);
        CHECK(e.iteration >= last_k);
        last_k = e.iteration;
        CHECK(e.sinr >= cfg.sinr_threshold);
        CHECK(e.user >= 0);
        CHECK(e.user < d.num_users);
    }
    CHECK(seen.size() == d.decoded_users.size());
    CHECK(std::equal(seen.begin(), seen.end(), d.decoded_users.begin()));
    CHECK(d.iterations_used <= cfg.max_decode_iters);
}

}  // namespace

TEST_CASE("singleton user decodes") {
    SystemConfig c;
    c.num_res = 2;
    c.num_users = 1;
    c.load.reset();
    c.num_antennas = 16;
    c.estimator = Estimator::PerfectCSI;
    c.combiner = Combiner::MRC;
    c.power_control_exponent = 0.0;
    c.cell_edge_snr_db = 20.0;
    c.degree_distribution = DegreeDistribution::regular(2);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto rng = make_stream(s);
        const auto f = synthesize_frame(c, rng);
        const auto d = decode_frame(f, c);
        CHECK(d.decoded_users == std::vector<int>{0});
        CHECK(d.throughput == doctest::Approx(0.5));
        CHECK(d.plr == 0.0);
    }
}

TEST_CASE("two equal users in one RE, single antenna") {
    ApmMatrix apm(1, 2);
    apm << 1, 1;
    CMatrix h(1, 2);
    h << Complex(0.6, 0.8), Complex(-0.8, 0.6);  // |h1| = |h2| = 1
    auto cfg = hand_config(Estimator::PerfectCSI, Combiner::MRC, 1, 1e-2);
    cfg.num_res = 1;
    cfg.num_users = 2;
    cfg.degree_distribution = DegreeDistribution::regular(2);
    const auto f = hand_frame(apm, {h}, 2);
    // rho = |h1|^2 / (N0/P + |h2|^2) < 1.
    const ReReceiver rx = ReReceiver::from_config(cfg);
    const std::vector<std::uint8_t> act{1, 1};
    const std::vector<double> prior{1.0, 1.0};
    const auto rho = re_candidate_sinr(rx, f.pilot_signals[0], f.pilots, h, act, prior);
    for (double r : rho) {
        CHECK(r < 1.0);
        CHECK(r == doctest::Approx(1.0 / (1e-2 / cfg.data_power + 1.0)).epsilon(1e-12));
    }
    const auto d = decode_frame(f, cfg);
    CHECK(d.decoded_users.empty());
    CHECK(d.plr == 1.0);
    CHECK(d.throughput == 0.0);
}

TEST_CASE("three-user decoding chain") {
    // A alone in RE 0 and with B in RE 1; B with C in RE 2. Colliding users get
    // parallel channels so no combiner can separate them before cancellation.
    ApmMatrix apm(3, 3);
    apm << 1, 0, 0,  //
        1, 1, 0,     //
        0, 1, 1;
    auto rng = make_stream(9);
    const CMatrix base = complex_normal_matrix(rng, 8, 3, 1.0);
    std::vector<CMatrix> h(3, CMatrix::Zero(8, 3));
    h[0].col(0) = base.col(0);
    h[1].col(0) = base.col(1);
    h[1].col(1) = base.col(1) * Complex(0.0, 1.0);
    h[2].col(1) = base.col(2);
    h[2].col(2) = base.col(2) * -1.0;
    const auto f = hand_frame(apm, h, 4);
    for (Combiner comb : {Combiner::MRC, Combiner::RZF}) {
        const auto cfg = hand_config(Estimator::PerfectCSI, comb, 8, 1e-3);
        const auto d = decode_frame(f, cfg);
        REQUIRE(d.log.size() == 3);
        CHECK(d.log[0].iteration == 1);
        CHECK(d.log[0].user == 0);
        CHECK(d.log[0].re == 0);
        CHECK(d.log[1].iteration == 2);
        CHECK(d.log[1].user == 1);
        CHECK(d.log[1].re == 1);
        CHECK(d.log[2].iteration == 3);
        CHECK(d.log[2].user == 2);
        CHECK(d.log[2].re == 2);
        CHECK(d.plr == 0.0);
        CHECK(d.throughput == doctest::Approx(1.0));
        check_outcome_invariants(d, cfg);
    }
    SUBCASE("same chain through LCMMSE with orthogonal pilots") {
        auto g = f;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) g.pilots(i, j) = std::polar(1.0, 2.0 * M_PI * i * j / 4.0);
        for (int t = 0; t < 3; ++t) {
            g.pilot_signals[t].setZero();
            for (int u = 0; u < 3; ++u)
                if (apm(t, u)) g.pilot_signals[t] += h[t].col(u) * g.pilots.col(u).adjoint();
        }
        const auto cfg = hand_config(Estimator::LCMMSE, Combiner::RZF, 8, 1e-3);
        const auto d = decode_frame(g, cfg);
        CHECK(d.plr == 0.0);
        CHECK(d.log.front().user == 0);
    }
}

TEST_CASE("unreachable threshold") {
    auto cfg = small_random_config(Estimator::MMSE, 1.0, 10);
    cfg.sinr_threshold = 1e300;
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto rng = make_stream(s);
        const auto d = decode_frame(synthesize_frame(cfg, rng), cfg);
        CHECK(d.throughput == 0.0);
        CHECK(d.plr == 1.0);
        CHECK(d.iterations_used == 2);
    }
}

TEST_CASE("outcome invariants on random frames") {
    for (Estimator est : {Estimator::MMSE, Estimator::LCMMSE, Estimator::PerfectCSI, Estimator::MSBL}) {
        for (double load : {0.5, 1.5, 3.0}) {
            auto cfg = small_random_config(est, load, 6);
            for (std::uint64_t s = 0; s < 4; ++s) {
                auto rng = make_stream(1000 + s);
                const auto f = synthesize_frame(cfg, rng);
                const auto d = decode_frame(f, cfg);
                check_outcome_invariants(d, cfg);
                // The decoder is a pure function of its inputs.
                const auto again = decode_frame(f, cfg);
                CHECK(again.decoded_users == d.decoded_users);
                CHECK(again.throughput == d.throughput);
                REQUIRE(again.log.size() == d.log.size());
                for (std::size_t i = 0; i < d.log.size(); ++i) {
                    CHECK(again.log[i].user == d.log[i].user);
                    CHECK(again.log[i].sinr == d.log[i].sinr);
                }
            }
        }
    }
}

TEST_CASE("perfect CSI dominates contaminated LCMMSE") {
    auto lc = small_random_config(Estimator::LCMMSE, 3.0, 2);
    lc.num_res = 50;
    lc.num_antennas = 16;
    lc.degree_distribution = soliton_distribution(27);
    auto pc = lc;
    pc.estimator = Estimator::PerfectCSI;
    int ok = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
        auto rng = make_stream(31, {0, static_cast<std::uint64_t>(i)});
        const auto f = synthesize_frame(lc, rng);
        const auto a = decode_frame(f, pc);
        const auto b = decode_frame(f, lc);
        ok += a.decoded_users.size() >= b.decoded_users.size();
    }
    CHECK(ok >= 190);
}

TEST_CASE("Monte Carlo driver") {
    auto cfg = small_random_config(Estimator::MMSE, 1.0, 8);
    const auto a = monte_carlo_throughput(cfg, 12, 5, 0, 1);
    const auto b = monte_carlo_throughput(cfg, 12, 5, 0, 3);
    CHECK(a.throughput_samples == b.throughput_samples);
    CHECK(a.plr_samples == b.plr_samples);
    CHECK(a.throughput_mean == b.throughput_mean);
    auto loaded = small_random_config(Estimator::LCMMSE, 2.5, 3);
    const auto c0 = monte_carlo_throughput(loaded, 12, 5, 0, 1);
    const auto c1 = monte_carlo_throughput(loaded, 12, 5, 1, 1);
    CHECK(c0.throughput_samples != c1.throughput_samples);
    CHECK(c0.throughput_ci95 > 0.0);
    CHECK(a.trials == 12);
    CHECK_THROWS_AS(monte_carlo_throughput(cfg, 0, 5), std::invalid_argument);

    const auto one = monte_carlo_throughput(cfg, 1, 5);
    CHECK(one.throughput_ci95 == 0.0);

    const auto ci = mean_ci95({1.0, 2.0, 3.0, 4.0});
    CHECK(ci.mean == doctest::Approx(2.5));
    CHECK(ci.ci95 == doctest::Approx(1.959963984540054 * std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("light load at the reference configuration decodes everything") {
    SystemConfig cfg;  // T = 50, N = 16, soliton 27, edge SNR 10 dB, MMSE, RZF
    cfg.load = 1.0;
    cfg.pilot_len = 10;
    const auto s = monte_carlo_throughput(cfg, 10, 3);
    CHECK(s.throughput_mean == doctest::Approx(1.0).epsilon(0.1));
}
