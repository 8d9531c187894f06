#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fblnet/netsim.hpp"
#include "fblnet/splitmix64.hpp"

using namespace fblnet;

namespace {

const LinkSet kTripleB{make_channel(0.2), make_channel(0.5), make_channel(1.0)};
const LinkSet kSnr1{make_channel(1.0), make_channel(1.0), make_channel(1.0)};

SimConfig base_config(Protocol p, double la, double lb, long long k, long long l,
                      std::uint64_t slots, std::uint64_t seed) {
    SimConfig cfg;
    cfg.protocol = p;
    cfg.traffic = TrafficProfile{la, lb, 0.5};
    cfg.code = make_code(k, 1000, l);
    cfg.links = p == Protocol::Nc ? kSnr1 : kTripleB;
    cfg.slots = slots;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("splitmix64 reference sequence") {
    // Vigna's reference outputs, cross-computed independently.
    const std::uint64_t seed0[10] = {
        0xe220a8397b1dcdafULL, 0x6e789e6aa1b965f4ULL, 0x06c45d188009454fULL,
        0xf88bb8a8724c81ecULL, 0x1b39896a51a8749bULL, 0x53cb9f0c747ea2eaULL,
        0x2c829abe1f4532e1ULL, 0xc584133ac916ab3cULL, 0x3ee5789041c98ac3ULL,
        0xf3b8488c368cb0a6ULL};
    SplitMix64 rng(0);
    for (std::uint64_t expected : seed0) CHECK(rng.next() == expected);

    const std::uint64_t seed42[5] = {0xbdd732262feb6e95ULL, 0x28efe333b266f103ULL,
                                     0x47526757130f9f52ULL, 0x581ce1ff0e4ae394ULL,
                                     0x09bc585a244823f2ULL};
    SplitMix64 rng42(42);
    for (std::uint64_t expected : seed42) CHECK(rng42.next() == expected);

    SplitMix64 unit(0);
    const double u = unit.next_unit();
    CHECK(u == doctest::Approx(0.8833108082136426).epsilon(1e-15));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(run_sim(base_config(Protocol::Nc, 0.1, 0.1, 457, 1, 9999, 1)),
                    std::domain_error);
    CHECK_THROWS_AS(run_sim(base_config(Protocol::Cc, 1.0, 0.1, 260, 1, 20000, 1)),
                    std::domain_error); // saturated source only under Nc
    SimConfig bad = base_config(Protocol::Nc, 0.1, 0.1, 457, 1, 20000, 1);
    bad.warmup_fraction = 1.0;
    CHECK_THROWS_AS(run_sim(bad), std::domain_error);
}

TEST_CASE("determinism and conservation") {
    for (Protocol p : {Protocol::Nc, Protocol::Cc, Protocol::BafRelay, Protocol::BafSource}) {
        const SimConfig cfg = base_config(p, 0.2, 0.15, 150, 2, 50000, 77);
        const SimReport a = run_sim(cfg);
        const SimReport b = run_sim(cfg);
        CHECK(a == b);
        CHECK(a.conservation.arrived ==
              a.conservation.delivered + a.conservation.backlogged);
    }
}

TEST_CASE("no traffic means no deliveries and full idleness") {
    const SimReport r = run_sim(base_config(Protocol::Cc, 0.0, 0.0, 260, 1, 20000, 5));
    CHECK(r.delivered_bits == 0);
    CHECK(r.conservation.arrived == 0);
    CHECK(r.idle_freq_a == 1.0);
    CHECK(r.idle_freq_b == 1.0);
    CHECK(r.mean_queue.q_a == 0.0);
    CHECK(r.drift_slope == 0.0);
}

TEST_CASE("saturated nc throughput approaches (k/n) * Pc") {
    SimConfig cfg = base_config(Protocol::Nc, 1.0, 1.0, 457, 1, 1000000, 11);
    const SimReport r = run_sim(cfg);
    const double expected =
        457.0 / 1000.0 * success_prob(457.0, 1000, kSnr1.sd);
    CHECK(std::fabs(r.empirical_throughput - expected) / expected < 0.01);
}

TEST_CASE("stable nc idle frequency matches the queue formula") {
    // per-source: arrivals 0.2, service omega * Pc ~ 0.4691
    SimConfig cfg = base_config(Protocol::Nc, 0.2, 0.2, 457, 1, 1000000, 13);
    const SimReport r = run_sim(cfg);
    const double q = 0.5 * success_prob(457.0, 1000, kSnr1.sd);
    const double pi0 = (q - 0.2) / q;
    // 3 binomial-ish standard errors with a generous correlation factor
    const double se = 3.0 * std::sqrt(pi0 * (1.0 - pi0) / 450000.0) * 3.0;
    CHECK(std::fabs(r.idle_freq_a - pi0) < se);
    CHECK(std::fabs(r.idle_freq_b - pi0) < se);
}

TEST_CASE("nc throughput near the boundary tracks the offered load") {
    const double boundary = success_prob(457.0, 1000, kSnr1.sd);
    const double lam = 0.95 * boundary;
    SimConfig cfg = base_config(Protocol::Nc, lam / 2, lam / 2, 457, 1, 1000000, 17);
    const SimReport r = run_sim(cfg);
    CHECK(std::fabs(r.drift_slope) < 1e-4);
    const double expected = 457.0 / 1000.0 * lam;
    CHECK(std::fabs(r.empirical_throughput - expected) / expected < 0.02);
    CHECK(classify_stability(r, lam) == StabilityClass::Stable);
}

TEST_CASE("nc past the boundary accumulates backlog linearly") {
    const double boundary = success_prob(457.0, 1000, kSnr1.sd);
    const double lam = 1.05 * boundary;
    SimConfig cfg = base_config(Protocol::Nc, lam / 2, lam / 2, 457, 1, 1000000, 17);
    const SimReport r = run_sim(cfg);
    const double excess = lam - boundary;
    CHECK(r.drift_slope > 0.5 * excess);
    CHECK(r.drift_slope < 2.0 * excess);
    CHECK(classify_stability(r, lam) == StabilityClass::Unstable);
}

TEST_CASE("baf relay with L=1 is trajectory-identical to cc") {
    for (std::uint64_t seed : {3ULL, 1234ULL, 99999ULL}) {
        const SimReport cc = run_sim(base_config(Protocol::Cc, 0.2, 0.1, 260, 1, 50000, seed));
        const SimReport baf =
            run_sim(base_config(Protocol::BafRelay, 0.2, 0.1, 260, 1, 50000, seed));
        CHECK(cc == baf);
    }
}

TEST_CASE("classify_stability corner cases") {
    const SimReport zero = run_sim(base_config(Protocol::Nc, 0.0, 0.0, 457, 1, 200000, 1));
    CHECK(classify_stability(zero, 0.0) == StabilityClass::Stable);

    // saturated source with service far below demand
    const SimReport sat = run_sim(base_config(Protocol::Nc, 1.0, 1.0, 457, 1, 200000, 1));
    CHECK(classify_stability(sat, 2.0) == StabilityClass::Unstable);

    const SimReport small = run_sim(base_config(Protocol::Nc, 0.1, 0.1, 457, 1, 50000, 1));
    CHECK_THROWS_AS(classify_stability(small, 0.2), std::domain_error);
}

TEST_CASE("cc with a dead relay-destination link collapses") {
    // Packets detour through the relay but can never leave it, so any
    // positive load is unstable even though plain TDMA would carry it.
    SimConfig cfg;
    cfg.protocol = Protocol::Cc;
    cfg.traffic = TrafficProfile{0.2, 0.2, 0.5};
    cfg.code = make_code(260, 1000, 1);
    cfg.links = LinkSet{make_channel(0.2), make_channel(0.5), make_channel(1e-9)};
    cfg.slots = 300000;
    cfg.seed = 21;
    const SimReport r = run_sim(cfg);
    CHECK(classify_stability(r, 0.4) == StabilityClass::Unstable);
    CHECK_FALSE(cc_stable(cfg.traffic, 260.0, 1000, cfg.links).overall.stable);
    // the same load on the direct link alone is fine
    const StabilityVerdict nc = tdma_stable(cfg.traffic, 260.0, 260.0, 1000, cfg.links.sd);
    CHECK_FALSE(nc.stable); // k=260 is past the nc optimum at this snr
    const StabilityVerdict nc_opt = tdma_stable(cfg.traffic, 107.0, 107.0, 1000, cfg.links.sd);
    CHECK(nc_opt.stable);
}

TEST_CASE("estimate_pi0") {
    CHECK(estimate_pi0(0.0, 0.5, 100000, 3) == 1.0);
    CHECK_THROWS_AS(estimate_pi0(0.5, 0.5, 100000, 3), std::domain_error);
    CHECK_THROWS_AS(estimate_pi0(0.6, 0.5, 100000, 3), std::domain_error);

    const double est = estimate_pi0(0.2, 0.5, 1000000, 101);
    CHECK(std::fabs(est - 0.6) < 0.005);

    // near-critical pair needs a longer run and a wider band
    const double crit = estimate_pi0(0.49, 0.5, 10000000, 103);
    CHECK(std::fabs(crit - 0.02) < 0.01);
}

TEST_CASE("boundary scan locates the nc boundary") {
    const CodeSpec code = make_code(457, 1000, 1);
    const std::vector<double> grid{0.25, 0.5, 0.75, 1.0, 1.25};
    const BoundaryEstimate est = boundary_scan(Protocol::Nc, code, kSnr1,
                                               PcModel::SecondOrder, grid, 400000,
                                               {1, 2, 3});
    const double truth = success_prob(457.0, 1000, kSnr1.sd);
    CHECK(std::fabs(est.midpoint - truth) / truth < 0.03);
    CHECK(est.evaluations.size() >= grid.size());
}

TEST_CASE("boundary scan validates its grid") {
    const CodeSpec code = make_code(457, 1000, 1);
    CHECK_THROWS_AS(boundary_scan(Protocol::Nc, code, kSnr1, PcModel::SecondOrder, {},
                                  400000, {1}),
                    std::domain_error);
    CHECK_THROWS_AS(boundary_scan(Protocol::Nc, code, kSnr1, PcModel::SecondOrder,
                                  {0.5, 0.5}, 400000, {1}),
                    std::domain_error);
    // a grid entirely inside the stable region cannot bracket the boundary
    CHECK_THROWS_AS(boundary_scan(Protocol::Nc, code, kSnr1, PcModel::SecondOrder,
                                  {0.05, 0.1}, 400000, {1}),
                    std::runtime_error);
}
