#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "fblnet/splitmix64.hpp"
#include "fblnet/stability.hpp"

using namespace fblnet;

namespace {

const LinkSet kTripleA{make_channel(0.2), make_channel(0.35), make_channel(1.0)};
const LinkSet kTripleB{make_channel(0.2), make_channel(0.5), make_channel(1.0)};

} // namespace

TEST_CASE("geo/geo/1 stationary distribution") {
    SUBCASE("empty system") {
        const Geo1Stationary d = geo_geo1_stationary(0.0, 0.5, 20);
        CHECK(d.pi0 == 1.0);
        for (double pj : d.tail) CHECK(pj == 0.0);
    }
    SUBCASE("reference point") {
        const Geo1Stationary d = geo_geo1_stationary(0.2, 0.5, 50);
        CHECK(d.pi0 == doctest::Approx(0.6).epsilon(1e-15));
        // masses positive, decreasing, and the truncated sum approaches 1
        // with the geometric tail bound
        double sum = d.pi0;
        double prev = d.pi0;
        for (double pj : d.tail) {
            CHECK(pj >= 0.0);
            CHECK(pj <= prev);
            prev = pj;
            sum += pj;
        }
        const double rho = 0.2 * 0.5 / (0.5 * 0.8);
        const double bound = std::pow(rho, 51) / (1.0 - rho);
        CHECK(sum <= 1.0 + 1e-12);
        CHECK(1.0 - sum <= bound + 1e-12);
    }
    SUBCASE("deterministic service edge") {
        const Geo1Stationary d = geo_geo1_stationary(0.3, 1.0, 5);
        CHECK(d.pi0 == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(d.tail[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(d.tail[1] == 0.0);
    }
    SUBCASE("unstable parameters refuse") {
        CHECK_THROWS_AS(geo_geo1_stationary(0.5, 0.5, 10), std::domain_error);
        CHECK_THROWS_AS(geo_geo1_stationary(0.6, 0.5, 10), std::domain_error);
    }
}

TEST_CASE("tdma stability verdicts") {
    const ChannelParams ch = make_channel(1.0);
    const int n = 1000;
    const double k = 457.0;
    const double pc = success_prob(k, n, ch); // ~0.9381

    SUBCASE("overloaded source") {
        // service 0.5 * pc < 0.5; demand 0.48 > 0.469 on source A
        const StabilityVerdict v = tdma_stable({0.48, 0.1, 0.5}, k, k, n, ch);
        CHECK_FALSE(v.stable);
        CHECK(v.binding == Constraint::SourceA);
        CHECK(v.margin == doctest::Approx(0.5 * pc - 0.48).epsilon(1e-12));
    }
    SUBCASE("empty traffic is stable with the idle margin") {
        const StabilityVerdict v = tdma_stable({0.0, 0.0, 0.5}, k, k, n, ch);
        CHECK(v.stable);
        CHECK(v.margin == doctest::Approx(0.5 * pc).epsilon(1e-12));
    }
    SUBCASE("exact boundary classifies unstable") {
        const StabilityVerdict v = tdma_stable({0.5 * pc, 0.1, 0.5}, k, k, n, ch);
        CHECK_FALSE(v.stable);
        CHECK(v.margin == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("relay rates") {
    const int n = 1000;
    const double k = 260.0;
    SUBCASE("idle source feeds nothing") {
        const QueueRates r = relay_rates(0.0, 0.5, k, n, kTripleB, PcModel::SecondOrder, k);
        CHECK(r.lambda_r == 0.0);
        CHECK(r.pi0 == 1.0);
        CHECK(r.mu_r ==
              doctest::Approx(0.5 * success_prob(k, n, kTripleB.rd)).epsilon(1e-13));
    }
    SUBCASE("busy fraction identity") {
        const double lambda_i = 0.2;
        const QueueRates r = relay_rates(lambda_i, 0.5, k, n, kTripleB, PcModel::SecondOrder, k);
        const double p_sd = success_prob(k, n, kTripleB.sd);
        const double p_sr = success_prob(k, n, kTripleB.sr);
        const double mu_i = 0.5 * (p_sd + (1.0 - p_sd) * p_sr);
        CHECK(1.0 - r.pi0 == doctest::Approx(lambda_i / mu_i).epsilon(1e-12));
        CHECK(r.lambda_r >= 0.0);
        CHECK(r.lambda_r <= 1.0);
        CHECK(r.mu_r >= 0.0);
        CHECK(r.mu_r <= 1.0);
    }
    SUBCASE("symmetric sources get symmetric rates") {
        const QueueRates ra =
            relay_rates(0.15, 0.5, 150.0, n, kTripleA, PcModel::SecondOrder, 300.0);
        const QueueRates rb =
            relay_rates(0.15, 0.5, 150.0, n, kTripleA, PcModel::SecondOrder, 300.0);
        CHECK(ra.lambda_r == rb.lambda_r);
        CHECK(ra.mu_r == rb.mu_r);
        CHECK(ra.pi0 == rb.pi0);
    }
    SUBCASE("unstable source refuses") {
        CHECK_THROWS_AS(relay_rates(0.9, 0.5, k, n, kTripleB, PcModel::SecondOrder, k),
                        std::domain_error);
    }
}

TEST_CASE("cc stability region") {
    const int n = 1000;
    const double k = 260.0;
    const CcStability probe = cc_stable({0.0, 0.0, 0.5}, k, n, kTripleB);
    const double boundary = probe.relay_sum_margin; // lambda-sum bound at zero load

    SUBCASE("one percent inside and outside the boundary") {
        const double inside = 0.99 * boundary / 2.0;
        CHECK(cc_stable({inside, inside, 0.5}, k, n, kTripleB).overall.stable);
        const double outside = 1.01 * boundary / 2.0;
        CHECK_FALSE(cc_stable({outside, outside, 0.5}, k, n, kTripleB).overall.stable);
    }
    SUBCASE("relay region nested inside the source region") {
        CHECK(probe.relay_sum_margin < probe.source_sum_margin);
        SplitMix64 rng(2024);
        for (int i = 0; i < 1000; ++i) {
            const double la = rng.next_unit();
            const double lb = rng.next_unit();
            const double wa = rng.next_unit();
            const double kk = 1.0 + 400.0 * rng.next_unit();
            const CcStability s = cc_stable({la, lb, wa}, kk, n, kTripleB);
            if (s.overall.stable) {
                CHECK(s.source_sum_margin > 0.0);
                CHECK(s.relay_sum_margin > 0.0);
            }
        }
    }
    SUBCASE("monotone in the load") {
        SplitMix64 rng(99);
        for (int i = 0; i < 300; ++i) {
            const double la = rng.next_unit() * 0.5;
            const double lb = rng.next_unit() * 0.5;
            const double kk = 1.0 + 400.0 * rng.next_unit();
            const bool base = cc_stable({la, lb, 0.5}, kk, n, kTripleB).overall.stable;
            if (!base) {
                CHECK_FALSE(cc_stable({std::min(1.0, la + 0.1), lb, 0.5}, kk, n, kTripleB)
                                .overall.stable);
            }
        }
    }
    SUBCASE("collapses to the plain TDMA condition without a useful relay") {
        // huge rd snr, vanishing sr: bracket -> P_sd, relay factor -> 1
        const LinkSet nc_like{make_channel(0.2), make_channel(1e-9), make_channel(1e9)};
        const double p_sd = success_prob(k, n, nc_like.sd);
        const CcStability s = cc_stable({0.0, 0.0, 0.5}, k, n, nc_like);
        CHECK(s.relay_sum_margin == doctest::Approx(p_sd).epsilon(1e-9));
    }
}

TEST_CASE("baf stability rules") {
    const int n = 1000;
    SUBCASE("L=1 coincides with cc exactly") {
        SplitMix64 rng(7);
        for (int i = 0; i < 200; ++i) {
            const TrafficProfile t{rng.next_unit() * 0.6, rng.next_unit() * 0.6, 0.5};
            const double k = 1.0 + 400.0 * rng.next_unit();
            const BafStability b = baf_stable(t, k, 1, n, kTripleB);
            const CcStability c = cc_stable(t, k, n, kTripleB);
            CHECK(b.published.stable == c.overall.stable);
            CHECK(b.published.margin == c.overall.margin);
            CHECK(b.derived.stable == b.published.stable);
            CHECK(b.derived.margin == b.published.margin);
            CHECK_FALSE(b.disagree);
        }
    }
    SUBCASE("rules agree whenever the source arm binds") {
        // low-rate corner: the disputed term only affects the relay arm
        const BafStability b = baf_stable({0.05, 0.05, 0.5}, 182.0, 2, n, kTripleA);
        CHECK(b.published.stable);
        CHECK(b.derived.stable);
        CHECK_FALSE(b.disagree);
    }
    SUBCASE("frozen disagreement witness") {
        // (k, L) = (227, 2), triple (b): the published rule admits lambda sums up
        // to ~0.973, the derived batch rule only ~0.654; 0.8 splits them.
        const BafStability b = baf_stable({0.4, 0.4, 0.5}, 227.0, 2, n, kTripleB);
        CHECK(b.published.stable);
        CHECK_FALSE(b.derived.stable);
        CHECK(b.disagree);
    }
    SUBCASE("source variant carries a single rule") {
        const BafStability b = baf_stable({0.3, 0.3, 0.5}, 150.0, 2, n, kTripleB,
                                          PcModel::SecondOrder, BafVariant::Source);
        CHECK(b.published.stable == b.derived.stable);
        CHECK(b.published.margin == b.derived.margin);
        CHECK_FALSE(b.disagree);
    }
}

TEST_CASE("cognitive split") {
    const ChannelParams ch = make_channel(1.0);
    const int n = 1000;
    const double k_a = 457.0;
    const double pc_a = success_prob(k_a, n, ch);

    SUBCASE("degenerate primary hands the channel to the secondary") {
        const CognitiveSplit s = cognitive_split(0.0, k_a, n, n, ch);
        CHECK(s.omega_a_star == doctest::Approx(kStrictnessDelta).epsilon(1e-6));
        CHECK(s.k_b_star == 446);
        const double u_star = 446.0 / n * success_prob(446.0, n, ch);
        CHECK(s.u_secondary == doctest::Approx(u_star).epsilon(1e-6));
    }
    SUBCASE("boundary demand is infeasible") {
        CHECK_THROWS_AS(cognitive_split(pc_a, k_a, n, n, ch), std::domain_error);
        CHECK_THROWS_AS(cognitive_split(1.0, k_a, n, n, ch), std::domain_error);
    }
    SUBCASE("secondary packet size does not depend on the share") {
        const long long base = cognitive_split(0.0, k_a, n, n, ch).k_b_star;
        for (double lambda_a : {0.1, 0.3, 0.6, 0.9}) {
            CHECK(cognitive_split(lambda_a, k_a, n, n, ch).k_b_star == base);
        }
    }
    SUBCASE("returned share satisfies the strict condition, minus delta does not") {
        const double lambda_a = 0.4;
        const CognitiveSplit s = cognitive_split(lambda_a, k_a, n, n, ch);
        CHECK(s.omega_a_star * pc_a - lambda_a >= 0.5 * kStrictnessDelta * pc_a);
        CHECK((s.omega_a_star - kStrictnessDelta) * pc_a - lambda_a <= 1e-15);
    }
}
