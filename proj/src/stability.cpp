#include "fblnet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fblnet {

void validate_traffic(const TrafficProfile& t) {
    auto in01 = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in01(t.lambda_a) || !in01(t.lambda_b)) {
        throw std::domain_error("traffic: lambda_a/lambda_b must be in [0, 1]");
    }
    if (!in01(t.omega_a)) {
        throw std::domain_error("traffic: omega_a must be in [0, 1]");
    }
}

const char* constraint_name(Constraint c) {
    switch (c) {
        case Constraint::SourceA: return "source_a";
        case Constraint::SourceB: return "source_b";
        case Constraint::SourceSum: return "source_sum";
        case Constraint::RelayA: return "relay_a";
        case Constraint::RelayB: return "relay_b";
        case Constraint::RelaySum: return "relay_sum";
    }
    return "?";
}

Geo1Stationary geo_geo1_stationary(double p, double q, int j_max) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("geo_geo1_stationary: p, q must be in [0, 1]");
    }
    if (p >= q) {
        throw std::domain_error("geo_geo1_stationary: unstable (p >= q), no stationary distribution");
    }
    if (j_max < 0) throw std::domain_error("geo_geo1_stationary: j_max must be >= 0");

    Geo1Stationary out;
    out.pi0 = (q - p) / q;
    out.tail.resize(static_cast<std::size_t>(j_max));
    if (j_max == 0) return out;

    // pi_1 = pi0 * p / (q (1-p)); ratio rho = p(1-q)/(q(1-p)) thereafter.
    // (Writing pi_1 this way keeps q = 1 finite.)
    const double first = p / (q * (1.0 - p));
    const double rho = p * (1.0 - q) / (q * (1.0 - p));
    double pi_j = out.pi0 * first;
    for (int j = 1; j <= j_max; ++j) {
        out.tail[static_cast<std::size_t>(j - 1)] = pi_j;
        pi_j *= rho;
    }
    return out;
}

namespace {

StabilityVerdict verdict_from(const double* margins, int count) {
    int best = 0;
    for (int i = 1; i < count; ++i) {
        if (margins[i] < margins[best]) best = i;
    }
    StabilityVerdict v;
    v.margin = margins[best];
    v.binding = static_cast<Constraint>(best);
    v.stable = v.margin > kStrictnessDelta;
    return v;
}

StabilityVerdict verdict_from_source_relay(double bound_sa, double bound_sb,
                                           double bound_ssum, double bound_ra,
                                           double bound_rb, double bound_rsum,
                                           const TrafficProfile& t) {
    const double m[6] = {
        bound_sa - t.lambda_a,
        bound_sb - t.lambda_b,
        bound_ssum - (t.lambda_a + t.lambda_b),
        bound_ra - t.lambda_a,
        bound_rb - t.lambda_b,
        bound_rsum - (t.lambda_a + t.lambda_b),
    };
    return verdict_from(m, 6);
}

} // namespace

StabilityVerdict tdma_stable(const TrafficProfile& traffic, double k_a, double k_b,
                             int n, const ChannelParams& ch, PcModel model) {
    validate_traffic(traffic);
    const double pc_a = success_prob(k_a, n, ch, model);
    const double pc_b = success_prob(k_b, n, ch, model);
    const double sa = traffic.omega_a * pc_a;
    const double sb = traffic.omega_b() * pc_b;

    const double m[3] = {
        sa - traffic.lambda_a,
        sb - traffic.lambda_b,
        (sa + sb) - (traffic.lambda_a + traffic.lambda_b),
    };
    return verdict_from(m, 3);
}

QueueRates relay_rates(double lambda_i, double omega_i, double k, int n,
                       const LinkSet& links, PcModel model, double payload_rd) {
    if (!(omega_i >= 0.0 && omega_i <= 1.0)) {
        throw std::domain_error("relay_rates: omega_i must be in [0, 1]");
    }
    const double p_sd = success_prob(k, n, links.sd, model);
    const double p_sr = success_prob(k, n, links.sr, model);
    const double cross = (1.0 - p_sd) * p_sr;
    const double mu_i = omega_i * (p_sd + cross);
    if (!(lambda_i < mu_i)) {
        throw std::domain_error(
            "relay_rates: source queue unstable (lambda_i = " + std::to_string(lambda_i) +
            " >= mu_i = " + std::to_string(mu_i) + "), pi0 undefined");
    }
    QueueRates r;
    r.pi0 = 1.0 - lambda_i / mu_i;
    r.lambda_r = omega_i * (1.0 - r.pi0) * cross;
    r.mu_r = omega_i * r.pi0 * success_prob(payload_rd, n, links.rd, model);
    return r;
}

namespace {

// lambda-scale service bounds for the cooperative schemes. For variant Relay
// the relay queue is Geo/Geo^L/1 with rd at payload L*k; rule selects the
// published denominator or the derived L-scaled one. For variant
// Source the source queue batches (payload L*k on sd/sr) and the relay
// forwards single packets; there is only one closed form.
struct CoopBounds {
    double source_per_omega; // per-source bound = omega_i * source_per_omega
    double relay_per_omega;
    bool degenerate;
};

CoopBounds coop_bounds(double k, long long l, int n, const LinkSet& links,
                       PcModel model, BafVariant variant, BafRelayRule rule) {
    CoopBounds out{};
    const double ld = static_cast<double>(l);
    if (variant == BafVariant::Relay) {
        const double p_sd = success_prob(k, n, links.sd, model);
        const double p_sr = success_prob(k, n, links.sr, model);
        const double cross = (1.0 - p_sd) * p_sr;
        const double bracket = p_sd + cross;
        const double p_rd = success_prob(ld * k, n, links.rd, model);
        out.source_per_omega = bracket;
        const double den =
            (rule == BafRelayRule::Published) ? p_rd + cross : ld * p_rd + cross;
        if (den == 0.0) {
            out.relay_per_omega = 0.0;
            out.degenerate = true;
        } else {
            out.relay_per_omega = ld * bracket * p_rd / den;
        }
    } else {
        const double p_sd = success_prob(ld * k, n, links.sd, model);
        const double p_sr = success_prob(ld * k, n, links.sr, model);
        const double cross = (1.0 - p_sd) * p_sr;
        const double bracket = p_sd + cross;
        const double p_rd = success_prob(k, n, links.rd, model);
        out.source_per_omega = ld * bracket;
        const double den = p_rd + cross;
        if (den == 0.0) {
            out.relay_per_omega = 0.0;
            out.degenerate = true;
        } else {
            out.relay_per_omega = bracket * p_rd / den;
        }
    }
    return out;
}

StabilityVerdict coop_verdict(const TrafficProfile& t, const CoopBounds& b) {
    return verdict_from_source_relay(
        t.omega_a * b.source_per_omega, t.omega_b() * b.source_per_omega,
        b.source_per_omega, t.omega_a * b.relay_per_omega,
        t.omega_b() * b.relay_per_omega, b.relay_per_omega, t);
}

} // namespace

CcStability cc_stable(const TrafficProfile& traffic, double k, int n,
                      const LinkSet& links, PcModel model) {
    validate_traffic(traffic);
    const CoopBounds b =
        coop_bounds(k, 1, n, links, model, BafVariant::Relay, BafRelayRule::Published);
    CcStability out;
    out.overall = coop_verdict(traffic, b);
    out.source_sum_margin = b.source_per_omega - (traffic.lambda_a + traffic.lambda_b);
    out.relay_sum_margin = b.relay_per_omega - (traffic.lambda_a + traffic.lambda_b);
    return out;
}

BafStability baf_stable(const TrafficProfile& traffic, double k, long long l, int n,
                        const LinkSet& links, PcModel model, BafVariant variant) {
    validate_traffic(traffic);
    if (l < 1) throw std::domain_error("baf_stable: l must be >= 1");
    BafStability out;
    const CoopBounds published =
        coop_bounds(k, l, n, links, model, variant, BafRelayRule::Published);
    out.published = coop_verdict(traffic, published);
    if (variant == BafVariant::Relay) {
        const CoopBounds derived =
            coop_bounds(k, l, n, links, model, variant, BafRelayRule::DerivedBatch);
        out.derived = coop_verdict(traffic, derived);
    } else {
        out.derived = out.published; // no alternative closed form for source batching
    }
    out.disagree = out.published.stable != out.derived.stable;
    return out;
}

CognitiveSplit cognitive_split(double lambda_a, double k_a, long long k_b_max, int n,
                               const ChannelParams& ch, PcModel model) {
    if (!(lambda_a >= 0.0 && lambda_a <= 1.0)) {
        throw std::domain_error("cognitive_split: lambda_a must be in [0, 1]");
    }
    if (k_b_max < 1) throw std::domain_error("cognitive_split: k_b_max must be >= 1");
    const double pc_a = success_prob(k_a, n, ch, model);
    if (!(lambda_a < pc_a)) {
        throw std::domain_error("cognitive_split: primary demand infeasible, lambda_a = " +
                                std::to_string(lambda_a) + " >= Pc(k_a, n) = " +
                                std::to_string(pc_a) + " (deficit " +
                                std::to_string(lambda_a - pc_a) + ")");
    }
    CognitiveSplit out;
    out.omega_a_star = std::min(lambda_a / pc_a + kStrictnessDelta, 1.0);

    // argmax of (k/n) Pc(k) over [1, k_b_max]; the omega_b factor cannot move it.
    long long best_k = 1;
    double best_u = -1.0;
    for (long long k = 1; k <= k_b_max; ++k) {
        const double u = tdma_throughput(static_cast<double>(k), n, ch, model);
        if (u > best_u) {
            best_u = u;
            best_k = k;
        }
    }
    out.k_b_star = best_k;
    out.u_secondary = (1.0 - out.omega_a_star) * best_u;
    return out;
}

} // namespace fblnet
