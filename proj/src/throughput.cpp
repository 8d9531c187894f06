#include "fblnet/throughput.hpp"

#include <cmath>
#include <stdexcept>

namespace fblnet {

double tdma_throughput(double k, int n, const ChannelParams& ch, PcModel model) {
    return k / static_cast<double>(n) * success_prob(k, n, ch, model);
}

OptimizeKResult optimize_k(int n, const ChannelParams& ch, PcModel model,
                           long long scan_bound) {
    if (n < 1) throw std::domain_error("optimize_k: n must be >= 1");
    if (scan_bound <= 0) {
        scan_bound = 10 * std::max(1LL, static_cast<long long>(
                                            std::ceil(n * ch.capacity)));
    }
    OptimizeKResult best{1, tdma_throughput(1.0, n, ch, model)};
    double prev = best.u;
    for (long long k = 2; k <= scan_bound; ++k) {
        const double u = tdma_throughput(static_cast<double>(k), n, ch, model);
        if (u < prev) break; // unimodal: first decrease ends the search
        if (u > best.u) {
            best.u = u;
            best.k = k;
        }
        prev = u;
    }
    return best;
}

namespace {

struct CoopTerms {
    double bracket;  // P_sd + P_e,sd * P_sr
    double cross;    // P_e,sd * P_sr
};

CoopTerms coop_terms(double payload, int n, const LinkSet& links, PcModel model) {
    const double p_sd = success_prob(payload, n, links.sd, model);
    const double p_sr = success_prob(payload, n, links.sr, model);
    const double cross = (1.0 - p_sd) * p_sr;
    return {p_sd + cross, cross};
}

// Relay arm shared by CC (l = 1) and BAF at the relay: batches of l packets,
// rd evaluated at the batch payload.
ArmEval relay_arm(double k, long long l, int n, const LinkSet& links, PcModel model,
                  const CoopTerms& t) {
    const double p_rd = success_prob(static_cast<double>(l) * k, n, links.rd, model);
    const double den = p_rd + t.cross;
    if (den == 0.0) return {0.0, true};
    const double lk = static_cast<double>(l) * k;
    return {lk / static_cast<double>(n) * t.bracket * p_rd / den, false};
}

} // namespace

ArmEval cc_eval(double k, int n, const LinkSet& links, PcModel model) {
    return relay_arm(k, 1, n, links, model, coop_terms(k, n, links, model));
}

double cc_throughput(double k, int n, const LinkSet& links, PcModel model) {
    return cc_eval(k, n, links, model).value;
}

double nc_throughput(double k, int n, const LinkSet& links, PcModel model) {
    return tdma_throughput(k, n, links.sd, model);
}

BafEval baf_relay_throughput(double k, long long l, int n, const LinkSet& links,
                             PcModel model) {
    if (l < 1) throw std::domain_error("baf_relay_throughput: l must be >= 1");
    const CoopTerms t = coop_terms(k, n, links, model);
    const double u_source = k / static_cast<double>(n) * t.bracket;
    const ArmEval relay = relay_arm(k, l, n, links, model, t);

    BafEval out;
    out.source_arm = u_source;
    out.relay_arm = relay.value;
    out.degenerate = relay.degenerate;
    if (u_source <= relay.value) {
        out.value = u_source;
        out.binding = Binding::SourceLimited;
    } else {
        out.value = relay.value;
        out.binding = Binding::RelayLimited;
    }
    return out;
}

BafEval baf_source_throughput(double k, long long l, int n, const LinkSet& links,
                              PcModel model) {
    if (l < 1) throw std::domain_error("baf_source_throughput: l must be >= 1");
    const double lk = static_cast<double>(l) * k;
    const CoopTerms t = coop_terms(lk, n, links, model); // sd/sr at the batch payload
    const double u_source = lk / static_cast<double>(n) * t.bracket;

    // Relay forwards single packets: rd at payload k.
    const double p_rd = success_prob(k, n, links.rd, model);
    const double den = p_rd + t.cross;
    BafEval out;
    out.source_arm = u_source;
    if (den == 0.0) {
        out.degenerate = true;
        out.relay_arm = 0.0;
    } else {
        out.relay_arm = k / static_cast<double>(n) * t.bracket * p_rd / den;
    }
    if (u_source <= out.relay_arm) {
        out.value = u_source;
        out.binding = Binding::SourceLimited;
    } else {
        out.value = out.relay_arm;
        out.binding = Binding::RelayLimited;
    }
    return out;
}

ThroughputResult optimize_protocol(Protocol protocol, int n, const LinkSet& links,
                                   PcModel model, long long k_max, long long l_max) {
    if (n < 1) throw std::domain_error("optimize_protocol: n must be >= 1");
    if (k_max <= 0) k_max = n;
    if (l_max < 1) throw std::domain_error("optimize_protocol: l_max must be >= 1");
    if (k_max < 1) throw std::domain_error("optimize_protocol: empty k grid");

    ThroughputResult best;
    best.protocol = protocol;
    best.u_star = -1.0;

    const bool batched = protocol == Protocol::BafRelay || protocol == Protocol::BafSource;
    const long long l_hi = batched ? l_max : 1;

    for (long long l = 1; l <= l_hi; ++l) {
        for (long long k = 1; k <= k_max; ++k) {
            double u = 0.0;
            Binding b = Binding::NotApplicable;
            switch (protocol) {
                case Protocol::Nc:
                    u = nc_throughput(static_cast<double>(k), n, links, model);
                    break;
                case Protocol::Cc:
                    u = cc_eval(static_cast<double>(k), n, links, model).value;
                    break;
                case Protocol::BafRelay: {
                    const BafEval e = baf_relay_throughput(static_cast<double>(k), l, n, links, model);
                    u = e.value;
                    b = e.binding;
                    break;
                }
                case Protocol::BafSource: {
                    const BafEval e = baf_source_throughput(static_cast<double>(k), l, n, links, model);
                    u = e.value;
                    b = e.binding;
                    break;
                }
            }
            if (u > best.u_star) {
                best.u_star = u;
                best.k_star = k;
                best.l_star = l;
                best.binding = b;
            }
        }
    }
    return best;
}

ThroughputResult optimize_overall(int n, const LinkSet& links, PcModel model,
                                  long long k_max, long long l_max) {
    const ThroughputResult relay = optimize_protocol(Protocol::BafRelay, n, links, model, k_max, l_max);
    const ThroughputResult source = optimize_protocol(Protocol::BafSource, n, links, model, k_max, l_max);
    return source.u_star > relay.u_star ? source : relay;
}

} // namespace fblnet
