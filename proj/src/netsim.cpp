#include "fblnet/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fblnet/splitmix64.hpp"

namespace fblnet {

bool operator==(const SimReport& a, const SimReport& b) {
    return a.slots_counted == b.slots_counted && a.delivered_bits == b.delivered_bits &&
           a.empirical_throughput == b.empirical_throughput &&
           a.mean_queue.q_a == b.mean_queue.q_a && a.mean_queue.q_b == b.mean_queue.q_b &&
           a.mean_queue.q_ar == b.mean_queue.q_ar && a.mean_queue.q_br == b.mean_queue.q_br &&
           a.drift_slope == b.drift_slope &&
           a.quarter_backlog_means == b.quarter_backlog_means &&
           a.idle_freq_a == b.idle_freq_a && a.idle_freq_b == b.idle_freq_b &&
           a.conservation.arrived == b.conservation.arrived &&
           a.conservation.delivered == b.conservation.delivered &&
           a.conservation.backlogged == b.conservation.backlogged;
}

namespace {

constexpr int kDriftWindows = 64;

void validate_config(const SimConfig& c) {
    validate_traffic(c.traffic);
    if (c.slots < 10000) throw std::domain_error("run_sim: slots must be >= 10^4");
    if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0)) {
        throw std::domain_error("run_sim: warmup_fraction must be in [0, 1)");
    }
    if (c.code.k < 1 || c.code.n < 1 || c.code.l < 1) {
        throw std::domain_error("run_sim: invalid code spec");
    }
    if (c.protocol != Protocol::Nc &&
        (c.traffic.lambda_a >= 1.0 || c.traffic.lambda_b >= 1.0)) {
        // A saturated source never idles, so the relay never transmits and
        // the relay queues diverge; only the non-cooperative protocol
        // supports the saturated corner.
        throw std::domain_error("run_sim: saturated sources (lambda = 1) are only supported under Nc");
    }
}

} // namespace

SimReport run_sim(const SimConfig& config) {
    validate_config(config);

    const double n = static_cast<double>(config.code.n);
    const double kbits = static_cast<double>(config.code.k);
    const long long batch = config.code.l;
    const std::uint64_t kb = static_cast<std::uint64_t>(config.code.k);

    // Per-slot success probabilities, fixed for the whole run.
    double p_sd = 0.0, p_sr = 0.0, p_rd = 0.0;
    switch (config.protocol) {
        case Protocol::Nc:
            p_sd = success_prob(kbits, config.code.n, config.links.sd, config.model);
            break;
        case Protocol::Cc:
            p_sd = success_prob(kbits, config.code.n, config.links.sd, config.model);
            p_sr = success_prob(kbits, config.code.n, config.links.sr, config.model);
            p_rd = success_prob(kbits, config.code.n, config.links.rd, config.model);
            break;
        case Protocol::BafRelay:
            p_sd = success_prob(kbits, config.code.n, config.links.sd, config.model);
            p_sr = success_prob(kbits, config.code.n, config.links.sr, config.model);
            p_rd = success_prob(static_cast<double>(batch) * kbits, config.code.n,
                                config.links.rd, config.model);
            break;
        case Protocol::BafSource:
            p_sd = success_prob(static_cast<double>(batch) * kbits, config.code.n,
                                config.links.sd, config.model);
            p_sr = success_prob(static_cast<double>(batch) * kbits, config.code.n,
                                config.links.sr, config.model);
            p_rd = success_prob(kbits, config.code.n, config.links.rd, config.model);
            break;
    }

    const std::uint64_t warmup =
        static_cast<std::uint64_t>(config.warmup_fraction * static_cast<double>(config.slots));
    const std::uint64_t counted = config.slots - warmup;

    SplitMix64 rng(config.seed);

    std::uint64_t q[2] = {0, 0};   // source queues
    std::uint64_t qr[2] = {0, 0};  // relay queues
    std::uint64_t arrived = 0, delivered_packets = 0;
    std::uint64_t delivered_bits = 0;
    std::uint64_t granted[2] = {0, 0}, granted_idle[2] = {0, 0};
    std::uint64_t queue_sum[4] = {0, 0, 0, 0};

    // Backlog window means for the drift slope and the quarter means.
    double window_sum[kDriftWindows] = {};
    std::uint64_t window_count[kDriftWindows] = {};
    double quarter_sum[4] = {};
    std::uint64_t quarter_count[4] = {};

    const double la = config.traffic.lambda_a;
    const double lb = config.traffic.lambda_b;
    const double wa = config.traffic.omega_a;
    const long long relay_batch = config.protocol == Protocol::BafRelay ? batch : 1;
    const std::uint64_t src_need = config.protocol == Protocol::BafSource
                                       ? static_cast<std::uint64_t>(batch)
                                       : 1;

    for (std::uint64_t t = 0; t < config.slots; ++t) {
        const double u_arr_a = rng.next_unit();
        const double u_arr_b = rng.next_unit();
        const double u_sched = rng.next_unit();
        const double u_sd = rng.next_unit();
        const double u_sr = rng.next_unit();
        const double u_rd = rng.next_unit();

        if (u_arr_a < la) { ++q[0]; ++arrived; }
        if (u_arr_b < lb) { ++q[1]; ++arrived; }

        const int g = u_sched < wa ? 0 : 1;
        const bool post = t >= warmup;
        if (post) {
            ++granted[g];
            if (q[g] == 0) ++granted_idle[g];
        }

        if (q[g] >= src_need) {
            // Source transmission (one packet, or a batch of L under BafSource).
            const bool sd_ok = u_sd < p_sd;
            const bool sr_ok = u_sr < p_sr;
            const std::uint64_t moved = src_need;
            if (sd_ok) {
                q[g] -= moved;
                delivered_packets += moved;
                if (post) delivered_bits += moved * kb;
            } else if (config.protocol != Protocol::Nc && sr_ok) {
                q[g] -= moved;
                qr[g] += moved;
            }
        } else if (q[g] == 0 && config.protocol != Protocol::Nc) {
            // Idle grant: the relay may serve the matching queue. Under
            // BafRelay it needs a full batch of L packets; partial batches
            // wait.
            const std::uint64_t need = static_cast<std::uint64_t>(relay_batch);
            if (qr[g] >= need && u_rd < p_rd) {
                qr[g] -= need;
                delivered_packets += need;
                if (post) delivered_bits += need * kb;
            }
        }
        // (Under BafSource a grant with 0 < queue < L goes unused: the
        // source cannot form a batch and it is not idle, so the relay
        // stays silent.)

        if (post) {
            const std::uint64_t idx = t - warmup;
            const std::uint64_t backlog = q[0] + q[1] + qr[0] + qr[1];
            queue_sum[0] += q[0];
            queue_sum[1] += q[1];
            queue_sum[2] += qr[0];
            queue_sum[3] += qr[1];
            const int w = static_cast<int>(idx * kDriftWindows / counted);
            window_sum[w] += static_cast<double>(backlog);
            ++window_count[w];
            const int quarter = static_cast<int>(idx * 4 / counted);
            quarter_sum[quarter] += static_cast<double>(backlog);
            ++quarter_count[quarter];
        }
    }

    SimReport rep;
    rep.slots_counted = counted;
    rep.delivered_bits = delivered_bits;
    rep.empirical_throughput =
        static_cast<double>(delivered_bits) / (static_cast<double>(counted) * n);
    rep.mean_queue.q_a = static_cast<double>(queue_sum[0]) / static_cast<double>(counted);
    rep.mean_queue.q_b = static_cast<double>(queue_sum[1]) / static_cast<double>(counted);
    rep.mean_queue.q_ar = static_cast<double>(queue_sum[2]) / static_cast<double>(counted);
    rep.mean_queue.q_br = static_cast<double>(queue_sum[3]) / static_cast<double>(counted);

    // Least-squares slope of window means against window-center slot index.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int used = 0;
        double offset = 0;
        for (int w = 0; w < kDriftWindows; ++w) {
            if (window_count[w] == 0) continue;
            const double x = offset + static_cast<double>(window_count[w]) / 2.0;
            offset += static_cast<double>(window_count[w]);
            const double y = window_sum[w] / static_cast<double>(window_count[w]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++used;
        }
        if (used >= 2) {
            const double d = used * sxx - sx * sx;
            rep.drift_slope = d != 0.0 ? (used * sxy - sx * sy) / d : 0.0;
        }
    }
    for (int i = 0; i < 4; ++i) {
        rep.quarter_backlog_means[static_cast<std::size_t>(i)] =
            quarter_count[i] ? quarter_sum[i] / static_cast<double>(quarter_count[i]) : 0.0;
    }
    rep.idle_freq_a = granted[0] ? static_cast<double>(granted_idle[0]) /
                                       static_cast<double>(granted[0])
                                 : 1.0;
    rep.idle_freq_b = granted[1] ? static_cast<double>(granted_idle[1]) /
                                       static_cast<double>(granted[1])
                                 : 1.0;

    rep.conservation.arrived = arrived;
    rep.conservation.delivered = delivered_packets;
    rep.conservation.backlogged = q[0] + q[1] + qr[0] + qr[1];
    return rep;
}

const char* stability_class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::Stable: return "stable";
        case StabilityClass::Unstable: return "unstable";
        case StabilityClass::Indeterminate: return "indeterminate";
    }
    return "?";
}

StabilityClass classify_stability(const SimReport& report, double lambda_total) {
    if (report.slots_counted < 100000) {
        throw std::domain_error("classify_stability: needs >= 10^5 post-warmup slots");
    }
    if (lambda_total < 0.0) throw std::domain_error("classify_stability: lambda_total < 0");

    if (lambda_total > 0.0 && report.drift_slope > 0.02 * lambda_total) {
        return StabilityClass::Unstable;
    }
    const auto& qm = report.quarter_backlog_means;
    const bool growing = qm[1] < qm[2] && qm[2] < qm[3] && qm[3] > 2.0 * qm[0] &&
                         qm[3] - qm[0] > 1.0;
    if (report.drift_slope <= 0.005 * lambda_total && !growing) {
        return StabilityClass::Stable;
    }
    return StabilityClass::Indeterminate;
}

double estimate_pi0(double p, double q, std::uint64_t slots, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("estimate_pi0: p, q must be in [0, 1]");
    }
    if (p >= q) {
        throw std::domain_error("estimate_pi0: unstable parameters (p >= q)");
    }
    if (slots < 10000) throw std::domain_error("estimate_pi0: slots must be >= 10^4");

    SplitMix64 rng(seed);
    const std::uint64_t warmup = slots / 10;
    std::uint64_t queue = 0, idle = 0, counted = 0;
    for (std::uint64_t t = 0; t < slots; ++t) {
        const double u_arr = rng.next_unit();
        const double u_srv = rng.next_unit();
        if (u_arr < p) ++queue;
        if (t >= warmup) {
            ++counted;
            if (queue == 0) ++idle;
        }
        if (queue > 0 && u_srv < q) --queue;
    }
    return static_cast<double>(idle) / static_cast<double>(counted);
}

namespace {

StabilityClass majority_vote(Protocol protocol, const CodeSpec& code, const LinkSet& links,
                             PcModel model, double lambda_total, std::uint64_t slots,
                             const std::vector<std::uint64_t>& seeds) {
    int stable = 0, unstable = 0;
    for (std::uint64_t seed : seeds) {
        SimConfig cfg;
        cfg.protocol = protocol;
        cfg.traffic = TrafficProfile{lambda_total / 2.0, lambda_total / 2.0, 0.5};
        cfg.code = code;
        cfg.links = links;
        cfg.model = model;
        cfg.slots = slots;
        cfg.seed = seed;
        const StabilityClass c = classify_stability(run_sim(cfg), lambda_total);
        if (c == StabilityClass::Stable) ++stable;
        else if (c == StabilityClass::Unstable) ++unstable;
    }
    const int total = static_cast<int>(seeds.size());
    if (2 * stable > total) return StabilityClass::Stable;
    if (2 * unstable > total) return StabilityClass::Unstable;
    return StabilityClass::Indeterminate;
}

} // namespace

BoundaryEstimate boundary_scan(Protocol protocol, const CodeSpec& code,
                               const LinkSet& links, PcModel model,
                               const std::vector<double>& lambda_grid,
                               std::uint64_t slots,
                               const std::vector<std::uint64_t>& seeds) {
    if (lambda_grid.empty()) throw std::domain_error("boundary_scan: empty lambda grid");
    if (seeds.empty()) throw std::domain_error("boundary_scan: needs at least one seed");
    for (std::size_t i = 0; i + 1 < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] < lambda_grid[i + 1])) {
            throw std::domain_error("boundary_scan: lambda grid must be strictly increasing");
        }
    }

    BoundaryEstimate out;
    auto classify = [&](double lt) {
        const StabilityClass c =
            majority_vote(protocol, code, links, model, lt, slots, seeds);
        out.evaluations.push_back({lt, c});
        return c;
    };

    int first_unstable = -1;
    int last_stable_below = -1;
    bool any_decided = false;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const StabilityClass c = classify(lambda_grid[i]);
        if (c != StabilityClass::Indeterminate) any_decided = true;
        if (c == StabilityClass::Unstable && first_unstable < 0) {
            first_unstable = static_cast<int>(i);
        }
        if (c == StabilityClass::Stable && first_unstable < 0) {
            last_stable_below = static_cast<int>(i);
        }
    }
    if (!any_decided) {
        throw std::runtime_error("boundary_scan: all grid points indeterminate; widen the grid");
    }
    if (first_unstable < 0) {
        throw std::runtime_error("boundary_scan: no unstable grid point; widen the grid upward");
    }

    double lo = last_stable_below >= 0 ? lambda_grid[static_cast<std::size_t>(last_stable_below)]
                                       : 0.0; // an empty system is trivially stable
    double hi = lambda_grid[static_cast<std::size_t>(first_unstable)];

    for (int iter = 0; iter < 12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 0.02 * mid) break;
        const StabilityClass c = classify(mid);
        if (c == StabilityClass::Stable) {
            lo = mid;
        } else if (c == StabilityClass::Unstable) {
            hi = mid;
        } else {
            // Inside the flakiness band around the true boundary; the
            // midpoint itself is the best estimate available.
            out.midpoint = mid;
            out.half_width = 0.5 * (hi - lo);
            out.bracket_lo = lo;
            out.bracket_hi = hi;
            out.stopped_on_indeterminate = true;
            return out;
        }
    }
    out.midpoint = 0.5 * (lo + hi);
    out.half_width = 0.5 * (hi - lo);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

} // namespace fblnet
