#pragma once

#include "fblnet/fbl_model.hpp"

namespace fblnet {

// The MARC link triple. Links are statistically identical for both sources,
// so the per-source index never appears.
struct LinkSet {
    ChannelParams sd; // source -> destination
    ChannelParams sr; // source -> relay
    ChannelParams rd; // relay -> destination
};

enum class Protocol { Nc, Cc, BafRelay, BafSource };

enum class Binding { SourceLimited, RelayLimited, NotApplicable };

// Throughput per channel use for one TDMA grant stream.
double tdma_throughput(double k, int n, const ChannelParams& ch,
                       PcModel model = PcModel::SecondOrder);

struct OptimizeKResult {
    long long k = 1;
    double u = 0.0;
};

// Maximizer of tdma_throughput over integer k >= 1, found by ascending scan
// that stops at the first decrease (valid since (k/n)Pc is log-concave in k,
// hence unimodal). Returns the smallest maximizing k. scan_bound == 0 picks
// 10 * max(1, ceil(n*C)) as a safety net.
OptimizeKResult optimize_k(int n, const ChannelParams& ch,
                           PcModel model = PcModel::SecondOrder,
                           long long scan_bound = 0);

// One throughput value plus a flag for the 0/0 denominator corner
// (relay-path and source-relay success both numerically zero).
struct ArmEval {
    double value = 0.0;
    bool degenerate = false;
};

// Cognitive-cooperation throughput
//   u_cc = (k/n) [P_sd + P_e,sd P_sr] P_rd / [P_rd + P_e,sd P_sr],
// all probabilities at payload k. Degenerate denominator returns 0, flagged.
ArmEval cc_eval(double k, int n, const LinkSet& links, PcModel model = PcModel::SecondOrder);
double cc_throughput(double k, int n, const LinkSet& links, PcModel model = PcModel::SecondOrder);

// Non-cooperative throughput (k/n) P_sd; ignores sr and rd entirely.
double nc_throughput(double k, int n, const LinkSet& links, PcModel model = PcModel::SecondOrder);

struct BafEval {
    double value = 0.0;
    Binding binding = Binding::NotApplicable;
    bool degenerate = false;
    double source_arm = 0.0;
    double relay_arm = 0.0;
};

// Batch-and-forward at the relay: the source arm is the cooperative source
// throughput at payload k, the relay arm carries batches of L packets
// (payload L*k on the rd link); the scheme is limited by the smaller arm.
// At L = 1 the relay arm reduces to cc_eval bit-for-bit.
BafEval baf_relay_throughput(double k, long long l, int n, const LinkSet& links,
                             PcModel model = PcModel::SecondOrder);

// Batch-and-forward at the source: source arm at payload L*k on sd/sr, relay
// arm forwards single packets (payload k on rd).
BafEval baf_source_throughput(double k, long long l, int n, const LinkSet& links,
                              PcModel model = PcModel::SecondOrder);

struct ThroughputResult {
    Protocol protocol = Protocol::Nc;
    long long k_star = 1;
    long long l_star = 1;
    double u_star = 0.0;
    Binding binding = Binding::NotApplicable;
};

// Exhaustive grid search over k in [1, k_max] (and L in [1, l_max] for the
// BAF variants; the BAF objective is not concave, so no early stopping).
// Ties break toward the smallest (L, k) lexicographically. k_max == 0
// defaults to n, l_max defaults to 8.
ThroughputResult optimize_protocol(Protocol protocol, int n, const LinkSet& links,
                                   PcModel model = PcModel::SecondOrder,
                                   long long k_max = 0, long long l_max = 8);

// max over {BafRelay, BafSource}; ties go to BafRelay.
ThroughputResult optimize_overall(int n, const LinkSet& links,
                                  PcModel model = PcModel::SecondOrder,
                                  long long k_max = 0, long long l_max = 8);

} // namespace fblnet
