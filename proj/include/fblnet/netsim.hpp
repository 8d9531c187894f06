#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fblnet/fbl_model.hpp"
#include "fblnet/stability.hpp"
#include "fblnet/throughput.hpp"

namespace fblnet {

// Slot-level Monte Carlo simulation of the TDMA network. Within a slot the
// order is fixed:
//   1. Bernoulli arrivals join each source queue.
//   2. The scheduler grants the slot to A with probability omega_a, else B.
//   3. If the granted queue can transmit, the source does (drawing SD and SR
//      outcomes); otherwise, if the granted queue is empty, the relay serves
//      the matching relay queue.
// Six uniform draws are consumed every slot in the order (arrival A,
// arrival B, scheduler, SD, SR, RD), whether or not the event they feed is
// possible, so runs with the same seed stay draw-for-draw comparable across
// protocols (BAF with L = 1 is trajectory-identical to CC).
//
// Protocol specifics, following the cooperation rules:
//   Nc        source sends one packet; no relay.
//   Cc        SD success delivers; SD fail + SR success moves the packet to
//             the relay queue; relay (on idle grants) sends one packet.
//   BafRelay  as Cc, but the relay only transmits with >= L packets queued,
//             sending all L in one codeword (payload L*k on rd).
//   BafSource the source only transmits with >= L packets queued (payload
//             L*k on sd/sr, moving/delivering L at once); the relay forwards
//             single packets on idle grants.
struct SimConfig {
    Protocol protocol = Protocol::Nc;
    TrafficProfile traffic;
    CodeSpec code;
    LinkSet links;
    PcModel model = PcModel::SecondOrder;
    std::uint64_t slots = 100000;      // >= 10^4
    double warmup_fraction = 0.1;      // statistics start after this window
    std::uint64_t seed = 1;
};

struct QueueMeans {
    double q_a = 0.0;
    double q_b = 0.0;
    double q_ar = 0.0;
    double q_br = 0.0;
};

// Whole-run packet ledger; arrived == delivered + backlogged holds exactly
// on every run (infinite buffers, nothing is ever dropped).
struct Ledger {
    std::uint64_t arrived = 0;
    std::uint64_t delivered = 0;
    std::uint64_t backlogged = 0;
};

struct SimReport {
    std::uint64_t slots_counted = 0;   // post-warmup slot count
    std::uint64_t delivered_bits = 0;  // post-warmup
    double empirical_throughput = 0.0; // delivered_bits / (slots_counted * n)
    QueueMeans mean_queue;             // post-warmup averages, packets
    double drift_slope = 0.0;          // LS slope of total backlog, packets/slot
    std::array<double, 4> quarter_backlog_means{}; // post-warmup quarters
    double idle_freq_a = 1.0;          // granted slots with empty queue
    double idle_freq_b = 1.0;
    Ledger conservation;
};

bool operator==(const SimReport& a, const SimReport& b);

SimReport run_sim(const SimConfig& config);

enum class StabilityClass { Stable, Unstable, Indeterminate };

const char* stability_class_name(StabilityClass c);

// Empirical verdict from drift and backlog growth. Thresholds were tuned
// once on the non-cooperative protocol (where the closed form is exact) and
// frozen: Unstable above 2% of the offered load per slot, Stable below 0.5%
// with bounded quarter means, Indeterminate between. Requires >= 10^5
// post-warmup slots.
StabilityClass classify_stability(const SimReport& report, double lambda_total);

// Single-queue idle-probability estimator: Bernoulli(p) arrivals,
// Bernoulli(q) service, idle measured at the service epoch. Converges to
// (q - p)/q. Throws std::domain_error when p >= q.
double estimate_pi0(double p, double q, std::uint64_t slots, std::uint64_t seed);

struct BoundaryPoint {
    double lambda_total = 0.0;
    StabilityClass verdict = StabilityClass::Indeterminate;
};

struct BoundaryEstimate {
    double midpoint = 0.0;
    double half_width = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool stopped_on_indeterminate = false;
    std::vector<BoundaryPoint> evaluations;
};

// Empirical stability boundary in total-lambda units (symmetric split
// lambda_a = lambda_b, omega_a = 0.5). Grid points are classified by
// majority vote over the seeds, then the [largest Stable, smallest
// Unstable] bracket is bisected; an Indeterminate midpoint ends the scan
// (that point sits inside the flakiness band around the true boundary).
// Throws std::runtime_error when the grid has no Stable/Unstable bracket
// (widen the grid).
BoundaryEstimate boundary_scan(Protocol protocol, const CodeSpec& code,
                               const LinkSet& links, PcModel model,
                               const std::vector<double>& lambda_grid,
                               std::uint64_t slots,
                               const std::vector<std::uint64_t>& seeds);

} // namespace fblnet
