#pragma once

#include <vector>

#include "fblnet/fbl_model.hpp"
#include "fblnet/throughput.hpp"

namespace fblnet {

// Bernoulli arrival means and the TDMA split. lambda values live in [0, 1];
// 1.0 is the saturated corner (only meaningful for the non-cooperative
// simulator, and always unstable analytically).
struct TrafficProfile {
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    double omega_a = 0.5;
    double omega_b() const { return 1.0 - omega_a; }
};

// Throws std::domain_error on out-of-range fields.
void validate_traffic(const TrafficProfile& t);

// All stability conditions are strict; boundary inputs classify unstable.
// kStrictnessDelta is the margin below which "stable" is refused.
inline constexpr double kStrictnessDelta = 1e-9;

enum class Constraint { SourceA, SourceB, SourceSum, RelayA, RelayB, RelaySum };

const char* constraint_name(Constraint c);

// margin = service bound minus offered load for the binding (tightest)
// constraint, in packets per slot on the lambda scale. stable requires
// margin > kStrictnessDelta.
struct StabilityVerdict {
    bool stable = false;
    double margin = 0.0;
    Constraint binding = Constraint::SourceA;
};

// Stationary distribution of the discrete-time Geo/Geo/1 queue with arrival
// probability p and service probability q:
//   pi0 = (q - p)/q,   pi_j = rho^j * pi0 / (1 - q),  rho = p(1-q)/(q(1-p)).
// Throws std::domain_error when p >= q (no stationary distribution).
struct Geo1Stationary {
    double pi0 = 1.0;
    std::vector<double> tail; // tail[j-1] = pi_j, j = 1..j_max
};

Geo1Stationary geo_geo1_stationary(double p, double q, int j_max);

// Plain TDMA conditions: lambda_i < omega_i Pc(k_i, n) per source
// plus the summed condition.
StabilityVerdict tdma_stable(const TrafficProfile& traffic, double k_a, double k_b,
                             int n, const ChannelParams& ch,
                             PcModel model = PcModel::SecondOrder);

// Relay-queue arrival/departure rates for source i under cooperation.
//   mu_i      = omega_i [P_sd + P_e,sd P_sr]          (source service rate)
//   pi0       = 1 - lambda_i / mu_i                   (source idle prob)
//   lambda_r  = omega_i (1 - pi0) P_e,sd P_sr         (relay arrivals)
//   mu_r      = omega_i pi0 P_rd(payload_rd, n)       (per-slot relay service)
// payload_rd selects k (single-packet forwarding) or L*k (batched); for a
// batch of L the packet departure rate is L * mu_r.
struct QueueRates {
    double lambda_r = 0.0;
    double mu_r = 0.0;
    double pi0 = 1.0;
};

QueueRates relay_rates(double lambda_i, double omega_i, double k, int n,
                       const LinkSet& links, PcModel model, double payload_rd);

// Cognitive-cooperation stability. The relay region is a subset of the
// source region, so the overall verdict comes from the relay constraints;
// both summed-region margins are reported.
struct CcStability {
    StabilityVerdict overall;
    double source_sum_margin = 0.0;
    double relay_sum_margin = 0.0;
};

CcStability cc_stable(const TrafficProfile& traffic, double k, int n,
                      const LinkSet& links, PcModel model = PcModel::SecondOrder);

enum class BafVariant { Relay, Source };

// Which closed form bounds the relay queue under batching (variant Relay).
// Published uses denominator [P_rd(Lk) + P_e,sd P_sr]; DerivedBatch is
// the Geo/Geo^L/1 rate condition lambda_r < L * mu_r, which works out to
// denominator [L P_rd(Lk) + P_e,sd P_sr]. They coincide at L = 1. Boundary
// simulations side with DerivedBatch (see docs/baf-adjudication.md); the
// published form stays the canonical analytic verdict, the derived one rides
// along with a disagreement flag.
enum class BafRelayRule { Published, DerivedBatch };

struct BafStability {
    StabilityVerdict published;
    StabilityVerdict derived;
    bool disagree = false;
};

BafStability baf_stable(const TrafficProfile& traffic, double k, long long l, int n,
                        const LinkSet& links, PcModel model = PcModel::SecondOrder,
                        BafVariant variant = BafVariant::Relay);

// Minimal TDMA share for a primary user with demand lambda_a at packet size
// k_a, plus the best secondary packet size and throughput on the remaining
// share. Throws std::domain_error when lambda_a >= Pc(k_a, n).
struct CognitiveSplit {
    double omega_a_star = 0.0;
    long long k_b_star = 1;
    double u_secondary = 0.0;
};

CognitiveSplit cognitive_split(double lambda_a, double k_a, long long k_b_max, int n,
                               const ChannelParams& ch,
                               PcModel model = PcModel::SecondOrder);

} // namespace fblnet
