#pragma once

#include <cstdint>

namespace fblnet {

// Success-probability model for a finite-blocklength code on an AWGN link.
// SecondOrder is the normal approximation P_c = 1 - Q((nC - b)/sqrt(nV));
// ThirdOrder adds the + 0.5*log2(n) correction inside the Q argument.
// SecondOrder is the default everywhere: the third-order form can exceed
// capacity for very small blocklengths at low SNR, so it is opt-in.
enum class PcModel { SecondOrder, ThirdOrder };

// One AWGN link. capacity C and dispersion V are in bits (log base 2)
// per channel use:
//   C = (1/2) log2(1 + snr)
//   V = (snr/2) (snr+2)/(snr+1)^2 (log2 e)^2
struct ChannelParams {
    double snr;        // linear, > 0
    double capacity;   // bits / channel use
    double dispersion; // bits^2 / channel use
};

// Throws std::domain_error unless snr is finite and > 0. SNR is linear
// here; dB conversion belongs to the CLI layer.
ChannelParams make_channel(double snr);

// (k data bits, n channel uses, l-packet batch). Total payload per codeword
// is l*k bits.
struct CodeSpec {
    long long k = 1;
    int n = 1;
    long long l = 1;
};

// Validating constructor; throws std::domain_error on k < 1, n < 1 or l < 1.
CodeSpec make_code(long long k, int n, long long l = 1);

// Normalized decoding margin chi = (n*C - b) / sqrt(n*V), where b is the
// payload carried by the codeword (k, or l*k for a batch).
double chi(double payload_bits, int blocklength, const ChannelParams& ch);

// P_c(b, n): probability the codeword is decoded. Monotone decreasing in b,
// increasing in snr below capacity; range is exactly the Q-function's.
double success_prob(double payload_bits, int blocklength, const ChannelParams& ch,
                    PcModel model = PcModel::SecondOrder);

// 1 - success_prob.
double error_prob(double payload_bits, int blocklength, const ChannelParams& ch,
                  PcModel model = PcModel::SecondOrder);

} // namespace fblnet
