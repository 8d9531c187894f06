#include "fblnet/fbl_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fblnet/qfunc.hpp"

namespace fblnet {

ChannelParams make_channel(double snr) {
    if (!std::isfinite(snr) || snr <= 0.0) {
        throw std::domain_error("make_channel: snr must be finite and > 0, got " +
                                std::to_string(snr));
    }
    constexpr double log2e = std::numbers::log2e;
    ChannelParams ch;
    ch.snr = snr;
    ch.capacity = 0.5 * std::log2(1.0 + snr);
    ch.dispersion = (snr / 2.0) * (snr + 2.0) / ((snr + 1.0) * (snr + 1.0)) * log2e * log2e;
    return ch;
}

CodeSpec make_code(long long k, int n, long long l) {
    if (k < 1) throw std::domain_error("make_code: k must be >= 1");
    if (n < 1) throw std::domain_error("make_code: n must be >= 1");
    if (l < 1) throw std::domain_error("make_code: l must be >= 1");
    return CodeSpec{k, n, l};
}

double chi(double payload_bits, int blocklength, const ChannelParams& ch) {
    if (blocklength < 1) throw std::domain_error("chi: blocklength must be >= 1");
    if (!std::isfinite(payload_bits) || payload_bits <= 0.0) {
        throw std::domain_error("chi: payload must be finite and > 0");
    }
    const double n = static_cast<double>(blocklength);
    return (n * ch.capacity - payload_bits) / std::sqrt(n * ch.dispersion);
}

double success_prob(double payload_bits, int blocklength, const ChannelParams& ch,
                    PcModel model) {
    double x = chi(payload_bits, blocklength, ch);
    if (model == PcModel::ThirdOrder) {
        const double n = static_cast<double>(blocklength);
        x += 0.5 * std::log2(n) / std::sqrt(n * ch.dispersion);
    }
    return gaussian_cdf(x);
}

double error_prob(double payload_bits, int blocklength, const ChannelParams& ch,
                  PcModel model) {
    return 1.0 - success_prob(payload_bits, blocklength, ch, model);
}

} // namespace fblnet
