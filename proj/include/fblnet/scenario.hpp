#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fblnet/fbl_model.hpp"
#include "fblnet/throughput.hpp"

namespace fblnet {

// Input/validation failure in a configuration document or command line.
// Carries the offending key and line for the error message; maps to exit
// code 1 in the CLI.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, std::string key = {}, int line = 0)
        : std::runtime_error(format(message, key, line)), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    static std::string format(const std::string& message, const std::string& key, int line);
    std::string key_;
    int line_;
};

// Which protocol a scenario targets; Overall is only meaningful for the
// optimize command (max over the two BAF variants).
enum class ScenarioProtocol { Nc, Cc, BafRelay, BafSource, Overall };

const char* protocol_name(ScenarioProtocol p);
const char* protocol_name(Protocol p);

struct SimBlock {
    std::uint64_t slots = 1000000;
    std::uint64_t seed = 1;
    double warmup = 0.1;
};

// One parsed scenario. SNRs are linear (″_db″ keys are converted during
// parsing); lambda/omega default as documented in the config grammar.
struct Scenario {
    ScenarioProtocol protocol = ScenarioProtocol::Nc;
    double snr_sd = 0.0;
    std::optional<double> snr_sr;
    std::optional<double> snr_rd;
    int n = 0;
    std::optional<long long> k;
    std::optional<long long> l;
    std::optional<long long> k_max;
    std::optional<long long> l_max;
    double lambda_a = 0.0;
    double lambda_b = 0.0;
    double omega_a = 0.5;
    PcModel model = PcModel::SecondOrder;
    std::optional<SimBlock> sim;

    // Sweep block (only used by the sweep command).
    std::optional<std::string> sweep_axis;      // n | k | L | snr | lambda
    std::vector<double> sweep_values;

    bool has_relay_links() const { return snr_sr.has_value() && snr_rd.has_value(); }
    Protocol core_protocol() const; // throws ConfigError for Overall
    LinkSet link_set() const;       // sd-only scenarios reuse sd for sr/rd
};

// Parses the line-oriented key=value configuration format:
//   - one `key=value` pair per line; whitespace around either side ignored
//   - `#` starts a comment (full line or trailing)
//   - blank lines ignored
//   - duplicate keys are an error; unknown keys are an error
//   - keys suffixed `_db` (snr_sd_db, ...) are converted to linear 10^(x/10)
// Range checks run immediately; errors name the key and line.
Scenario parse_scenario(const std::string& text);

// Per-command requirement checks (throw ConfigError when a needed key is
// missing or inconsistent).
void require_for_throughput(const Scenario& s);   // needs k (protocol-dependent links)
void require_for_optimize(const Scenario& s);
void require_for_stability(const Scenario& s);    // needs k and traffic
void require_for_simulate(const Scenario& s);     // stability + sim block
void require_for_sweep(const Scenario& s);

} // namespace fblnet
