#include "fblnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace fblnet {

std::string ConfigError::format(const std::string& message, const std::string& key, int line) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " (line " << line << ")";
    if (!key.empty()) os << " [" << key << "]";
    os << ": " << message;
    return os.str();
}

const char* protocol_name(ScenarioProtocol p) {
    switch (p) {
        case ScenarioProtocol::Nc: return "nc";
        case ScenarioProtocol::Cc: return "cc";
        case ScenarioProtocol::BafRelay: return "baf_relay";
        case ScenarioProtocol::BafSource: return "baf_source";
        case ScenarioProtocol::Overall: return "overall";
    }
    return "?";
}

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Nc: return "nc";
        case Protocol::Cc: return "cc";
        case Protocol::BafRelay: return "baf_relay";
        case Protocol::BafSource: return "baf_source";
    }
    return "?";
}

Protocol Scenario::core_protocol() const {
    switch (protocol) {
        case ScenarioProtocol::Nc: return Protocol::Nc;
        case ScenarioProtocol::Cc: return Protocol::Cc;
        case ScenarioProtocol::BafRelay: return Protocol::BafRelay;
        case ScenarioProtocol::BafSource: return Protocol::BafSource;
        case ScenarioProtocol::Overall:
            throw ConfigError("protocol=overall is only valid for the optimize command", "protocol");
    }
    throw ConfigError("bad protocol", "protocol");
}

LinkSet Scenario::link_set() const {
    const ChannelParams sd = make_channel(snr_sd);
    const ChannelParams sr = snr_sr ? make_channel(*snr_sr) : sd;
    const ChannelParams rd = snr_rd ? make_channel(*snr_rd) : sd;
    return LinkSet{sd, sr, rd};
}

namespace {

struct RawEntry {
    std::string value;
    int line;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const RawEntry& e) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + e.value + "'", key, e.line);
    }
    if (pos != e.value.size()) throw ConfigError("trailing junk in number: '" + e.value + "'", key, e.line);
    if (!std::isfinite(v)) throw ConfigError("value must be finite", key, e.line);
    return v;
}

long long parse_int(const std::string& key, const RawEntry& e) {
    std::size_t pos = 0;
    long long v;
    try {
        v = std::stoll(e.value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + e.value + "'", key, e.line);
    }
    if (pos != e.value.size()) throw ConfigError("trailing junk in integer: '" + e.value + "'", key, e.line);
    return v;
}

std::uint64_t parse_u64(const std::string& key, const RawEntry& e) {
    std::size_t pos = 0;
    unsigned long long v;
    try {
        v = std::stoull(e.value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not an unsigned integer: '" + e.value + "'", key, e.line);
    }
    if (pos != e.value.size()) throw ConfigError("trailing junk in integer: '" + e.value + "'", key, e.line);
    return v;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "protocol", "snr_sd", "snr_sr", "snr_rd", "n", "k", "l", "k_max", "l_max",
        "lambda_a", "lambda_b", "omega_a", "model", "slots", "seed", "warmup",
        "sweep_axis", "sweep_values", "sweep_start", "sweep_stop", "sweep_step",
    };
    return keys;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    std::map<std::string, RawEntry> entries;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key=value, got '" + line + "'", {}, lineno);
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", {}, lineno);
        if (value.empty()) throw ConfigError("empty value", key, lineno);

        // dB convenience keys fold onto their linear counterparts.
        bool db = false;
        if (key.size() > 3 && key.compare(key.size() - 3, 3, "_db") == 0) {
            key = key.substr(0, key.size() - 3);
            db = true;
        }
        if (!known_keys().count(key)) {
            throw ConfigError("unknown key", key, lineno);
        }
        if (db && key.compare(0, 4, "snr_") != 0) {
            throw ConfigError("the _db suffix is only valid on snr keys", key + "_db", lineno);
        }
        if (entries.count(key)) {
            throw ConfigError("duplicate key (first on line " +
                                  std::to_string(entries[key].line) + ")",
                              key, lineno);
        }
        if (db) {
            RawEntry e{value, lineno};
            const double dbv = parse_double(key + "_db", e);
            std::ostringstream os;
            os.precision(17);
            os << std::pow(10.0, dbv / 10.0);
            entries[key] = RawEntry{os.str(), lineno};
        } else {
            entries[key] = RawEntry{value, lineno};
        }
    }

    Scenario s;
    auto take = [&](const char* key) -> std::optional<RawEntry> {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        RawEntry e = it->second;
        entries.erase(it);
        return e;
    };

    if (auto e = take("protocol")) {
        const std::string& v = e->value;
        if (v == "nc") s.protocol = ScenarioProtocol::Nc;
        else if (v == "cc") s.protocol = ScenarioProtocol::Cc;
        else if (v == "baf_relay") s.protocol = ScenarioProtocol::BafRelay;
        else if (v == "baf_source") s.protocol = ScenarioProtocol::BafSource;
        else if (v == "overall") s.protocol = ScenarioProtocol::Overall;
        else throw ConfigError("expected nc|cc|baf_relay|baf_source|overall, got '" + v + "'",
                               "protocol", e->line);
    } else {
        throw ConfigError("missing required key", "protocol");
    }

    if (auto e = take("snr_sd")) {
        s.snr_sd = parse_double("snr_sd", *e);
        if (s.snr_sd <= 0.0) throw ConfigError("must be > 0 (linear)", "snr_sd", e->line);
    } else {
        throw ConfigError("missing required key", "snr_sd");
    }
    if (auto e = take("snr_sr")) {
        const double v = parse_double("snr_sr", *e);
        if (v <= 0.0) throw ConfigError("must be > 0 (linear)", "snr_sr", e->line);
        s.snr_sr = v;
    }
    if (auto e = take("snr_rd")) {
        const double v = parse_double("snr_rd", *e);
        if (v <= 0.0) throw ConfigError("must be > 0 (linear)", "snr_rd", e->line);
        s.snr_rd = v;
    }

    if (auto e = take("n")) {
        const long long v = parse_int("n", *e);
        if (v < 1 || v > 100000000) throw ConfigError("must be in [1, 1e8]", "n", e->line);
        s.n = static_cast<int>(v);
    } else {
        throw ConfigError("missing required key", "n");
    }

    if (auto e = take("k")) {
        const long long v = parse_int("k", *e);
        if (v < 1) throw ConfigError("must be >= 1", "k", e->line);
        s.k = v;
    }
    if (auto e = take("l")) {
        const long long v = parse_int("l", *e);
        if (v < 1) throw ConfigError("must be >= 1", "l", e->line);
        s.l = v;
    }
    if (auto e = take("k_max")) {
        const long long v = parse_int("k_max", *e);
        if (v < 1) throw ConfigError("must be >= 1", "k_max", e->line);
        s.k_max = v;
    }
    if (auto e = take("l_max")) {
        const long long v = parse_int("l_max", *e);
        if (v < 1) throw ConfigError("must be >= 1", "l_max", e->line);
        s.l_max = v;
    }

    auto take_prob = [&](const char* key, double lo, double hi) -> std::optional<double> {
        if (auto e = take(key)) {
            const double v = parse_double(key, *e);
            if (v < lo || v > hi) {
                std::ostringstream os;
                os << "must be in [" << lo << ", " << hi << "]";
                throw ConfigError(os.str(), key, e->line);
            }
            return v;
        }
        return std::nullopt;
    };
    if (auto v = take_prob("lambda_a", 0.0, 1.0)) s.lambda_a = *v;
    if (auto v = take_prob("lambda_b", 0.0, 1.0)) s.lambda_b = *v;
    if (auto v = take_prob("omega_a", 0.0, 1.0)) s.omega_a = *v;

    if (auto e = take("model")) {
        if (e->value == "second") s.model = PcModel::SecondOrder;
        else if (e->value == "third") s.model = PcModel::ThirdOrder;
        else throw ConfigError("expected second|third, got '" + e->value + "'", "model", e->line);
    }

    {
        SimBlock sim;
        bool have_sim = false;
        if (auto e = take("slots")) {
            sim.slots = parse_u64("slots", *e);
            if (sim.slots < 10000) throw ConfigError("must be >= 10000", "slots", e->line);
            have_sim = true;
        }
        if (auto e = take("seed")) {
            sim.seed = parse_u64("seed", *e);
            have_sim = true;
        }
        if (auto e = take("warmup")) {
            sim.warmup = parse_double("warmup", *e);
            if (sim.warmup < 0.0 || sim.warmup >= 1.0) {
                throw ConfigError("must be in [0, 1)", "warmup", e->line);
            }
            have_sim = true;
        }
        if (have_sim) s.sim = sim;
    }

    // Sweep block: explicit list or start/stop/step, not both.
    {
        auto axis = take("sweep_axis");
        auto values = take("sweep_values");
        auto start = take("sweep_start");
        auto stop = take("sweep_stop");
        auto step = take("sweep_step");
        if (axis) {
            static const std::set<std::string> axes = {"n", "k", "L", "snr", "lambda"};
            if (!axes.count(axis->value)) {
                throw ConfigError("expected n|k|L|snr|lambda, got '" + axis->value + "'",
                                  "sweep_axis", axis->line);
            }
            s.sweep_axis = axis->value;
            if (values && (start || stop || step)) {
                throw ConfigError("give either sweep_values or sweep_start/stop/step, not both",
                                  "sweep_values", values->line);
            }
            if (values) {
                std::istringstream vs(values->value);
                std::string tok;
                while (std::getline(vs, tok, ',')) {
                    tok = trim(tok);
                    if (tok.empty()) throw ConfigError("empty element in list", "sweep_values", values->line);
                    s.sweep_values.push_back(parse_double("sweep_values", RawEntry{tok, values->line}));
                }
            } else if (start && stop && step) {
                const double a = parse_double("sweep_start", *start);
                const double b = parse_double("sweep_stop", *stop);
                const double h = parse_double("sweep_step", *step);
                if (h <= 0.0) throw ConfigError("must be > 0", "sweep_step", step->line);
                for (double v = a; v <= b + 1e-12 * std::fabs(b); v += h) s.sweep_values.push_back(v);
            } else {
                throw ConfigError("sweep needs sweep_values or sweep_start/stop/step", "sweep_axis",
                                  axis->line);
            }
            if (s.sweep_values.empty()) {
                throw ConfigError("empty sweep", "sweep_values");
            }
            for (std::size_t i = 0; i + 1 < s.sweep_values.size(); ++i) {
                if (!(s.sweep_values[i] < s.sweep_values[i + 1])) {
                    throw ConfigError("values must be strictly increasing", "sweep_values");
                }
            }
        } else if (values || start || stop || step) {
            throw ConfigError("sweep_* keys need sweep_axis", "sweep_axis");
        }
    }

    if (!entries.empty()) {
        // defensive: known_keys() should have caught these
        const auto& first = *entries.begin();
        throw ConfigError("unhandled key", first.first, first.second.line);
    }

    // Cross-field checks.
    const bool needs_relay = s.protocol != ScenarioProtocol::Nc;
    if (needs_relay && !s.has_relay_links()) {
        throw ConfigError("protocol '" + std::string(protocol_name(s.protocol)) +
                              "' needs snr_sr and snr_rd",
                          "protocol");
    }
    return s;
}

void require_for_optimize(const Scenario&) {}

void require_for_throughput(const Scenario& s) {
    if (!s.k) throw ConfigError("throughput needs k", "k");
}

void require_for_stability(const Scenario& s) {
    if (!s.k) throw ConfigError("stability needs k", "k");
    if (s.protocol == ScenarioProtocol::Overall) {
        throw ConfigError("stability needs a concrete protocol", "protocol");
    }
}

void require_for_simulate(const Scenario& s) {
    require_for_stability(s);
    if (!s.sim) throw ConfigError("simulate needs a sim block (slots/seed/warmup)", "slots");
}

void require_for_sweep(const Scenario& s) {
    if (!s.sweep_axis) throw ConfigError("sweep needs sweep_axis", "sweep_axis");
}

} // namespace fblnet
