#include "fblnet/commands.hpp"

#include <atomic>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fblnet/qapprox.hpp"
#include "fblnet/qfunc.hpp"
#include "fblnet/stability.hpp"

namespace fblnet {

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const char* binding_name(Binding b) {
    switch (b) {
        case Binding::SourceLimited: return "source_limited";
        case Binding::RelayLimited: return "relay_limited";
        case Binding::NotApplicable: return "na";
    }
    return "?";
}

namespace {

std::string opt_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

const char* model_name(PcModel m) {
    return m == PcModel::SecondOrder ? "second" : "third";
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; callers index a
// pre-sized result buffer, so output order never depends on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

constexpr char kEvalHeader[] =
    "protocol,n,k,L,snr_sd,snr_sr,snr_rd,model,throughput,binding,is_optimal";

struct EvalRow {
    Protocol protocol;
    long long k;
    long long l;
    double u;
    Binding binding;
    bool optimal;
};

void write_eval_row(const Scenario& s, const EvalRow& r, std::ostream& out) {
    out << protocol_name(r.protocol) << ',' << s.n << ',' << r.k << ',' << r.l << ','
        << format_number(s.snr_sd) << ',' << opt_number(s.snr_sr) << ','
        << opt_number(s.snr_rd) << ',' << model_name(s.model) << ','
        << format_number(r.u) << ',' << binding_name(r.binding) << ','
        << (r.optimal ? "true" : "false") << '\n';
}

EvalRow evaluate_point(Protocol p, long long k, long long l, int n, const LinkSet& links,
                       PcModel model) {
    EvalRow row{p, k, l, 0.0, Binding::NotApplicable, false};
    switch (p) {
        case Protocol::Nc:
            row.u = nc_throughput(static_cast<double>(k), n, links, model);
            break;
        case Protocol::Cc:
            row.u = cc_eval(static_cast<double>(k), n, links, model).value;
            break;
        case Protocol::BafRelay: {
            const BafEval e = baf_relay_throughput(static_cast<double>(k), l, n, links, model);
            row.u = e.value;
            row.binding = e.binding;
            break;
        }
        case Protocol::BafSource: {
            const BafEval e = baf_source_throughput(static_cast<double>(k), l, n, links, model);
            row.u = e.value;
            row.binding = e.binding;
            break;
        }
    }
    return row;
}

} // namespace

void cmd_optimize(const Scenario& s, std::ostream& out) {
    require_for_optimize(s);
    const LinkSet links = s.link_set();
    const long long k_max = s.k_max.value_or(s.n);
    const long long l_max = s.l_max.value_or(8);

    out << kEvalHeader << '\n';
    if (s.protocol == ScenarioProtocol::Overall) {
        // Candidate rows for both BAF variants, then the overall winner.
        for (Protocol p : {Protocol::BafRelay, Protocol::BafSource}) {
            for (long long l = 1; l <= l_max; ++l) {
                for (long long k = 1; k <= k_max; ++k) {
                    write_eval_row(s, evaluate_point(p, k, l, s.n, links, s.model), out);
                }
            }
        }
        const ThroughputResult best = optimize_overall(s.n, links, s.model, k_max, l_max);
        write_eval_row(s, EvalRow{best.protocol, best.k_star, best.l_star, best.u_star,
                                  best.binding, true},
                       out);
        return;
    }

    const Protocol p = s.core_protocol();
    const bool batched = p == Protocol::BafRelay || p == Protocol::BafSource;
    const long long l_hi = batched ? l_max : 1;
    for (long long l = 1; l <= l_hi; ++l) {
        for (long long k = 1; k <= k_max; ++k) {
            write_eval_row(s, evaluate_point(p, k, l, s.n, links, s.model), out);
        }
    }
    const ThroughputResult best = optimize_protocol(p, s.n, links, s.model, k_max, l_max);
    write_eval_row(s, EvalRow{p, best.k_star, best.l_star, best.u_star, best.binding, true}, out);
}

void cmd_throughput(const Scenario& s, std::ostream& out) {
    require_for_throughput(s);
    const Protocol p = s.core_protocol();
    const LinkSet links = s.link_set();
    out << kEvalHeader << '\n';
    write_eval_row(s, evaluate_point(p, *s.k, s.l.value_or(1), s.n, links, s.model), out);
}

namespace {

nlohmann::ordered_json verdict_json(const StabilityVerdict& v) {
    return {{"stable", v.stable},
            {"margin", v.margin},
            {"binding", constraint_name(v.binding)}};
}

nlohmann::ordered_json analytic_json(const Scenario& s, const TrafficProfile& traffic) {
    const Protocol p = s.core_protocol();
    const LinkSet links = s.link_set();
    const double k = static_cast<double>(*s.k);
    nlohmann::ordered_json j;
    switch (p) {
        case Protocol::Nc: {
            const StabilityVerdict v = tdma_stable(traffic, k, k, s.n, links.sd, s.model);
            j["verdict"] = verdict_json(v);
            break;
        }
        case Protocol::Cc: {
            const CcStability v = cc_stable(traffic, k, s.n, links, s.model);
            j["verdict"] = verdict_json(v.overall);
            j["source_sum_margin"] = v.source_sum_margin;
            j["relay_sum_margin"] = v.relay_sum_margin;
            break;
        }
        case Protocol::BafRelay:
        case Protocol::BafSource: {
            const BafVariant variant =
                p == Protocol::BafRelay ? BafVariant::Relay : BafVariant::Source;
            const BafStability v =
                baf_stable(traffic, k, s.l.value_or(1), s.n, links, s.model, variant);
            j["verdict"] = verdict_json(v.published);
            j["verdict_derived_rule"] = verdict_json(v.derived);
            j["rules_disagree"] = v.disagree;
            break;
        }
    }
    return j;
}

} // namespace

void cmd_stability(const Scenario& s, std::ostream& out) {
    require_for_stability(s);
    const TrafficProfile traffic{s.lambda_a, s.lambda_b, s.omega_a};
    nlohmann::ordered_json j;
    j["protocol"] = protocol_name(s.protocol);
    j["n"] = s.n;
    j["k"] = *s.k;
    j["l"] = s.l.value_or(1);
    j["lambda_a"] = s.lambda_a;
    j["lambda_b"] = s.lambda_b;
    j["omega_a"] = s.omega_a;
    j["analytic"] = analytic_json(s, traffic);
    out << j.dump(2) << '\n';
}

StabilityClass cmd_simulate(const Scenario& s, std::ostream& out) {
    require_for_simulate(s);
    const TrafficProfile traffic{s.lambda_a, s.lambda_b, s.omega_a};

    SimConfig cfg;
    cfg.protocol = s.core_protocol();
    cfg.traffic = traffic;
    cfg.code = make_code(*s.k, s.n, s.l.value_or(1));
    cfg.links = s.link_set();
    cfg.model = s.model;
    cfg.slots = s.sim->slots;
    cfg.warmup_fraction = s.sim->warmup;
    cfg.seed = s.sim->seed;

    const SimReport rep = run_sim(cfg);
    const double lambda_total = s.lambda_a + s.lambda_b;
    const StabilityClass cls = classify_stability(rep, lambda_total);

    nlohmann::ordered_json j;
    j["protocol"] = protocol_name(s.protocol);
    j["n"] = s.n;
    j["k"] = *s.k;
    j["l"] = s.l.value_or(1);
    j["lambda_a"] = s.lambda_a;
    j["lambda_b"] = s.lambda_b;
    j["omega_a"] = s.omega_a;
    j["slots"] = s.sim->slots;
    j["seed"] = s.sim->seed;
    j["warmup"] = s.sim->warmup;
    j["report"] = {
        {"slots_counted", rep.slots_counted},
        {"delivered_bits", rep.delivered_bits},
        {"empirical_throughput", rep.empirical_throughput},
        {"mean_queue",
         {{"q_a", rep.mean_queue.q_a},
          {"q_b", rep.mean_queue.q_b},
          {"q_ar", rep.mean_queue.q_ar},
          {"q_br", rep.mean_queue.q_br}}},
        {"drift_slope", rep.drift_slope},
        {"quarter_backlog_means", rep.quarter_backlog_means},
        {"idle_freq_a", rep.idle_freq_a},
        {"idle_freq_b", rep.idle_freq_b},
        {"conservation",
         {{"arrived", rep.conservation.arrived},
          {"delivered", rep.conservation.delivered},
          {"backlogged", rep.conservation.backlogged}}},
    };
    j["classification"] = stability_class_name(cls);

    const nlohmann::ordered_json analytic = analytic_json(s, traffic);
    j["analytic"] = analytic;
    if (cls == StabilityClass::Indeterminate) {
        j["agreement"] = nullptr;
    } else {
        const bool sim_stable = cls == StabilityClass::Stable;
        nlohmann::ordered_json agreement;
        agreement["with_verdict"] = sim_stable == analytic["verdict"]["stable"].get<bool>();
        if (analytic.contains("verdict_derived_rule")) {
            agreement["with_derived_rule"] =
                sim_stable == analytic["verdict_derived_rule"]["stable"].get<bool>();
        }
        j["agreement"] = agreement;
    }
    out << j.dump(2) << '\n';
    return cls;
}

void cmd_sweep(const Scenario& s, std::ostream& out, int jobs) {
    require_for_sweep(s);
    const std::string axis = *s.sweep_axis;
    const std::size_t count = s.sweep_values.size();

    std::vector<std::string> rows(count);
    auto eval_one = [&](std::size_t i) {
        const double value = s.sweep_values[i];
        Scenario point = s;
        if (axis == "n") {
            point.n = static_cast<int>(value);
            if (point.n < 1) throw ConfigError("swept n must be >= 1", "sweep_values");
        } else if (axis == "k") {
            point.k = static_cast<long long>(value);
        } else if (axis == "L") {
            point.l = static_cast<long long>(value);
        } else if (axis == "snr") {
            point.snr_sd = value;
        } else { // lambda: symmetric split of the total
            point.lambda_a = value / 2.0;
            point.lambda_b = value / 2.0;
        }

        const LinkSet links = point.link_set();
        const long long l = point.l.value_or(1);
        EvalRow row{};
        if (point.k) {
            row = evaluate_point(point.core_protocol(), *point.k, l, point.n, links, point.model);
        } else {
            const ThroughputResult best =
                optimize_protocol(point.core_protocol(), point.n, links, point.model,
                                  point.k_max.value_or(point.n), point.l_max.value_or(8));
            row = EvalRow{best.protocol, best.k_star, best.l_star, best.u_star, best.binding, true};
        }

        // Canonical analytic verdict at the evaluated operating point.
        const TrafficProfile traffic{point.lambda_a, point.lambda_b, point.omega_a};
        StabilityVerdict verdict;
        switch (row.protocol) {
            case Protocol::Nc:
                verdict = tdma_stable(traffic, static_cast<double>(row.k),
                                      static_cast<double>(row.k), point.n, links.sd, point.model);
                break;
            case Protocol::Cc:
                verdict = cc_stable(traffic, static_cast<double>(row.k), point.n, links,
                                    point.model).overall;
                break;
            case Protocol::BafRelay:
            case Protocol::BafSource:
                verdict = baf_stable(traffic, static_cast<double>(row.k), row.l, point.n, links,
                                     point.model,
                                     row.protocol == Protocol::BafRelay ? BafVariant::Relay
                                                                        : BafVariant::Source)
                              .published;
                break;
        }

        std::ostringstream os;
        os << axis << ',' << format_number(value) << ',' << protocol_name(row.protocol) << ','
           << point.n << ',' << row.k << ',' << row.l << ',' << format_number(point.snr_sd) << ','
           << opt_number(point.snr_sr) << ',' << opt_number(point.snr_rd) << ','
           << model_name(point.model) << ',' << format_number(row.u) << ','
           << binding_name(row.binding) << ',' << (row.optimal ? "true" : "false") << ','
           << (verdict.stable ? "true" : "false") << ',' << format_number(verdict.margin);
        rows[i] = os.str();
    };

    parallel_for(count, jobs, eval_one);

    out << "axis,value,protocol,n,k,L,snr_sd,snr_sr,snr_rd,model,throughput,binding,is_optimal,"
           "stable,margin\n";
    for (const std::string& row : rows) out << row << '\n';
}

namespace {

std::vector<int> figure_n_grid() {
    std::vector<int> ns;
    for (int n = 10; n <= 100; n += 10) ns.push_back(n);
    for (int n = 150; n <= 2000; n += 50) ns.push_back(n);
    return ns;
}

void reproduce_packet_size_curves(bool throughput, std::ostream& out) {
    const ChannelParams ch = make_channel(1.0);
    out << "# snr=1 model=second\n";
    out << (throughput
                ? "n,u_exhaustive,u_linear_predicted,u_linear_achieved,u_quadratic_predicted,"
                  "u_quadratic_achieved"
                : "n,k_exhaustive,k_linear,k_quadratic")
        << '\n';
    for (int n : figure_n_grid()) {
        const OptimizeKResult exact = optimize_k(n, ch);
        const long long k_lin = linear_opt_k(n, ch);
        const long long k_quad = quad_opt_k(n, ch);
        if (!throughput) {
            out << n << ',' << exact.k << ',' << k_lin << ',' << k_quad << '\n';
            continue;
        }
        const double nd = static_cast<double>(n);
        const double u_lin_pred =
            static_cast<double>(k_lin) / nd * linear_pc(static_cast<double>(k_lin), n, ch);
        const double u_lin_ach = tdma_throughput(static_cast<double>(k_lin), n, ch);
        const double u_quad_pred =
            static_cast<double>(k_quad) / nd * quad_pc(static_cast<double>(k_quad), n, ch);
        const double u_quad_ach = tdma_throughput(static_cast<double>(k_quad), n, ch);
        out << n << ',' << format_number(exact.u) << ',' << format_number(u_lin_pred) << ','
            << format_number(u_lin_ach) << ',' << format_number(u_quad_pred) << ','
            << format_number(u_quad_ach) << '\n';
    }
}

void reproduce_protocol_curves(double snr_sr, bool with_baf, std::ostream& out) {
    const int n = 1000;
    const LinkSet links{make_channel(0.2), make_channel(snr_sr), make_channel(1.0)};
    out << "# snr_sd=0.2 snr_sr=" << format_number(snr_sr) << " snr_rd=1 n=1000 model=second\n";
    out << (with_baf ? "k,u_nc,u_cc,u_baf_l1,u_baf_l2,u_baf_l3,u_baf_l4" : "k,u_nc,u_cc") << '\n';
    for (int k = 1; k <= 600; ++k) {
        const double kd = static_cast<double>(k);
        out << k << ',' << format_number(nc_throughput(kd, n, links)) << ','
            << format_number(cc_eval(kd, n, links).value);
        if (with_baf) {
            for (long long l = 1; l <= 4; ++l) {
                out << ',' << format_number(baf_relay_throughput(kd, l, n, links).value);
            }
        }
        out << '\n';
    }
}

} // namespace

void cmd_reproduce(const std::string& figure, std::ostream& out) {
    if (figure == "fig2") return reproduce_packet_size_curves(false, out);
    if (figure == "fig3") return reproduce_packet_size_curves(true, out);
    if (figure == "fig4a") return reproduce_protocol_curves(0.35, false, out);
    if (figure == "fig4b") return reproduce_protocol_curves(0.5, false, out);
    if (figure == "fig6a") return reproduce_protocol_curves(0.35, true, out);
    if (figure == "fig6b") return reproduce_protocol_curves(0.5, true, out);
    throw ConfigError("unknown figure '" + figure + "' (expected fig2|fig3|fig4a|fig4b|fig6a|fig6b)");
}

void cmd_fit(std::ostream& out) {
    out << "family,objective,c0,c1,theta2\n";
    for (FitObjective obj : {FitObjective::SquaredError, FitObjective::AbsoluteError}) {
        const char* objname = obj == FitObjective::SquaredError ? "squared" : "absolute";
        const LinearApproxParams lin = fit_linear(obj);
        out << "linear," << objname << ',' << format_number(lin.delta0) << ','
            << format_number(lin.delta1) << ",\n";
        const QuadApproxParams quad = fit_quadratic(obj);
        out << "quadratic," << objname << ',' << format_number(quad.theta0) << ','
            << format_number(quad.theta1) << ',' << format_number(quad.theta2) << '\n';
    }
}

} // namespace fblnet
