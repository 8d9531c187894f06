#pragma once

#include <iosfwd>
#include <string>

#include "fblnet/netsim.hpp"
#include "fblnet/scenario.hpp"

namespace fblnet {

// Command drivers behind the CLI. Each takes a parsed Scenario and writes
// its artifact (CSV or JSON) to the stream; all output is deterministic:
// '.' decimal separator, %.10g float rendering, one header row, no trailing
// whitespace.

// CSV: one row per (k, L) candidate plus a final starred optimum row.
void cmd_optimize(const Scenario& s, std::ostream& out);

// CSV: a single evaluation row at the scenario's (k, L).
void cmd_throughput(const Scenario& s, std::ostream& out);

// JSON: analytic stability verdict(s) for the scenario's operating point.
void cmd_stability(const Scenario& s, std::ostream& out);

// JSON: simulation report plus analytic verdicts and agreement flags.
// Returns the empirical classification (Indeterminate maps to exit code 3).
StabilityClass cmd_simulate(const Scenario& s, std::ostream& out);

// CSV: one evaluation row per sweep-axis value; grid points fan out over a
// worker pool of `jobs` threads, output stays in axis order.
void cmd_sweep(const Scenario& s, std::ostream& out, int jobs = 1);

// CSV datasets for the reference figures (self-contained: scenario
// parameters embedded as '#' comment lines).
//   fig2  optimal packet size vs n (exhaustive / linear / quadratic), snr 1
//   fig3  optimal throughput vs n, snr 1 (predicted and achieved columns)
//   fig4a, fig4b  throughput vs k at n=1000 for NC and CC
//   fig6a, fig6b  same plus BAF at L = 1..4
// Triples: (a) snr 0.2/0.35/1, (b) snr 0.2/0.5/1.
void cmd_reproduce(const std::string& figure, std::ostream& out);

// CSV: fitted approximation constants for both families and objectives.
void cmd_fit(std::ostream& out);

// %.10g with deterministic output; shared by all CSV writers.
std::string format_number(double v);

const char* binding_name(Binding b);

} // namespace fblnet
