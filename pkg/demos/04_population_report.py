"""
A population report from an event log
=====================================

Simulate a small population, write it out as the CSV event format, read it
back and produce the per-individual table plus the 0.1-bit histograms that
the ``predictability analyze`` command emits.
"""

import io

from predictability import bin_events, format_event_log, gen_event_log, parse_event_log, stay_matrix
from predictability.pipeline import RunConfig, analyze_population

WEEK = 7 * 86400

# everyone gets a different stickiness and alphabet size
matrices = [stay_matrix(0.3 + 0.1 * i, 2 + i) for i in range(6)]
log = gen_event_log(6, matrices, span=4 * WEEK, seed=11, location_P=stay_matrix(0.97, 4))
text = format_event_log(log)
print(text.splitlines()[:4])

stream = bin_events(parse_event_log(io.StringIO(text)))
report = analyze_population(stream, RunConfig())

print("\n%-6s %6s %3s %7s %7s %7s %7s %7s" % ("ego", "n", "K", "H", "H_iid", "H_unif", "H_mc", "H|loc"))
for row in report.individuals:
    p = row["partner"]
    print("%-6s %6d %3d %7.3f %7.3f %7.3f %7.3f %7.3f" % (
        row["ego"], p["n"], p["K"], p["h_lz"], p["h_iid"], p["h_unif"], p["h_mc"],
        p["h_cond"]["location"]))

print("\npartner LZ rate histogram")
for b in report.histograms["partner.h_lz"]:
    if b["count"]:
        print("[%.1f, %.1f)  %s" % (b["start"], b["end"], "#" * b["count"]))

summary = report.summary["partner.h_lz"]
print("\nmean %.3f bits -> about %.1f equally likely partners" % (summary["mean"], 2 ** summary["mean"]))
