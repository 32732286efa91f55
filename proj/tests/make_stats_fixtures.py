#!/usr/bin/env python3
"""Regenerates stats_fixtures.hpp with SciPy as the reference implementation.

Welch cases use scipy.stats.ttest_ind(equal_var=False); Mann-Whitney cases use
scipy.stats.mannwhitneyu(alternative='two-sided', method='asymptotic',
use_continuity=True).  Values are frozen at 17 significant digits so the C++
implementations can be checked against an independent oracle.
"""

import numpy as np
from scipy import stats

rng = np.random.RandomState(20240817)


def fmt(x):
    return repr(float(x))


def fmt_vec(xs):
    return "{" + ", ".join(fmt(x) for x in xs) + "}"


welch_cases = [
    # Hand-checkable pair: t = -1, df = 8.
    ([1, 2, 3, 4, 5], [2, 3, 4, 5, 6]),
    ([1, 2, 3, 4, 5, 6, 7, 8], [4, 5, 6, 7, 8, 9, 10, 11]),
    ([0.5, 0.5, 0.6], [10.0, 20.0, 30.0, 40.0]),
]
while len(welch_cases) < 20:
    na = rng.randint(3, 31)
    nb = rng.randint(3, 31)
    loc_a, loc_b = rng.uniform(-5, 5, size=2)
    sa, sb = rng.uniform(0.1, 8.0, size=2)
    a = rng.normal(loc_a, sa, size=na)
    b = rng.normal(loc_b, sb, size=nb)
    if rng.rand() < 0.3:
        a = np.round(a)
        b = np.round(b)
    if np.std(a, ddof=1) == 0 or np.std(b, ddof=1) == 0:
        continue
    welch_cases.append((list(a), list(b)))

mw_cases = [
    ([1, 2, 3, 4, 5], [2, 3, 4, 5, 6]),
    ([1, 1, 2, 2, 3, 3, 4, 4], [2, 2, 3, 3, 4, 4, 5, 5]),  # heavy ties
    ([0, 0, 0, 1], [0, 1, 1, 1]),
]
while len(mw_cases) < 20:
    na = rng.randint(3, 31)
    nb = rng.randint(3, 31)
    if rng.rand() < 0.5:
        a = rng.randint(0, 6, size=na).astype(float)
        b = rng.randint(0, 6, size=nb).astype(float)
    else:
        a = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), size=na)
        b = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), size=nb)
    if len(set(a) | set(b)) < 2:
        continue
    mw_cases.append((list(a), list(b)))

lines = []
lines.append("#pragma once")
lines.append("")
lines.append("// Generated by make_stats_fixtures.py (SciPy reference values).")
lines.append("// Do not edit by hand; rerun the script to refresh.")
lines.append("")
lines.append("#include <vector>")
lines.append("")
lines.append("namespace stats_fixtures {")
lines.append("")
lines.append("struct WelchCase {")
lines.append("  std::vector<double> a;")
lines.append("  std::vector<double> b;")
lines.append("  double t;")
lines.append("  double df;")
lines.append("  double p;")
lines.append("};")
lines.append("")
lines.append("struct MannWhitneyCase {")
lines.append("  std::vector<double> a;")
lines.append("  std::vector<double> b;")
lines.append("  double u;  // U statistic of the first sample")
lines.append("  double p;")
lines.append("};")
lines.append("")
lines.append("inline const std::vector<WelchCase> welch_cases = {")
for a, b in welch_cases:
    t, p = stats.ttest_ind(a, b, equal_var=False)
    va = np.var(a, ddof=1) / len(a)
    vb = np.var(b, ddof=1) / len(b)
    df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    lines.append(
        "    {%s,\n     %s,\n     %s, %s, %s}," % (fmt_vec(a), fmt_vec(b), fmt(t), fmt(df), fmt(p))
    )
lines.append("};")
lines.append("")
lines.append("inline const std::vector<MannWhitneyCase> mann_whitney_cases = {")
for a, b in mw_cases:
    res = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
    lines.append(
        "    {%s,\n     %s,\n     %s, %s}," % (fmt_vec(a), fmt_vec(b), fmt(res.statistic), fmt(res.pvalue))
    )
lines.append("};")
lines.append("")
lines.append("}  // namespace stats_fixtures")
lines.append("")

with open("stats_fixtures.hpp", "w") as fh:
    fh.write("\n".join(lines))
print("wrote stats_fixtures.hpp: %d welch, %d mann-whitney" % (len(welch_cases), len(mw_cases)))
