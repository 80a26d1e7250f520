"""Regenerates tests/reference/hitting_refs.hpp with mpmath at 40 digits.

Geometry, the reflection series, its degraded variant and its time derivative
are evaluated directly from the defining sums, summed until the terms fall
below 1e-35.
"""
import mpmath as mp

mp.mp.dps = 40

CASES = [
    # name, x, y_target, y_other, a_target, a_other
    ("three_far_P", (0, 0, 0), (-30, -20, 0), (25, 10, 0), 3, 5),
    ("three_far_S", (0, 0, 0), (25, 10, 0), (-30, -20, 0), 5, 3),
    ("sliding_SP", (15, 10, 0), (30, 10, 0), (10, 10, 20), 5, 5),
    ("close_pair", (0, 0, 0), (12, 0, 0), (12, 11, 0), 4, 6),
]
D = 100
TIMES = [0.1, 0.5, 1, 2, 10]
MUS = [0, 0.3, 1]


def vec(v):
    return mp.matrix([mp.mpf(c) for c in v])


def norm(v):
    return mp.sqrt(sum(c * c for c in v))


def geometry(x, yt, yo, at, ao):
    x, yt, yo = vec(x), vec(yt), vec(yo)
    at, ao = mp.mpf(at), mp.mpf(ao)
    rt, ro = norm(yt - x), norm(yo - x)
    et = x + (rt - at) / rt * (yt - x)
    eo = x + (ro - ao) / ro * (yo - x)
    return dict(rt=rt, ro=ro, Rto=norm(yo - et), Rot=norm(yt - eo), at=at, ao=ao)


def paths(g, n):
    phi = g["rt"] - g["at"] + n * (g["Rot"] - g["at"]) + n * (g["Rto"] - g["ao"])
    psi = g["ro"] - g["ao"] + (n + 1) * (g["Rot"] - g["at"]) + n * (g["Rto"] - g["ao"])
    return phi, psi


def series(g, f):
    gamma = g["at"] * g["ao"] / (g["Rto"] * g["Rot"])
    wd = g["at"] / g["rt"]
    wr = g["at"] * g["ao"] / (g["ro"] * g["Rot"])
    total, n = mp.mpf(0), 0
    while True:
        phi, psi = paths(g, n)
        term = gamma ** n * (wd * f(phi) - wr * f(psi))
        total += term
        if abs(gamma ** n * (wd * f(phi) + wr * f(psi))) < mp.mpf("1e-35") and n > 2:
            return total
        n += 1


def p(g, t, mu):
    t, mu = mp.mpf(t), mp.mpf(mu)
    if mu == 0:
        return series(g, lambda x: mp.erfc(x / mp.sqrt(4 * D * t)))
    k = mp.sqrt(mu / D)
    b = mp.sqrt(mu * t)
    return series(g, lambda x: (mp.exp(-x * k) * mp.erfc(x / mp.sqrt(4 * D * t) - b)
                                + mp.exp(x * k) * mp.erfc(x / mp.sqrt(4 * D * t) + b)) / 2)


def rate(g, tau):
    tau = mp.mpf(tau)
    return series(g, lambda x: x / mp.sqrt(4 * mp.pi * D * tau ** 3) * mp.exp(-x * x / (4 * D * tau)))


def s(v):
    return mp.nstr(v, 22)


out = ["// Generated by gen_hitting_refs.py (mpmath, 40 significant digits). Do not edit.",
       "#pragma once", "", "#include <array>", "", "namespace cogmc::test {", "",
       "struct HittingCase {", "  const char* name;", "  double x[3], y_target[3], y_other[3];",
       "  double a_target, a_other;",
       "  double r_target, r_other, R_target_other, R_other_target;", "};", "",
       "struct HittingRef {", "  int case_index;", "  double t, mu, p, rate;", "};", "",
       "inline constexpr double kHittingD = %d;" % D, "",
       "inline constexpr std::array<HittingCase, %d> kHittingCases{{" % len(CASES)]
refs = []
for i, (name, x, yt, yo, at, ao) in enumerate(CASES):
    g = geometry(x, yt, yo, at, ao)
    out.append('    {"%s", {%s}, {%s}, {%s}, %s, %s, %s, %s, %s, %s},' % (
        name, ", ".join(map(str, x)), ", ".join(map(str, yt)), ", ".join(map(str, yo)), at, ao,
        s(g["rt"]), s(g["ro"]), s(g["Rto"]), s(g["Rot"])))
    for t in TIMES:
        for mu in MUS:
            refs.append("    {%d, %s, %s, %s, %s}," % (i, t, mu, s(p(g, t, mu)),
                                                      s(rate(g, t)) if mu == 0 else "0"))
out += ["}};", "", "inline constexpr std::array<HittingRef, %d> kHittingRefs{{" % len(refs)]
out += refs
out += ["}};", "", "}  // namespace cogmc::test", ""]
print("\n".join(out))
