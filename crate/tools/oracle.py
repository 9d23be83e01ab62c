"""Reference values frozen into the Rust tests (mpmath / sympy, independent of the crate)."""
from collections import deque

import mpmath as mp
import sympy as sp

mp.mp.dps = 80


def section(name):
    print(f"\n== {name}")


section("flat functions")
print("phi2(0.05) logmag", mp.nstr(-mp.e**20, 30))
print("chi(0.1) logmag", mp.nstr(-mp.e**10, 30))
print("chi(0.2) logmag", mp.nstr(-mp.e**5, 30))
print("phi(0.1)", mp.nstr(mp.e**-10, 30))

y = sp.symbols("y", positive=True)
expr = 1 / sp.log(sp.exp(1 / y) - sp.log(2))
d1 = sp.diff(expr, y)
print("d/dy 1/log(e^(1/y)-ln2) at 0.1:", sp.N(d1.subs(y, sp.Rational(1, 10)), 40))
for a, yv in [(2, "0.1"), (2, "0.02"), (sp.Rational(1, 4), "0.05"), (4, "0.05")]:
    v = 1 / mp.log(mp.e ** (1 / mp.mpf(yv)) - mp.log(a))
    print(f"conj_linear(a={a}, y={yv}) - y =", mp.nstr(v - mp.mpf(yv), 30))
for yv in ["0.02", "0.03", "0.05"]:
    yy = mp.mpf(yv)
    v = 1 / mp.log(mp.e ** (1 / yy) - mp.log(2)) - yy
    print(f"log G + 1/y - 2 log y at {yv}:", mp.nstr(mp.log(v) + 1 / yy - 2 * mp.log(yy), 20))
print("ln ln 2", mp.nstr(mp.log(mp.log(2)), 20))

section("projective action in the orthographic chart at (+1,0,0)")
u, v = sp.symbols("u v", real=True)
mats = {
    "X": sp.Matrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
    "Y": sp.Matrix([[1, 0, 0], [0, 1, 1], [0, 0, 1]]),
    "Z": sp.Matrix([[1, 0, 1], [0, 1, 0], [0, 0, 1]]),
}
for sign in [1, -1]:
    p = sp.Matrix([sign * sp.sqrt(1 - u**2 - v**2), u, v])
    for name, m in mats.items():
        q = m * p
        n = sp.sqrt(q.dot(q))
        f = sp.Matrix([q[1] / n, q[2] / n])
        jac = f.jacobian([u, v])
        j0 = sp.simplify(jac.subs({u: 0, v: 0}))
        jp = jac.subs({u: sp.Rational(3, 10), v: sp.Rational(1, 5)})
        print(f"sign {sign:+d} {name}: D0 = {j0.tolist()}")
        print(f"   J(0.3,0.2) = {[[sp.N(e, 25) for e in row] for row in jp.tolist()]}")

section("sphere action examples")
x = mats["X"] * sp.Matrix([0, 1, 0])
print("X (0,1,0) normalized:", [sp.N(e / sp.sqrt(x.dot(x)), 25) for e in x])

section("unsmoothed seam: transverse image r'(theta, r) in the geodesic chart at (-1,0,0)")


def rprime(m, theta, r):
    p = mp.matrix([-mp.cos(r), mp.sin(r) * mp.cos(theta), mp.sin(r) * mp.sin(theta)])
    q = m * p
    q = q / mp.norm(q)
    return mp.atan2(mp.sqrt(q[1] ** 2 + q[2] ** 2), -q[0])


for name, m in mats.items():
    mm = mp.matrix(m.tolist())
    for theta in [0, mp.pi / 4, mp.pi / 2, 1.0]:
        d2 = mp.diff(lambda r: rprime(mm, theta, r), 0, 2, direction=1) if False else mp.diff(
            lambda r: rprime(mm, theta, r), mp.mpf("1e-40"), 2
        )
        print(f"{name} theta={mp.nstr(theta, 6)}: r''(0+) = {mp.nstr(d2, 20)}, seam mismatch 2|r''| = {mp.nstr(2 * abs(d2), 20)}")

section("Heisenberg word metric (BFS)")


def mul(g, h):
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
R = 14
dist = {(0, 0, 0): 0}
frontier = [(0, 0, 0)]
sizes = [1]
for r in range(1, R + 1):
    nxt = []
    for g in frontier:
        for s in gens:
            h = mul(g, s)
            if h not in dist:
                dist[h] = r
                nxt.append(h)
    frontier = nxt
    sizes.append(len(dist))
print("ball sizes:", sizes)
print("|Z^m| for m reached:", [(m, dist[(0, 0, m)]) for m in range(1, 200) if (0, 0, m) in dist])
print("|X^2 Y^-1|:", dist[(2, -1, 0)], "|(1,1,1)|:", dist[(1, 1, 1)], "|(3,2,-5)|:", dist.get((3, 2, -5)))
