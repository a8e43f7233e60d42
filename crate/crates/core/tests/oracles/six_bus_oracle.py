"""Independent reference values for the bundled 6-bus network.

Assembles the bus admittance matrix with 40-digit hyperbolics, inverts it by
Gauss-Jordan elimination, evaluates every branch-bus coefficient directly and
a grid of equivalent injections. Output is frozen to six_bus_expected.json.

    python3 six_bus_oracle.py > six_bus_expected.json
"""
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
DATA = Path(__file__).resolve().parents[2] / "data"


def cplx(d):
    return mp.mpc(d["re"], d["im"])


def pair(z):
    return [float(z.real), float(z.imag)]


net = json.loads((DATA / "six_bus.json").read_text())
ids = sorted(b["id"] for b in net["buses"])
pos = {b: k for k, b in enumerate(ids)}
n = len(ids)

Y = mp.matrix(n, n)
for b in net["buses"]:
    Y[pos[b["id"]], pos[b["id"]]] += cplx(b["shunt_admittance"])
for line in net["lines"]:
    z, gd = cplx(line["z"]), cplx(line["gamma"]) * line["length_km"]
    series = 1 / (z * mp.sinh(gd))
    shunt = mp.tanh(gd / 2) / z
    s, r = pos[line["from"]], pos[line["to"]]
    Y[s, s] += series + shunt
    Y[r, r] += series + shunt
    Y[s, r] -= series
    Y[r, s] -= series

# Gauss-Jordan with partial pivoting on [Y | I].
A = [[Y[i, j] for j in range(n)] + [mp.mpc(1 if i == j else 0) for j in range(n)] for i in range(n)]
for c in range(n):
    p = max(range(c, n), key=lambda i: abs(A[i][c]))
    A[c], A[p] = A[p], A[c]
    piv = A[c][c]
    A[c] = [v / piv for v in A[c]]
    for i in range(n):
        if i != c:
            f = A[i][c]
            A[i] = [a - f * b for a, b in zip(A[i], A[c])]
Z = [[A[i][n + j] for j in range(n)] for i in range(n)]

beta = {}
for line in net["lines"]:
    z, gd = cplx(line["z"]), cplx(line["gamma"]) * line["length_km"]
    s, r = pos[line["from"]], pos[line["to"]]
    beta[line["id"]] = [
        pair(Z[s][k] / z * mp.tanh(gd / 2) + (Z[s][k] - Z[r][k]) / (z * mp.sinh(gd)))
        for k in range(n)
    ]

fault = mp.mpc(3.0, -4.0)
injections = []
for line in net["lines"]:
    gd = cplx(line["gamma"]) * line["length_km"]
    for x in ["0.05", "0.25", "0.5", "0.75", "0.95"]:
        xv = mp.mpf(x)
        injections.append({
            "line": line["id"],
            "x": float(xv),
            "from": pair(mp.sinh(gd * (1 - xv)) / mp.sinh(gd) * fault),
            "to": pair(mp.sinh(gd * xv) / mp.sinh(gd) * fault),
        })

print(json.dumps({
    "bus_ids": ids,
    "ybus": [[pair(Y[i, j]) for j in range(n)] for i in range(n)],
    "zbus": [[pair(Z[i][j]) for j in range(n)] for i in range(n)],
    "beta": beta,
    "fault_current": pair(fault),
    "injections": injections,
}, indent=1))
