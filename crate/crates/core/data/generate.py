"""Regenerates the bundled benchmark networks from per-km line constants.

Usage: python3 generate.py   (writes the JSON files next to this script)

Line constants are converted to the distributed-parameter form stored in the
network documents:  z = sqrt(Z'/Y'),  gamma = sqrt(Z'Y')  with
Z' = r + jx (ohm/km) and Y' = jb (S/km).
"""
import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def cplx(v):
    return {"re": float(v.real), "im": float(v.imag)}


def line(ident, frm, to, r, x, b, length):
    series = complex(r, x)
    shunt = complex(0.0, b)
    z = np.sqrt(series / shunt)
    gamma = np.sqrt(series * shunt)
    if gamma.real < 0:
        gamma = -gamma
    return {"id": ident, "from": frm, "to": to, "z": cplx(z), "gamma": cplx(gamma),
            "length_km": float(length)}


def source(xs):
    # generator / infeed equivalent with X/R = 24
    return 1.0 / complex(xs / 24.0, xs)


def write(name, doc):
    with open(os.path.join(HERE, name), "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def six_bus():
    loads = [0.0008 - 0.0002j, 0.002 - 0.0005j, 0.0008 - 0.0002j,
             0.003 - 0.001j, 0.0025 - 0.0008j, 0.002 - 0.0006j]
    shunts = list(loads)
    shunts[0] += source(250.0)
    shunts[2] += source(312.5)
    # (from, to, r ohm/km, x ohm/km, b S/km, length km); from = sensor terminal
    spec = [
        (1, 2, 0.030, 0.36, 3.2e-6, 300),
        (4, 1, 0.028, 0.34, 3.4e-6, 238),
        (3, 2, 0.032, 0.38, 3.1e-6, 350),
        (5, 2, 0.030, 0.35, 3.3e-6, 200),
        (3, 6, 0.029, 0.37, 3.2e-6, 275),
        (4, 5, 0.031, 0.36, 3.3e-6, 175),
        (5, 6, 0.030, 0.35, 3.2e-6, 325),
    ]
    buses = [{"id": i + 1, "shunt_admittance": cplx(y)} for i, y in enumerate(shunts)]
    lines = [line("L%d-%d" % (f, t), f, t, r, x, b, d) for f, t, r, x, b, d in spec]
    write("six_bus.json", {"buses": buses, "lines": lines})
    write("six_bus_sensors.json",
          {"monitored_lines": ["L4-1", "L3-2", "L5-2", "L3-6", "L4-5"]})


def fourteen_bus():
    rng = np.random.default_rng(1)
    n = 14
    shunts = [complex(rng.uniform(1, 3) * 1e-3, -rng.uniform(0.2, 1) * 1e-3) for _ in range(n)]
    for g in (1, 2, 3, 6, 8):
        xs = 120.0 * rng.uniform(0.8, 1.3)
        shunts[g - 1] += 1.0 / complex(0.04 * 120.0, xs)
    edges = [(1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5), (4, 7), (4, 9), (5, 6),
             (6, 11), (6, 12), (6, 13), (7, 8), (7, 9), (9, 10), (9, 14), (10, 11), (12, 13),
             (13, 14),
             # tie lines meshing the base topology
             (1, 3), (1, 4), (2, 6), (3, 9), (5, 9), (5, 11), (8, 9), (10, 14), (11, 12),
             (12, 14)]
    lines = []
    for f, t in edges:
        r = rng.uniform(0.025, 0.035)
        x = rng.uniform(0.32, 0.40)
        b = rng.uniform(3.0e-6, 3.5e-6)
        d = round(rng.uniform(40, 160))
        lines.append(line("L%d-%d" % (f, t), f, t, r, x, b, d))
    buses = [{"id": i + 1, "shunt_admittance": cplx(y)} for i, y in enumerate(shunts)]
    write("fourteen_bus.json", {"buses": buses, "lines": lines})
    ids = [l["id"] for l in lines]
    write("fourteen_bus_sensors.json",
          {"monitored_lines": [ids[i] for i in (1, 2, 7, 9, 13, 14, 15, 17, 18, 19)]})
    write("fourteen_bus_sensors_dense.json", {"monitored_lines": ids})


if __name__ == "__main__":
    six_bus()
    fourteen_bus()
