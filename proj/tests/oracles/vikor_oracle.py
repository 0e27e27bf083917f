"""Step-by-step VIKOR in exact rational arithmetic.

Writes vikor_cases.json: for each pinned matrix the S, R and Q of every row, the order by
(Q, S, R, row) and the compromise set. Also pins the weight vector of the first use-case
operator profile.
"""
import json
import os
import sys
from fractions import Fraction as F

HERE = os.path.dirname(os.path.abspath(__file__))

LEVEL = {"very_low": 1, "low": 2, "medium": 3, "high": 4, "very_high": 5}
VARIABLES = ["makespan", "cost", "fuel", "flightTime", "distance", "riskFuel", "riskGround",
             "riskCoverage", "riskCloseness", "nUavs", "nTasks", "nGcss"]


def vikor(rows, weights, maximize, v=F(1, 2)):
    n, m = len(rows), len(weights)
    best, worst = [], []
    for j in range(m):
        col = [r[j] for r in rows]
        if maximize[j]:
            best.append(max(col))
            worst.append(min(col))
        else:
            best.append(min(col))
            worst.append(max(col))
    S, R = [], []
    for r in rows:
        d = []
        for j in range(m):
            if best[j] == worst[j]:
                d.append(F(0))
            else:
                d.append(weights[j] * (r[j] - best[j]) / (worst[j] - best[j]))
        S.append(sum(d, F(0)))
        R.append(max(d))
    s_lo, s_hi, r_lo, r_hi = min(S), max(S), min(R), max(R)
    Q = []
    for i in range(n):
        qs = (S[i] - s_lo) / (s_hi - s_lo) if s_hi != s_lo else F(0)
        qr = (R[i] - r_lo) / (r_hi - r_lo) if r_hi != r_lo else F(0)
        Q.append(v * qs + (1 - v) * qr)
    order = sorted(range(n), key=lambda i: (Q[i], S[i], R[i], i))
    lead = order[0]
    comp = [lead]
    if n > 1:
        dq = F(1, n - 1)
        c1 = Q[order[1]] - Q[lead] >= dq
        c2 = S[lead] == s_lo or R[lead] == r_lo
        if c1 and not c2:
            comp.append(order[1])
        elif not c1:
            for k in order[1:]:
                if Q[k] - Q[lead] < dq:
                    comp.append(k)
                else:
                    break
    return S, R, Q, order, comp


def case(name, rows, weights, maximize):
    rows = [[F(x) for x in r] for r in rows]
    weights = [F(w) for w in weights]
    S, R, Q, order, comp = vikor(rows, weights, maximize)
    return {"name": name,
            "rows": [[float(x) for x in r] for r in rows],
            "weights": [float(w) for w in weights],
            "maximize": maximize,
            "S": [float(x) for x in S],
            "R": [float(x) for x in R],
            "Q": [float(x) for x in Q],
            "order": order,
            "compromise": sorted(comp)}


def main():
    uc1 = json.load(open(os.path.join(os.path.dirname(os.path.dirname(HERE)), "fixtures", "usecase1.json")))
    imp = uc1["operatorProfile"]["importance"]
    levels = [LEVEL[imp[k]] for k in VARIABLES]
    uc1_weights = [F(x, sum(levels)) for x in levels]

    cases = [
        case("3x3", [[10, 200, 3], [12, 150, 5], [15, 180, 2]],
             [F(1, 2), F(3, 10), F(1, 5)], [False, False, False]),
        # five plans with the twelve planner criteria; nTasks is the maximized column
        case("5x12",
             [[4210, 1830, 61.5, 21100, 402000, 35, 0, 10, 0, 4, 5, 1],
              [3890, 2410, 80.2, 25500, 455000, 48, 12, 0, 5, 4, 5, 1],
              [5120, 1290, 44.0, 15800, 310000, 20, 0, 25, 0, 3, 5, 1],
              [3650, 2900, 97.3, 30100, 520000, 62, 30, 0, 18, 4, 4, 1],
              [4700, 1500, 52.8, 18300, 350000, 28, 5, 15, 0, 3, 5, 1]],
             uc1_weights, [v == "nTasks" for v in VARIABLES]),
    ]
    out = {"uc1Weights": [float(w) for w in uc1_weights], "cases": cases}
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, "vikor_cases.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
