#!/usr/bin/env python3
"""Reads an LP-format file and solves it with scipy's linprog, printing
"optimal <objective>", "infeasible" or "unbounded". Used to cross-check the
embedded simplex on exported problems."""
import sys

import numpy as np
from scipy.optimize import linprog


def parse_terms(tokens, var_index):
    coeffs = {}
    sign = 1.0
    pending = None
    for tok in tokens:
        if tok == "+":
            sign = 1.0
            continue
        if tok == "-":
            sign = -1.0
            continue
        try:
            value = float(tok)
            pending = sign * value
            sign = 1.0
            continue
        except ValueError:
            pass
        name = tok
        coef = pending if pending is not None else sign
        pending = None
        sign = 1.0
        idx = var_index.setdefault(name, len(var_index))
        coeffs[idx] = coeffs.get(idx, 0.0) + coef
    return coeffs


def main(path):
    maximize = False
    objective = {}
    obj_constant = 0.0
    rows = []  # (coeffs, rel, rhs)
    bounds = {}
    section = None
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    var_index = {}
    for ln in lines:
        if not ln:
            continue
        if ln.startswith("\\"):
            if ln.startswith("\\ objective_constant"):
                obj_constant = float(ln.split()[-1])
            continue
        low = ln.lower()
        if low in ("minimize", "maximize"):
            maximize = low == "maximize"
            section = "obj"
            continue
        if low == "subject to":
            section = "cons"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low == "end":
            break
        if section == "obj":
            body = ln.split(":", 1)[1] if ":" in ln else ln
            objective = parse_terms(body.replace("+", " + ").replace("-", " - ").split(), var_index)
        elif section == "cons":
            body = ln.split(":", 1)[1] if ":" in ln else ln
            for rel in ("<=", ">=", "="):
                if rel in body:
                    lhs, rhs = body.split(rel, 1)
                    coeffs = parse_terms(lhs.replace("+", " + ").replace("-", " - ").split(), var_index)
                    rows.append((coeffs, rel, float(rhs)))
                    break
        elif section == "bounds":
            toks = ln.split()
            if len(toks) == 2 and toks[1] == "free":
                bounds[toks[0]] = (None, None)
            elif len(toks) == 3 and toks[1] == ">=":
                bounds[toks[0]] = (float(toks[2]), None)
            elif len(toks) == 3 and toks[1] == "<=":
                bounds[toks[0]] = (None, float(toks[2]))

    n = len(var_index)
    c = np.zeros(n)
    for idx, coef in objective.items():
        c[idx] = coef
    if maximize:
        c = -c
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in rows:
        row = np.zeros(n)
        for idx, coef in coeffs.items():
            row[idx] = coef
        if rel == "<=":
            a_ub.append(row)
            b_ub.append(rhs)
        elif rel == ">=":
            a_ub.append(-row)
            b_ub.append(-rhs)
        else:
            a_eq.append(row)
            b_eq.append(rhs)
    bound_list = [(None, None)] * n
    for name, idx in var_index.items():
        bound_list[idx] = bounds.get(name, (0.0, None))

    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bound_list,
        method="highs",
    )
    if res.status == 2:
        print("infeasible")
    elif res.status == 3:
        print("unbounded")
    elif res.status == 0:
        value = res.fun if not maximize else -res.fun
        print(f"optimal {value + obj_constant:.12g}")
    else:
        print(f"error {res.status}")


if __name__ == "__main__":
    main(sys.argv[1])
