"""Reference values for the level-k moment relaxations, solved with cvxpy.

optsos_k = exp( mean_I log pEx[prod_{i in I} <x, A_i x>] / k )
srel_k   = ( mean_I pEx[prod_{i in I} <x, A_i x>] )^(1/k)
over k-subsets I, subject to M(y) >= 0 and pEx[|x|^2k] = 1.
"""
import itertools
import json
import sys

import cvxpy as cp
import numpy as np


def monomials(n, k):
    out = []
    for c in itertools.combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return out


def quad_terms(a):
    """<x, A x> = sum_{p,q} conj(x_p) A_pq x_q as {(conj_exp, hol_exp): coeff}."""
    n = a.shape[0]
    terms = {}
    for p in range(n):
        for q in range(n):
            if a[p, q] != 0:
                ep = tuple(int(i == p) for i in range(n))
                eq = tuple(int(i == q) for i in range(n))
                terms[(ep, eq)] = terms.get((ep, eq), 0) + a[p, q]
    return terms


def mul(s, t):
    out = {}
    for (a1, b1), c1 in s.items():
        for (a2, b2), c2 in t.items():
            key = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
            out[key] = out.get(key, 0) + c1 * c2
    return out


def relax(forms, k, field, mean):
    n = forms[0].shape[0]
    basis = monomials(n, k)
    index = {e: i for i, e in enumerate(basis)}
    size = len(basis)
    if field == "real":
        full = monomials(n, 2 * k)
        y = cp.Variable(len(full))
        fidx = {e: i for i, e in enumerate(full)}
        rows = []
        for a in basis:
            rows.append([y[fidx[tuple(p + q for p, q in zip(a, b))]] for b in basis])
        m = cp.bmat(rows)
        cons = [(m + m.T) / 2 >> 0]

        def pex(poly):
            expr = 0
            for (ca, hb), c in poly.items():
                expr += np.real(c) * y[fidx[tuple(p + q for p, q in zip(ca, hb))]]
            return expr
    else:
        m = cp.Variable((size, size), hermitian=True)
        cons = [m >> 0]

        def pex(poly):
            # M_ab = pEx[conj(x)^a x^b]
            expr = 0
            for (ca, hb), c in poly.items():
                expr += c * m[index[ca], index[hb]]
            return cp.real(expr)

    ident = np.eye(n)
    norm = quad_terms(ident)
    for _ in range(k - 1):
        norm = mul(norm, quad_terms(ident))
    cons.append(pex(norm) == 1)
    vals = []
    for subset in itertools.combinations(range(len(forms)), k):
        poly = quad_terms(forms[subset[0]])
        for i in subset[1:]:
            poly = mul(poly, quad_terms(forms[i]))
        vals.append(pex(poly))
    if mean:
        obj = sum(vals) / len(vals)
    else:
        obj = sum(cp.log(v) for v in vals) / len(vals)
    prob = cp.Problem(cp.Maximize(obj), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
    if mean:
        return prob.value ** (1.0 / k)
    return float(np.exp(prob.value / k))


def main():
    cases = json.load(open(sys.argv[1]))
    for case in cases:
        forms = []
        for f in case["forms"]:
            re = np.array(f["re"], dtype=float)
            im = np.array(f.get("im", np.zeros_like(re)), dtype=float)
            forms.append(re + 1j * im if case["field"] == "complex" else re)
        for k in case["levels"]:
            o = relax(forms, k, case["field"], mean=False)
            s = relax(forms, k, case["field"], mean=True)
            print(f'{case["name"]} k={k} optsos={o:.12f} srel={s:.12f}')


if __name__ == "__main__":
    main()
