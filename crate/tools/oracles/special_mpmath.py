"""Reference values for the loss constants and log-moments, via mpmath.

E[ln Z] for Z = sum_i l_i |z_i|^2 (complex standard normal z_i, so |z_i|^2 ~ Exp(1))
uses Frullani's integral ln z = int_0^inf (e^{-t} - e^{-t z}) / t dt, giving
E[ln Z] = int_0^inf (e^{-t} - prod_i 1 / (1 + l_i t)) / t dt.
"""
from mpmath import mp, mpf, digamma, euler, log, quad, inf, exp

mp.dps = 40


def l_real(r):
    return euler + log(2) + digamma(mpf(r) / 2) - log(mpf(r) / 2)


def l_complex(r):
    return euler + digamma(r) - log(r)


def elog(lams):
    def f(t):
        p = mpf(1)
        for l in lams:
            p /= 1 + l * t
        return (exp(-t) - p) / t
    return quad(f, [0, 1, 10, 100, 1000, inf])


def c_nk(n, k):
    tot = mpf(k + n - 1)
    return euler + elog([k / tot] + [1 / tot] * (n - 1))


for r in [2, 3, 4, 8, 17, 1000]:
    print(f"L_{r}: real {mp.nstr(l_real(r), 20)} complex {mp.nstr(l_complex(r), 20)}")
for lams in [[3, 2, 1], [0.5, 1.7, 2.2, 4.0], [2, 0.5, 0.5, 0.5], [0.25, 0.25, 1.5],
             [2, 2, 1, 1], [3, 1, 1, 0.5], [1, 1, 1, 1]]:
    print(f"E ln Z {lams}: {mp.nstr(elog([mpf(l) for l in lams]), 20)}")
for n, k in [(2, 2), (2, 5), (3, 4), (4, 2), (5, 10), (6, 50)]:
    print(f"C({n},{k}) = {mp.nstr(c_nk(n, k), 20)}")
