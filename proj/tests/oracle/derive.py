"""Independent reference values for the C++ tests (numpy/scipy only).

Run: python3 tests/oracle/derive.py
The printed numbers are frozen into tests/*.cpp.
"""
from math import factorial

import numpy as np
import scipy.linalg as sl
from scipy.optimize import brentq


def ladder(d):
    return np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)


def coherent(al, d):
    c = np.array([np.exp(-al * al / 2) * al**k / np.sqrt(float(factorial(k))) for k in range(d)], complex)
    return c / np.linalg.norm(c)


def cats(al, d):
    cp = coherent(al, d) + coherent(-al, d)
    cm = coherent(al, d) - coherent(-al, d)
    return cp / np.linalg.norm(cp), cm / np.linalg.norm(cm)


def cutoff(al):
    return max(30, int(np.ceil(al * al + 8 * al + 10)))


def kpo(al, d):
    a = ladder(d)
    ad = a.conj().T
    return -ad @ ad @ a @ a + al * al * (ad @ ad + a @ a)


def sectors(al, d):
    """Eigenvectors per parity sector, highest energy first."""
    h = kpo(al, d)
    out = {}
    for par in (0, 1):
        idx = np.arange(par, d, 2)
        w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        order = np.argsort(-w)
        vecs = np.zeros((d, len(idx)), complex)
        vecs[idx, :] = v[:, order]
        out[par] = (w[order], vecs)
    return out


def closed_form(al):
    e2 = np.exp(-2 * al * al)
    n_p, n_m = (2 * (1 + e2)) ** -0.5, (2 * (1 - e2)) ** -0.5
    p = n_p / n_m
    d1 = e2 * (1 - 4 * al * al)
    n1_p, n1_m = (2 * (1 + d1)) ** -0.5, (2 * (1 - d1)) ** -0.5
    return dict(n_p=n_p, n_m=n_m, p=p, n1_p=n1_p, n1_m=n1_m, odd=p * n_p / n1_p, even=n_m / (p * n1_m))


def gamma(al, kappa):
    c = closed_form(al)
    return kappa * al * al / 2 * (c["even"] - c["odd"])


def leakage(al):
    d = cutoff(al)
    n = np.diag(np.arange(d)).astype(complex)
    cp, cm = cats(al, d)
    sec = sectors(al, d)
    res = {}
    for name, cat, par in (("plus", cp, 0), ("minus", cm, 1)):
        img = n @ cat
        out = img - cp * (cp.conj() @ img) - cm * (cm.conj() @ img)
        w1 = abs(sec[par][1][:, 1].conj() @ img) ** 2
        res[name] = dict(k1_fraction=w1 / np.linalg.norm(out) ** 2, projected=w1 / al**2)
    return res


def gamma_projected(al, kappa):
    lk = leakage(al)
    return kappa * al * al / 2 * (lk["plus"]["projected"] - lk["minus"]["projected"])


def displaced_overlaps(al):
    d = cutoff(al)
    a = ladder(d)
    one = np.zeros(d, complex)
    one[1] = 1
    dp = sl.expm(al * (a.conj().T - a)) @ one
    dm = sl.expm(-al * (a.conj().T - a)) @ one
    plus = (dp + dm) / np.linalg.norm(dp + dm)
    minus = (dp - dm) / np.linalg.norm(dp - dm)
    sec = sectors(al, d)
    return abs(sec[1][1][:, 1].conj() @ plus) ** 2, abs(sec[0][1][:, 1].conj() @ minus) ** 2


def two_kpo_ep(sector, alpha=2.0, kappa=0.05, g=0.001):
    def f(beta):
        g1, g2 = gamma(alpha, kappa), gamma(beta, kappa)
        x = g1 + g2 if sector == "f" else abs(g1 - g2)
        return 2 * alpha * beta * g - x

    return brentq(f, 1.0, 3.0, xtol=1e-15, rtol=1e-15)


def main():
    c = closed_form(1.5)
    print("closed form a=1.5:", {k: round(v, 9) for k, v in c.items()})
    print("rate coefficients a=3:", closed_form(3.0)["odd"], closed_form(3.0)["even"])
    print("gamma(1.5, 0.05) =", repr(gamma(1.5, 0.05)))
    print("gamma(4, 1) =", repr(gamma(4.0, 1.0)))
    for al in (1.0, 1.5, 2.0, 2.5, 3.0):
        lk = leakage(al)
        print(f"leakage a={al}: k1 +{lk['plus']['k1_fraction']:.6f} -{lk['minus']['k1_fraction']:.6f} "
              f"proj +{lk['plus']['projected']:.6f} -{lk['minus']['projected']:.6f} "
              f"gamma_proj/gamma {gamma_projected(al, 0.05) / gamma(al, 0.05):.6f}")
    print("displaced overlaps a=1.5 (sign +, sign -):", displaced_overlaps(1.5))
    d = cutoff(2.0)
    sec = sectors(2.0, d)
    gap = (sec[0][0][0] + sec[1][0][0]) / 2 - (sec[0][0][1] + sec[1][0][1]) / 2
    print("gap a=2:", repr(gap), "ratio", gap / 16)
    d = cutoff(1.5)
    n = np.diag(np.arange(d)).astype(complex)
    cp, cm = cats(1.5, d)
    print("<n> cats a=1.5:", (cp.conj() @ n @ cp).real, (cm.conj() @ n @ cm).real)
    print("alpha* (0.0023, 0.05):", repr(brentq(lambda x: gamma(x, 0.05) - 2 * x * 0.0023, 1, 2.5, xtol=1e-15)))
    print("alpha* (0.0046, 0.05):", repr(brentq(lambda x: gamma(x, 0.05) - 2 * x * 0.0046, 1, 2.5, xtol=1e-15)))
    print("alpha* (0.0023, 0.10):", repr(brentq(lambda x: gamma(x, 0.10) - 2 * x * 0.0023, 1, 2.5, xtol=1e-15)))
    print("beta* f:", repr(two_kpo_ep("f")), "beta* s:", repr(two_kpo_ep("s")))


if __name__ == "__main__":
    main()
