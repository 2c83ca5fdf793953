#!/usr/bin/env python3
"""Numerical period matrix of an odd-degree hyperelliptic curve.

Curve:  y^2 + Q(x) y = P(x),  deg P = 2g+1 (monic), deg Q <= g.
With w = 2y + Q the curve is w^2 = f(x) = 4P(x) + Q(x)^2 and the
holomorphic differentials are x^(i-1) dx / w, i = 1..g.

Homology: the finite branch points e_0..e_{2g} are sorted by argument
around a base point b.  For each j, I_j = integral of omega from b to e_j
along the straight segment, on the sheet with w(b) = +sqrt(f(b)),
continued analytically.  The loop c_j = (b->e_j->b on the other sheet)
(b->e_{j+1}->b back) has period 2(I_j - I_{j+1}) and consecutive loops
meet once; the 2g loops c_0..c_{2g-1} form a basis whose intersection
matrix is tridiagonal.  A symplectic basis is extracted by integer
symplectic Gram-Schmidt, and tau = Omega_A^{-1} Omega_B.

The result is validated by the Riemann bilinear relations: tau must be
symmetric with positive definite imaginary part.  The orientation sign
of the intersection form is fixed by requiring Im tau > 0.

Usage:
    python3 scripts/period_matrix_oracle.py --P 0,0,0,0,0,1 --Q 1 --dps 60
Coefficients are listed from the constant term upward.
"""
import argparse
import json

import mpmath as mp


def poly_eval(c, x):
    acc = mp.mpc(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def branch_sqrt_along(f, x0, x1, w0, samples=4000):
    """Return breakpoints of the sign correction s(t) so that
    s(t)*sqrt(f(x(t))) is continuous on [0,1] and equals w0 at t=0."""
    def raw(t):
        return mp.sqrt(f(x0 + (x1 - x0) * t))

    sign = 1 if abs(raw(0) - w0) < abs(raw(0) + w0) else -1
    flips = []
    prev = sign * raw(0)
    ts = [mp.mpf(k) / samples for k in range(1, samples)]
    for t in ts:
        cur = raw(t)
        if abs(sign * cur - prev) > abs(-sign * cur - prev):
            sign = -sign
            flips.append(t)
        prev = sign * cur
    return flips, (1 if abs(raw(0) - w0) < abs(raw(0) + w0) else -1)


def segment_integral(f, g, x0, x1, w0):
    flips, s0 = branch_sqrt_along(f, x0, x1, w0)
    pts = [mp.mpf(0)] + flips + [mp.mpf(1)]
    out = []
    for i in range(g):
        total = mp.mpc(0)
        sign = s0
        for a, b in zip(pts[:-1], pts[1:]):
            def integrand(t, i=i, sign=sign):
                x = x0 + (x1 - x0) * t
                return sign * x ** i * (x1 - x0) / mp.sqrt(f(x))
            total += mp.quad(integrand, [a, b])
            sign = -sign
        out.append(total)
    return out


def symplectic_basis(K):
    """Integer symplectic Gram-Schmidt: rows of returned M satisfy
    M K M^T = J with basis order (a_1..a_g, b_1..b_g)."""
    n = len(K)
    vecs = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def form(u, v):
        return sum(u[i] * K[i][j] * v[j] for i in range(n) for j in range(n))

    a_list, b_list = [], []
    pool = vecs[:]
    while pool:
        u = pool.pop(0)
        partner = None
        for idx, v in enumerate(pool):
            if abs(form(u, v)) == 1:
                partner = idx
                break
        if partner is None:
            if any(u):
                raise RuntimeError("degenerate intersection form")
            continue
        v = pool.pop(partner)
        if form(u, v) == -1:
            v = [-x for x in v]
        a_list.append(u)
        b_list.append(v)
        new_pool = []
        for w in pool:
            # remove components along (u, v): w' = w - <w,v> u + <w,u> v
            cu = form(w, v)
            cv = form(w, u)
            w2 = [w[i] - cu * u[i] + cv * v[i] for i in range(n)]
            new_pool.append(w2)
        pool = new_pool
    return a_list + b_list


def period_matrix(P, Q, dps):
    mp.mp.dps = dps
    P = [mp.mpf(mp.fraction(*map(int, c.split('/'))) if '/' in c else c) for c in P]
    Q = [mp.mpf(mp.fraction(*map(int, c.split('/'))) if '/' in c else c) for c in Q]
    g = (len(P) - 2) // 2
    fc = [4 * c for c in P]
    q2 = [mp.mpf(0)] * (2 * len(Q) - 1) if Q else []
    for i, a in enumerate(Q):
        for j, b in enumerate(Q):
            q2[i + j] += a * b
    for i, a in enumerate(q2):
        fc[i] += a

    def f(x):
        return poly_eval(fc, x)

    roots = mp.polyroots(list(reversed(fc)), maxsteps=200, extraprec=4 * dps)
    base = mp.mpc(0)
    if min(abs(r - base) for r in roots) < mp.mpf('1e-3'):
        base = mp.mpc('0.123', '0.0457')
    roots = sorted(roots, key=lambda r: float(mp.arg(r - base)))
    w0 = mp.sqrt(f(base))
    I = [segment_integral(f, g, base, r, w0) for r in roots]
    ncyc = 2 * g
    cyc = [[2 * (I[j][i] - I[j + 1][i]) for i in range(g)] for j in range(ncyc)]
    K = [[0] * ncyc for _ in range(ncyc)]
    for j in range(ncyc - 1):
        K[j][j + 1] = 1
        K[j + 1][j] = -1
    for orient in (1, -1):
        Ko = [[orient * x for x in row] for row in K]
        M = symplectic_basis(Ko)
        A = mp.matrix(g, g)
        B = mp.matrix(g, g)
        for k in range(g):
            for i in range(g):
                A[i, k] = sum(M[k][j] * cyc[j][i] for j in range(ncyc))
                B[i, k] = sum(M[g + k][j] * cyc[j][i] for j in range(ncyc))
        tau = A ** -1 * B
        sym = max(abs(tau[i, j] - tau[j, i]) for i in range(g) for j in range(g))
        Y = mp.matrix([[tau[i, j].imag for j in range(g)] for i in range(g)])
        try:
            mp.cholesky(Y)
            posdef = True
        except ZeroDivisionError:
            posdef = False
        except ValueError:
            posdef = False
        if posdef:
            return g, tau, sym
    raise RuntimeError("no orientation gives Im tau > 0")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--P", required=True, help="comma separated, constant term first")
    ap.add_argument("--Q", default="0")
    ap.add_argument("--dps", type=int, default=60)
    args = ap.parse_args()
    g, tau, sym = period_matrix(args.P.split(','), args.Q.split(','), args.dps)
    out = {
        "genus": g,
        "symmetry_defect": mp.nstr(sym, 5),
        "tau_re": [[mp.nstr(tau[i, j].real, args.dps - 10) for j in range(g)] for i in range(g)],
        "tau_im": [[mp.nstr(tau[i, j].imag, args.dps - 10) for j in range(g)] for i in range(g)],
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
