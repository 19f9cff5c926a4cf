"""Independent reference values for tests/oracles.rs.

Boundary conditions are written as rows acting on the trace
(phi(0), phi'(0), phi(a), phi'(a)). Eigenvalues are zeros of the
determinant of those rows applied to cos(kx) and sin(kx)/k; kernels solve
-g'' - lam g = delta_y with the same rows. None of the library's closed
forms are used.

    python3 derive.py
"""
import mpmath as mp

mp.mp.dps = 40
A = mp.mpf(1)


def traces(lam, a=A):
    """Traces of u1 = cos(kx) and u2 = sin(kx)/k, k = sqrt(lam)."""
    k = mp.sqrt(mp.mpc(lam))
    u1 = (1, 0, mp.cos(k * a), -k * mp.sin(k * a))
    u2 = (0, 1, mp.sin(k * a) / k, mp.cos(k * a))
    return u1, u2


def first_kind(t11, t22, t12):
    # phi'(0) = t11 phi(0) + t12 phi(a);  -phi'(a) = conj(t12) phi(0) + t22 phi(a)
    return [[-t11, 1, -t12, 0], [-mp.conj(t12), 0, -t22, -1]]


def second_kind(w1, w2, th):
    # w2 phi(0) = w1 phi(a);  conj(w1)(th phi(0) - phi'(0)) + conj(w2)(th phi(a) + phi'(a)) = 0
    return [[w2, 0, -w1, 0], [mp.conj(w1) * th, -mp.conj(w1), mp.conj(w2) * th, mp.conj(w2)]]


def apply(row, tr):
    return sum(c * v for c, v in zip(row, tr))


def matrix(rows, lam):
    u1, u2 = traces(lam)
    return [[apply(r, u1), apply(r, u2)] for r in rows]


def det(rows, lam):
    m = matrix(rows, lam)
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def eigenvalues(rows, lo, hi, n, step=mp.mpf("0.01")):
    # det has a constant phase along the real axis for self-adjoint rows.
    z = det(rows, mp.mpf("0.37"))
    phase = mp.conj(z) / abs(z)
    f = lambda l: mp.re(det(rows, l) * phase)
    out, x, fx = [], mp.mpf(lo), f(mp.mpf(lo))
    while x < hi and len(out) < n:
        y = x + step
        fy = f(y)
        if fx * fy < 0:
            r = mp.findroot(f, (x, y), solver="anderson")
            assert abs(det(rows, r)) < mp.mpf("1e-25")
            out.append(r)
        x, fx = y, fy
    return out


def interval_kernel(rows, lam, x, y, a=A):
    """g = c1 u1 + c2 u2 + j, with j = -sin(k(x - y))/k for x > y."""
    k = mp.sqrt(mp.mpc(lam))
    jump = (0, 0, -mp.sin(k * (a - y)) / k, -mp.cos(k * (a - y)))
    m = mp.matrix(matrix(rows, lam))
    c = mp.lu_solve(m, mp.matrix([-apply(r, jump) for r in rows]))
    g = c[0] * mp.cos(k * x) + c[1] * mp.sin(k * x) / k
    if x > y:
        g -= mp.sin(k * (x - y)) / k
    return g


def robin_kernel(alpha, lam, x, y):
    """u_< obeys cos(alpha) u(0) = sin(alpha) u'(0); u_> = exp(ikx), Im k > 0."""
    k = mp.sqrt(mp.mpc(lam))
    if mp.im(k) < 0:
        k = -k
    ul = lambda s: mp.sin(alpha) * mp.cos(k * s) + mp.cos(alpha) * mp.sin(k * s) / k
    dul0 = mp.cos(alpha)
    ur = lambda s: mp.exp(1j * k * s)
    w = ul(0) * 1j * k - dul0
    lo, hi = min(x, y), max(x, y)
    return -ul(lo) * ur(hi) / w


def show(name, z):
    z = mp.mpc(z)
    print(f"{name}: {mp.nstr(mp.re(z), 17)} {mp.nstr(mp.im(z), 17)}")


if __name__ == "__main__":
    fk = first_kind(mp.mpf("0.3"), mp.mpf("-0.2"), mp.mpc("0.4", "0.7"))
    sk = second_kind(mp.mpc("0.6"), mp.mpc(0, "0.8"), mp.mpf("1.5"))
    for name, rows in [("first_kind", fk), ("second_kind", sk)]:
        ev = eigenvalues(rows, -20, 450, 6)
        print(name, "eigenvalues:", ", ".join(mp.nstr(e, 17) for e in ev))
    lam = mp.mpc(2, 1)
    for name, rows in [("first_kind", fk), ("second_kind", sk)]:
        show(f"{name} g(0.3, 0.8; 2+i)", interval_kernel(rows, lam, mp.mpf("0.3"), mp.mpf("0.8")))
        show(f"{name} g(0.8, 0.3; 2+i)", interval_kernel(rows, lam, mp.mpf("0.8"), mp.mpf("0.3")))
    show("robin(0.5) g(0.3, 1.1; -2+i)", robin_kernel(mp.mpf("0.5"), mp.mpc(-2, 1), mp.mpf("0.3"), mp.mpf("1.1")))
    show("robin(-0.7) g(0.0, 0.6; 3-2i)", robin_kernel(mp.mpf("-0.7"), mp.mpc(3, -2), mp.mpf("0.0"), mp.mpf("0.6")))
