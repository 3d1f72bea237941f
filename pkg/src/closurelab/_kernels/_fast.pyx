# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain kernels.

Statement-for-statement mirror of ``closurelab._kernels._reference``; see that
module for the frame conventions and element encoding.  Built with
-ffp-contract=off so results match the reference bit for bit.
"""

from libc.math cimport acos, atan2, cos, fabs, floor, hypot, sin, sqrt

BACKEND = "compiled"

OK = 0
DEAD_END = 1
TIE = 2
BAD_ANNULUS = 3

cdef double PI = 3.14159265358979323846264338327950288
cdef double C_TWO_PI = 6.28318530717958647692528676655900577
TWO_PI = C_TWO_PI

cdef int _BRACKETS = 64
cdef double _BISECT_TOL = 1e-12
cdef double _NEWTON_TOL = 1e-15
cdef double _EXCLUDE_REL = 1e-7
cdef double _ANGLE_TIE = 1e-12
cdef double _SEP_TIE_REL = 1e-12
cdef double _DEDUPE_REL = 1e-9


cdef inline double _wrap_2pi(double x):
    cdef double y = x - floor(x / C_TWO_PI) * C_TWO_PI
    if y >= C_TWO_PI:
        y -= C_TWO_PI
    return y


cdef inline double _wrap_pi(double x):
    cdef double y = _wrap_2pi(x)
    if y > PI:
        y -= C_TWO_PI
    return y


def wrap_2pi(double x):
    """Wrap an angle to [0, 2*pi)."""
    return _wrap_2pi(x)


def wrap_pi(double x):
    """Wrap an angle to (-pi, pi]."""
    return _wrap_pi(x)


cdef inline bint _annulus_ok(double R, double r, double d):
    return R > 0.0 and r > 0.0 and d >= 0.0 and d + r < R


def annulus_ok(double R, double r, double d):
    return bool(_annulus_ok(R, r, d))


cdef inline double _inscribed_rho(double R, double r, double d, double alpha):
    cdef double ca = cos(alpha)
    return (R * R - d * d - r * r - 2.0 * r * d * ca) / (2.0 * (R + r + d * ca))


def inscribed_rho(double R, double r, double d, double alpha):
    """Radius of the inscribed circle whose inner tangency sits at angle alpha."""
    return _inscribed_rho(R, r, d, alpha)


cdef inline void _inscribed_center(double R, double r, double d, double alpha,
                                   double* x, double* y, double* rho):
    cdef double ca = cos(alpha)
    cdef double sa = sin(alpha)
    rho[0] = (R * R - d * d - r * r - 2.0 * r * d * ca) / (2.0 * (R + r + d * ca))
    x[0] = d + (r + rho[0]) * ca
    y[0] = (r + rho[0]) * sa


def inscribed_center(double R, double r, double d, double alpha):
    """Centre and radius (x, y, rho) of the inscribed circle at angle alpha."""
    cdef double x, y, rho
    _inscribed_center(R, r, d, alpha, &x, &y, &rho)
    return x, y, rho


cdef inline void _chord_points(double R, double r, double d, double phi,
                               double* tx, double* ty,
                               double* e1x, double* e1y,
                               double* e2x, double* e2y):
    cdef double cp = cos(phi)
    cdef double sp = sin(phi)
    cdef double b, disc, root, s1, s2
    tx[0] = d + r * cp
    ty[0] = r * sp
    b = tx[0] * (-sp) + ty[0] * cp
    disc = b * b - (tx[0] * tx[0] + ty[0] * ty[0] - R * R)
    root = sqrt(disc)
    s1 = -b - root
    s2 = -b + root
    e1x[0] = tx[0] - s1 * sp
    e1y[0] = ty[0] + s1 * cp
    e2x[0] = tx[0] - s2 * sp
    e2y[0] = ty[0] + s2 * cp


def chord_points(double R, double r, double d, double phi):
    """Tangency point and endpoints of the chord tangent at angle phi."""
    cdef double tx, ty, e1x, e1y, e2x, e2y
    _chord_points(R, r, d, phi, &tx, &ty, &e1x, &e1y, &e2x, &e2y)
    return tx, ty, e1x, e1y, e2x, e2y


cdef inline double _chord_g(double d, double r, double ux, double uy, double ct,
                            double ecx, double ae, double be, double E):
    cdef double x = ecx + ae * cos(E)
    cdef double y = be * sin(E)
    return hypot(x - d, y) - r + (ux * x + uy * y - ct)


cdef int _tangent_circles_to_chord(double R, double r, double d, double phi,
                                   double* outx, double* outy, double* outrho):
    cdef double ux = cos(phi)
    cdef double uy = sin(phi)
    cdef double ct = d * ux + r
    cdef double ecx = 0.5 * d
    cdef double ae = 0.5 * (R + r)
    cdef double be = sqrt(ae * ae - ecx * ecx)
    cdef double h = C_TWO_PI / _BRACKETS
    cdef double gs[64]
    cdef double roots[4]
    cdef int nroots = 0
    cdef int j, it, nout, k
    cdef double a, b, ga, gb, m, gm
    cdef double E, x, y, rho, n1, n2, f1, f2, f3, fmax
    cdef double a11, a12, a21, a22, det, b1, b2, b3, dx, dy, dr
    cdef bint dup

    for j in range(_BRACKETS):
        gs[j] = _chord_g(d, r, ux, uy, ct, ecx, ae, be, j * h)
    for j in range(_BRACKETS):
        if nroots >= 4:
            break
        a = j * h
        b = a + h
        ga = gs[j]
        gb = gs[j + 1] if j + 1 < _BRACKETS else gs[0]
        if ga == 0.0:
            roots[nroots] = a
            nroots += 1
            continue
        if gb == 0.0 or (ga < 0.0) == (gb < 0.0):
            continue
        while b - a > _BISECT_TOL:
            m = 0.5 * (a + b)
            gm = _chord_g(d, r, ux, uy, ct, ecx, ae, be, m)
            if gm == 0.0:
                a = m
                b = m
                break
            if (ga < 0.0) != (gm < 0.0):
                b = m
            else:
                a = m
                ga = gm
        roots[nroots] = 0.5 * (a + b)
        nroots += 1

    nout = 0
    for k in range(nroots):
        E = roots[k]
        x = ecx + ae * cos(E)
        y = be * sin(E)
        rho = ct - (ux * x + uy * y)
        for it in range(12):
            n1 = hypot(x, y)
            n2 = hypot(x - d, y)
            if n1 == 0.0 or n2 == 0.0:
                break
            f1 = n1 - (R - rho)
            f2 = n2 - (r + rho)
            f3 = (ux * x + uy * y - ct) + rho
            fmax = fabs(f1)
            if fabs(f2) > fmax:
                fmax = fabs(f2)
            if fabs(f3) > fmax:
                fmax = fabs(f3)
            if fmax <= _NEWTON_TOL * R:
                break
            a11 = x / n1
            a12 = y / n1
            a21 = (x - d) / n2
            a22 = y / n2
            det = (a11 * (a22 + uy) - a12 * (a21 + ux)
                   + (a21 * uy - a22 * ux))
            if det == 0.0:
                break
            b1 = -f1
            b2 = -f2
            b3 = -f3
            dx = b1 * (a22 + uy) - a12 * (b2 + b3) + (b2 * uy - a22 * b3)
            dy = a11 * (b2 + b3) - b1 * (a21 + ux) + (a21 * b3 - b2 * ux)
            dr = a11 * (a22 * b3 - b2 * uy) - a12 * (a21 * b3 - b2 * ux) + b1 * (a21 * uy - a22 * ux)
            x += dx / det
            y += dy / det
            rho += dr / det
        dup = False
        for j in range(nout):
            if hypot(x - outx[j], y - outy[j]) < _DEDUPE_REL * R:
                dup = True
                break
        if not dup:
            outx[nout] = x
            outy[nout] = y
            outrho[nout] = rho
            nout += 1
    return nout


def tangent_circles_to_chord(double R, double r, double d, double phi):
    """Inscribed circles tangent to the chord whose inner tangency is at phi.

    Same bracketed eccentric-anomaly solve as the reference backend; returns a
    list of 0..2 (x, y, rho) triples ordered by anomaly.
    """
    cdef double outx[4]
    cdef double outy[4]
    cdef double outrho[4]
    cdef int n = _tangent_circles_to_chord(R, r, d, phi, outx, outy, outrho)
    return [(outx[i], outy[i], outrho[i]) for i in range(n)]


cdef inline double _steiner_f(double R, double r, double d,
                              double x1, double y1, double rho1, double beta):
    cdef double x, y, rho
    _inscribed_center(R, r, d, beta, &x, &y, &rho)
    return hypot(x - x1, y - y1) - rho1 - rho


cdef int _steiner_pair(double R, double r, double d, double alpha, double* out):
    cdef double x1, y1, rho1
    cdef double h = C_TWO_PI / _BRACKETS
    cdef double gs[64]
    cdef double betas[4]
    cdef int nb = 0
    cdef int j, it, nout, k
    cdef double a, b, ga, gb, m, gm, beta, sum2
    cdef double cb, sb, den, rho, rhop, x, y, dist, f, dxb, dyb, fp
    cdef bint dup

    _inscribed_center(R, r, d, alpha, &x1, &y1, &rho1)
    for j in range(_BRACKETS):
        gs[j] = _steiner_f(R, r, d, x1, y1, rho1, j * h)
    for j in range(_BRACKETS):
        if nb >= 4:
            break
        a = j * h
        b = a + h
        ga = gs[j]
        gb = gs[j + 1] if j + 1 < _BRACKETS else gs[0]
        if ga == 0.0:
            betas[nb] = a
            nb += 1
            continue
        if gb == 0.0 or (ga < 0.0) == (gb < 0.0):
            continue
        while b - a > _BISECT_TOL:
            m = 0.5 * (a + b)
            gm = _steiner_f(R, r, d, x1, y1, rho1, m)
            if gm == 0.0:
                a = m
                b = m
                break
            if (ga < 0.0) != (gm < 0.0):
                b = m
            else:
                a = m
                ga = gm
        beta = 0.5 * (a + b)
        sum2 = (R + r) * (R + r) - d * d
        for it in range(4):
            cb = cos(beta)
            sb = sin(beta)
            den = R + r + d * cb
            rho = (R * R - d * d - r * r - 2.0 * r * d * cb) / (2.0 * den)
            rhop = d * sb * sum2 / (2.0 * den * den)
            x = d + (r + rho) * cb
            y = (r + rho) * sb
            dist = hypot(x - x1, y - y1)
            if dist == 0.0:
                break
            f = dist - rho1 - rho
            dxb = rhop * cb - (r + rho) * sb
            dyb = rhop * sb + (r + rho) * cb
            fp = ((x - x1) * dxb + (y - y1) * dyb) / dist - rhop
            if fp == 0.0:
                break
            beta -= f / fp
        betas[nb] = _wrap_2pi(beta)
        nb += 1

    nout = 0
    for k in range(nb):
        dup = False
        for j in range(nout):
            if fabs(_wrap_pi(betas[k] - out[j])) < _ANGLE_TIE:
                dup = True
                break
        if not dup:
            out[nout] = betas[k]
            nout += 1
    return nout


def steiner_pair(double R, double r, double d, double alpha):
    """Inner-tangency angles of the two inscribed circles tangent to the
    inscribed circle at angle alpha; 0..2 values in [0, 2*pi)."""
    cdef double out[4]
    cdef int n = _steiner_pair(R, r, d, alpha, out)
    return [out[i] for i in range(n)]


cdef int _sep_circle(double alpha, double x1, double y1,
                     double ein_x, double ein_y, double eout_x, double eout_y):
    cdef double ta = _wrap_2pi(alpha + PI)
    cdef double tb = atan2(y1, x1)
    cdef double span = _wrap_2pi(tb - ta)
    cdef double pin = _wrap_2pi(atan2(ein_y - y1, ein_x - x1) - ta)
    cdef double pout = _wrap_2pi(atan2(eout_y - y1, eout_x - x1) - ta)
    cdef double p, da, db
    cdef int i
    for i in range(2):
        p = pin if i == 0 else pout
        da = p if p < C_TWO_PI - p else C_TWO_PI - p
        db = fabs(p - span)
        if (da if da < db else db) < _ANGLE_TIE:
            return 0
    if (pin < span) != (pout < span):
        return 1
    return -1


cdef int _sep_chord(double R, double phi, double tx, double ty,
                    double ein_x, double ein_y, double eout_x, double eout_y):
    cdef double dirx = -sin(phi)
    cdef double diry = cos(phi)
    cdef double si = dirx * (ein_x - tx) + diry * (ein_y - ty)
    cdef double so = dirx * (eout_x - tx) + diry * (eout_y - ty)
    if fabs(si) < _SEP_TIE_REL * R or fabs(so) < _SEP_TIE_REL * R:
        return 0
    if si * so < 0.0:
        return 1
    return -1


def step_element(double R, double r, double d, tuple elem, str letter,
                 int orientation=1):
    """Build the next chain element.  Returns (status, element-or-None).

    Same selection semantics as the reference backend: exclude the candidate
    contacting `elem` at its entry point, filter by the separation condition,
    break a surviving tie by the smaller progress advance in the
    `orientation` direction (+1 counterclockwise).
    """
    cdef double alpha = 0.0, x1 = 0.0, y1 = 0.0, rho1 = 0.0
    cdef double phi = 0.0, tx = 0.0, ty = 0.0
    cdef double e1x, e1y, e2x, e2y
    cdef double ex, ey
    cdef double cx, cy, beta, psi, phi2, dist
    cdef double ux, uy, gx, gy, eta, ratio, delta, t1, t2
    cdef double cxs[4]
    cdef double cys[4]
    cdef double rhos[4]
    cdef double betas[4]
    cdef int has_entry, n, i, s
    cdef bint is_circle = elem[0] == 'c'
    cdef double base, off, best_off, second_off
    cdef double px, py

    cands = []
    if is_circle:
        alpha = elem[1]
        x1 = elem[2]
        y1 = elem[3]
        rho1 = elem[4]
        ex = elem[5]
        ey = elem[6]
        has_entry = elem[7]
        if letter == 'c':
            n = _steiner_pair(R, r, d, alpha, betas)
            for i in range(n):
                beta = betas[i]
                _inscribed_center(R, r, d, beta, &cxs[0], &cys[0], &rhos[0])
                dist = hypot(cxs[0] - x1, cys[0] - y1)
                if dist == 0.0:
                    continue
                cx = x1 + rho1 * (cxs[0] - x1) / dist
                cy = y1 + rho1 * (cys[0] - y1) / dist
                cands.append((beta, cx, cy,
                              ('c', beta, cxs[0], cys[0], rhos[0], cx, cy, 1)))
        else:
            psi = acos((r - rho1) / (r + rho1))
            for i in range(2):
                phi2 = _wrap_2pi(alpha + psi) if i == 0 else _wrap_2pi(alpha - psi)
                cx = x1 + rho1 * cos(phi2)
                cy = y1 + rho1 * sin(phi2)
                cands.append((phi2, cx, cy, ('s', phi2, cx, cy, 1)))
    else:
        phi = elem[1]
        ex = elem[2]
        ey = elem[3]
        has_entry = elem[4]
        _chord_points(R, r, d, phi, &tx, &ty, &e1x, &e1y, &e2x, &e2y)
        if letter == 'c':
            ux = cos(phi)
            uy = sin(phi)
            n = _tangent_circles_to_chord(R, r, d, phi, cxs, cys, rhos)
            for i in range(n):
                cx = cxs[i] + rhos[i] * ux
                cy = cys[i] + rhos[i] * uy
                beta = _wrap_2pi(atan2(cys[i], cxs[i] - d))
                cands.append((beta, cx, cy,
                              ('c', beta, cxs[i], cys[i], rhos[i], cx, cy, 1)))
        else:
            for i in range(2):
                px = e1x if i == 0 else e2x
                py = e1y if i == 0 else e2y
                gx = px - d
                gy = py
                dist = hypot(gx, gy)
                eta = atan2(gy, gx)
                ratio = r / dist
                if ratio > 1.0:
                    ratio = 1.0
                delta = acos(ratio)
                t1 = _wrap_2pi(eta + delta)
                t2 = _wrap_2pi(eta - delta)
                phi2 = t1 if fabs(_wrap_pi(t1 - phi)) >= fabs(_wrap_pi(t2 - phi)) else t2
                cands.append((phi2, px, py, ('s', phi2, px, py, 1)))

    if has_entry:
        surv = []
        for cand in cands:
            if hypot(<double> cand[1] - ex, <double> cand[2] - ey) < _EXCLUDE_REL * R:
                continue
            if is_circle:
                s = _sep_circle(alpha, x1, y1, ex, ey, cand[1], cand[2])
            else:
                s = _sep_chord(R, phi, tx, ty, ex, ey, cand[1], cand[2])
            if s == 0:
                return TIE, None
            if s > 0:
                surv.append(cand)
    else:
        surv = cands

    if not surv:
        return DEAD_END, None
    if len(surv) == 1:
        return OK, surv[0][3]

    base = elem[1]
    best = None
    best_off = 2.0 * C_TWO_PI
    second_off = 2.0 * C_TWO_PI
    for cand in surv:
        off = _wrap_2pi(orientation * (<double> cand[0] - base))
        if off < best_off:
            second_off = best_off
            best_off = off
            best = cand
        elif off < second_off:
            second_off = off
    if second_off - best_off < _ANGLE_TIE:
        return TIE, None
    return OK, best[3]


def seed_element(double R, double r, double d, str letter, double theta):
    """Seed element with inner tangency at angle theta (no entry contact)."""
    cdef double th = _wrap_2pi(theta)
    cdef double x, y, rho
    if letter == 'c':
        _inscribed_center(R, r, d, th, &x, &y, &rho)
        return ('c', th, x, y, rho, 0.0, 0.0, 0)
    return ('s', th, 0.0, 0.0, 0)


def chain_run(double R, double r, double d, str word, double theta0,
              int orientation=1):
    """Run the cyclic chain for `word` (n letters, n+1 elements).

    Returns (status, fail_index, elements) with the same semantics as the
    reference backend.
    """
    if not _annulus_ok(R, r, d):
        return BAD_ANNULUS, 0, []
    cdef int n = len(word)
    cdef int i
    elems = [seed_element(R, r, d, word[0], theta0)]
    for i in range(1, n + 1):
        status, nxt = step_element(R, r, d, elems[len(elems) - 1],
                                   word[i % n], orientation)
        if status != OK:
            return status, i, elems
        elems.append(nxt)
    return OK, -1, elems


def chain_defect(double R, double r, double d, str word, double theta0,
                 int orientation=1):
    """Monodromy defect: progress of element n+1 minus progress of element 1,
    wrapped to (-pi, pi].  Returns (status, defect)."""
    status, _, elems = chain_run(R, r, d, word, theta0, orientation)
    if status != OK:
        return status, 0.0
    return OK, _wrap_pi(<double> elems[len(elems) - 1][1] - <double> elems[0][1])
