"""Pure-Python chain kernels.

Reference implementation of the hot geometric kernels; the compiled backend
(`closurelab._kernels._fast`) mirrors it statement for statement so the two
produce identical floating-point results.

All functions work in the canonical frame: outer circle of radius R centred at
the origin, inner circle of radius r centred at (d, 0), with d >= 0 and
d + r < R.  Chain elements are flat tuples:

    circle: ('c', omega_angle, x, y, rho, entry_x, entry_y, has_entry)
    chord:  ('s', omega_angle, entry_x, entry_y, has_entry)

omega_angle is the angle, seen from the inner centre, of the element's
tangency point on the inner circle; it is the chain's progress coordinate.
The entry fields hold the element's contact point with its predecessor
(has_entry == 0 for seeds).
"""

import math

BACKEND = "python"

OK = 0
DEAD_END = 1
TIE = 2
BAD_ANNULUS = 3

TWO_PI = 2.0 * math.pi

_BRACKETS = 64
_BISECT_TOL = 1e-12
_NEWTON_TOL = 1e-15
_EXCLUDE_REL = 1e-7
_ANGLE_TIE = 1e-12
_SEP_TIE_REL = 1e-12
_DEDUPE_REL = 1e-9


def wrap_2pi(x):
    """Wrap an angle to [0, 2*pi)."""
    y = x - math.floor(x / TWO_PI) * TWO_PI
    if y >= TWO_PI:
        y -= TWO_PI
    return y


def wrap_pi(x):
    """Wrap an angle to (-pi, pi]."""
    y = wrap_2pi(x)
    if y > math.pi:
        y -= TWO_PI
    return y


def annulus_ok(R, r, d):
    return R > 0.0 and r > 0.0 and d >= 0.0 and d + r < R


def inscribed_rho(R, r, d, alpha):
    """Radius of the inscribed circle whose inner tangency sits at angle alpha."""
    ca = math.cos(alpha)
    return (R * R - d * d - r * r - 2.0 * r * d * ca) / (2.0 * (R + r + d * ca))


def inscribed_center(R, r, d, alpha):
    """Centre and radius (x, y, rho) of the inscribed circle at angle alpha."""
    rho = inscribed_rho(R, r, d, alpha)
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    return d + (r + rho) * ca, (r + rho) * sa, rho


def chord_points(R, r, d, phi):
    """Tangency point and endpoints of the chord tangent at angle phi.

    Returns (tx, ty, e1x, e1y, e2x, e2y) with the endpoints ordered by
    ascending parameter along the direction (-sin phi, cos phi).
    """
    cp = math.cos(phi)
    sp = math.sin(phi)
    tx = d + r * cp
    ty = r * sp
    b = tx * (-sp) + ty * cp
    disc = b * b - (tx * tx + ty * ty - R * R)
    root = math.sqrt(disc)
    s1 = -b - root
    s2 = -b + root
    return tx, ty, tx - s1 * sp, ty + s1 * cp, tx - s2 * sp, ty + s2 * cp


def _chord_g(d, r, ux, uy, ct, ecx, ae, be, E):
    # Tangency-to-the-chord condition evaluated on the ellipse of centres:
    # zero exactly at the centres of the circles tangent to the chord.
    x = ecx + ae * math.cos(E)
    y = be * math.sin(E)
    return math.hypot(x - d, y) - r + (ux * x + uy * y - ct)


def tangent_circles_to_chord(R, r, d, phi):
    """Inscribed circles tangent to the chord whose inner tangency is at phi.

    The centres lie on the ellipse with foci at both circle centres and axis
    sum R + r; the chord-tangency condition is bracketed over 64 nodes of the
    eccentric anomaly, bisected, and polished with Newton on the three
    tangency residuals.  Returns a list of 0..2 (x, y, rho) triples ordered by
    anomaly.
    """
    ux = math.cos(phi)
    uy = math.sin(phi)
    ct = d * ux + r
    ecx = 0.5 * d
    ae = 0.5 * (R + r)
    be = math.sqrt(ae * ae - ecx * ecx)

    h = TWO_PI / _BRACKETS
    gs = [_chord_g(d, r, ux, uy, ct, ecx, ae, be, j * h) for j in range(_BRACKETS)]
    roots = []
    for j in range(_BRACKETS):
        a = j * h
        b = a + h
        ga = gs[j]
        gb = gs[j + 1] if j + 1 < _BRACKETS else gs[0]
        if ga == 0.0:
            roots.append(a)
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
        roots.append(0.5 * (a + b))

    out = []
    for E in roots:
        x = ecx + ae * math.cos(E)
        y = be * math.sin(E)
        rho = ct - (ux * x + uy * y)
        for _ in range(12):
            n1 = math.hypot(x, y)
            n2 = math.hypot(x - d, y)
            if n1 == 0.0 or n2 == 0.0:
                break
            f1 = n1 - (R - rho)
            f2 = n2 - (r + rho)
            f3 = (ux * x + uy * y - ct) + rho
            if max(abs(f1), abs(f2), abs(f3)) <= _NEWTON_TOL * R:
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
        for px, py, _ in out:
            if math.hypot(x - px, y - py) < _DEDUPE_REL * R:
                dup = True
                break
        if not dup:
            out.append((x, y, rho))
    return out


def _steiner_f(R, r, d, x1, y1, rho1, beta):
    x, y, rho = inscribed_center(R, r, d, beta)
    return math.hypot(x - x1, y - y1) - rho1 - rho


def steiner_pair(R, r, d, alpha):
    """Inner-tangency angles of the two inscribed circles tangent to the
    inscribed circle at angle alpha.  Bracketed bisection plus a short Newton
    polish with the analytic derivative; returns 0..2 angles in [0, 2*pi)."""
    x1, y1, rho1 = inscribed_center(R, r, d, alpha)
    h = TWO_PI / _BRACKETS
    gs = [_steiner_f(R, r, d, x1, y1, rho1, j * h) for j in range(_BRACKETS)]
    betas = []
    for j in range(_BRACKETS):
        a = j * h
        b = a + h
        ga = gs[j]
        gb = gs[j + 1] if j + 1 < _BRACKETS else gs[0]
        if ga == 0.0:
            betas.append(a)
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
        for _ in range(4):
            cb = math.cos(beta)
            sb = math.sin(beta)
            den = R + r + d * cb
            rho = (R * R - d * d - r * r - 2.0 * r * d * cb) / (2.0 * den)
            rhop = d * sb * sum2 / (2.0 * den * den)
            x = d + (r + rho) * cb
            y = (r + rho) * sb
            dist = math.hypot(x - x1, y - y1)
            if dist == 0.0:
                break
            f = dist - rho1 - rho
            dxb = rhop * cb - (r + rho) * sb
            dyb = rhop * sb + (r + rho) * cb
            fp = ((x - x1) * dxb + (y - y1) * dyb) / dist - rhop
            if fp == 0.0:
                break
            beta -= f / fp
        betas.append(wrap_2pi(beta))

    out = []
    for beta in betas:
        dup = False
        for prev in out:
            if abs(wrap_pi(beta - prev)) < _ANGLE_TIE:
                dup = True
                break
        if not dup:
            out.append(beta)
    return out


def _sep_circle(alpha, x1, y1, ein_x, ein_y, eout_x, eout_y):
    # Entry and exit contacts must fall in different arcs of the circle
    # element, cut by its tangency points with the inner and outer circles.
    ta = wrap_2pi(alpha + math.pi)
    tb = math.atan2(y1, x1)
    span = wrap_2pi(tb - ta)
    pin = wrap_2pi(math.atan2(ein_y - y1, ein_x - x1) - ta)
    pout = wrap_2pi(math.atan2(eout_y - y1, eout_x - x1) - ta)
    for p in (pin, pout):
        da = min(p, TWO_PI - p)
        db = abs(p - span)
        if min(da, db) < _ANGLE_TIE:
            return 0
    if (pin < span) != (pout < span):
        return 1
    return -1


def _sep_chord(R, phi, tx, ty, ein_x, ein_y, eout_x, eout_y):
    # Entry and exit contacts must lie on opposite sides of the chord's
    # tangency point with the inner circle.
    dirx = -math.sin(phi)
    diry = math.cos(phi)
    si = dirx * (ein_x - tx) + diry * (ein_y - ty)
    so = dirx * (eout_x - tx) + diry * (eout_y - ty)
    if abs(si) < _SEP_TIE_REL * R or abs(so) < _SEP_TIE_REL * R:
        return 0
    if si * so < 0.0:
        return 1
    return -1


def step_element(R, r, d, elem, letter, orientation=1):
    """Build the next chain element.  Returns (status, element-or-None).

    Candidates tangent to `elem` are generated for the requested letter, the
    one contacting `elem` at its entry point is excluded (second-solution
    rule), the separation condition filters the rest, and a remaining tie is
    broken by the smaller progress advance in the `orientation` direction
    (+1 counterclockwise).
    """
    cands = []
    if elem[0] == 'c':
        _, alpha, x1, y1, rho1, ex, ey, has_entry = elem
        if letter == 'c':
            for beta in steiner_pair(R, r, d, alpha):
                x2, y2, rho2 = inscribed_center(R, r, d, beta)
                dist = math.hypot(x2 - x1, y2 - y1)
                if dist == 0.0:
                    continue
                cx = x1 + rho1 * (x2 - x1) / dist
                cy = y1 + rho1 * (y2 - y1) / dist
                cands.append((beta, cx, cy, ('c', beta, x2, y2, rho2, cx, cy, 1)))
        else:
            psi = math.acos((r - rho1) / (r + rho1))
            for phi2 in (wrap_2pi(alpha + psi), wrap_2pi(alpha - psi)):
                cx = x1 + rho1 * math.cos(phi2)
                cy = y1 + rho1 * math.sin(phi2)
                cands.append((phi2, cx, cy, ('s', phi2, cx, cy, 1)))
    else:
        _, phi, ex, ey, has_entry = elem
        tx, ty, e1x, e1y, e2x, e2y = chord_points(R, r, d, phi)
        if letter == 'c':
            ux = math.cos(phi)
            uy = math.sin(phi)
            for x2, y2, rho2 in tangent_circles_to_chord(R, r, d, phi):
                cx = x2 + rho2 * ux
                cy = y2 + rho2 * uy
                beta = wrap_2pi(math.atan2(y2, x2 - d))
                cands.append((beta, cx, cy, ('c', beta, x2, y2, rho2, cx, cy, 1)))
        else:
            for px, py in ((e1x, e1y), (e2x, e2y)):
                gx = px - d
                gy = py
                dist = math.hypot(gx, gy)
                eta = math.atan2(gy, gx)
                ratio = r / dist
                if ratio > 1.0:
                    ratio = 1.0
                delta = math.acos(ratio)
                t1 = wrap_2pi(eta + delta)
                t2 = wrap_2pi(eta - delta)
                phi2 = t1 if abs(wrap_pi(t1 - phi)) >= abs(wrap_pi(t2 - phi)) else t2
                cands.append((phi2, px, py, ('s', phi2, px, py, 1)))

    if has_entry:
        surv = []
        for cand in cands:
            if math.hypot(cand[1] - ex, cand[2] - ey) < _EXCLUDE_REL * R:
                continue
            if elem[0] == 'c':
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
    best_off = 2.0 * TWO_PI
    second_off = 2.0 * TWO_PI
    for cand in surv:
        off = wrap_2pi(orientation * (cand[0] - base))
        if off < best_off:
            second_off = best_off
            best_off = off
            best = cand
        elif off < second_off:
            second_off = off
    if second_off - best_off < _ANGLE_TIE:
        return TIE, None
    return OK, best[3]


def seed_element(R, r, d, letter, theta):
    """Seed element with inner tangency at angle theta (no entry contact)."""
    th = wrap_2pi(theta)
    if letter == 'c':
        x, y, rho = inscribed_center(R, r, d, th)
        return ('c', th, x, y, rho, 0.0, 0.0, 0)
    return ('s', th, 0.0, 0.0, 0)


def chain_run(R, r, d, word, theta0, orientation=1):
    """Run the cyclic chain for `word` (n letters, n+1 elements).

    Returns (status, fail_index, elements).  On success fail_index is -1 and
    elements holds n+1 tuples; on failure elements is the completed prefix and
    fail_index the 0-based index of the element that could not be built.
    """
    if not annulus_ok(R, r, d):
        return BAD_ANNULUS, 0, []
    n = len(word)
    elems = [seed_element(R, r, d, word[0], theta0)]
    for i in range(1, n + 1):
        status, nxt = step_element(R, r, d, elems[-1], word[i % n], orientation)
        if status != OK:
            return status, i, elems
        elems.append(nxt)
    return OK, -1, elems


def chain_defect(R, r, d, word, theta0, orientation=1):
    """Monodromy defect: progress of element n+1 minus progress of element 1,
    wrapped to (-pi, pi].  Returns (status, defect)."""
    status, _, elems = chain_run(R, r, d, word, theta0, orientation)
    if status != OK:
        return status, 0.0
    return OK, wrap_pi(elems[-1][1] - elems[0][1])
