"""Tests for the chain kernels: reference semantics and backend parity."""

import math
import random

import pytest

from closurelab import _kernels as kern
from closurelab._kernels import _reference as ref

try:
    from closurelab._kernels import _fast as fast
except ImportError:  # pure wheel
    fast = None

TWO_PI = 2.0 * math.pi

needs_compiled = pytest.mark.skipif(fast is None,
                                    reason="compiled kernel not built")


def random_valid(rng, margin=0.05):
    r = rng.uniform(0.05, 0.45)
    d = rng.uniform(0.0, 1.0 - r - margin)
    return 1.0, r, d


class TestScalarHelpers:
    def test_wrap_2pi_range(self):
        for x in (-7.0, -math.pi, 0.0, 1.0, 9.5):
            w = ref.wrap_2pi(x)
            assert 0.0 <= w < TWO_PI
            assert math.remainder(w - x, TWO_PI) == pytest.approx(0.0,
                                                                  abs=1e-12)

    def test_wrap_pi_range(self):
        for x in (-7.0, -math.pi, 0.0, 1.0, 9.5):
            w = ref.wrap_pi(x)
            assert -math.pi < w <= math.pi

    def test_annulus_predicate(self):
        assert ref.annulus_ok(3.0, 1.0, 1.5)
        assert not ref.annulus_ok(3.0, 1.0, 2.0)
        assert not ref.annulus_ok(3.0, 1.0, -0.1)
        assert not ref.annulus_ok(0.0, 1.0, 0.0)
        assert not ref.annulus_ok(3.0, 0.0, 0.0)


class TestInscribedCircle:
    def test_closed_form_radius(self):
        # rho = (R^2 - d^2 - r^2 - 2 r d cos a) / (2 (R + r + d cos a))
        R, r, d = 3.5, 1.0, 1.5
        for alpha in (0.0, 0.9, 2.0, math.pi, 4.5):
            rho = ref.inscribed_rho(R, r, d, alpha)
            num = R * R - d * d - r * r - 2.0 * r * d * math.cos(alpha)
            den = 2.0 * (R + r + d * math.cos(alpha))
            assert rho == pytest.approx(num / den)

    def test_tangency_residuals(self):
        rng = random.Random(3)
        for _ in range(50):
            R, r, d = random_valid(rng)
            alpha = rng.uniform(0.0, TWO_PI)
            x, y, rho = ref.inscribed_center(R, r, d, alpha)
            assert rho > 0.0
            assert math.hypot(x, y) == pytest.approx(R - rho, abs=1e-12)
            assert math.hypot(x - d, y) == pytest.approx(r + rho, abs=1e-12)
            assert math.atan2(y, x - d) == pytest.approx(
                ref.wrap_pi(alpha), abs=1e-12)


class TestChordPoints:
    def test_endpoints_on_outer_circle(self):
        rng = random.Random(4)
        for _ in range(50):
            R, r, d = random_valid(rng)
            phi = rng.uniform(0.0, TWO_PI)
            tx, ty, e1x, e1y, e2x, e2y = ref.chord_points(R, r, d, phi)
            assert math.hypot(e1x, e1y) == pytest.approx(R, abs=1e-12)
            assert math.hypot(e2x, e2y) == pytest.approx(R, abs=1e-12)
            assert math.hypot(tx - d, ty) == pytest.approx(r, abs=1e-12)
            # tangency between the endpoints
            ux, uy = -math.sin(phi), math.cos(phi)
            s1 = ux * (e1x - tx) + uy * (e1y - ty)
            s2 = ux * (e2x - tx) + uy * (e2y - ty)
            assert s1 * s2 < 0.0


class TestTangentCirclesToChord:
    def newton_oracle(self, R, r, d, phi, grid=48):
        """Damped Newton on the 3-residual system from dense starts."""
        ux, uy = math.cos(phi), math.sin(phi)
        ct = ux * d + r
        found = []
        for i in range(grid):
            alpha = TWO_PI * i / grid
            x, y, rho = ref.inscribed_center(R, r, d, alpha)
            for _ in range(80):
                do = math.hypot(x, y)
                di = math.hypot(x - d, y)
                if do == 0.0 or di == 0.0:
                    break
                f1 = do - (R - rho)
                f2 = di - (r + rho)
                f3 = (ux * x + uy * y - ct) + rho
                j = [[x / do, y / do, 1.0],
                     [(x - d) / di, y / di, -1.0],
                     [ux, uy, 1.0]]
                det = (j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
                       - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
                       + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]))
                if abs(det) < 1e-14:
                    break
                # Cramer solve for the Newton step
                def rep(col, vals, jj=j):
                    m = [row[:] for row in jj]
                    for k in range(3):
                        m[k][col] = vals[k]
                    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                            - m[0][1] * (m[1][0] * m[2][2]
                                         - m[1][2] * m[2][0])
                            + m[0][2] * (m[1][0] * m[2][1]
                                         - m[1][1] * m[2][0]))
                rhs = [-f1, -f2, -f3]
                dx = rep(0, rhs) / det
                dy = rep(1, rhs) / det
                dr = rep(2, rhs) / det
                scale = 1.0
                if rho + dr <= 0.0:
                    scale = 0.5 * rho / max(-dr, 1e-300)
                x += scale * dx
                y += scale * dy
                rho += scale * dr
                if max(abs(dx), abs(dy), abs(dr)) < 1e-14:
                    break
            do = math.hypot(x, y)
            di = math.hypot(x - d, y)
            ok = (abs(do - (R - rho)) < 1e-10
                  and abs(di - (r + rho)) < 1e-10
                  and abs(ux * x + uy * y - ct + rho) < 1e-10
                  and rho > 1e-12)
            if ok and all(math.hypot(x - fx, y - fy) > 1e-7
                          for fx, fy, _ in found):
                found.append((x, y, rho))
        return found

    def test_matches_newton_oracle(self):
        rng = random.Random(11)
        for _ in range(20):
            R, r, d = random_valid(rng)
            phi = rng.uniform(0.0, TWO_PI)
            got = sorted(ref.tangent_circles_to_chord(R, r, d, phi))
            want = sorted(self.newton_oracle(R, r, d, phi))
            assert len(got) == len(want) == 2
            for g, w in zip(got, want):
                assert g[0] == pytest.approx(w[0], abs=1e-9)
                assert g[1] == pytest.approx(w[1], abs=1e-9)
                assert g[2] == pytest.approx(w[2], abs=1e-9)

    def test_residuals(self):
        rng = random.Random(12)
        for _ in range(50):
            R, r, d = random_valid(rng)
            phi = rng.uniform(0.0, TWO_PI)
            sols = ref.tangent_circles_to_chord(R, r, d, phi)
            assert len(sols) == 2
            ux, uy = math.cos(phi), math.sin(phi)
            ct = ux * d + r
            for x, y, rho in sols:
                assert rho > 0.0
                assert math.hypot(x, y) == pytest.approx(R - rho, abs=1e-11)
                assert math.hypot(x - d, y) == pytest.approx(r + rho,
                                                             abs=1e-11)
                assert ct - (ux * x + uy * y) == pytest.approx(rho,
                                                               abs=1e-11)


class TestSteinerPair:
    def test_concentric_closed_form(self):
        # neighbour separation 2*arcsin((R-r)/(R+r))
        R, r = 3.0, 1.0
        betas = sorted(ref.wrap_pi(b) for b in ref.steiner_pair(R, r, 0.0,
                                                                0.0))
        expect = 2.0 * math.asin((R - r) / (R + r))
        assert betas[0] == pytest.approx(-expect)
        assert betas[1] == pytest.approx(expect)

    def test_tangency_general(self):
        rng = random.Random(13)
        for _ in range(50):
            R, r, d = random_valid(rng)
            alpha = rng.uniform(0.0, TWO_PI)
            x1, y1, rho1 = ref.inscribed_center(R, r, d, alpha)
            pair = ref.steiner_pair(R, r, d, alpha)
            assert len(pair) == 2
            for beta in pair:
                x2, y2, rho2 = ref.inscribed_center(R, r, d, beta)
                gap = math.hypot(x2 - x1, y2 - y1) - rho1 - rho2
                assert gap == pytest.approx(0.0, abs=1e-10)


class TestChainKernel:
    def test_certified_closures(self):
        cases = [
            ("cscs", 3.0, 1.0, 0.0),
            ("cscscs", 7.0, 1.0, 0.0),
            ("cscscscs", 7.0 + 4.0 * math.sqrt(2.0), 1.0, 0.0),
            ("sss", 2.0, 1.0, 0.0),
            ("cccccc", 3.0, 1.0, 0.0),
            ("cscs", 1.0, 0.2, math.sqrt(0.48)),
        ]
        for word, R, r, d in cases:
            for theta in (0.0, 0.7, 2.9):
                status, defect = ref.chain_defect(R, r, d, word, theta)
                assert status == ref.OK
                assert abs(defect) < 1e-9, (word, R, r, d, theta, defect)

    def test_bad_annulus_status(self):
        status, _, elems = ref.chain_run(3.0, 1.0, 2.5, "cscs", 0.0)
        assert status == ref.BAD_ANNULUS
        assert elems == []

    def test_element_counts(self):
        status, idx, elems = ref.chain_run(3.0, 1.0, 0.0, "cscs", 0.0)
        assert status == ref.OK
        assert idx == -1
        assert len(elems) == 5


class TestBackendSelection:
    def test_module_exports_backend(self):
        assert kern.BACKEND in ("python", "compiled")

    def test_get_backend_names(self):
        assert kern.get_backend("python").BACKEND == "python"
        with pytest.raises(ValueError):
            kern.get_backend("fortran")

    @needs_compiled
    def test_compiled_flag(self):
        assert kern.get_backend("compiled").BACKEND == "compiled"


@needs_compiled
class TestBackendParity:
    """The compiled kernel must agree with the reference to near-ulp level."""

    def test_scalar_functions(self):
        rng = random.Random(17)
        for _ in range(200):
            R, r, d = random_valid(rng)
            a = rng.uniform(-10.0, 10.0)
            assert fast.wrap_2pi(a) == pytest.approx(ref.wrap_2pi(a),
                                                     abs=1e-15)
            assert fast.inscribed_rho(R, r, d, a) == pytest.approx(
                ref.inscribed_rho(R, r, d, a), abs=1e-14)

    def test_geometry_functions(self):
        rng = random.Random(18)
        for _ in range(100):
            R, r, d = random_valid(rng)
            alpha = rng.uniform(0.0, TWO_PI)
            pc = ref.inscribed_center(R, r, d, alpha)
            fc = fast.inscribed_center(R, r, d, alpha)
            for p, f in zip(pc, fc):
                assert f == pytest.approx(p, abs=1e-13)
            pch = ref.chord_points(R, r, d, alpha)
            fch = fast.chord_points(R, r, d, alpha)
            for p, f in zip(pch, fch):
                assert f == pytest.approx(p, abs=1e-13)

    def test_solver_functions(self):
        rng = random.Random(19)
        for _ in range(60):
            R, r, d = random_valid(rng)
            phi = rng.uniform(0.0, TWO_PI)
            ps = sorted(ref.tangent_circles_to_chord(R, r, d, phi))
            fs = sorted(fast.tangent_circles_to_chord(R, r, d, phi))
            assert len(ps) == len(fs)
            for p, f in zip(ps, fs):
                for a, b in zip(p, f):
                    assert b == pytest.approx(a, abs=1e-12)
            pb = sorted(ref.steiner_pair(R, r, d, phi))
            fb = sorted(fast.steiner_pair(R, r, d, phi))
            assert len(pb) == len(fb) == 2
            for a, b in zip(pb, fb):
                assert b == pytest.approx(a, abs=1e-12)

    def test_chain_defects(self):
        rng = random.Random(20)
        words = ["cscs", "sss", "cccccc", "ccss", "cscscs"]
        checked = 0
        for _ in range(200):
            R, r, d = random_valid(rng)
            word = rng.choice(words)
            theta = rng.uniform(0.0, TWO_PI)
            ps, pd = ref.chain_defect(R, r, d, word, theta)
            fs, fd = fast.chain_defect(R, r, d, word, theta)
            assert fs == ps
            if ps == ref.OK:
                assert fd == pytest.approx(pd, abs=1e-12)
                checked += 1
        assert checked > 100
