"""Chain interpreter: words over {c, s} run as tangency chains in an annulus.

A word is read cyclically; letter c places a circle inscribed in the annulus,
letter s a chord of the outer circle tangent to the inner one.  Consecutive
elements are tangent (circle/circle and circle/chord) or share an endpoint
(chord/chord), each new contact is separated from the previous one by the
element's own tangency points, and the candidate repeating the previous
element is excluded.  Progress is measured by the angle of each element's
contact with the inner circle, so the monodromy defect of a run is the wrapped
difference of first and last progress angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from . import _kernels as kern
from .errors import ChainError, DeadEndError, DomainError, TieError
from .geometry import (
    Annulus,
    Chord,
    Circle,
    Point,
    _from_canonical,
    _to_canonical,
    chord_at,
    wrap_2pi,
    wrap_pi,
)

PROGRESS_TOL = 1e-7

CLOSED_EVERYWHERE = "closed-everywhere"
CLOSED_NOWHERE = "closed-nowhere"
MIXED = "mixed"

_LETTERS = frozenset("cs")


@dataclass(frozen=True)
class Word:
    """Cyclic word over {c, s}, at least two letters.

    Words shorter than three letters that use a single letter are flagged:
    the pure-letter closure families only start at length three, so cc and
    ss runs are degenerate bookkeeping cases.
    """

    letters: str

    def __post_init__(self):
        if len(self.letters) < 2:
            raise DomainError("word needs at least two letters")
        if not set(self.letters) <= _LETTERS:
            raise DomainError(f"word must use only c and s: {self.letters!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    def letter(self, i: int) -> str:
        """Cyclic indexing: letter(n) is letter(0)."""
        return self.letters[i % len(self.letters)]

    @property
    def mixed(self) -> bool:
        return len(set(self.letters)) == 2

    @property
    def flagged(self) -> bool:
        return len(self.letters) < 3 and not self.mixed

    def rotated(self, k: int) -> "Word":
        """The same cyclic word read from position k."""
        n = len(self.letters)
        k %= n
        return Word(self.letters[k:] + self.letters[:k])


@dataclass(frozen=True)
class CircleElement:
    """Inscribed circle keyed by its inner-tangency (progress) angle."""

    circle: Circle
    omega_contact: float
    outer_contact: float
    entry_point: Optional[Point] = None

    letter = "c"

    @property
    def progress(self) -> float:
        return self.omega_contact


@dataclass(frozen=True)
class ChordElement:
    """Tangent chord keyed by its inner-tangency (progress) angle."""

    chord: Chord
    omega_contact: float
    entry_point: Optional[Point] = None

    letter = "s"

    @property
    def progress(self) -> float:
        return self.omega_contact


ChainElement = Union[CircleElement, ChordElement]


@dataclass(frozen=True)
class ChainRun:
    """A completed chain: n+1 elements for an n-letter word."""

    annulus: Annulus
    word: Word
    elements: tuple[ChainElement, ...]
    defect: float
    closed: bool


# ---------------------------------------------------------------------------
# kernel element conversion

def _to_world(a: Annulus, elem) -> ChainElement:
    beta = a.axis_angle
    if elem[0] == "c":
        _, alpha, x, y, rho, ex, ey, has_entry = elem
        center = _from_canonical(a, x, y)
        entry = _from_canonical(a, ex, ey) if has_entry else None
        outer = wrap_2pi(math.atan2(y, x) + beta)
        return CircleElement(Circle(center, rho), wrap_2pi(alpha + beta),
                             outer, entry)
    _, phi, ex, ey, has_entry = elem
    omega = wrap_2pi(phi + beta)
    entry = _from_canonical(a, ex, ey) if has_entry else None
    return ChordElement(chord_at(a, omega), omega, entry)


def _to_kernel(a: Annulus, elem: ChainElement):
    beta = a.axis_angle
    if isinstance(elem, CircleElement):
        x, y = _to_canonical(a, elem.circle.center)
        if elem.entry_point is None:
            return ("c", wrap_2pi(elem.omega_contact - beta), x, y,
                    elem.circle.radius, 0.0, 0.0, 0)
        ex, ey = _to_canonical(a, elem.entry_point)
        return ("c", wrap_2pi(elem.omega_contact - beta), x, y,
                elem.circle.radius, ex, ey, 1)
    if elem.entry_point is None:
        return ("s", wrap_2pi(elem.omega_contact - beta), 0.0, 0.0, 0)
    ex, ey = _to_canonical(a, elem.entry_point)
    return ("s", wrap_2pi(elem.omega_contact - beta), ex, ey, 1)


def _raise_for(status: int, index: int, elements) -> None:
    if status == kern.DEAD_END:
        raise DeadEndError(
            f"no successor satisfies the separation condition at index {index}",
            index=index, elements=elements)
    if status == kern.TIE:
        raise TieError(
            f"successor choice is ambiguous within tolerance at index {index}",
            index=index, elements=elements)
    raise ChainError(f"chain failed with status {status} at index {index}",
                     index=index, elements=elements)


# ---------------------------------------------------------------------------
# chain operations

def seed_element(a: Annulus, letter: str, theta: float) -> ChainElement:
    """Starting element with inner tangency at world angle theta."""
    if letter not in _LETTERS:
        raise DomainError(f"letter must be c or s, got {letter!r}")
    alpha = wrap_2pi(theta - a.axis_angle)
    return _to_world(a, kern.seed_element(a.R, a.r, a.d, letter, alpha))


def step(a: Annulus, prev: ChainElement, next_letter: str,
         orientation: int = 1) -> ChainElement:
    """The successor of `prev` for the requested letter.

    Orientation +1 advances counterclockwise when the seed step is ambiguous;
    after that the excluded-candidate rule makes the chain deterministic.
    """
    if next_letter not in _LETTERS:
        raise DomainError(f"letter must be c or s, got {next_letter!r}")
    status, nxt = kern.step_element(a.R, a.r, a.d, _to_kernel(a, prev),
                                    next_letter, orientation)
    if status != kern.OK:
        _raise_for(status, 1, [prev])
    return _to_world(a, nxt)


def run_chain(a: Annulus, w: Word, seed: ChainElement,
              orientation: int = 1, tol: float = PROGRESS_TOL) -> ChainRun:
    """Run the n-letter word from the seed, building n+1 elements.

    closed requires the final element to match the seed: same letter, same
    progress angle within tol, and for circles the same radius within tol*R.
    """
    if seed.letter != w.letter(0):
        raise DomainError(
            f"seed letter {seed.letter!r} does not match word start "
            f"{w.letter(0)!r}")
    elems = [seed]
    kelem = _to_kernel(a, seed)
    n = len(w)
    for i in range(1, n + 1):
        status, nxt = kern.step_element(a.R, a.r, a.d, kelem,
                                        w.letter(i), orientation)
        if status != kern.OK:
            _raise_for(status, i, elems)
        kelem = nxt
        elems.append(_to_world(a, nxt))
    first, last = elems[0], elems[-1]
    defect = wrap_pi(last.progress - first.progress)
    closed = last.letter == first.letter and abs(defect) < tol
    if closed and isinstance(first, CircleElement):
        closed = abs(last.circle.radius - first.circle.radius) < tol * a.R
    return ChainRun(a, w, tuple(elems), defect, closed)


def monodromy_defect(a: Annulus, w: Word, theta: float,
                     orientation: int = 1) -> float:
    """Defect of the chain seeded at world angle theta."""
    alpha = wrap_2pi(theta - a.axis_angle)
    status, defect = kern.chain_defect(a.R, a.r, a.d, w.letters, alpha,
                                       orientation)
    if status != kern.OK:
        run = kern.chain_run(a.R, a.r, a.d, w.letters, alpha, orientation)
        _raise_for(status, run[1], [_to_world(a, e) for e in run[2]])
    return defect


def is_closure_config(a: Annulus, w: Word, grid_size: int = 64,
                      tol: float = 1e-8) -> str:
    """All-or-nothing closure verdict over a uniform seed grid.

    closed-everywhere: every seed runs to completion and the worst |defect|
    is below tol.  closed-nowhere: every seed either fails to complete or
    has |defect| above 10*tol.  Anything in between is mixed, which signals
    a word without the all-or-nothing property or numerical trouble.
    """
    if grid_size < 8:
        raise DomainError(f"grid size must be at least 8, got {grid_size}")
    defects = []
    dead = 0
    for i in range(grid_size):
        theta = 2.0 * math.pi * i / grid_size
        try:
            defects.append(abs(monodromy_defect(a, w, theta)))
        except ChainError:
            dead += 1
    if not defects:
        return CLOSED_NOWHERE
    if dead == 0 and max(defects) < tol:
        return CLOSED_EVERYWHERE
    if min(defects) > 10.0 * tol:
        return CLOSED_NOWHERE
    return MIXED
