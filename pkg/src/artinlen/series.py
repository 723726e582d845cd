"""Betti sequences, Poincare series and limits of ratios.

All comparisons are done with :class:`fractions.Fraction`; floats appear
only in reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import LocalAlgebra
from .modules import FreeMatrix, ModulePresentation
from .resolution import DEFAULT_CAP, resolve

__all__ = [
    "RatioReport",
    "residue_field",
    "poincare_of_k",
    "rational_expansion",
    "fit_rational",
    "ratios",
    "ratio_limit_check",
    "alternating_tail",
    "partial_euler",
]


def residue_field(A: LocalAlgebra) -> ModulePresentation:
    """k = A / m, presented by the 1 x v row of variable images."""
    entries = np.asarray(A.gens, dtype=np.int64).reshape(1, A.nvars, A.dim)
    return ModulePresentation(FreeMatrix(A, entries), name="k")


def poincare_of_k(A: LocalAlgebra, stages: int, cap: int = DEFAULT_CAP) -> list[int]:
    """beta_0(k), ..., beta_stages(k)."""
    table, _ = resolve(residue_field(A), stages, cap=cap, periodicity=False)
    return table.betti


def rational_expansion(d: int, a: int, terms: int) -> list[int]:
    """Coefficients of 1 / (1 - d z + a z^2)."""
    out: list[int] = []
    for i in range(terms):
        if i == 0:
            out.append(1)
        elif i == 1:
            out.append(d)
        else:
            out.append(d * out[-1] - a * out[-2])
    return out


def fit_rational(seq: Sequence[int], d: int, a: int) -> bool:
    """Does ``seq`` agree with the expansion of 1/(1 - dz + az^2) term by term?"""
    seq = [int(b) for b in seq]
    return bool(seq) and seq == rational_expansion(d, a, len(seq))


def ratios(seq: Sequence[int]) -> list[Optional[Fraction]]:
    """beta_{n+1} / beta_n, or None where beta_n = 0."""
    return [Fraction(int(b1), int(b0)) if b0 else None for b0, b1 in zip(seq, seq[1:])]


def _roots(d: int, a: int):
    # reciprocal roots of 1 - dz + az^2, when they are integers
    disc = d * d - 4 * a
    if disc < 0:
        return None
    s = int(round(disc ** 0.5))
    if s * s != disc or (d + s) % 2:
        return None
    return (d - s) // 2, (d + s) // 2


@dataclass
class RatioReport:
    ratios: list[Optional[Fraction]]
    window: tuple[int, int]
    expected: Fraction
    tol: Fraction
    tail_estimate: Optional[Fraction]
    passed: bool
    closed_form: Optional[bool] = None  # matched 1/(1-dz+az^2) and its root
    alternating: list[Fraction] = field(default_factory=list)

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            "ratios": [f(r) for r in self.ratios],
            "window": list(self.window),
            "expected": f(self.expected),
            "tol": f(self.tol),
            "tail_estimate": f(self.tail_estimate),
            "passed": self.passed,
            "closed_form": self.closed_form,
            "alternating": [f(r) for r in self.alternating],
        }


def ratio_limit_check(seq: Sequence[int], h, tol=Fraction(1, 100), window=None,
                      fit: Optional[tuple[int, int]] = None) -> RatioReport:
    """Check |beta_{n+1}/beta_n - h| < tol for every n in the window.

    ``window`` is an inclusive pair (lo, hi) of indices n (ratios use
    beta_{n+1}), defaulting to the last four ratios.  With ``fit = (d, a)``
    the sequence is also compared with the expansion of 1/(1-dz+az^2) and
    the larger reciprocal root of that polynomial is compared with ``h``
    exactly.
    """
    h = Fraction(h)
    tol = Fraction(tol).limit_denominator(10**12) if isinstance(tol, float) else Fraction(tol)
    rs = ratios(seq)
    if window is None:
        window = (max(0, len(rs) - 4), len(rs) - 1)
    lo, hi = window
    if lo < 0 or hi >= len(rs) or lo > hi:
        raise ValueError(f"window {window} outside the {len(rs)} available ratios")
    chosen = rs[lo:hi + 1]
    passed = all(r is not None and abs(r - h) < tol for r in chosen)
    closed = None
    if fit is not None:
        d, a = fit
        roots = _roots(d, a)
        closed = fit_rational(seq, d, a) and roots is not None and Fraction(roots[1]) == h
        passed = passed and closed
    return RatioReport(ratios=rs, window=(lo, hi), expected=h, tol=tol,
                       tail_estimate=chosen[-1], passed=passed, closed_form=closed)


def alternating_tail(theta: Sequence, n: int, start: int = 0) -> Fraction:
    """r_n = sum_{j >= 0} (-1)^j theta_{n-1-j} / theta_n, exactly.

    ``theta[i]`` is theta_{start + i}; theta_m is taken to be 0 for
    m < start.  theta_n must be available and nonzero.
    """
    idx = n - start
    if idx < 0 or idx >= len(theta):
        raise ValueError(f"theta_{n} is not available (start {start}, {len(theta)} terms)")
    top = Fraction(theta[idx])
    if top == 0:
        raise ZeroDivisionError("theta_n is zero")
    total = Fraction(0)
    sign = 1
    for m in range(idx - 1, -1, -1):
        total += sign * Fraction(theta[m])
        sign = -sign
    return total / top


def partial_euler(H: Sequence[int], m: int = 0) -> int:
    """chi_m = sum_{j >= 0} (-1)^j H[m + j] for a finite homology list."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return sum((-1) ** j * int(x) for j, x in enumerate(H[m:]))
