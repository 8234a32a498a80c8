"""
Roots of the monic cubic x^3 - c2 x^2 + c1 x - c0.

Used for the characteristic polynomials of the fluctuation spectrum, both
the cubic in eps^2 and its signed factor in eps.
"""

import logging
import math

import numpy as np

from .constants import CUBIC_POLISH_STEPS

logger = logging.getLogger(__name__)


def evaluate(c2, c1, c0, x):
    """Value and derivative of x^3 - c2 x^2 + c1 x - c0 (Horner)"""
    value = ((x - c2) * x + c1) * x - c0
    slope = (3.0 * x - 2.0 * c2) * x + c1
    return value, slope


def _trigonometric_roots(c2, c1, c0):
    # x = t + c2/3 gives the depressed cubic t^3 + p t + q = 0
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c2 * c1 / 3.0 - c0
    shift = c2 / 3.0
    if p >= 0.0:
        # p <= 0 whenever all roots are real; p = 0 is the triple root
        if p == 0.0 or abs(q) <= 1e-15 * max(1.0, abs(c2) ** 3):
            return np.array([shift, shift, shift]), True
        return None, False

    radius = 2.0 * math.sqrt(-p / 3.0)
    argument = 3.0 * q / (p * radius)
    if abs(argument) > 1.0 + 1e-12:
        return None, False
    # |argument| = 1 within round-off is the zero-discriminant (double root) case
    argument = min(1.0, max(-1.0, argument))
    angle = math.acos(argument) / 3.0
    roots = np.array([radius * math.cos(angle - 2.0 * math.pi * k / 3.0) + shift for k in range(3)])
    return np.sort(roots), True


def polish(c2, c1, c0, roots):
    """
    Newton steps on each real root. A step is taken only while it lowers
    |f| and stays within half the distance to the nearest other root, so
    coincident roots are left where the closed form put them.
    """
    roots = np.array(roots, dtype=float)
    for i in range(len(roots)):
        others = np.delete(roots, i)
        gap = float(np.min(np.abs(others - roots[i])))
        x = float(roots[i])
        value, slope = evaluate(c2, c1, c0, x)
        for _ in range(CUBIC_POLISH_STEPS):
            if value == 0.0 or slope == 0.0:
                break
            step = value / slope
            if abs(step) >= 0.5 * gap:
                break
            candidate = x - step
            candidate_value, candidate_slope = evaluate(c2, c1, c0, candidate)
            if abs(candidate_value) >= abs(value):
                break
            x, value, slope = candidate, candidate_value, candidate_slope
        roots[i] = x
    return np.sort(roots)


def real_cubic_roots(c2, c1, c0):
    """
    Roots of x^3 - c2 x^2 + c1 x - c0, ascending.

    Returns (roots, all_real). With three real roots the trigonometric
    solution is refined by Newton polishing, which keeps small roots
    accurate to relative precision. When the cubic has a complex pair the
    roots come from numpy.roots (sorted as complex numbers) and all_real is
    False.
    """
    c2, c1, c0 = float(c2), float(c1), float(c0)
    roots, real = _trigonometric_roots(c2, c1, c0)
    if not real:
        roots = np.sort_complex(np.roots([1.0, -c2, c1, -c0]))
        logger.debug(f"Cubic ({c2!r}, {c1!r}, {c0!r}) has complex roots {roots!r}")
        return roots, False
    return polish(c2, c1, c0, roots), True
