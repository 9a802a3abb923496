"""Independent brute-force validators.

These live in the shipped library (not only in the tests) so the CLI can
expose a ``validate`` command: subdivision checks for the near-field plate
gain and an exhaustive phase grid search for small element counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import nearfield_plate_gain
from .geometry import Point3
from .link import LinkBudget

_MAX_GRID_CELLS = 20_000_000


@dataclass(frozen=True)
class SubdivisionSpec:
    """Number of sub-plates per axis for the additivity oracle."""

    k: int = 2

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("subdivision factor must be >= 2")


def nearfield_gain_subdivided(
    element_center: Point3, side: float, rx: Point3, spec: SubdivisionSpec
) -> float:
    """|g|^2 of a plate computed as the sum over k x k equal sub-plates.

    The plate gain is an exact area integral, so this must agree with the
    whole-plate evaluation up to floating point for any subdivision.
    """
    k = spec.k
    sub = side / k
    start = -side / 2.0 + sub / 2.0
    total = 0.0
    for i in range(k):
        for j in range(k):
            center = Point3(
                element_center.x + start + i * sub,
                element_center.y,
                element_center.z + start + j * sub,
            )
            total += nearfield_plate_gain(center, sub, rx)
    return total


def phase_grid_search(
    h: np.ndarray,
    g: np.ndarray,
    h_siso: complex,
    grid_points: int,
    budget: LinkBudget | None = None,
) -> float:
    """Maximum received SNR over a uniform per-element phase grid.

    Exhaustive search; guarded to at most 4 elements and a bounded total
    grid size. With no budget the SNR is computed at p_t = n_0 = 1.
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = len(h)
    if n > 4:
        raise ValueError("grid search is limited to N <= 4 elements")
    if grid_points < 2:
        raise ValueError("need at least 2 grid points")
    if grid_points**max(n, 1) > _MAX_GRID_CELLS:
        raise ValueError("phase grid too large")
    budget = budget or LinkBudget(p_t_mw=1.0, n_0_mw=1.0)

    products = h * g
    total = np.asarray(h_siso, dtype=complex)
    for i in range(n):
        phases = 2.0 * np.pi * np.arange(grid_points) / grid_points
        term = products[i] * np.exp(1j * phases)
        shape = [1] * n
        shape[i] = grid_points
        total = total + term.reshape(shape)
    best = np.max(np.abs(total) ** 2)
    return float(budget.p_t_mw * best / budget.n_0_mw)
