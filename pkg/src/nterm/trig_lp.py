"""Evaluation of trigonometric polynomials and L_p norms on the torus.

Values are computed by direct summation of ``sum_k c_k e^{i(k, x)}`` on
the uniform grid ``x_j = 2 pi j / N`` per coordinate, and L_p norms by
the rectangle rule ``((1/N^d) sum |f(x_j)|^p)^(1/p)``, normalized so a
single exponential has norm 1 for every p.

For even integer p the rectangle rule integrates ``|f|^p`` exactly (up
to rounding) whenever ``N > p * max|k|_inf``, since the integrand is a
trigonometric polynomial of per-coordinate degree at most
``p * max|k|_inf`` and the grid annihilates every nonzero frequency not
divisible by N.  Other p report a plain Riemann sum;
:func:`is_exact_quadrature` distinguishes the two cases.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .approx import CoefficientSequence, sp_norm
from .lattice import BudgetExceededError

DEFAULT_GRID_BUDGET = 2**24


def grid_budget(override: int | None = None) -> int:
    """Grid-point budget (env NTERM_BUDGET_POINTS overrides the default)."""
    if override is not None:
        return int(override)
    return int(os.environ.get("NTERM_BUDGET_POINTS", DEFAULT_GRID_BUDGET))


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid with N points per coordinate on [0, 2 pi)^d."""

    d: int
    N: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"need d >= 1, got d={self.d}")
        if self.N < 1:
            raise ValueError(f"need N >= 1, got N={self.N}")

    @property
    def total_points(self) -> int:
        return self.N**self.d


def max_abs_frequency(f: CoefficientSequence) -> int:
    """max_k |k|_inf over the support (0 for the empty sequence)."""
    if not f.entries:
        return 0
    return max(max(abs(c) for c in k) for k in f.entries)


def evaluate_on_grid(f: CoefficientSequence, g: GridSpec, budget: int | None = None) -> np.ndarray:
    """Sample the polynomial on the grid; shape (N,) * d, complex.

    Raises
    ------
    BudgetExceededError
        If N^d exceeds the grid budget.
    ValueError
        On dimension mismatch.
    """
    if f.d != g.d:
        raise ValueError(f"dimension mismatch: f.d={f.d}, grid d={g.d}")
    limit = grid_budget(budget)
    if g.total_points > limit:
        raise BudgetExceededError(f"grid needs {g.total_points} points, budget is {limit}")
    if not f.entries:
        return np.zeros((g.N,) * g.d, dtype=np.complex128)
    j = np.arange(g.N, dtype=np.float64)

    def basis(ks: np.ndarray) -> np.ndarray:
        # e^{2 pi i j k / N} with the phase reduced mod 1 before exp
        frac = np.mod(np.outer(j, ks.astype(np.float64)) / g.N, 1.0)
        return np.exp(2j * np.pi * frac)

    if g.d == 1:
        ks = np.array(sorted(k[0] for k in f.entries), dtype=np.int64)
        amps = np.array([f.entries[(int(k),)] for k in ks])
        out = np.empty(g.N, dtype=np.complex128)
        step = max(1, (1 << 21) // max(len(ks), 1))
        for lo in range(0, g.N, step):
            sub = np.mod(np.outer(j[lo : lo + step], ks.astype(np.float64)) / g.N, 1.0)
            out[lo : lo + step] = np.exp(2j * np.pi * sub) @ amps
        return out
    if g.d == 2:
        k1s = np.array(sorted({k[0] for k in f.entries}), dtype=np.int64)
        k2s = np.array(sorted({k[1] for k in f.entries}), dtype=np.int64)
        A = np.zeros((len(k1s), len(k2s)), dtype=np.complex128)
        i1 = {int(k): i for i, k in enumerate(k1s)}
        i2 = {int(k): i for i, k in enumerate(k2s)}
        for (a, b), v in f.entries.items():
            A[i1[a], i2[b]] += v
        return basis(k1s) @ A @ basis(k2s).T
    phase = np.exp(2j * np.pi * j / g.N)
    out = np.zeros((g.N,) * g.d, dtype=np.complex128)
    for k, v in sorted(f.entries.items()):
        term = np.asarray(v, dtype=np.complex128)
        for axis, kc in enumerate(k):
            shape = [1] * g.d
            shape[axis] = g.N
            term = term * (phase**kc).reshape(shape)
        out += term
    return out


def lp_norm(f: CoefficientSequence, p: float, g: GridSpec, budget: int | None = None) -> float:
    """Rectangle-rule L_p norm of the polynomial on the grid, p >= 1.

    Exact (up to rounding) for even integer p with N > p * max|k|_inf;
    a Riemann approximation otherwise (see is_exact_quadrature).
    """
    if not p >= 1:
        raise ValueError(f"need p >= 1, got p={p}")
    vals = np.abs(evaluate_on_grid(f, g, budget=budget))
    return float((np.mean(vals.ravel() ** p)) ** (1.0 / p))


def is_exact_quadrature(f: CoefficientSequence, p: float, g: GridSpec) -> bool:
    """True when the rectangle rule is exact for this (f, p, grid)."""
    return p == int(p) and int(p) % 2 == 0 and g.N > p * max_abs_frequency(f)


def exponential_sum_norm(
    gamma,
    p: float,
    g: GridSpec,
    cube_scale: float | None = 2.0,
    budget: int | None = None,
) -> float:
    """L_p norm of the unit-coefficient exponential sum over gamma.

    ``gamma`` is an iterable of integer multi-indices (distinct).  When
    ``cube_scale = c`` is given, warns if gamma leaves the cube
    ``[-c n^(1/d), c n^(1/d)]^d`` with n = |gamma| (the regime in which
    the norm is of order ``n^(1-1/p)``).
    """
    gamma = [tuple(int(c) for c in k) for k in gamma]
    if len(set(gamma)) != len(gamma):
        raise ValueError("frequency set gamma has repeated indices")
    if not gamma:
        return 0.0
    n = len(gamma)
    if cube_scale is not None:
        side = cube_scale * n ** (1.0 / g.d)
        worst = max(max(abs(c) for c in k) for k in gamma)
        if worst > side * (1.0 + 1e-12):
            warnings.warn(
                f"frequency set reaches |k|_inf = {worst}, outside the cube of side "
                f"{side:.3g} = {cube_scale:g} * n^(1/d)",
                stacklevel=2,
            )
    f = CoefficientSequence(d=g.d, entries={k: 1.0 for k in gamma})
    return lp_norm(f, p, g, budget=budget)


def hausdorff_young_gap(f: CoefficientSequence, p: float, g: GridSpec, budget: int | None = None) -> float:
    """sp_norm(f, p') - lp_norm(f, p) for p >= 2, p' = p/(p-1).

    Nonnegative up to quadrature error: the coefficient p'-norm
    dominates the L_p norm.
    """
    if not p >= 2:
        raise ValueError(f"need p >= 2, got p={p}")
    p_prime = p / (p - 1.0)
    return sp_norm(f, p_prime) - lp_norm(f, p, g, budget=budget)
