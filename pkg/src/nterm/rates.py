"""Order-estimate verification: predicted rates, tables, ratio windows.

Each supported estimate predicts that a computed quantity stays within
constant factors of ``psi(n^(1/d))`` times a power of n:

==============  =============================  =========================
tag             predicted rate                 quantity it describes
==============  =============================  =========================
thm31_p_le_2    psi(n^(1/d)) / n^(1/q - 1/2)   greedy L_p error, p <= 2
thm31_p_ge_2    psi(n^(1/d)) / n^(1/q+1/p-1)   greedy L_p error, p >= 2
lemma41         psi(n^(1/d)) / n^(1/s - 1)     H_n(rearranged psi, s)
assertion41     psi(n^(1/d)) / n^(1/q - 1/p)   class error in the
                                               p-coefficient norm
==============  =============================  =========================

A rate table pairs computed values with the prediction over an n-grid;
the ratio window (K1, K2) = (min, max) of computed/predicted certifies
the order estimate when K2/K1 is small.  Tables built outside a tag's
hypotheses are flagged and should be excluded from window assertions.

CSV output uses the fixed header ``n,computed,predicted,ratio`` with 17
significant digits; the JSON mirror carries the same rows plus a
metadata block.  Identical configurations produce byte-identical
output (no timestamps, fixed formatting).
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lattice, trig_lp, weights
from .approx import CoefficientSequence, FunctionClassSpec, class_best_nterm_sp, extremal_function_f1, greedy_order
from .functionals import h_functional
from .trig_lp import GridSpec
from .weights import RearrangedWeight, WeightFunction

THEOREM_TAGS = ("thm31_p_le_2", "thm31_p_ge_2", "lemma41", "assertion41")
QUANTITIES = ("class_sp", "h_functional", "greedy_lp_witness")


def predicted_rate(theorem: str, n: int, psi: WeightFunction, d: int,
                   q: float | None = None, p: float | None = None,
                   s: float | None = None) -> float:
    """The predicted order at n for one of the tags above.

    Raises
    ------
    ValueError
        On an unknown tag or missing parameters for it.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    base = float(psi(float(n) ** (1.0 / d)))
    if theorem == "thm31_p_le_2":
        if q is None or p is None:
            raise ValueError("thm31_p_le_2 needs q and p")
        return base / float(n) ** (1.0 / q - 0.5)
    if theorem == "thm31_p_ge_2":
        if q is None or p is None:
            raise ValueError("thm31_p_ge_2 needs q and p")
        return base / float(n) ** (1.0 / q + 1.0 / p - 1.0)
    if theorem == "lemma41":
        if s is None:
            raise ValueError("lemma41 needs s")
        return base / float(n) ** (1.0 / s - 1.0)
    if theorem == "assertion41":
        if q is None or p is None:
            raise ValueError("assertion41 needs q and p")
        return base / float(n) ** (1.0 / q - 1.0 / p)
    raise ValueError(f"unknown theorem tag {theorem!r}, expected one of {THEOREM_TAGS}")


def hypotheses_met(theorem: str, psi: WeightFunction, d: int,
                   q: float | None = None, p: float | None = None,
                   s: float | None = None) -> tuple[bool, str]:
    """(met, reason) evidence check for a tag's hypotheses.

    Combines slow-vanishing class evidence, discrete convexity where
    the tag needs it, and the decay-characteristic bound in the
    convention appropriate to the tag.
    """
    try:
        if theorem == "lemma41":
            if s is None:
                raise ValueError("lemma41 needs s")
            rep = weights.check_class_b(psi)
            if not rep.in_class:
                return False, "weight lacks slow-vanishing class evidence"
            if s > 1.0:
                dec = weights.check_decay_condition(psi, s, d)
                if not dec.satisfied:
                    return False, (
                        f"decay condition fails: sup alpha = {dec.alpha_sup:.4g} "
                        f">= {dec.bound:.4g} = s'/d"
                    )
            return True, "ok"
        if theorem == "assertion41":
            if q is None or p is None:
                raise ValueError("assertion41 needs q and p")
            rep = weights.check_class_b(psi.raised_to(p))
            if not rep.in_class:
                return False, "psi^p lacks slow-vanishing class evidence"
            if p < q:
                dec = weights.check_decay_condition(psi.raised_to(p), q / p, d)
                if not dec.satisfied:
                    return False, (
                        f"decay condition fails for psi^p at s=q/p: sup alpha = "
                        f"{dec.alpha_sup:.4g} >= {dec.bound:.4g}"
                    )
                if not weights.convexity_evidence(psi.raised_to(p)):
                    return False, "psi^p lacks convexity evidence"
            return True, "ok"
        if theorem in ("thm31_p_le_2", "thm31_p_ge_2"):
            if q is None or p is None:
                raise ValueError(f"{theorem} needs q and p")
            rep = weights.check_class_b(psi)
            if not rep.in_class:
                return False, "weight lacks slow-vanishing class evidence"
            p_prime = p / (p - 1.0) if p > 1 else math.inf
            if p_prime < q:
                thresh = d * (0.5 - 1.0 / q) if theorem == "thm31_p_le_2" else d * (1.0 - 1.0 / p - 1.0 / q)
                dec = weights.check_decay_condition(psi, 2.0, d)  # populate alpha bounds
                inv_alpha = dec.inv_alpha_inf
                if not inv_alpha > thresh:
                    return False, (
                        f"reciprocal decay bound fails: inf 1/alpha = {inv_alpha:.4g} "
                        f"<= {thresh:.4g}"
                    )
                if not weights.convexity_evidence(psi):
                    return False, "weight lacks convexity evidence"
            return True, "ok"
    except weights.ZeroDerivativeError:
        return False, "alpha undefined (psi' vanishes)"
    raise ValueError(f"unknown theorem tag {theorem!r}, expected one of {THEOREM_TAGS}")


@dataclass(eq=False)
class RateTable:
    """Computed-vs-predicted values over an n-grid, with metadata."""

    quantity: str
    theorem: str
    n: np.ndarray
    computed: np.ndarray
    predicted: np.ndarray
    metadata: dict = field(default_factory=dict)
    flagged: bool = False

    @property
    def ratio(self) -> np.ndarray:
        return self.computed / self.predicted

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,computed,predicted,ratio\n")
        for n, c, pr, ra in zip(self.n, self.computed, self.predicted, self.ratio):
            buf.write(f"{int(n)},{c:.17g},{pr:.17g},{ra:.17g}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        meta = dict(self.metadata)
        meta.update(quantity=self.quantity, theorem=self.theorem, flagged=self.flagged)
        rows = [
            {"n": int(n), "computed": c, "predicted": pr, "ratio": ra}
            for n, c, pr, ra in zip(self.n, self.computed, self.predicted, self.ratio)
        ]
        return json.dumps({"metadata": meta, "rows": rows}, sort_keys=True)


def ratio_window(table: RateTable) -> tuple[float, float]:
    """(K1, K2) = (min, max) of computed/predicted over the table."""
    r = table.ratio
    if len(r) == 0:
        raise ValueError("empty rate table has no ratio window")
    return float(np.min(r)), float(np.max(r))


def _greedy_witness_error(n: int, q: float, p: float, psi: WeightFunction, grid_n_factor: int = 8) -> float:
    """L_p error of the n-term greedy approximant of the equal-coefficient
    witness (d = 1): the amplitude times the norm of the leftover
    exponential sum."""
    f = extremal_function_f1(n, q, psi, 1)
    order = greedy_order(f)
    rest = order[n:]
    amp = abs(next(iter(f.entries.values())))
    kmax = max(max(abs(c) for c in k) for k in f.entries)
    N = grid_n_factor * max(kmax, 1) + 1
    g = GridSpec(d=1, N=N)
    return amp * trig_lp.exponential_sum_norm(rest, p, g, cube_scale=None)


def rate_table(
    quantity: str,
    n_grid,
    psi: WeightFunction,
    d: int,
    r: float = math.inf,
    q: float | None = None,
    p: float | None = None,
    s: float | None = None,
    theorem: str | None = None,
    tol: float = 1e-8,
    scan_budget: int = 2_000_000,
    threads: int = 1,
) -> RateTable:
    """Build a rate table for one quantity over an n-grid.

    quantity 'class_sp' computes the exact class best n-term error
    (needs q, p; default tag assertion41); 'h_functional' computes
    H_n(rearranged psi, s) (needs s; default tag lemma41);
    'greedy_lp_witness' computes the witness greedy L_p error at d = 1
    (needs q, p; default tag thm31_p_ge_2).  Rows are independent and
    evaluated concurrently when threads > 1.
    """
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}, expected one of {QUANTITIES}")
    n_arr = np.array(sorted(int(v) for v in n_grid), dtype=np.int64)
    if len(n_arr) == 0:
        raise ValueError("empty n grid")
    if quantity == "class_sp":
        if q is None or p is None:
            raise ValueError("class_sp needs q and p")
        theorem = theorem or "assertion41"
        shells = lattice.shell_counts(r, d, 16)
        spec = FunctionClassSpec(q=q, r=r, psi=psi, d=d)

        def compute(n):
            return class_best_nterm_sp(spec, int(n), p, shells=shells, tol=tol, scan_budget=scan_budget).value

    elif quantity == "h_functional":
        if s is None:
            raise ValueError("h_functional needs s")
        theorem = theorem or "lemma41"
        shells = lattice.shell_counts(r, d, 16)

        def compute(n):
            rw = RearrangedWeight(psi, shells, p_power=1.0)
            return h_functional(rw, int(n), s, tol=tol, scan_budget=scan_budget).value

    else:
        if q is None or p is None:
            raise ValueError("greedy_lp_witness needs q and p")
        if d != 1:
            raise ValueError("greedy_lp_witness is implemented for d = 1")
        theorem = theorem or "thm31_p_ge_2"

        def compute(n):
            return _greedy_witness_error(int(n), q, p, psi)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            computed = np.array(list(pool.map(compute, n_arr)), dtype=np.float64)
    else:
        computed = np.array([compute(n) for n in n_arr], dtype=np.float64)
    predicted = np.array(
        [predicted_rate(theorem, int(n), psi, d, q=q, p=p, s=s) for n in n_arr],
        dtype=np.float64,
    )
    met, reason = hypotheses_met(theorem, psi, d, q=q, p=p, s=s)
    meta = {
        "psi": psi.spec_string(),
        "d": d,
        "r": "inf" if math.isinf(r) else r,
        "q": q,
        "p": p,
        "s": s,
        "tol": tol,
        "scan_budget": scan_budget,
        "threads": threads,
        "hypotheses_met": met,
        "hypotheses_note": reason,
    }
    return RateTable(
        quantity=quantity,
        theorem=theorem,
        n=n_arr,
        computed=computed,
        predicted=predicted,
        metadata=meta,
        flagged=not met,
    )
