"""Budgeted construction iterations: gap opening, Cantor stages, AC stages.

Each stage doubles the sampling level (so the induced period doubles) and adds
a random coset-table perturbation under two budgets: the drift budget
``(eps/2^k)^2 / 72`` on the coefficient sup norm, and a movement budget
``(1/2^k) B_k / 3`` on the certified operator-norm bound between consecutive
stages, where B_k is the running minimum gap chord.  The movement budget keeps
the cumulative spectrum displacement past stage k below B_{k+1}/3, so the
middle third of every gap present at stage k stays free of spectrum forever
after.

Budgeting the certified movement directly (instead of converting it to a
coefficient-norm budget proportional to B_k^2) matters numerically: freshly
opened gaps have width proportional to the perturbation that opened them, so
a B_k^2 schedule collapses below the floating-point floor after one stage,
while the linear schedule decays geometrically and keeps multi-stage runs
above the gap-detection threshold.

The AC variant additionally keeps the spectral-density drift of a chosen
vector below 2^{-k} per stage.  Every stage emits a report from which the
budget ledger is auditable without re-running the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .cmv import diff_norm_bound_seq
from .floquet import BandStructure, band_structure, min_gap
from .odometer import SamplingFn, lift, make_sampling, sup_distance, to_periodic
from .specmeasure import density_distance

#: perturbation radii below this cannot move double-precision tables reliably
_RADIUS_FLOOR = 1e-15

#: candidates per stage search; the radius halves every _HALVING_PERIOD attempts
_MAX_ATTEMPTS = 48
_HALVING_PERIOD = 12


class GapOpeningError(RuntimeError):
    """The randomized search failed to open every gap within the attempt cap."""

    def __init__(self, message: str, best: SamplingFn, closed_gaps: list):
        super().__init__(message)
        self.best = best
        self.closed_gaps = closed_gaps


class DensityConstraintError(RuntimeError):
    """The shrink loop hit the floating-point floor before meeting the drift cap."""


@dataclass(frozen=True)
class StageReport:
    """Auditable record of one construction stage."""

    stage: int
    period: int
    s_norm: float
    budget_eps: float  # (eps/2^k)^2 / 72, bounds s_norm
    budget_move: float | None  # (1/2^k) B_k / 3, bounds movement; None at stage 0
    movement: float | None  # certified operator-norm bound between stages
    min_gap_before: float | None  # B_k (running minimum), None at stage 0
    min_gap_after: float  # minimal open-gap chord after the stage
    open_gap_count: int
    band_measure: float
    density_drift: float | None = None  # integral |g_{k-1} - g_k|^t, ac mode only

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "period": self.period,
            "s_norm": self.s_norm,
            "budget_eps": self.budget_eps,
            "budget_move": self.budget_move,
            "movement": self.movement,
            "min_gap_before": self.min_gap_before,
            "min_gap_after": self.min_gap_after,
            "open_gap_count": self.open_gap_count,
            "band_measure": self.band_measure,
            "density_drift": self.density_drift,
        }


def _all_gaps_open(bs: BandStructure) -> bool:
    return bs.open_gap_count() == bs.q


def _random_table_bump(
    f: SamplingFn, radius: float, rng: np.random.Generator
) -> SamplingFn:
    mag = radius * np.sqrt(rng.uniform(0.0, 1.0, f.period))
    phase = rng.uniform(0.0, 2.0 * math.pi, f.period)
    table = []
    for v, b in zip(f.table, mag * np.exp(1j * phase)):
        w = v + b
        a = abs(w)
        table.append(w if a <= f.r else w * (f.r / a))
    return make_sampling(tuple(table), f.r)


def _search_candidates(
    f: SamplingFn,
    radius_cap: float,
    rng: np.random.Generator,
    valid: Callable[[SamplingFn, BandStructure], bool],
    include_unperturbed: bool = True,
    expensive_check: Callable[[SamplingFn, BandStructure], bool] | None = None,
):
    """Best valid perturbation of f (largest resulting minimal gap).

    Draws _MAX_ATTEMPTS random candidates on a halving radius ladder and keeps
    the valid one whose spectrum has the widest minimal gap; validity always
    includes all-gaps-open.  If f itself is valid it wins outright (the
    zero-perturbation case).  An optional expensive check runs only on the
    surviving candidates in descending-score order (first pass wins).  Returns
    (candidate, band structure) or raises GapOpeningError carrying the
    least-closed candidate seen.
    """
    passing = []  # (min_gap, order, cand, bs)
    fallback = (f, band_structure(to_periodic(f), compute_masses=False))
    fallback_closed = [g for g in fallback[1].gaps if g.closed]
    if include_unperturbed and _all_gaps_open(fallback[1]) and valid(*fallback):
        if expensive_check is None or expensive_check(*fallback):
            return fallback
    for attempt in range(_MAX_ATTEMPTS):
        radius = radius_cap * 0.5 ** (attempt // _HALVING_PERIOD)
        if radius < _RADIUS_FLOOR:
            break
        cand = _random_table_bump(f, radius, rng)
        bs = band_structure(to_periodic(cand), compute_masses=False)
        closed = [g for g in bs.gaps if g.closed]
        if len(closed) < len(fallback_closed):
            fallback, fallback_closed = (cand, bs), closed
        if not _all_gaps_open(bs) or not valid(cand, bs):
            continue
        passing.append((min_gap(bs), attempt, cand, bs))
    for _, _, cand, bs in sorted(passing, key=lambda p: (-p[0], p[1])):
        if expensive_check is None or expensive_check(cand, bs):
            return cand, bs
    raise GapOpeningError(
        f"no perturbation within radius {radius_cap:.3e} opened every gap in "
        f"{_MAX_ATTEMPTS} attempts ({len(fallback_closed)} still closed)",
        best=fallback[0],
        closed_gaps=fallback_closed,
    )


def open_all_gaps(f: SamplingFn, eps: float, seed: int = 0) -> SamplingFn:
    """Return f-hat with sup_distance(f, f-hat) < eps and every gap open.

    If f already has all gaps open it is returned unchanged.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = np.random.default_rng(seed)
    cand, _ = _search_candidates(f, 0.5 * eps, rng, valid=lambda c, b: True)
    return cand


def _stage_zero(f: SamplingFn, eps: float, rng: np.random.Generator):
    budget = (eps**2) / 72.0
    cand, bs = _search_candidates(f, 0.5 * budget, rng, valid=lambda c, b: True)
    report = StageReport(
        stage=0,
        period=max(cand.period, 2),
        s_norm=sup_distance(f, cand),
        budget_eps=budget,
        budget_move=None,
        movement=None,
        min_gap_before=None,
        min_gap_after=min_gap(bs),
        open_gap_count=bs.open_gap_count(),
        band_measure=bs.total_band_measure(),
    )
    return cand, bs, report


def _run_stages(
    f: SamplingFn,
    eps: float,
    K: int,
    rng: np.random.Generator,
    drift_check=None,
) -> tuple[list[StageReport], SamplingFn]:
    reports: list[StageReport] = []
    current, bs, report = _stage_zero(f, eps, rng)
    reports.append(report)
    b_running = min_gap(bs)
    for k in range(1, K + 1):
        b_k = min(b_running, min_gap(bs))
        budget_eps = (eps / 2.0**k) ** 2 / 72.0
        budget_move = (1.0 / 2.0**k) * b_k / 3.0
        lifted = lift(current, current.level + 1)
        prev_seq = to_periodic(current)
        drifts: dict[int, float] = {}

        def valid(cand: SamplingFn, bs_cand: BandStructure) -> bool:
            if sup_distance(lifted, cand) >= budget_eps:
                return False
            return diff_norm_bound_seq(prev_seq, to_periodic(cand)) < budget_move

        drift_gate = None
        if drift_check is not None:

            def drift_gate(cand: SamplingFn, bs_cand: BandStructure) -> bool:
                drift = drift_check(prev_seq, to_periodic(cand))
                drifts[id(cand)] = drift
                return drift ** (1.0 / drift_check.t) <= 2.0**-k

        # the movement bound scales like a small multiple of the sup distance,
        # so a radius a quarter of the movement budget keeps most candidates
        # inside it; the halving ladder covers tighter cases
        radius = min(0.8 * budget_eps, 0.25 * budget_move)
        try:
            cand, bs_new = _search_candidates(
                lifted,
                radius,
                rng,
                valid=valid,
                include_unperturbed=False,
                expensive_check=drift_gate,
            )
        except GapOpeningError as exc:
            exc.args = (f"stage {k}: {exc.args[0]}",)
            exc.trail = reports  # type: ignore[attr-defined]
            raise
        reports.append(
            StageReport(
                stage=k,
                period=cand.period,
                s_norm=sup_distance(lifted, cand),
                budget_eps=budget_eps,
                budget_move=budget_move,
                movement=diff_norm_bound_seq(prev_seq, to_periodic(cand)),
                min_gap_before=b_k,
                min_gap_after=min_gap(bs_new),
                open_gap_count=bs_new.open_gap_count(),
                band_measure=bs_new.total_band_measure(),
                density_drift=drifts.get(id(cand)),
            )
        )
        current, bs = cand, bs_new
        b_running = min(b_k, min_gap(bs_new))
    return reports, current


def cantor_iterate(
    f: SamplingFn, eps: float, K: int, seed: int = 0
) -> tuple[list[StageReport], SamplingFn]:
    """Run K budgeted period-doubling stages after the base gap opening.

    Stage 0 opens all gaps of f within eps^2/72.  Stage k >= 1 lifts to the
    next level and perturbs so that the coefficient drift stays below
    (eps/2^k)^2/72, the certified spectrum movement stays below
    (1/2^k) B_k / 3, and every gap of the doubled period is open.  Total
    coefficient drift stays below eps^2/54 (geometric sum of stage budgets).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if K < 0:
        raise ValueError("K must be nonnegative")
    rng = np.random.default_rng(seed)
    return _run_stages(f, eps, K, rng)


def ac_iterate(
    f: SamplingFn,
    eps: float,
    K: int,
    u: Mapping[int, complex],
    t: float,
    seed: int = 0,
) -> tuple[list[StageReport], SamplingFn]:
    """cantor_iterate with the per-stage spectral-density drift cap 2^{-k}.

    The drift of stage k is density_distance(f_{k-1}, f_k, u, t); its 1/t
    power must stay below 2^{-k}.  Candidates violating the cap are rejected
    inside the stage search, which is feasible because the drift vanishes with
    the perturbation size.
    """
    if not (1.0 < t < 2.0):
        raise ValueError("t must lie strictly in (1, 2)")
    if not u:
        raise ValueError("source vector must have nonempty support")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if K < 0:
        raise ValueError("K must be nonnegative")
    u = {int(n): complex(v) for n, v in u.items()}
    rng = np.random.default_rng(seed)

    def drift_check(seq_prev, seq_new):
        return density_distance(seq_prev, seq_new, u, t)

    drift_check.t = t  # type: ignore[attr-defined]
    try:
        return _run_stages(f, eps, K, rng, drift_check=drift_check)
    except GapOpeningError as exc:
        raise DensityConstraintError(
            f"{exc.args[0]} (with the density-drift constraint active)"
        ) from exc
