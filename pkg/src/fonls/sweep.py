"""Batch orchestration: dichotomy sweeps, convergence studies, run verdicts.

Everything here is deterministic: no randomness enters a sweep, and results
are collected in input order regardless of worker completion order, so two
identical invocations produce byte-identical artifacts.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .diagnostics import scattering_profile, xnorm_accumulate
from .evolution import EvolveConfig, TerminalStatus, evolve, strang_step
from .functionals import (NonlinearityParams, ThresholdReport,
                          threshold_report)
from .groundstate import GroundStateResult, petviashvili_solve
from .spectral import ComplexField, field, make_grid, sup_norm


class Verdict(enum.Enum):
    SCATTER_PROXY = "ScatterProxy"
    GROWTH_PROXY = "GrowthProxy"
    UNDECIDED = "Undecided"


@dataclass
class ClassifyConfig:
    cauchy_floor: float = 1e-5      # H^2 Cauchy threshold for the profile
    growth_factor: float = 10.0     # curvature-norm growth flagging strong growth


@dataclass
class SweepSpec:
    p: float
    family: str                     # "scaled_groundstate" | "gaussian"
    members: list                   # c values, or (amplitude, width) pairs
    n_points: int
    length: float
    evolve: EvolveConfig
    classify: ClassifyConfig = dc_field(default_factory=ClassifyConfig)

    def __post_init__(self):
        if self.family not in ("scaled_groundstate", "gaussian"):
            raise ValueError(f"unknown family {self.family!r}")
        if not self.members:
            raise ValueError("sweep member list must be nonempty")
        scalars = [m if np.isscalar(m) else m[0] for m in self.members]
        if any(s <= 0 for s in scalars):
            raise ValueError("sweep members must be positive")
        if sorted(scalars) != scalars:
            raise ValueError("sweep members must be sorted ascending")


@dataclass
class RunSummary:
    descriptor: str
    threshold: ThresholdReport
    terminal_status: TerminalStatus
    mass_drift: float
    energy_drift: float
    xnorm_value: float
    xnorm_saturated: bool
    cauchy_floor: float
    grad_stayed_below: bool
    h2_growth: float
    verdict: Verdict
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "threshold": json.loads(self.threshold.to_json()),
            "terminal_status": self.terminal_status.value,
            "mass_drift": self.mass_drift,
            "energy_drift": self.energy_drift,
            "xnorm_value": self.xnorm_value,
            "xnorm_saturated": self.xnorm_saturated,
            "cauchy_floor": self.cauchy_floor,
            "grad_stayed_below": self.grad_stayed_below,
            "h2_growth": self.h2_growth,
            "verdict": self.verdict.value,
            "error": self.error,
        }


def _member_field(spec: SweepSpec, member, q: GroundStateResult):
    if spec.family == "scaled_groundstate":
        return (f"groundstate-scaled:{member:g}",
                field(q.profile.grid, member * q.profile.values))
    amplitude, width = member
    grid = q.profile.grid
    return (f"gaussian:{amplitude:g},{width:g}",
            field(grid, amplitude * np.exp(-(grid.nodes / width) ** 2)))


def run_one(spec: SweepSpec, member, q: GroundStateResult) -> RunSummary:
    """Evolve one family member and classify it. Failures are captured."""
    params = NonlinearityParams(p=spec.p)
    descriptor, u0 = _member_field(spec, member, q)
    report = threshold_report(u0, q, params)
    cfg = spec.evolve
    if cfg.snapshot_every is None:
        n_steps = int(round(cfg.t_final / cfg.dt))
        cfg = dataclasses.replace(cfg, snapshot_every=max(1, n_steps // 32))
    try:
        rec = evolve(u0, params, cfg)
        xn = xnorm_accumulate(rec, params)
        if len(rec.snapshots) >= 2:
            prof = scattering_profile(rec.snapshot_times, rec.snapshots)
            floor = prof.cauchy_floor()
        else:
            floor = float("inf")
        grad_series = rec.mass_series ** (params.mass_energy_exponent / 2.0) \
            * rec.h2_series
        stayed_below = bool(np.all(grad_series < q.derived.grad_threshold))
        h2_growth = float(np.max(rec.h2_series) / rec.h2_series[0])
        if (xn.saturated and floor < spec.classify.cauchy_floor
                and stayed_below):
            verdict = Verdict.SCATTER_PROXY
        elif (rec.terminal_status is TerminalStatus.BLOWUP_GUARD
              or h2_growth > spec.classify.growth_factor):
            verdict = Verdict.GROWTH_PROXY
        else:
            verdict = Verdict.UNDECIDED
        return RunSummary(
            descriptor=descriptor, threshold=report,
            terminal_status=rec.terminal_status,
            mass_drift=rec.mass_drift(), energy_drift=rec.energy_drift(),
            xnorm_value=xn.value, xnorm_saturated=xn.saturated,
            cauchy_floor=floor, grad_stayed_below=stayed_below,
            h2_growth=h2_growth, verdict=verdict)
    except Exception as exc:  # isolate per-run failures
        return RunSummary(
            descriptor=descriptor, threshold=report,
            terminal_status=TerminalStatus.NON_FINITE,
            mass_drift=float("nan"), energy_drift=float("nan"),
            xnorm_value=float("nan"), xnorm_saturated=False,
            cauchy_floor=float("inf"), grad_stayed_below=False,
            h2_growth=float("nan"), verdict=Verdict.UNDECIDED,
            error=f"{type(exc).__name__}: {exc}")


def _worker(args):
    spec, member, q = args
    return run_one(spec, member, q)


def run_sweep(spec: SweepSpec, q: GroundStateResult | None = None,
              workers: int = 1) -> tuple[list[RunSummary], list[dict]]:
    """One RunSummary per family member plus phase-table rows."""
    if q is None:
        grid = make_grid(spec.n_points, spec.length)
        q = petviashvili_solve(NonlinearityParams(p=spec.p), grid)
        if not q.converged:
            raise RuntimeError(f"ground state failed to converge for p = {spec.p}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(
                _worker, [(spec, m, q) for m in spec.members]))
    else:
        summaries = [run_one(spec, m, q) for m in spec.members]
    phase_rows = []
    for member, s in zip(spec.members, summaries):
        param = member if np.isscalar(member) else member[0]
        phase_rows.append({
            "parameter": param,
            "me_ratio": s.threshold.me_product / s.threshold.me_threshold,
            "grad_ratio": s.threshold.grad_product / s.threshold.grad_threshold,
            "verdict": s.verdict.value,
        })
    return summaries, phase_rows


@dataclass(frozen=True)
class ConvergenceStudy:
    dts: list
    errors: list          # sup distance to the next-finer run at t_final
    ratios: list
    fitted_order: float


def convergence_study(u0: ComplexField, params: NonlinearityParams,
                      base: EvolveConfig, refinements: int) -> ConvergenceStudy:
    """Richardson self-convergence of the splitting at t_final."""
    if refinements < 1:
        raise ValueError("refinements must be >= 1")
    n_base = int(round(base.t_final / base.dt))
    finals = []
    dts = [base.dt / 2 ** k for k in range(refinements + 2)]
    for k, dt in enumerate(dts):
        u = u0
        for _ in range(n_base * 2 ** k):
            u = strang_step(u, dt, params, dealias=False,
                            nonlinear_coefficient=base.nonlinear_coefficient)
        finals.append(u)
    errors = [sup_norm(field(u0.grid, a.values - b.values))
              for a, b in zip(finals, finals[1:])]
    ratios = [e0 / e1 if e1 > 0 else float("inf")
              for e0, e1 in zip(errors, errors[1:])]
    finite = [r for r in ratios if np.isfinite(r) and r > 0]
    order = float(np.mean(np.log2(finite))) if finite else float("nan")
    return ConvergenceStudy(dts=dts[:-1], errors=errors, ratios=ratios,
                            fitted_order=order)
