"""Conserved quantities, variational functionals and threshold comparisons.

Conventions: mass M = int |f|^2, energy E = (1/2)||d2 f||^2 - ||f||_{p+1}^{p+1}/(p+1),
K(f) = 2||d2 f||^2 - (p-1)/(2(p+1)) ||f||_{p+1}^{p+1}.

The mass/energy exponent (2 - s_c)/s_c simplifies algebraically to
(3p + 5)/(p - 9), which is what we compute: the direct form suffers
catastrophic cancellation as p -> 9+.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .spectral import ComplexField, l2_norm_sq, lp_norm, sobolev_seminorm_sq


@dataclass(frozen=True)
class NonlinearityParams:
    """Nonlinearity power p and the standing-wave frequency omega.

    p > 9 is the supercritical regime every experiment lives in;
    allow_subcritical opens p in (1, 9] for unit tests of exponent
    degeneracies only.
    """

    p: float
    omega: float = 1.0
    allow_subcritical: bool = False

    def __post_init__(self):
        if self.allow_subcritical:
            if not self.p > 1:
                raise ValueError(f"p must exceed 1, got {self.p}")
        elif not self.p > 9:
            raise ValueError(
                f"p must exceed 9 (supercritical); got {self.p}. "
                "Pass allow_subcritical=True for exploratory p in (1, 9].")
        if self.omega < 0:
            raise ValueError(f"omega must be nonnegative, got {self.omega}")

    @property
    def s_c(self) -> float:
        return 0.5 - 4.0 / (self.p - 1.0)

    @property
    def mass_energy_exponent(self) -> float:
        """(2 - s_c)/s_c, computed in the cancellation-free form."""
        return (3.0 * self.p + 5.0) / (self.p - 9.0)


@dataclass(frozen=True)
class StrichartzExponents:
    r: float
    q: float
    q1: float
    q2: float

    def identity_residuals(self) -> tuple[float, float, float, float]:
        """Residuals of the four admissibility/scaling identities."""
        p = self.r - 1.0
        s_c = 0.5 - 4.0 / (p - 1.0)
        return (
            abs(4.0 / self.q + 1.0 / self.r - 0.5),
            abs(4.0 / self.q1 + 1.0 / self.r - (0.5 - s_c)),
            abs(4.0 / self.q2 + 1.0 / self.r - (0.5 + s_c)),
            abs(1.0 / self.q1 + 1.0 / self.q2 - 0.25 * (1.0 - 2.0 / self.r)),
        )


def scaling_exponents(params: NonlinearityParams) -> StrichartzExponents:
    p = params.p
    return StrichartzExponents(
        r=p + 1.0,
        q=8.0 * (p + 1.0) / (p - 1.0),
        q1=4.0 * (p - 1.0) * (p + 1.0) / (3.0 * p + 5.0),
        q2=4.0 * (p - 1.0) * (p + 1.0) / (p * p - 5.0 * p - 4.0),
    )


def mass(f: ComplexField) -> float:
    return l2_norm_sq(f)


def energy(f: ComplexField, params: NonlinearityParams) -> float:
    p = params.p
    return (0.5 * sobolev_seminorm_sq(f, 2)
            - lp_norm(f, p + 1) ** (p + 1) / (p + 1))


def action(f: ComplexField, params: NonlinearityParams) -> float:
    return energy(f, params) + 0.5 * params.omega * mass(f)


def k_functional(f: ComplexField, params: NonlinearityParams) -> float:
    p = params.p
    return (2.0 * sobolev_seminorm_sq(f, 2)
            - (p - 1.0) / (2.0 * (p + 1.0)) * lp_norm(f, p + 1) ** (p + 1))


def energy_k_decomposition_check(f: ComplexField,
                                 params: NonlinearityParams) -> float:
    """|E(f) - (p-9)/(2(p-1)) ||d2 f||^2 - 2/(p-1) K(f)|; zero algebraically."""
    p = params.p
    lhs = energy(f, params)
    rhs = ((p - 9.0) / (2.0 * (p - 1.0)) * sobolev_seminorm_sq(f, 2)
           + 2.0 / (p - 1.0) * k_functional(f, params))
    return abs(lhs - rhs)


def coercivity_delta(delta_prime: float, params: NonlinearityParams) -> float:
    """delta'' = 1 - (1 - delta')^((p-9)/4), mapping (0,1) into (0,1)."""
    if not 0.0 < delta_prime < 1.0:
        raise ValueError(f"delta_prime must lie in (0, 1), got {delta_prime}")
    return 1.0 - (1.0 - delta_prime) ** ((params.p - 9.0) / 4.0)


def gn_ratio(f: ComplexField, params: NonlinearityParams) -> float:
    """||f||_{p+1}^{p+1} / (||f||_2^((3p+5)/4) ||d2 f||_2^((p-1)/4)).

    Bounded above by the sharp interpolation constant; maximized at the
    ground state. Invariant under f -> c f since the exponents sum to p+1.
    """
    p = params.p
    l2 = np.sqrt(l2_norm_sq(f))
    h2 = np.sqrt(sobolev_seminorm_sq(f, 2))
    if l2 == 0.0 or h2 == 0.0:
        raise ValueError("gn_ratio undefined for the zero field")
    return float(lp_norm(f, p + 1) ** (p + 1)
                 / (l2 ** ((3.0 * p + 5.0) / 4.0) * h2 ** ((p - 1.0) / 4.0)))


class ThresholdClass(enum.Enum):
    BELOW_BOTH = "BelowBoth"
    ABOVE_GRAD = "AboveGrad"
    ABOVE_ENERGY = "AboveEnergy"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ThresholdReport:
    """Scale-invariant products of the dichotomy compared to ground-state values."""

    me_product: float
    grad_product: float
    me_threshold: float
    grad_threshold: float
    classification: ThresholdClass

    def to_json(self) -> str:
        return json.dumps({
            "me_product": self.me_product,
            "grad_product": self.grad_product,
            "me_threshold": self.me_threshold,
            "grad_threshold": self.grad_threshold,
            "me_ratio": self.me_product / self.me_threshold,
            "grad_ratio": self.grad_product / self.grad_threshold,
            "classification": self.classification.value,
        }, sort_keys=True)


def scale_invariant_products(f: ComplexField,
                             params: NonlinearityParams) -> tuple[float, float]:
    """(M^((2-s_c)/s_c) E, ||f||_2^((2-s_c)/s_c) ||d2 f||_2)."""
    expo = params.mass_energy_exponent
    m = mass(f)
    me = m ** expo * energy(f, params)
    grad = m ** (expo / 2.0) * np.sqrt(sobolev_seminorm_sq(f, 2))
    return me, float(grad)


_INDETERMINATE_BAND = 1e-6


def classify_products(me_product: float, grad_product: float,
                      me_threshold: float, grad_threshold: float,
                      band: float = _INDETERMINATE_BAND) -> ThresholdClass:
    near_me = abs(me_product - me_threshold) <= band * abs(me_threshold)
    near_grad = abs(grad_product - grad_threshold) <= band * abs(grad_threshold)
    if near_me or near_grad:
        return ThresholdClass.INDETERMINATE
    if me_product < me_threshold and grad_product < grad_threshold:
        return ThresholdClass.BELOW_BOTH
    if grad_product > grad_threshold:
        return ThresholdClass.ABOVE_GRAD
    return ThresholdClass.ABOVE_ENERGY


def threshold_report(u0: ComplexField, q_result,
                     params: NonlinearityParams) -> ThresholdReport:
    """Compare u0 against the ground-state thresholds of the dichotomy."""
    me, grad = scale_invariant_products(u0, params)
    me_thr = q_result.derived.me_threshold
    grad_thr = q_result.derived.grad_threshold
    return ThresholdReport(
        me_product=me, grad_product=grad,
        me_threshold=me_thr, grad_threshold=grad_thr,
        classification=classify_products(me, grad, me_thr, grad_thr),
    )


def sharp_constant_from_q(q_result, params: NonlinearityParams,
                          rtol: float = 1e-5) -> float:
    """Sharp interpolation constant, computed two independent ways.

    Direct ratio at the converged profile, and the closed form
    4(p+1)/(p-1) * (||d2 Q|| * ||Q||^((2-s_c)/s_c))^(-(p-9)/4).
    Disagreement beyond rtol flags a non-converged profile.
    """
    p = params.p
    ratio_form = gn_ratio(q_result.profile, params)
    closed_form = (4.0 * (p + 1.0) / (p - 1.0)
                   * q_result.derived.grad_threshold ** (-(p - 9.0) / 4.0))
    if abs(ratio_form - closed_form) > rtol * abs(closed_form):
        raise ValueError(
            "sharp-constant forms disagree "
            f"({ratio_form:.8e} vs {closed_form:.8e}); "
            "ground state looks non-converged")
    return ratio_form
