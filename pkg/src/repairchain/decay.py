"""Geometric decay parameters of the return-time and last-exit laws.

Everything here revolves around the tangency equation

    xi(x) = G(x) - x G'(x) = 0,

whose root x0 maximizes eta(x) = x / G(x).  The maximal value R1 =
eta(x0) is the convergence radius of the return-time transform, the
value of that transform at its radius is x0 itself, and R0 marks where
the renewal transform 1/(1 - F) first diverges.  Which of these
coincide depends on the recurrence class, captured by ``CaseLabel``:

* ``TransientTilt``      mu > 1: x0 in (0,1), R0 = R1 = eta(x0) > 1
* ``CriticalRadiusOne``  mu = 1, or positive recurrent with G-radius 1:
                         every parameter collapses to 1 (x0 = 1 at
                         criticality, no tangency point otherwise)
* ``InteriorCritical``   mu < 1 with a tangency point inside (1, R):
                         R0 = 1 < R1 = eta(x0)
* ``BoundaryCase``       mu < 1, radius R finite, no interior tangency:
                         R1 = eta(R) attained at the boundary

Exponential reweighting (``tilt``) maps a law onto {a_j x^j / G(x)};
tilting at x0 always lands on the critical line mu = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from scipy.optimize import brentq

from .errors import NoConvergence, OutOfRadius
from .model import (
    CRITICAL_TOL,
    JumpModel,
    eval_G,
    explicit,
    geometric,
    make_tilted,
)


class CaseLabel(str, Enum):
    TRANSIENT_TILT = "TransientTilt"
    INTERIOR_CRITICAL = "InteriorCritical"
    CRITICAL_RADIUS_ONE = "CriticalRadiusOne"
    BOUNDARY_CASE = "BoundaryCase"


@dataclass(frozen=True)
class DecayParams:
    """Decay summary: tangency point, radii, and transform value.

    ``x0`` is None when no tangency point exists (CriticalRadiusOne with
    mu < 1, and BoundaryCase).  ``F_at_R1`` is the exact value of the
    return-time transform at its own radius R1.
    """

    x0: float | None
    R0: float
    R1: float
    F_at_R1: float
    case_label: CaseLabel


def xi(model: JumpModel, x: float) -> float:
    """Tangency function G(x) - x G'(x); its root is x0."""
    g = eval_G(model, x, 0)
    g1 = eval_G(model, x, 1)
    if not (math.isfinite(g) and math.isfinite(g1)):
        return -math.inf
    return g - x * g1


def eta(model: JumpModel, x: float) -> float:
    """Rate function x / G(x), maximized at the tangency point."""
    if x == 0.0:
        return 0.0
    g = eval_G(model, x, 0)
    if not math.isfinite(g):
        return 0.0
    return x / g


_BRENT_RTOL = 8.881784197001252e-16  # 4 ulp, the minimum brentq accepts


def find_x0(model: JumpModel) -> float | None:
    """Root of xi in the region the recurrence class dictates.

    Critical chains sit exactly at x0 = 1.  Transient chains always have
    a root in (0, 1).  Positive recurrent chains may have one in (1, R);
    None signals there is no interior tangency point (the transform's
    singularity then sits at the boundary of the G-domain instead).
    """
    if abs(model.mu - 1.0) <= CRITICAL_TOL:
        return 1.0
    if model.mu > 1.0:
        # xi(0+) = a_0 > 0 and xi(1) = 1 - mu < 0
        return float(brentq(lambda x: xi(model, x), 1e-12, 1.0,
                            xtol=1e-15, rtol=_BRENT_RTOL))
    radius = model.radius
    if radius <= 1.0:
        return None
    lo = 1.0  # xi(1) = 1 - mu > 0
    if math.isinf(radius):
        hi = 2.0
        for _ in range(200):
            if xi(model, hi) <= 0.0:
                break
            lo, hi = hi, hi * 2.0
        else:
            raise NoConvergence("no sign change of xi found under doubling")
    else:
        # walk a grid accumulating at the finite radius
        hi = None
        for j in range(1, 61):
            x_j = radius - (radius - 1.0) * 0.5 ** j
            if xi(model, x_j) <= 0.0:
                hi = x_j
                break
            lo = x_j
        if hi is None:
            return None
    return float(brentq(lambda x: xi(model, x), lo, hi,
                        xtol=1e-15, rtol=_BRENT_RTOL))


@lru_cache(maxsize=None)
def decay_params(model: JumpModel) -> DecayParams:
    """Full decay summary for a model; cached per model instance."""
    if model.mu > 1.0 + CRITICAL_TOL:
        x0 = find_x0(model)
        r = eta(model, x0)
        return DecayParams(x0=x0, R0=r, R1=r, F_at_R1=x0,
                           case_label=CaseLabel.TRANSIENT_TILT)
    if abs(model.mu - 1.0) <= CRITICAL_TOL:
        return DecayParams(x0=1.0, R0=1.0, R1=1.0, F_at_R1=1.0,
                           case_label=CaseLabel.CRITICAL_RADIUS_ONE)
    # positive recurrent from here on; the renewal transform diverges at 1
    if model.radius <= 1.0:
        return DecayParams(x0=None, R0=1.0, R1=1.0, F_at_R1=1.0,
                           case_label=CaseLabel.CRITICAL_RADIUS_ONE)
    x0 = find_x0(model)
    if x0 is not None:
        return DecayParams(x0=x0, R0=1.0, R1=eta(model, x0), F_at_R1=x0,
                           case_label=CaseLabel.INTERIOR_CRITICAL)
    r = model.radius
    return DecayParams(x0=None, R0=1.0, R1=eta(model, r), F_at_R1=r,
                       case_label=CaseLabel.BOUNDARY_CASE)


def tilt(model: JumpModel, x: float) -> JumpModel:
    """Exponentially reweighted law {a_j x^j / G(x)}.

    Geometric and explicit laws are closed under reweighting and come
    back as first-class members of their own family; anything else is
    wrapped generically.  Reweighting a wrapped law composes the points,
    and x = 1 is the identity.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"reweighting point must be positive and finite, got {x!r}")
    if x == 1.0:
        return model
    if not math.isfinite(eval_G(model, x, 0)):
        raise OutOfRadius(f"G({x!r}) diverges, cannot reweight there")
    if model.family == "geometric":
        # p q^n x^n normalizes to a geometric law with ratio q x
        return geometric(1.0 - (1.0 - model.p) * x)
    if model.family == "explicit":
        gx = eval_G(model, x, 0)
        weights = [float(c) * x ** n / gx for n, c in enumerate(model.coeffs)]
        return explicit(weights)
    return make_tilted(model, x)


def tilt_to_critical(model: JumpModel) -> JumpModel:
    """Reweight at the tangency point, landing on the critical line."""
    x0 = find_x0(model)
    if x0 is None:
        raise OutOfRadius("no tangency point exists for this law")
    return tilt(model, x0)
