"""Executable forms of the sharp inequalities behind the mass-threshold
a-priori estimates.

Everything here is a pure function of norms and functionals: the two
sharp Gagliardo-Nirenberg inequalities, the cubic envelope function and
its closed-form maximum, the momentum lower bound, the certified L^4 and
H^1 bounds they imply below mass 4*pi, and the bootstrap coefficient
gamma0.  Each check returns an :class:`InequalityReport` so sweeps can
tabulate slacks uniformly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .functionals import energy_gauged, mass, momentum_gauged
from .spectral import Field, GaugeFrame, derivative, lp_norm
from .datum import lattice_index

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi
SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class SharpConstants:
    """Best constants in the two Gagliardo-Nirenberg forms, plus the
    argmax and maximum of the cubic envelope f(x) = (1/16 - c^{-18} x^2) x
    they produce."""

    c_gn6: float  # ||f||_6^6 <= c_gn6 * ||f||_2^4 * ||f_x||_2^2
    c_gn: float  # ||f||_6  <= c_gn * ||f||_4^{8/9} * ||f_x||_2^{1/9}
    f_argmax: float
    f_max: float


def sharp_constants() -> SharpConstants:
    return SharpConstants(
        c_gn6=4.0 / math.pi**2,
        c_gn=3.0 ** (1.0 / 6.0) * (2.0 * math.pi) ** (-1.0 / 9.0),
        f_argmax=3.0 / (8.0 * math.pi),
        f_max=1.0 / (64.0 * math.pi),
    )


SHARP = sharp_constants()


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality evaluation.

    ``slack`` is the signed margin by which the asserted inequality
    holds (nonnegative means satisfied): rhs - lhs for upper bounds,
    lhs - rhs for lower bounds.
    """

    label: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool


def _abs_tol(rhs: float, abs_tol: float | None) -> float:
    return 1e-10 * max(1.0, abs(rhs)) if abs_tol is None else abs_tol


def _upper(label: str, lhs: float, rhs: float, abs_tol: float | None = None) -> InequalityReport:
    slack = rhs - lhs
    return InequalityReport(label, lhs, rhs, slack, slack >= -_abs_tol(rhs, abs_tol))


def _lower(label: str, lhs: float, rhs: float, abs_tol: float | None = None) -> InequalityReport:
    slack = lhs - rhs
    return InequalityReport(label, lhs, rhs, slack, slack >= -_abs_tol(rhs, abs_tol))


def _require_nonzero(f: Field, what: str) -> float:
    l2 = lp_norm(f, 2.0)
    if l2 == 0.0:
        raise PreconditionError(f"{what} is undefined for the zero field")
    return l2


def check_gn_sextic(f: Field) -> InequalityReport:
    """Sextic Gagliardo-Nirenberg: ||f||_6^6 <= (4/pi^2) ||f||_2^4 ||f_x||_2^2."""
    l2 = _require_nonzero(f, "the sextic Gagliardo-Nirenberg check")
    lhs = lp_norm(f, 6.0) ** 6
    rhs = SHARP.c_gn6 * l2**4 * lp_norm(derivative(f), 2.0) ** 2
    return _upper("gn-sextic", lhs, rhs)


def check_gn_interp(f: Field) -> InequalityReport:
    """Interpolation Gagliardo-Nirenberg: ||f||_6 <= C ||f||_4^{8/9} ||f_x||_2^{1/9}."""
    _require_nonzero(f, "the interpolation Gagliardo-Nirenberg check")
    lhs = lp_norm(f, 6.0)
    rhs = SHARP.c_gn * lp_norm(f, 4.0) ** (8.0 / 9.0) * lp_norm(derivative(f), 2.0) ** (1.0 / 9.0)
    return _upper("gn-interp", lhs, rhs)


def cubic_f(x: float | np.ndarray):
    """The cubic envelope f(x) = (1/16 - C^{-18} x^2) x for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise PreconditionError("the cubic envelope is only evaluated for x >= 0")
    value = (1.0 / 16.0 - SHARP.c_gn ** (-18.0) * x * x) * x
    return float(value) if value.ndim == 0 else value


def cubic_f_max() -> tuple[float, float]:
    """Closed-form (argmax, max) of the cubic envelope: (3/(8 pi), 1/(64 pi))."""
    return SHARP.f_argmax, SHARP.f_max


def momentum_lower_bound(v: Field) -> InequalityReport:
    """Momentum lower bound for nonzero gauged states:

    P(v) >= (1/4)||v||_4^4 (1 - ||v||_2 / (2 sqrt(pi))) - 4 sqrt(pi) E(v) ||v||_2 / ||v||_4^4.

    Holds with no mass restriction; E(v) enters with its sign here (the
    |E| variant belongs to the certified bounds below).
    """
    l2 = _require_nonzero(v, "the momentum lower bound")
    p = momentum_gauged(v)
    e = energy_gauged(v)
    l44 = lp_norm(v, 4.0) ** 4
    rhs = 0.25 * l44 * (1.0 - l2 / (2.0 * SQRT_PI)) - 4.0 * SQRT_PI * e * l2 / l44
    return _lower("momentum-lower-bound", p, rhs)


def l4_bound(l2_norm: float, momentum: float, energy: float) -> float:
    """Certified upper bound for ||v||_4^8 when the mass is below 4*pi:

    16 (1-a)^{-2} (P^2 + 2 (1-a) sqrt(pi) |E| ||v||_2),  a = ||v||_2 / (2 sqrt(pi)).

    Comes from the quadratic inequality a' x^2 - c x - b <= 0 in
    x = ||v||_4^4 with a' = (1-a)/4, b = 4 sqrt(pi) |E| ||v||_2, c = |P|.
    """
    a = _mass_ratio(l2_norm)
    return (
        16.0
        / (1.0 - a) ** 2
        * (momentum**2 + 2.0 * (1.0 - a) * SQRT_PI * abs(energy) * l2_norm)
    )


def h1_bound(l2_norm: float, momentum: float, energy: float) -> float:
    """Certified upper bound for ||v_x||_2^2 below mass 4*pi:

    2E + (P^2 + 2 sqrt(pi) |E| ||v||_2) / (1 - ||v||_2/(2 sqrt(pi)))^2,

    clamped below at zero (the clamp is logged; it can only trigger for
    number triples that no actual field produces).
    """
    a = _mass_ratio(l2_norm)
    raw = 2.0 * energy + (momentum**2 + 2.0 * SQRT_PI * abs(energy) * l2_norm) / (1.0 - a) ** 2
    if raw < 0.0:
        logger.debug("h1_bound clamped from %.3e to 0", raw)
        return 0.0
    return raw


def _mass_ratio(l2_norm: float) -> float:
    if l2_norm < 0.0 or not math.isfinite(l2_norm):
        raise PreconditionError(f"L^2 norm must be finite and nonnegative, got {l2_norm}")
    a = l2_norm / (2.0 * SQRT_PI)
    if l2_norm**2 >= FOUR_PI or a >= 1.0:
        raise PreconditionError(
            f"mass {l2_norm**2:.6f} is not below the 4*pi threshold {FOUR_PI:.6f}"
        )
    return a


def kinetic_l4_bound(v: Field) -> InequalityReport:
    """Kinetic-energy bound ||v_x||_2^2 <= 2 E(v) + 2^{-4} ||v||_4^8.

    The interpolation inequality plus the mean-value inequality absorb
    the sextic term of the energy; no mass restriction.
    """
    _require_nonzero(v, "the kinetic bound")
    lhs = lp_norm(derivative(v), 2.0) ** 2
    rhs = 2.0 * energy_gauged(v) + lp_norm(v, 4.0) ** 8 / 16.0
    return _upper("kinetic-quartic-bound", lhs, rhs)


def gamma0(l2_norm: float) -> float:
    """Bootstrap coefficient sqrt(1 + sqrt(pi) ||v||_2 / (1 - ||v||_2/(2 sqrt(pi)))^2)."""
    a = _mass_ratio(l2_norm)
    return math.sqrt(1.0 + SQRT_PI * l2_norm / (1.0 - a) ** 2)


def phase_modulation_residual(v: Field, alpha: float) -> float:
    """Relative residual of the modulation identity behind the momentum bound:

    ||e^{i alpha x} v||_{H^1-dot}^2 = ||v_x||^2 + alpha^2 ||v||^2 + 2 alpha Im int v_x conj(v).

    alpha must sit on the frequency lattice so the modulated field stays
    periodic.
    """
    lattice_index(v.grid, alpha)
    u = v.with_samples(np.exp(1j * alpha * v.grid.nodes) * v.samples)
    lhs = lp_norm(derivative(u), 2.0) ** 2
    rhs = (
        lp_norm(derivative(v), 2.0) ** 2
        + alpha**2 * mass(v)
        + 2.0 * alpha * _im_vx_conj_v(v)
    )
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def _im_vx_conj_v(v: Field) -> float:
    # Equal to Im int conj(v) v_x by integration by parts on the torus.
    g = v.grid
    raw = np.fft.fft(v.samples)
    xi = g._freq_wrapped.copy()
    xi[g.num_points // 2] = 0.0
    return float(np.sum(xi * (raw.real**2 + raw.imag**2)) * g.spacing / g.num_points)
