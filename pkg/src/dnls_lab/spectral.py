"""Periodic grids, discrete Fourier analysis, multipliers, and norms.

The torus [-L, L) stands in for the real line: initial data is expected to
decay below roundoff at the boundary, so rectangle-rule quadrature and
lattice Fourier analysis reproduce whole-line quantities to spectral
accuracy.  Fourier coefficients are normalized so that the discrete
Parseval identity

    ||f||_2^2 = sum_k |fhat(xi_k)|^2 * (pi / L)

holds exactly against the rectangle rule, which makes physical-side and
spectral-side norms interchangeable without bookkeeping constants.  With
that normalization the coefficients of a decaying field approximate the
continuum transform (2*pi)^{-1/2} * integral f(x) e^{-i xi x} dx.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PreconditionError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Relative size of the zero mode above which a field is not "mean-free".
MEAN_FREE_TOL = 1e-10


class GaugeFrame(enum.Enum):
    """Tags a field as a state of the original or the gauged equation."""

    ORIGINAL = "original"
    GAUGED = "gauged"


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid on [-L, L) with an even number of points.

    nodes:        x_j  = -L + j * dx,    dx = 2L / n,   0 <= j < n
    frequencies:  xi_k = pi * k / L,     k = -n/2, ..., n/2 - 1  (centered)

    The k = -n/2 (Nyquist) mode is the single unpaired frequency.
    """

    half_length: float
    num_points: int

    def __post_init__(self) -> None:
        L = float(self.half_length)
        n = int(self.num_points)
        if not (math.isfinite(L) and L > 0.0):
            raise PreconditionError(f"grid half-length must be positive and finite, got {L!r}")
        if n % 2 != 0 or n < 8:
            raise PreconditionError(f"grid size must be even and at least 8, got {n}")
        object.__setattr__(self, "half_length", L)
        object.__setattr__(self, "num_points", n)
        dx = 2.0 * L / n
        k = np.arange(-(n // 2), n // 2)
        freqs = (math.pi / L) * k
        object.__setattr__(self, "spacing", dx)
        object.__setattr__(self, "nodes", -L + dx * np.arange(n))
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "_freq_wrapped", np.fft.ifftshift(freqs))
        # (-1)^k phases relating the raw DFT to coefficients of modes
        # e^{i xi x} on nodes that start at x = -L rather than x = 0.
        object.__setattr__(self, "_signs", np.where(k % 2 == 0, 1.0, -1.0))

    # Arrays make the generated __eq__ ambiguous; identity is (L, n).
    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Grid)
            and other.half_length == self.half_length
            and other.num_points == self.num_points
        )

    def __hash__(self) -> int:
        return hash((self.half_length, self.num_points))

    @property
    def nyquist_frequency(self) -> float:
        return math.pi * (self.num_points // 2) / self.half_length


def make_grid(half_length: float, num_points: int) -> Grid:
    """Build a periodic grid; rejects odd sizes, n < 8 and nonpositive length."""
    return Grid(half_length, num_points)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples on a grid, tagged by the gauge frame they live in.

    Value-semantic: samples are copied on construction and frozen, so a
    Field can be shared between threads without coordination.
    """

    grid: Grid
    samples: np.ndarray
    frame: GaugeFrame = GaugeFrame.ORIGINAL

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.num_points,):
            raise PreconditionError(
                f"sample count {samples.shape} does not match grid size {self.grid.num_points}"
            )
        if not np.all(np.isfinite(samples)):
            raise PreconditionError("field samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples: np.ndarray, frame: GaugeFrame | None = None) -> "Field":
        return Field(self.grid, samples, self.frame if frame is None else frame)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Centered Fourier coefficients of a field (see module docstring)."""

    grid: Grid
    coeffs: np.ndarray
    frame: GaugeFrame = GaugeFrame.ORIGINAL

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.num_points,):
            raise PreconditionError(
                f"coefficient count {coeffs.shape} does not match grid size {self.grid.num_points}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise PreconditionError("spectrum coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


def transform(f: Field) -> Spectrum:
    """Forward transform to Parseval-normalized centered coefficients."""
    g = f.grid
    raw = np.fft.fftshift(np.fft.fft(f.samples))
    return Spectrum(g, (g.spacing / SQRT_TWO_PI) * g._signs * raw, f.frame)


def inverse_transform(s: Spectrum) -> Field:
    """Invert :func:`transform`; reproduces samples to roundoff."""
    g = s.grid
    raw = np.fft.ifftshift(s.coeffs * g._signs) * (SQRT_TWO_PI / g.spacing)
    return Field(g, np.fft.ifft(raw), s.frame)


def apply_symbol(f: Field, symbol: np.ndarray, frame: GaugeFrame | None = None) -> Field:
    """Multiply the spectrum of ``f`` by a symbol given on the centered lattice."""
    g = f.grid
    raw = np.fft.fft(f.samples)
    raw *= np.fft.ifftshift(np.asarray(symbol))
    return Field(g, np.fft.ifft(raw), f.frame if frame is None else frame)


def _power_spectrum(f: Field) -> np.ndarray:
    """|DFT|^2 scaled so its plain sum equals ||f||_2^2 (wrapped order)."""
    g = f.grid
    raw = np.fft.fft(f.samples)
    return (g.spacing / g.num_points) * (raw.real**2 + raw.imag**2)


def lp_norm(f: Field, p: float) -> float:
    """Rectangle-rule L^p norm; ``p = inf`` gives the max modulus."""
    if p == math.inf:
        return float(np.max(np.abs(f.samples)))
    if not p >= 1.0:
        raise PreconditionError(f"L^p norm requires p >= 1, got {p}")
    a = np.abs(f.samples)
    return float(np.sum(a**p) * f.grid.spacing) ** (1.0 / p)


def bessel_norm(f: Field, s: float) -> float:
    """Inhomogeneous Sobolev norm with symbol (1 + xi^2)^{s/2}."""
    power = _power_spectrum(f)
    xi = f.grid._freq_wrapped
    return math.sqrt(float(np.sum((1.0 + xi * xi) ** s * power)))


def homogeneous_norm(f: Field, s: float) -> float:
    """Homogeneous Sobolev norm with symbol |xi|^s.

    Negative orders are only defined for mean-free fields; the zero mode
    is excluded from the sum and its presence above roundoff is an error.
    """
    power = _power_spectrum(f)
    xi = np.abs(f.grid._freq_wrapped)
    if s == 0.0:
        return math.sqrt(float(np.sum(power)))
    if s < 0.0:
        total = float(np.sum(power))
        if power[0] > MEAN_FREE_TOL**2 * total:
            raise PreconditionError(
                "negative-order homogeneous norm requires a mean-free field"
            )
        weights = np.zeros_like(xi)
        nz = xi > 0.0
        weights[nz] = xi[nz] ** (2.0 * s)
    else:
        weights = xi ** (2.0 * s)
    return math.sqrt(float(np.sum(weights * power)))


def fractional_derivative(f: Field, s: float) -> Field:
    """Apply |xi|^s as a Fourier multiplier.

    Orders down to -1/2 are allowed, but negative orders require a
    mean-free field.  The unpaired Nyquist mode is zeroed for every
    non-integer order, which keeps fractional outputs representable on
    the lattice; integer orders act on the full lattice.
    """
    if not math.isfinite(s) or s < -0.5:
        raise PreconditionError(f"fractional order must be finite and >= -1/2, got {s}")
    if s == 0.0:
        return f
    g = f.grid
    xi = np.abs(g._freq_wrapped)
    raw = np.fft.fft(f.samples)
    if s < 0.0:
        scale = math.sqrt(float(np.sum(raw.real**2 + raw.imag**2)))
        if abs(raw[0]) > MEAN_FREE_TOL * scale:
            raise PreconditionError(
                "negative-order derivative requires a mean-free field"
            )
        symbol = np.zeros_like(xi)
        nz = xi > 0.0
        symbol[nz] = xi[nz] ** s
    else:
        symbol = xi**s
    if s != round(s):
        symbol = symbol.copy()
        symbol[g.num_points // 2] = 0.0  # wrapped position of k = -n/2
    return Field(g, np.fft.ifft(symbol * raw), f.frame)


def derivative(f: Field) -> Field:
    """Spectral d/dx: multiplication by i*xi with the Nyquist mode dropped."""
    g = f.grid
    symbol = 1j * g._freq_wrapped.copy()
    symbol[g.num_points // 2] = 0.0
    return Field(g, np.fft.ifft(symbol * np.fft.fft(f.samples)), f.frame)


class Band(NamedTuple):
    """Sharp frequency window: 'low' keeps |xi| <= cutoff, 'high' keeps |xi| >= cutoff."""

    kind: str
    cutoff: float


def low_pass(cutoff: float) -> Band:
    if not cutoff > 0.0:
        raise PreconditionError(f"band cutoff must be positive, got {cutoff}")
    return Band("low", float(cutoff))


def high_pass(cutoff: float) -> Band:
    if not cutoff > 0.0:
        raise PreconditionError(f"band cutoff must be positive, got {cutoff}")
    return Band("high", float(cutoff))


def project(f: Field, band: Band) -> Field:
    """Sharp cutoff projection.

    Modes with |xi| exactly at the cutoff are kept by both kinds, so
    low + high minus the shared shell reconstructs the field.
    """
    xi = np.abs(f.grid._freq_wrapped)
    if band.kind == "low":
        mask = xi <= band.cutoff
    elif band.kind == "high":
        mask = xi >= band.cutoff
    else:
        raise PreconditionError(f"unknown band kind {band.kind!r}")
    raw = np.fft.fft(f.samples)
    return Field(f.grid, np.fft.ifft(np.where(mask, raw, 0.0 + 0.0j)), f.frame)


def _pad_wrapped(raw: np.ndarray, m_out: int) -> np.ndarray:
    """Embed a wrapped-order DFT into a longer wrapped-order array."""
    n = raw.shape[0]
    half = n // 2
    out = np.zeros(m_out, dtype=np.complex128)
    out[:half] = raw[:half]
    out[m_out - half :] = raw[half:]
    return out
