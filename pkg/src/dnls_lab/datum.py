"""Initial-datum families, randomized field generators, and field files."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError
from .spectral import Field, GaugeFrame, Grid, lp_norm

LATTICE_TOL = 1e-9


def field_from_function(
    grid: Grid, fn: Callable[[np.ndarray], np.ndarray], frame: GaugeFrame = GaugeFrame.ORIGINAL
) -> Field:
    return Field(grid, np.asarray(fn(grid.nodes), dtype=np.complex128), frame)


def gaussian_field(
    grid: Grid,
    amplitude: complex = 1.0,
    width: float = 1.0,
    center: float = 0.0,
    chirp: float = 0.0,
    frame: GaugeFrame = GaugeFrame.ORIGINAL,
) -> Field:
    """amplitude * exp(-((x - center)/width)^2) with an optional quadratic chirp."""
    if not width > 0.0:
        raise PreconditionError(f"gaussian width must be positive, got {width}")
    y = grid.nodes - center
    samples = amplitude * np.exp(-((y / width) ** 2) + 1j * chirp * y * y)
    return Field(grid, samples, frame)


def multi_gaussian_field(
    grid: Grid,
    components: Sequence[tuple[complex, float, float, float]],
    frame: GaugeFrame = GaugeFrame.ORIGINAL,
) -> Field:
    """Sum of chirped gaussians; components are (amplitude, width, center, chirp)."""
    if not components:
        raise PreconditionError("multi-gaussian needs at least one component")
    samples = np.zeros(grid.num_points, dtype=np.complex128)
    for amplitude, width, center, chirp in components:
        if not width > 0.0:
            raise PreconditionError(f"gaussian width must be positive, got {width}")
        y = grid.nodes - center
        samples += amplitude * np.exp(-((y / width) ** 2) + 1j * chirp * y * y)
    return Field(grid, samples, frame)


def lattice_index(grid: Grid, xi0: float) -> int:
    """Index k with xi_k = xi0, or an error if xi0 is off the lattice."""
    k = xi0 * grid.half_length / math.pi
    k_int = round(k)
    if abs(k - k_int) > LATTICE_TOL * max(1.0, abs(k)):
        raise PreconditionError(
            f"frequency {xi0} is not on the lattice (pi/L = {math.pi / grid.half_length})"
        )
    if not -(grid.num_points // 2) <= k_int < grid.num_points // 2:
        raise PreconditionError(f"frequency {xi0} exceeds the lattice range")
    return int(k_int)


def plane_wave_field(
    grid: Grid, amplitude: complex, xi0: float, frame: GaugeFrame = GaugeFrame.ORIGINAL
) -> Field:
    """amplitude * exp(i xi0 x); xi0 must sit exactly on the frequency lattice."""
    k = lattice_index(grid, xi0)
    xi = math.pi * k / grid.half_length
    return Field(grid, amplitude * np.exp(1j * xi * grid.nodes), frame)


def random_decaying_field(
    grid: Grid,
    rng: np.random.Generator,
    frame: GaugeFrame = GaugeFrame.GAUGED,
    max_components: int = 6,
    target_mass: float | None = None,
    width_range: tuple[float, float] = (0.5, 3.0),
    chirp_max: float = 1.0,
) -> Field:
    """Random sum of 1..max_components chirped gaussians, centered well inside
    the torus so the samples decay below roundoff at the boundary.

    Spans the sign and oscillation regimes of all three conserved
    functionals; optionally rescaled to a prescribed mass.
    """
    count = int(rng.integers(1, max_components + 1))
    span = grid.half_length / 4.0
    components = []
    for _ in range(count):
        amp = rng.normal() + 1j * rng.normal()
        width = rng.uniform(*width_range)
        center = rng.uniform(-span, span)
        chirp = rng.uniform(0.0, chirp_max)
        components.append((amp, width, center, chirp))
    f = multi_gaussian_field(grid, components, frame)
    if target_mass is not None:
        current = lp_norm(f, 2.0) ** 2
        if current == 0.0:
            raise PreconditionError("cannot rescale a zero field to a target mass")
        f = f.with_samples(f.samples * math.sqrt(target_mass / current))
    return f


def probe_field_suite(grid: Grid, rng: np.random.Generator, count: int) -> list[Field]:
    """Lattice probe fields for operator-norm and commutator sweeps.

    Mixes deterministic single modes (constant, low, mid and high
    frequency) with random broadband power-law spectra and random
    band-limited noise, so that sweeps over a cutoff range see content
    both far below and far above every cutoff.
    """
    n = grid.num_points
    fields: list[Field] = []
    unit = 1.0 / math.sqrt(2.0 * grid.half_length)  # unit L^2 plane wave amplitude
    for k in (0, 1, 3, 16, n // 8, n // 4, 3 * n // 8):
        xi = math.pi * k / grid.half_length
        fields.append(
            Field(grid, unit * np.exp(1j * xi * grid.nodes), GaugeFrame.GAUGED)
        )
    k_abs = np.abs(np.fft.ifftshift(np.arange(-(n // 2), n // 2)))
    while len(fields) < count:
        raw = rng.normal(size=n) + 1j * rng.normal(size=n)
        if rng.uniform() < 0.5:
            slope = rng.uniform(0.25, 1.0)
            raw = raw * (1.0 + k_abs) ** (-slope)
        else:
            lo = int(rng.integers(0, n // 2 - 2))
            hi = int(rng.integers(lo + 1, n // 2))
            raw = np.where((k_abs >= lo) & (k_abs <= hi), raw, 0.0)
        raw[n // 2] = 0.0  # keep the unpaired Nyquist mode empty
        samples = np.fft.ifft(raw)
        norm = lp_norm(Field(grid, samples, GaugeFrame.GAUGED), 2.0)
        if norm == 0.0:
            continue
        fields.append(Field(grid, samples / norm, GaugeFrame.GAUGED))
    return fields[:count]


def save_field(path: str | Path, f: Field) -> None:
    np.savez(
        path,
        samples=f.samples,
        half_length=f.grid.half_length,
        num_points=f.grid.num_points,
        frame=f.frame.value,
    )


def load_field(path: str | Path) -> Field:
    with np.load(path) as data:
        try:
            samples = data["samples"]
            grid = Grid(float(data["half_length"]), int(data["num_points"]))
            frame = GaugeFrame(str(data["frame"]))
        except KeyError as exc:
            raise PreconditionError(f"field file {path} is missing entry {exc}") from exc
    if samples.shape != (grid.num_points,):
        raise PreconditionError(
            f"field file {path} holds {samples.shape} samples for a grid of {grid.num_points}"
        )
    return Field(grid, samples, frame)


def parse_datum(grid: Grid, spec: dict) -> Field:
    """Build a field from a named-family description.

    Families: gaussian(amplitude, width, center, chirp), multi-gaussian
    (parallel lists), plane-wave(amplitude, xi0), file(path).  The frame
    key defaults to the original frame.
    """
    family = spec.get("family")
    frame = GaugeFrame(spec.get("frame", "original"))
    if family == "gaussian":
        return gaussian_field(
            grid,
            amplitude=complex(spec.get("amplitude", 1.0)),
            width=float(spec.get("width", 1.0)),
            center=float(spec.get("center", 0.0)),
            chirp=float(spec.get("chirp", 0.0)),
            frame=frame,
        )
    if family == "multi-gaussian":
        amps = [complex(a) for a in _as_list(spec.get("amplitudes", [1.0]))]
        widths = [float(w) for w in _as_list(spec.get("widths", [1.0] * len(amps)))]
        centers = [float(c) for c in _as_list(spec.get("centers", [0.0] * len(amps)))]
        chirps = [float(c) for c in _as_list(spec.get("chirps", [0.0] * len(amps)))]
        if not len(amps) == len(widths) == len(centers) == len(chirps):
            raise PreconditionError("multi-gaussian parameter lists must have equal length")
        return multi_gaussian_field(grid, list(zip(amps, widths, centers, chirps)), frame)
    if family == "plane-wave":
        return plane_wave_field(
            grid, complex(spec.get("amplitude", 1.0)), float(spec["xi0"]), frame
        )
    if family == "file":
        f = load_field(spec["path"])
        if f.grid != grid:
            raise PreconditionError(
                f"field file grid ({f.grid.half_length}, {f.grid.num_points}) does not "
                f"match configured grid ({grid.half_length}, {grid.num_points})"
            )
        return f
    raise PreconditionError(f"unknown datum family {family!r}")


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]
