"""Sampled per-mode trajectories and their spectral superposition.

A mode trajectory carries the coefficient functions of (u, u', u''[, u'''])
on a single eigenspace A w = lam w with the eigenvector normalized, so
that squared spectral norms read ||u||_r^2 = lam**r * coeff**2.  Divergent
runs are stored truncated with a flag; non-finite samples are never kept.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .csvio import write_csv
from .errors import GridMismatch


def _as_readonly(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ModeTrajectory:
    """Uniformly sampled state of one spectral mode.

    ``uttt`` is present only when produced by the fourth-order integrator
    or a closed-form construction.  ``truncated`` marks a run stopped
    early by the overflow guard.
    """

    lam: float
    step: float
    times: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    utt: np.ndarray
    uttt: Optional[np.ndarray] = None
    truncated: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        for name in ("times", "u", "ut", "utt"):
            object.__setattr__(self, name, _as_readonly(getattr(self, name)))
        if self.uttt is not None:
            object.__setattr__(self, "uttt", _as_readonly(self.uttt))
        n = len(self.times)
        arrays = [self.u, self.ut, self.utt] + ([self.uttt] if self.uttt is not None else [])
        if any(len(a) != n for a in arrays):
            raise ValueError("component arrays must match the time grid length")
        if n >= 2:
            gaps = np.diff(self.times)
            if np.any(np.abs(gaps - self.step) > 1e-9 * self.step):
                raise ValueError("time grid must be uniform with spacing equal to step")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ValueError("trajectory contains non-finite samples; truncate instead")

    def __len__(self) -> int:
        return len(self.times)

    def state_norm_sq(self) -> np.ndarray:
        """||(u, u', u'')||^2 in H^1 x H^1 x H at every node."""
        return self.lam * self.u ** 2 + self.lam * self.ut ** 2 + self.utt ** 2

    def scaled(self, factor: float) -> "ModeTrajectory":
        """The trajectory of ``factor`` times the initial datum (linearity)."""
        return replace(
            self,
            u=self.u * factor, ut=self.ut * factor, utt=self.utt * factor,
            uttt=None if self.uttt is None else self.uttt * factor)

    def to_csv(self, path) -> None:
        header = ["t", "u", "ut", "utt"]
        cols = [self.times, self.u, self.ut, self.utt]
        if self.uttt is not None:
            header.append("uttt")
            cols.append(self.uttt)
        write_csv(path, header, zip(*(c.tolist() for c in cols)))


@dataclass(frozen=True, eq=False)
class MultiModeTrajectory:
    """Orthogonal superposition of mode trajectories on one time grid.

    Weights scale each mode's initial amplitude; squared norms add across
    modes, so ||u||_r^2(t) = sum_k lam_k**r * (weight_k * u_k(t))**2.
    """

    modes: tuple
    weights: tuple

    def __post_init__(self):
        if not self.modes:
            raise ValueError("need at least one mode")
        if len(self.weights) != len(self.modes):
            raise ValueError("one weight per mode required")
        base = self.modes[0]
        for mode in self.modes[1:]:
            if len(mode) != len(base) or abs(mode.step - base.step) > 1e-12 * base.step:
                raise GridMismatch("modes must share length and step")
            if np.max(np.abs(mode.times - base.times)) > 1e-9 * base.step:
                raise GridMismatch("modes must share the time grid")

    @property
    def times(self) -> np.ndarray:
        return self.modes[0].times

    @property
    def step(self) -> float:
        return self.modes[0].step

    def norm_sq(self, component: str = "u", r: float = 1.0) -> np.ndarray:
        """Aggregate H^r squared norm of one component across modes."""
        total = np.zeros(len(self.times))
        for mode, weight in zip(self.modes, self.weights):
            coeff = getattr(mode, component)
            if coeff is None:
                raise ValueError(f"component {component!r} missing on a mode")
            total += mode.lam ** r * (weight * coeff) ** 2
        return total


def superpose_modes(trajectories: Sequence[ModeTrajectory],
                    weights: Sequence[float] | None = None) -> MultiModeTrajectory:
    """Bundle per-mode trajectories sharing a grid; default weights are 1."""
    modes = tuple(trajectories)
    if weights is None:
        weights = tuple(1.0 for _ in modes)
    return MultiModeTrajectory(modes=modes, weights=tuple(float(w) for w in weights))
