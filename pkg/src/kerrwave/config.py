"""Run configuration: a flat ``key = value`` file with one section per module.

Example::

    [run]
    scheme = ea
    T = 0.8

    [material]
    chi3 = 0.1
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .fem import FeSpace1D, Mesh1D
from .material import KerrMaterial

SCHEMES = ("eh", "ea", "oracle")
MODES = ("single", "ladder-h", "ladder-tau")
PROFILES = ("gaussian", "zero", "cosine")


def _floats(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(float(v) for v in text.split(","))


def _ints(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


# (section, key, attribute, parser)
_SCHEMA = [
    ("run", "scheme", "scheme", str),
    ("run", "mode", "mode", str),
    ("run", "T", "T", float),
    ("run", "snapshots", "snapshots", _floats),
    ("run", "out", "out", str),
    ("run", "workers", "workers", int),
    ("discretization", "p", "p", int),
    ("discretization", "k", "k", int),
    ("discretization", "cells", "cells", int),
    ("discretization", "tau", "tau", float),
    ("discretization", "ladder_cells", "ladder_cells", _ints),
    ("discretization", "ladder_tau", "ladder_tau", _floats),
    ("discretization", "tau_per_h", "tau_per_h", float),
    ("material", "eps0", "eps0", float),
    ("material", "mu0", "mu0", float),
    ("material", "chi1", "chi1", float),
    ("material", "chi3", "chi3", float),
    ("initial", "profile", "profile", str),
    ("initial", "amplitude", "amplitude", float),
    ("initial", "center", "center", float),
    ("initial", "width", "width", float),
    ("solver", "tol", "tol", float),
    ("solver", "max_iter", "max_iter", int),
    ("oracle", "system", "oracle_system", str),
    ("oracle", "stages", "oracle_stages", int),
    ("oracle", "substeps", "oracle_substeps", int),
]
_BY_KEY = {(s, k): (a, f) for s, k, a, f in _SCHEMA}


@dataclass
class RunConfig:
    scheme: str = "ea"
    mode: str = "single"
    T: float = 0.8
    snapshots: tuple = (0.0, 0.2, 0.4, 0.6, 0.8)
    out: str = "out"
    workers: int = 1
    p: int = 3
    k: int = 1
    cells: int = 100
    tau: float = 0.0025
    ladder_cells: tuple = (20, 40, 80, 160)
    ladder_tau: tuple = (0.025, 0.0125, 0.00625, 0.003125)
    tau_per_h: float = 0.25
    eps0: float = 1.0
    mu0: float = 1.0
    chi1: float = 1.0
    chi3: float = 0.1
    profile: str = "gaussian"
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 100.0
    tol: float = 1e-12
    max_iter: int = 200
    oracle_system: str = "eh"
    oracle_stages: int = 3
    oracle_substeps: int = 64
    source: str = field(default=None, repr=False, compare=False)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def steps(self):
        return int(round(self.T / self.tau))

    def validate(self):
        def bad(msg, key=None):
            raise ConfigError(msg, line=self._lines.get(key) if hasattr(self, "_lines") else None,
                              source=self.source)

        if self.scheme not in SCHEMES:
            bad(f"scheme must be one of {SCHEMES}, got {self.scheme!r}", "scheme")
        if self.mode not in MODES:
            bad(f"mode must be one of {MODES}, got {self.mode!r}", "mode")
        if self.profile not in PROFILES:
            bad(f"profile must be one of {PROFILES}, got {self.profile!r}", "profile")
        if self.p < 1:
            bad("p must be >= 1", "p")
        if self.k < 0:
            bad("k must be >= 0", "k")
        if self.cells < 1:
            bad("cells must be >= 1", "cells")
        if not self.tau > 0:
            bad("tau must be positive", "tau")
        if self.T < 0:
            bad("T must be nonnegative", "T")
        if abs(self.steps * self.tau - self.T) > 1e-12:
            bad(f"T={self.T!r} is not an integer multiple of tau={self.tau!r}", "tau")
        if self.chi3 < 0:
            bad("chi3 must be nonnegative", "chi3")
        if min(self.eps0, self.mu0, self.chi1) <= 0:
            bad("eps0, mu0 and chi1 must be positive", "chi1")
        if not self.tol > 0 or self.max_iter < 1:
            bad("tol must be positive and max_iter >= 1", "tol")
        if self.oracle_system not in ("eh", "ea"):
            bad("oracle system must be eh or ea", "oracle_system")
        if not 1 <= self.oracle_stages <= 3:
            bad("oracle stages must be 1, 2 or 3", "oracle_stages")
        if self.workers < 1:
            bad("workers must be >= 1", "workers")
        times = self.tau * np.arange(self.steps + 1)
        for t in self.snapshots:
            if t > self.T + 1e-12:
                continue
            if np.min(np.abs(times - t)) > 1e-9:
                bad(f"snapshot time {t!r} is not a time step", "snapshots")
        return self

    # -- derived objects ---------------------------------------------------

    def material(self):
        return KerrMaterial(eps0=self.eps0, mu0=self.mu0, chi1=self.chi1, chi3=self.chi3)

    def mesh(self):
        return Mesh1D(self.cells)

    def spaces(self):
        """``(W_h, Q_h)``: continuous degree p and broken degree p-1."""
        mesh = self.mesh()
        return FeSpace1D(mesh, self.p, True), FeSpace1D(mesh, self.p - 1, False)

    def initial_field(self):
        a, c, w = self.amplitude, self.center, self.width
        if self.profile == "gaussian":
            return lambda x: a * np.exp(-w * (x - c) ** 2)
        if self.profile == "cosine":
            return lambda x: a * np.cos(math.pi * x)
        return lambda x: np.zeros_like(x)

    def snapshot_steps(self):
        """Step indices of the snapshot times that fall inside [0, T]."""
        return [int(round(t / self.tau)) for t in self.snapshots if t <= self.T + 1e-12]

    # -- text format -------------------------------------------------------

    def to_text(self):
        lines = []
        section = None
        for sec, key, attr, _ in _SCHEMA:
            if sec != section:
                if section is not None:
                    lines.append("")
                lines.append(f"[{sec}]")
                section = sec
            value = getattr(self, attr)
            if isinstance(value, tuple):
                text = ", ".join(repr(v) for v in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text, source=None, base=None):
        cfg = dataclasses.replace(base) if base is not None else cls()
        cfg.source = source
        lines = {}
        section = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith(";"):
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise ConfigError(f"malformed section header {raw.strip()!r}", lineno, source)
                section = line[1:-1].strip()
                if section not in {s for s, *_ in _SCHEMA}:
                    raise ConfigError(f"unknown section [{section}]", lineno, source)
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
            if section is None:
                raise ConfigError("key outside of any section", lineno, source)
            key, value = (s.strip() for s in line.split("=", 1))
            if (section, key) not in _BY_KEY:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, source)
            attr, parse = _BY_KEY[(section, key)]
            try:
                setattr(cfg, attr, parse(value))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}", lineno, source) from None
            lines[attr] = lineno
        cfg._lines = lines
        return cfg

    @classmethod
    def from_file(cls, path, base=None):
        with open(path) as fh:
            return cls.from_text(fh.read(), source=str(path), base=base)
