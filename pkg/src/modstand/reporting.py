"""Check records, serializable run reports, and deterministic SVG plots."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IoError


@dataclass(frozen=True)
class Check:
    """One verified identity: residual against an explicit tolerance."""

    name: str
    residual: float
    tolerance: float
    provenance: str = "derived"

    def __post_init__(self):
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        if not np.isfinite(self.residual):
            raise ValueError(f"check {self.name!r} produced a non-finite residual")

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "provenance": self.provenance,
        }

    @staticmethod
    def from_json(data) -> "Check":
        c = Check(data["name"], data["residual"], data["tolerance"],
                  data["provenance"])
        if c.passed != data["passed"]:
            raise ValueError("stored pass flag contradicts residual/tolerance")
        return c


@dataclass
class Report:
    command: str
    inputs: dict
    seed: int
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def add(self, name: str, residual: float, tolerance: float,
            provenance: str = "derived"):
        self.checks.append(Check(name, float(residual), float(tolerance),
                                 provenance))

    def extend(self, checks):
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "checks": [c.to_json() for c in self.checks],
            "artifacts": list(self.artifacts),
            "wall_time_s": self.wall_time_s,
            "passed": self.passed,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(data) -> "Report":
        rep = Report(data["command"], data["inputs"], data["seed"],
                     [Check.from_json(c) for c in data["checks"]],
                     list(data["artifacts"]), data["wall_time_s"])
        return rep

    @staticmethod
    def deserialize(text: str) -> "Report":
        return Report.from_json(json.loads(text))

    def summary_lines(self):
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            yield (f"[{mark}] {c.name}: residual {c.residual:.3e}"
                   f" <= {c.tolerance:.1e} ({c.provenance})")


def emit_plot(series, path: str, title: str = "residuals") -> str:
    """Write a self-contained SVG with a log-scaled residual axis.

    Bytes are deterministic for identical input: no timestamps, no ids.
    """
    pts = [(float(x), float(y)) for x, y in series]
    if not pts:
        raise IoError("refusing to plot an empty series")
    width, height, pad = 480, 320, 48
    xs = [p[0] for p in pts]
    ys = [max(p[1], 1e-300) for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    ly = [np.log10(y) for y in ys]
    y_lo, y_hi = min(ly), max(ly)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0

    def sx(x):
        return pad + (x - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def sy(yl):
        return height - pad - (yl - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        f'stroke="black"/>',
    ]
    for k in range(int(np.floor(y_lo)), int(np.ceil(y_hi)) + 1):
        if y_lo <= k <= y_hi:
            parts.append(
                f'<text x="{pad - 6}" y="{sy(k):.2f}" text-anchor="end" '
                f'font-family="monospace" font-size="10">1e{k}</text>'
            )
    if len(pts) > 1:
        path_d = " ".join(
            f"{'M' if i == 0 else 'L'} {sx(x):.2f} {sy(np.log10(max(y, 1e-300))):.2f}"
            for i, (x, y) in enumerate(pts)
        )
        parts.append(f'<path d="{path_d}" fill="none" stroke="steelblue"/>')
    for x, y in pts:
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(np.log10(max(y, 1e-300))):.2f}" '
            f'r="3" fill="crimson"/>'
        )
        parts.append(
            f'<text x="{sx(x):.2f}" y="{height - pad + 14}" text-anchor="middle" '
            f'font-family="monospace" font-size="10">{x:g}</text>'
        )
    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    try:
        with open(path, "w") as handle:
            handle.write(data)
    except OSError as err:
        raise IoError(str(err)) from err
    return path
