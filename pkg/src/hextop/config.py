"""Run configuration shared by the CLI and :func:`hextop.optimizer.run`."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from pathlib import Path

from .problems import PROBLEMS

_SQRT3 = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*sqrt\(?3\)?\s*$")


def parse_radius(text) -> float:
    """Parse a filter radius: plain number, ``k*sqrt3``, ``k*sqrt(3)`` or ``sqrt3``."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _SQRT3.match(str(text))
    if m:
        k = m.group(1)
        return (float(k) if k else 1.0) * math.sqrt(3.0)
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse radius {text!r}; use a number or '<k>*sqrt3'") from None


@dataclass
class RunConfig:
    hnex: int = 60
    hney: int = 20
    rfill: float = 2.4 * math.sqrt(3.0)
    volfrac: float = 0.5
    penal: float = 3.0
    ft: int = 1
    problem: str = "mbb"
    nu: float = 0.3
    move: float = 0.2
    maxiter: int = 200
    change_tol: float = 0.01
    outdir: str = "hextop-out"
    problem_file: str | None = None

    def errors(self) -> list[str]:
        """Every violated constraint, empty when the config is valid."""
        out = []
        if self.hnex < 1:
            out.append(f"hnex must be >= 1 (got {self.hnex})")
        if self.hney < 1:
            out.append(f"hney must be >= 1 (got {self.hney})")
        if not self.rfill > 0:
            out.append(f"rfill must be > 0 (got {self.rfill})")
        if not 0 < self.volfrac <= 1:
            out.append(f"volfrac must lie in (0, 1] (got {self.volfrac})")
        if not self.penal >= 1:
            out.append(f"penal must be >= 1 (got {self.penal})")
        if self.ft not in (0, 1, 2):
            out.append(f"ft must be 0, 1 or 2 (got {self.ft})")
        if self.problem not in PROBLEMS:
            out.append(f"problem must be one of {', '.join(PROBLEMS)} (got {self.problem!r})")
        if not 0 <= self.nu < 0.5:
            out.append(f"nu must lie in [0, 0.5) (got {self.nu})")
        if not self.move > 0:
            out.append(f"move must be > 0 (got {self.move})")
        if self.maxiter < 1:
            out.append(f"maxiter must be >= 1 (got {self.maxiter})")
        if not self.change_tol > 0:
            out.append(f"change_tol must be > 0 (got {self.change_tol})")
        if self.problem_file is not None and not Path(self.problem_file).is_file():
            out.append(f"problem_file {self.problem_file!r} does not exist")
        return out

    def validate(self) -> "RunConfig":
        errs = self.errors()
        if errs:
            raise ValueError("; ".join(errs))
        return self


_CASTS = {"hnex": int, "hney": int, "rfill": parse_radius, "volfrac": float, "penal": float,
          "ft": int, "problem": str, "nu": float, "move": float, "maxiter": int,
          "change_tol": float, "outdir": str, "problem_file": str}
KEYS = tuple(f.name for f in fields(RunConfig))


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys as in :class:`RunConfig`."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CASTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _CASTS[key](val)
    return out
