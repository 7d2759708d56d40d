"""Orbit persistence: JSON orbit files and sampled-trajectory CSV export.

An orbit file stores the run parameters, the group generators in the text
format of the group parser, every Fourier coefficient at 17 significant
digits, summary quantities, and a checksum of the coefficient table.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import ChecksumMismatch, SchemaError
from .groups import Masses, SymmetryGroup, format_generator, parse_generator
from .loops import Loop, eval_loop

_REQUIRED = ("alpha", "omega", "masses", "group", "N", "modes", "checksum")


def _mode_rows(loop: Loop):
    rows = []
    for i in (1, 2, 3):
        for n in range(-loop.N, loop.N + 1):
            c = loop.mode(i, n)
            if c != 0:
                rows.append([i, n, float(c.real), float(c.imag)])
    return rows


def _checksum(rows) -> str:
    text = ";".join(f"{i},{n},{re!r},{im!r}" for i, n, re, im in rows)
    return hashlib.sha256(text.encode()).hexdigest()


def save_orbit(path, loop: Loop, G: SymmetryGroup, omega, alpha, seed=0,
               action=None, gradient_norm=None, angular_momentum=None,
               min_pair_distance=None) -> None:
    rows = _mode_rows(loop)
    doc = {
        "alpha": float(alpha),
        "omega": float(omega),
        "masses": [loop.masses.m1, loop.masses.m2, loop.masses.m3],
        "group": [format_generator(g) for g in G.generators],
        "N": loop.N,
        "seed": seed,
        "modes": rows,
        "action": action,
        "gradient_norm": gradient_norm,
        "angular_momentum": angular_momentum,
        "min_pair_distance": min_pair_distance,
        "checksum": _checksum(rows),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_orbit(path):
    """Returns (loop, group, doc).  Raises SchemaError / ChecksumMismatch."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"unreadable orbit file: {exc}") from exc
    for key in _REQUIRED:
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    if _checksum(doc["modes"]) != doc["checksum"]:
        raise ChecksumMismatch("mode table does not match its checksum")
    try:
        masses = Masses(*doc["masses"])
        N = int(doc["N"])
        modes = np.zeros((3, 2 * N + 1), dtype=complex)
        for i, n, re, im in doc["modes"]:
            modes[int(i) - 1, int(n) + N] = re + 1j * im
        loop = Loop(masses, modes, N)
        from .groups import generate_closure

        G = generate_closure([parse_generator(s) for s in doc["group"]])
    except (TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"malformed orbit file: {exc}") from exc
    return loop, G, doc


def export_trajectory_csv(path, loop: Loop, samples: int = 512) -> None:
    """CSV columns t,x1re,x1im,x2re,x2im,x3re,x3im on the uniform grid."""
    x = eval_loop(loop.modes, samples)
    t = 2 * np.pi * np.arange(samples) / samples
    with open(path, "w") as fh:
        fh.write("t,x1re,x1im,x2re,x2im,x3re,x3im\n")
        for k in range(samples):
            vals = [t[k]]
            for i in range(3):
                vals += [x[i, k].real, x[i, k].imag]
            fh.write(",".join(f"{v:.17g}" for v in vals) + "\n")
