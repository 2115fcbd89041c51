"""Bit-stable CSV emission."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

MACRO_HEADER = ("t", "x", "n1", "n2", "u", "rho", "entropy_flag")
DIAG_HEADER = (
    "step", "t", "mass1", "mass2", "momentum", "entropy", "entropy_infinite",
    "clamped_mass", "truncation_warnings", "vacuum_fallbacks",
)


def fmt(x) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def _write(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_macro_csv(path, x, frames):
    """``frames``: iterable of ``(t, n1, n2, u, rho, flags)``, written time-major."""
    rows = []
    for t, n1, n2, u, rho, flags in frames:
        flags = np.zeros(len(x), dtype=int) if flags is None else flags
        for j in range(len(x)):
            rows.append((fmt(t), fmt(x[j]), fmt(n1[j]), fmt(n2[j]), fmt(u[j]), fmt(rho[j]), str(int(flags[j]))))
    _write(Path(path), MACRO_HEADER, rows)


def kinetic_frames(result):
    for t, macro, flags in result.snapshots:
        yield t, macro.n1, macro.n2, macro.bulk_u, macro.rho, flags


def euler_frames(result):
    for t, st in zip(result.times, result.states):
        yield t, st.n1, st.n2, st.velocity, st.rho, None


def write_diagnostics_csv(path, diagnostics):
    rows = []
    for k, d in enumerate(diagnostics):
        rows.append((
            str(k), fmt(d.time), fmt(d.mass[0]), fmt(d.mass[1]), fmt(d.momentum),
            fmt(d.entropy.value), str(int(d.entropy.infinite)), fmt(d.clamped_mass),
            str(d.truncation_warnings), str(d.vacuum_fallbacks),
        ))
    _write(Path(path), DIAG_HEADER, rows)


def write_compare_csv(path, reports):
    from .diagnostics import COMPARE_HEADER

    _write(Path(path), COMPARE_HEADER, [tuple(fmt(v) for v in r.row()) for r in reports])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
