"""CSV/JSON serialisation of hybrid arcs and domains."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .hybrid_time import ArcSegment, HybridArc, HybridTimeDomain, validate_domain


def _fmt(v: float) -> str:
    return "%.17g" % float(v)


def write_arc_csv(arc: HybridArc, path: str | Path, derivatives: bool = False) -> None:
    """One row per sample: ``t, j, x0 .. x{n-1}``. A jump shows up as two rows with the same ``t``.

    With ``derivatives`` the stored derivative follows as ``dx*`` columns and a
    right derivative differing from it (a kink) as ``kx*`` columns, blank elsewhere.
    """
    n = arc.dim
    header = ["t", "j"] + [f"x{i}" for i in range(n)]
    if derivatives:
        header += [f"dx{i}" for i in range(n)] + [f"kx{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for seg in arc.segments:
            for i, (t, x) in enumerate(zip(seg.t, seg.x)):
                row = [_fmt(t), seg.j] + [_fmt(v) for v in x]
                if derivatives:
                    row += [_fmt(v) for v in seg.dx[i]]
                    k = seg.kinks.get(i)
                    row += [""] * n if k is None else [_fmt(v) for v in k]
                w.writerow(row)


def read_arc_csv(path: str | Path, interpolation: str = "cubic-hermite") -> HybridArc:
    """Inverse of :func:`write_arc_csv`; derivative and kink columns are optional."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[:2] != ["t", "j"] or len(header) < 3:
            raise ValueError(f"{path}: expected header t, j, x0, ...")
        n = sum(1 for h in header if h.startswith("x"))
        has_d = any(h.startswith("dx") for h in header)
        rows, kinks = [], []
        for row in r:
            if not row:
                continue
            x = [float(v) for v in row[2 : 2 + n]]
            if has_d:
                rows.append((float(row[0]), int(row[1]), x, [float(v) for v in row[2 + n : 2 + 2 * n]]))
                if row[2 + 2 * n]:
                    kinks.append((len(rows) - 1, np.array([float(v) for v in row[2 + 2 * n : 2 + 3 * n]])))
            else:
                rows.append((float(row[0]), int(row[1]), x))
    arc = HybridArc.from_samples(rows, interpolation)
    if kinks:
        offsets, total = {}, 0
        for seg in arc.segments:
            offsets[seg.j] = total
            total += seg.n
        for idx, k in kinks:
            j = rows[idx][1]
            arc.segment(j).kinks[idx - offsets[j]] = k
    return arc


def domain_header(arc_or_domain, delta: float, interpolation: str = "cubic-hermite") -> dict:
    d = arc_or_domain.domain if isinstance(arc_or_domain, HybridArc) else arc_or_domain
    if isinstance(arc_or_domain, HybridArc):
        interpolation = arc_or_domain.interpolation
    return {
        "delta": float(delta),
        "interpolation": interpolation,
        "segments": [{"t_lo": a, "t_hi": b, "j": j} for a, b, j in d.as_tuples()],
    }


def write_domain_json(arc_or_domain, delta: float, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(domain_header(arc_or_domain, delta), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_domain_json(path: str | Path) -> tuple[HybridTimeDomain, float, str]:
    with open(path) as fh:
        data = json.load(fh)
    d = validate_domain([(s["t_lo"], s["t_hi"], s["j"]) for s in data["segments"]])
    return d, float(data["delta"]), data.get("interpolation", "cubic-hermite")


def shift_arc(arc: HybridArc, dt: float = 0.0, dj: int = 0) -> HybridArc:
    """Copy of ``arc`` translated in hybrid time."""
    segs = [ArcSegment.from_arrays(s.j + dj, s.t + dt, s.x, s.dx) for s in arc.segments]
    return HybridArc(segs, arc.interpolation)
