"""Domain description files and flat CSV/SVG/JSON outputs."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np
import yaml

from .convex_domain import ConvexDomain, Disc, Ellipse, Polygon, SampledSmooth, from_family
from .quadratic_family import FamilyParams

__all__ = [
    "SpecError",
    "parse_complex",
    "domain_from_spec",
    "load_domain",
    "read_curve_csv",
    "write_curve_csv",
    "write_svg",
    "write_report",
    "fmt",
]


class SpecError(ValueError):
    """Malformed domain description (missing or mistyped fields)."""


def fmt(x) -> str:
    if isinstance(x, complex):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    return f"{x:.12g}"


def parse_complex(value) -> complex:
    """Accept ``[re, im]``, a number, or the string ``"re,im"``."""
    try:
        if isinstance(value, str):
            parts = [p for p in value.replace(" ", "").split(",") if p != ""]
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            if len(parts) != 2:
                raise ValueError
            return complex(float(parts[0]), float(parts[1]))
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return complex(float(value), 0.0)
        re, im = value
        return complex(float(re), float(im))
    except (TypeError, ValueError):
        raise SpecError(f"cannot read a complex number from {value!r}") from None


def _field(spec, name):
    if name not in spec:
        raise SpecError(f"{spec.get('type', '?')} domain needs field {name!r}")
    return spec[name]


def _points(raw):
    if not isinstance(raw, (list, tuple)):
        raise SpecError("point lists must be sequences of [re, im] pairs")
    return np.array([parse_complex(v) for v in raw])


def _number(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise SpecError(f"field {name!r} must be a number") from None


def domain_from_spec(spec: dict, base: Path | None = None) -> tuple[ConvexDomain, complex]:
    """Build ``(domain, point)`` from a parsed description.

    Construction errors of a well-formed description (e.g. a nonconvex
    polygon) propagate as plain ``ValueError``.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise SpecError("domain description needs a top-level 'type' field")
    kind = str(spec["type"]).lower()
    if kind == "polygon":
        D = Polygon(_points(_field(spec, "vertices")))
    elif kind == "disc":
        D = Disc(parse_complex(spec.get("center", [0, 0])), _number(_field(spec, "radius"), "radius"))
    elif kind == "ellipse":
        axes = _field(spec, "semi_axes")
        if not isinstance(axes, (list, tuple)) or len(axes) != 2:
            raise SpecError("semi_axes must be [semi_axis_x, semi_axis_y]")
        D = Ellipse(parse_complex(spec.get("center", [0, 0])), _number(axes[0], "semi_axes"),
                    _number(axes[1], "semi_axes"), _number(spec.get("rotation", 0.0), "rotation"))
    elif kind == "family":
        params = FamilyParams(parse_complex(_field(spec, "a")), parse_complex(_field(spec, "lambda")),
                              _number(_field(spec, "c"), "c"))
        D = from_family(params, int(spec.get("n", 2048)))
    elif kind == "sampled":
        if "csv" in spec:
            path = Path(spec["csv"])
            if base is not None and not path.is_absolute():
                path = base / path
            pts = read_curve_csv(path)
        else:
            pts = _points(_field(spec, "points"))
        D = SampledSmooth(pts)
    else:
        raise SpecError(f"unknown domain type {spec['type']!r}")
    point = parse_complex(spec["point"]) if "point" in spec else 0j
    return D, point


def load_domain(path) -> tuple[ConvexDomain, complex]:
    """Read a YAML/JSON description, or a ``t,re,im`` CSV boundary."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".csv":
            return SampledSmooth(read_curve_csv(path)), 0j
        with open(path) as fh:
            spec = yaml.safe_load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise SpecError(f"cannot parse {path}: {exc}") from None
    return domain_from_spec(spec, base=path.parent)


def read_curve_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    except (KeyError, TypeError, ValueError):
        raise SpecError(f"{path}: expected columns t, re, im") from None


def write_curve_csv(path, values) -> None:
    values = np.asarray(values, dtype=complex)
    n = values.size
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "re", "im"])
        for j, w in enumerate(values):
            wr.writerow([repr(2 * np.pi * j / n), repr(float(w.real)), repr(float(w.imag))])


def write_svg(path, boundary, psi, point=0j, notes=(), size=480) -> None:
    """Domain boundary (closed path), extremal image (polyline) and the base point."""
    boundary = np.asarray(boundary, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    allpts = np.concatenate([boundary, psi, [point]])
    x0, x1 = allpts.real.min(), allpts.real.max()
    y0, y1 = allpts.imag.min(), allpts.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span
    vb = (x0 - pad, -(y1 + pad), (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    stroke = span / 400

    def coords(z):
        return " ".join(f"{w.real:.9g},{-w.imag:.9g}" for w in z)

    closed = np.append(psi, psi[:1])
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{vb[0]:.9g} {vb[1]:.9g} {vb[2]:.9g} {vb[3]:.9g}">',
        f'<path d="M {coords(boundary)} Z" fill="#eef3fb" stroke="#1f4e9c" '
        f'stroke-width="{2 * stroke:.6g}"/>',
        f'<polyline points="{coords(closed)}" fill="none" stroke="#c0392b" '
        f'stroke-width="{stroke:.6g}" stroke-dasharray="{4 * stroke:.6g}"/>',
        f'<circle cx="{point.real:.9g}" cy="{-point.imag:.9g}" r="{3 * stroke:.6g}" fill="black"/>',
    ]
    for k, text in enumerate(notes):
        lines.append(
            f'<text x="{vb[0] + pad / 2:.9g}" y="{vb[1] + pad + k * span / 25:.9g}" '
            f'font-size="{span / 30:.6g}" font-family="monospace">{escape(text)}</text>'
        )
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


def write_report(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
