"""Minimal deterministic SVG charts (no plotting dependency).

Two products: population/fidelity line charts for time series, and a
heatmap with a colorbar for damping sweeps.  Output depends only on the
input data, so identical runs give identical bytes.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

_SERIES_STYLE = (
    ("p1", "P1", "#1f77b4", None),
    ("p2", "P2", "#d62728", None),
    ("p3", "P3", "#2ca02c", None),
    ("f", "F", "#9467bd", "6 3"),
)

# viridis anchors, dark (low) to bright (high)
_VIRIDIS = (
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
)

_FONT = 'font-family="Helvetica,Arial,sans-serif"'


def _num(v: float) -> str:
    return f"{float(v):.2f}"


def _label(v: float) -> str:
    return f"{float(v):.4g}"


def _color(t: float) -> str:
    t = min(1.0, max(0.0, float(t)))
    pos = t * (len(_VIRIDIS) - 1)
    k = min(int(pos), len(_VIRIDIS) - 2)
    frac = pos - k
    rgb = tuple(
        round(255 * ((1 - frac) * _VIRIDIS[k][c] + frac * _VIRIDIS[k + 1][c]))
        for c in range(3)
    )
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def series_svg(series, title: str = "") -> str:
    """Line chart of P1, P2, P3, F against time."""
    t = np.asarray(series.times, dtype=float)
    if t.size == 0:
        raise ValidationError("cannot render an empty series")
    width, height = 720, 480
    ml, mr, mt, mb = 64, 120, 36, 52
    pw, ph = width - ml - mr, height - mt - mb
    t0, t1 = float(t[0]), float(t[-1])
    tspan = (t1 - t0) or 1.0
    y_top = 1.02

    def sx(v):
        return ml + pw * (v - t0) / tspan

    def sy(v):
        return mt + ph * (1.0 - v / y_top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{ml}" y="22" {_FONT} font-size="15" fill="#222">{title}</text>'
        )
    # frame and gridlines
    for k in range(6):
        yv = k / 5.0
        y = _num(sy(yv))
        out.append(
            f'<line x1="{ml}" y1="{y}" x2="{ml + pw}" y2="{y}" stroke="#ddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{ml - 8}" y="{_num(sy(yv) + 4)}" {_FONT} font-size="11" '
            f'fill="#444" text-anchor="end">{_label(yv)}</text>'
        )
    for k in range(6):
        tv = t0 + tspan * k / 5.0
        x = _num(sx(tv))
        out.append(
            f'<line x1="{x}" y1="{mt + ph}" x2="{x}" y2="{mt + ph + 5}" stroke="#444"/>'
        )
        out.append(
            f'<text x="{x}" y="{mt + ph + 18}" {_FONT} font-size="11" fill="#444" '
            f'text-anchor="middle">{_label(tv)}</text>'
        )
    out.append(
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>'
    )
    out.append(
        f'<text x="{ml + pw / 2:.2f}" y="{height - 14}" {_FONT} font-size="12" '
        f'fill="#222" text-anchor="middle">time (us)</text>'
    )
    out.append(
        f'<text x="18" y="{mt + ph / 2:.2f}" {_FONT} font-size="12" fill="#222" '
        f'text-anchor="middle" transform="rotate(-90 18 {mt + ph / 2:.2f})">'
        "population / fidelity</text>"
    )

    for attr, label, color, dash in _SERIES_STYLE:
        values = np.asarray(getattr(series, attr), dtype=float)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        if t.size == 1:
            out.append(
                f'<circle cx="{_num(sx(t0))}" cy="{_num(sy(values[0]))}" r="4" '
                f'fill="{color}"/>'
            )
        else:
            pts = " ".join(
                f"{_num(sx(tv))},{_num(sy(v))}" for tv, v in zip(t, values)
            )
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.8"{dash_attr}/>'
            )
    # legend
    lx = ml + pw + 16
    for k, (attr, label, color, dash) in enumerate(_SERIES_STYLE):
        ly = mt + 16 + 22 * k
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 26}" y2="{ly}" stroke="{color}" '
            f'stroke-width="2"{dash_attr}/>'
        )
        out.append(
            f'<text x="{lx + 32}" y="{ly + 4}" {_FONT} font-size="12" fill="#222">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap_svg(grid, title: str = "") -> str:
    """Heatmap of F over the (kappa, gamma_m) grid with a colorbar.

    Cells are uniform per grid index (the rate grids are log-spaced); axis
    labels carry the actual rate values in rad/us.
    """
    kappa = np.asarray(grid.kappa_values, dtype=float)
    gamma = np.asarray(grid.gamma_values, dtype=float)
    f = np.asarray(grid.fidelities, dtype=float)
    if f.size == 0:
        raise ValidationError("cannot render an empty sweep")
    nk, ng = f.shape
    width, height = 720, 520
    ml, mr, mt, mb = 84, 110, 40, 64
    pw, ph = width - ml - mr, height - mt - mb
    cw, ch = pw / nk, ph / ng
    fmin, fmax = float(f.min()), float(f.max())
    span = (fmax - fmin) or 1.0

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{ml}" y="24" {_FONT} font-size="15" fill="#222">{title}</text>'
        )
    for i in range(nk):
        for j in range(ng):
            # gamma grows downward in index; draw small gamma at the bottom
            x = ml + i * cw
            y = mt + ph - (j + 1) * ch
            out.append(
                f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(cw + 0.5)}" '
                f'height="{_num(ch + 0.5)}" fill="{_color((f[i, j] - fmin) / span)}"/>'
            )
    out.append(
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>'
    )
    # axis ticks: at most 5 per axis
    for idx in _tick_indices(nk):
        x = ml + (idx + 0.5) * cw
        out.append(
            f'<text x="{_num(x)}" y="{mt + ph + 18}" {_FONT} font-size="11" '
            f'fill="#444" text-anchor="middle">{_label(kappa[idx])}</text>'
        )
    for idx in _tick_indices(ng):
        y = mt + ph - (idx + 0.5) * ch
        out.append(
            f'<text x="{ml - 8}" y="{_num(y + 4)}" {_FONT} font-size="11" '
            f'fill="#444" text-anchor="end">{_label(gamma[idx])}</text>'
        )
    out.append(
        f'<text x="{ml + pw / 2:.2f}" y="{height - 18}" {_FONT} font-size="12" '
        f'fill="#222" text-anchor="middle">kappa (rad/us)</text>'
    )
    out.append(
        f'<text x="20" y="{mt + ph / 2:.2f}" {_FONT} font-size="12" fill="#222" '
        f'text-anchor="middle" transform="rotate(-90 20 {mt + ph / 2:.2f})">'
        "gamma_m (rad/us)</text>"
    )
    # colorbar
    bx, bw, bh = ml + pw + 28, 18, ph
    steps = 32
    for k in range(steps):
        frac = (k + 0.5) / steps
        y = mt + bh - (k + 1) * bh / steps
        out.append(
            f'<rect x="{bx}" y="{_num(y)}" width="{bw}" height="{_num(bh / steps + 0.5)}" '
            f'fill="{_color(frac)}"/>'
        )
    out.append(
        f'<rect x="{bx}" y="{mt}" width="{bw}" height="{_num(bh)}" fill="none" stroke="#444"/>'
    )
    for frac, value in ((0.0, fmin), (0.5, fmin + 0.5 * span), (1.0, fmax)):
        y = mt + bh - frac * bh
        out.append(
            f'<text x="{bx + bw + 6}" y="{_num(y + 4)}" {_FONT} font-size="11" '
            f'fill="#444">{_label(value)}</text>'
        )
    out.append(
        f'<text x="{bx + bw + 6}" y="{mt - 10}" {_FONT} font-size="12" fill="#222">F</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _tick_indices(n: int) -> list[int]:
    if n <= 5:
        return list(range(n))
    step = (n - 1) / 4.0
    return sorted({round(k * step) for k in range(5)})
