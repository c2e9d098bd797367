"""Minimal deterministic SVG line charts.

No plotting library: identical inputs must yield byte-identical files, so the
chart is assembled from fixed-format strings only (no timestamps, no hashes,
coordinates rounded to two decimals).
"""

from __future__ import annotations

from .errors import ValidationError

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 130, 20, 45

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#8c6d31",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart_svg(
    series: dict[str, list[tuple[float, float]]],
    x_label: str,
    y_label: str,
) -> str:
    """Render named (x, y) series as colored polylines with axes and legend."""
    if not series:
        raise ValidationError("chart needs at least one series")
    points = [pt for pts in series.values() for pt in pts]
    if not points:
        raise ValidationError("chart needs at least one point")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.05, y_hi + 0.05
    # pad the y range a little so extreme points stay off the frame
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
    ]
    font = 'font-family="sans-serif" font-size="12"'
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{py(y_lo):.2f}" x2="{_fmt(x)}" '
            f'y2="{py(y_lo) + 5:.2f}" stroke="#333333"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{py(y_lo) + 18:.2f}" text-anchor="middle" {font}>'
            f"{t:g}</text>"
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        out.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{_fmt(y)}" x2="{_MARGIN_L}" '
            f'y2="{_fmt(y)}" stroke="#333333"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{_fmt(y + 4)}" text-anchor="end" {font}>'
            f"{t:.3g}</text>"
        )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_HEIGHT - 8}" '
        f'text-anchor="middle" {font}>{x_label}</text>'
    )
    out.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.2f}" text-anchor="middle" {font} '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.2f})">{y_label}</text>'
    )
    for i, (label, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        for x, y in pts:
            out.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>'
            )
        ly = _MARGIN_T + 14 + 16 * i
        lx = _WIDTH - _MARGIN_R + 10
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(f'<text x="{lx + 24}" y="{ly}" {font}>{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
