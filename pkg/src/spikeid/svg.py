"""Minimal deterministic SVG plots (eigenvalue scatter, window step plot)."""

from __future__ import annotations

from typing import Sequence

__all__ = ["spectrum_svg", "step_svg"]

_W, _H, _M = 640, 400, 50


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def _frame(title: str, xlabel: str, ylabel: str, xlo, xhi, ylo, yhi) -> list[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{_M}" y1="{_H - _M}" x2="{_W - _M}" y2="{_H - _M}" stroke="black"/>',
        f'<line x1="{_M}" y1="{_M}" x2="{_M}" y2="{_H - _M}" stroke="black"/>',
        f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{_H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {_H / 2})">{ylabel}</text>',
        f'<text x="{_M}" y="{_H - _M + 15}" text-anchor="middle" font-size="10">{xlo:g}</text>',
        f'<text x="{_W - _M}" y="{_H - _M + 15}" text-anchor="middle" font-size="10">{xhi:g}</text>',
        f'<text x="{_M - 4}" y="{_H - _M}" text-anchor="end" font-size="10">{ylo:.4g}</text>',
        f'<text x="{_M - 4}" y="{_M + 4}" text-anchor="end" font-size="10">{yhi:.4g}</text>',
    ]
    return out


def spectrum_svg(sample_eigs: Sequence[float], estimates: Sequence[tuple[int, float]], n_show: int | None = None,
                 title: str = "Sample eigenvalues and estimated spikes") -> str:
    """Circles for sample eigenvalues by rank; crosses for ``(rank, estimate)`` pairs."""
    eigs = list(sample_eigs)[: n_show or len(sample_eigs)]
    n = len(eigs)
    ys = eigs + [v for _, v in estimates]
    ylo, yhi = min(0.0, min(ys)), max(ys) * 1.05 if max(ys) > 0 else 1.0
    fx = _scale(1, max(n, 2), _M + 5, _W - _M - 5)
    fy = _scale(ylo, yhi, _H - _M, _M)
    out = _frame(title, "rank", "eigenvalue", 1, max(n, 2), ylo, yhi)
    for i, v in enumerate(eigs, start=1):
        out.append(f'<circle cx="{_fmt(fx(i))}" cy="{_fmt(fy(v))}" r="3" fill="none" stroke="blue"/>')
    for rank, v in estimates:
        x, y = fx(rank), fy(v)
        out.append(
            f'<path d="M{_fmt(x - 4)},{_fmt(y - 4)} L{_fmt(x + 4)},{_fmt(y + 4)} '
            f'M{_fmt(x - 4)},{_fmt(y + 4)} L{_fmt(x + 4)},{_fmt(y - 4)}" stroke="red" stroke-width="1.5"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def step_svg(series: dict[str, Sequence[tuple[float, float, int]]], title: str = "Source count per window") -> str:
    """Step plot of ``L`` against time, one polyline per named series of ``(t_start, t_end, L)``."""
    rows = [r for s in series.values() for r in s]
    if not rows:
        raise ValueError("nothing to plot")
    xlo = min(r[0] for r in rows)
    xhi = max(r[1] for r in rows)
    yhi = max(1, max(r[2] for r in rows)) + 1
    fx = _scale(xlo, xhi, _M, _W - _M)
    fy = _scale(0, yhi, _H - _M, _M)
    out = _frame(title, "time (ms)", "L", xlo, xhi, 0, yhi)
    colors = ("blue", "red", "green", "black")
    for idx, (name, s) in enumerate(series.items()):
        pts = []
        for t0, t1, L in s:
            pts.append(f"{_fmt(fx(t0))},{_fmt(fy(L))}")
            pts.append(f"{_fmt(fx(t1))},{_fmt(fy(L))}")
        color = colors[idx % len(colors)]
        offset = 2 * idx  # keeps coincident series visible
        out.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
            f'transform="translate(0 {-offset})"/>'
        )
        out.append(f'<text x="{_W - _M}" y="{_M + 14 * (idx + 1)}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
