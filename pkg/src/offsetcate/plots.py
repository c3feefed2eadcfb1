"""Minimal SVG line charts and heatmaps, written as plain text."""
from __future__ import annotations

import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .causal import collapsibility_pipeline
from .estimators import MethodId

PANEL_W, PANEL_H = 260, 220
MARGIN = dict(left=48, right=12, top=28, bottom=40)

COLORS = {
    MethodId.RCT_REFERENCE: "#555555",
    MethodId.FULL_OBSERVATIONAL: "#d62728",
    MethodId.CONDITIONAL_OFFSET: "#1f77b4",
    MethodId.MARGINAL_OFFSET: "#ff7f0e",
    MethodId.CONSTRAINED_OFFSET: "#2ca02c",
    MethodId.ATE_BASELINE: "#000000",
}


class _Panel:
    def __init__(self, x0, y0, xlim, ylim, title):
        self.x0, self.y0 = x0, y0
        self.xlim, self.ylim = xlim, ylim
        self.title = title
        self.parts: list[str] = []
        self.iw = PANEL_W - MARGIN["left"] - MARGIN["right"]
        self.ih = PANEL_H - MARGIN["top"] - MARGIN["bottom"]

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + MARGIN["left"] + (x - lo) / (hi - lo) * self.iw

    def py(self, y):
        lo, hi = self.ylim
        y = min(max(y, lo), hi)
        return self.y0 + MARGIN["top"] + (1.0 - (y - lo) / (hi - lo)) * self.ih

    def polyline(self, xs, ys, color, dash=None, width=1.5):
        pts = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{extra}/>'
        )

    def shade_below(self, xs, ys, color="#2ca02c", opacity=0.12):
        top = [f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys)]
        base = [f"{self.px(xs[-1]):.2f},{self.py(self.ylim[0]):.2f}",
                f"{self.px(xs[0]):.2f},{self.py(self.ylim[0]):.2f}"]
        self.parts.append(
            f'<polygon points="{" ".join(top + base)}" fill="{color}" fill-opacity="{opacity}" stroke="none"/>'
        )

    def marker(self, x, y, color, shape="circle", label=None):
        cx, cy = self.px(x), self.py(y)
        if shape == "circle":
            self.parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4" fill="{color}"/>')
        else:
            self.parts.append(
                f'<rect x="{cx - 4:.2f}" y="{cy - 4:.2f}" width="8" height="8" fill="{color}"/>'
            )
        if label:
            self.parts.append(_text(cx + 6, cy - 6, label, size=9, fill=color))

    def hline(self, y, color, dash="4,3"):
        self.polyline(self.xlim, (y, y), color, dash=dash, width=1)

    def render(self, xlabel, ylabel) -> str:
        l, t = self.x0 + MARGIN["left"], self.y0 + MARGIN["top"]
        out = [f'<rect x="{l}" y="{t}" width="{self.iw}" height="{self.ih}" fill="none" stroke="#999"/>']
        out += self.parts
        for v in np.linspace(*self.xlim, 5):
            out.append(_text(self.px(v), t + self.ih + 14, f"{v:.2g}", size=9, anchor="middle"))
        for v in np.linspace(*self.ylim, 5):
            out.append(_text(l - 4, self.py(v) + 3, f"{v:.2g}", size=9, anchor="end"))
        out.append(_text(l + self.iw / 2, self.y0 + 16, self.title, size=11, anchor="middle"))
        out.append(_text(l + self.iw / 2, t + self.ih + 30, xlabel, size=10, anchor="middle"))
        out.append(_text(self.x0 + 10, t + self.ih / 2, ylabel, size=10, anchor="middle",
                         rotate=True))
        return "\n".join(out)


def _text(x, y, s, size=10, anchor="start", fill="#000", rotate=False):
    rot = f' transform="rotate(-90 {x:.2f} {y:.2f})"' if rotate else ""
    return (f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}" fill="{fill}"{rot}>{escape(s)}</text>')


def _document(body: str, width: int, height: int) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n<rect width="100%" height="100%" fill="white"/>\n'
            f"{body}\n</svg>\n")


def _legend(methods, x, y):
    out = []
    for i, m in enumerate(methods):
        yy = y + 14 * i
        dash = ' stroke-dasharray="5,3"' if m is MethodId.ATE_BASELINE else ""
        out.append(f'<line x1="{x}" y1="{yy}" x2="{x + 18}" y2="{yy}" stroke="{COLORS[m]}" stroke-width="2"{dash}/>')
        out.append(_text(x + 24, yy + 3, m.value.replace("_", " "), size=10))
    return "\n".join(out)


def sweep_svg(rows, alpha: Optional[float] = None, y_max: Optional[float] = None) -> str:
    """PEHE against beta_x, one panel per confounding strength.

    The area under the ATE-baseline curve is shaded: a method whose line
    lies inside it beats the baseline.
    """
    rows = [r for r in rows if r.alpha == alpha]
    ors = sorted({r.or_u for r in rows})
    methods = [m for m in MethodId if any(r.method is m for r in rows)]
    bx_all = sorted({r.beta_x for r in rows})
    xlim = (bx_all[0], bx_all[-1]) if len(bx_all) > 1 else (bx_all[0] - 1, bx_all[0] + 1)
    if y_max is None:
        finite = [r.pehe for r in rows if math.isfinite(r.pehe) and r.method is not MethodId.FULL_OBSERVATIONAL]
        y_max = max(finite + [1e-3]) * 1.15
    panels = []
    for i, o in enumerate(ors):
        title = f"OR_u = {o:g}" + ("" if alpha is None else f", alpha = {alpha:g}")
        p = _Panel(i * PANEL_W, 0, xlim, (0.0, y_max), title)
        for m in methods:
            sel = sorted((r for r in rows if r.or_u == o and r.method is m), key=lambda r: r.beta_x)
            xs = [r.beta_x for r in sel]
            ys = [r.pehe for r in sel]
            if m is MethodId.ATE_BASELINE:
                p.shade_below(xs, ys)
                p.polyline(xs, ys, COLORS[m], dash="5,3")
            else:
                p.polyline(xs, ys, COLORS[m])
        panels.append(p.render("beta_x (log OR_x)", "PEHE"))
    width = max(1, len(ors)) * PANEL_W + 170
    body = "\n".join(panels) + "\n" + _legend(methods, len(ors) * PANEL_W + 10, 40)
    return _document(body, width, PANEL_H)


def example1_svg(results) -> str:
    """Log-likelihood heatmaps with the three solutions marked."""
    panels = []
    for i, r in enumerate(results):
        b0, bt, ll = r.beta0_grid, r.beta_t_grid, r.loglik_grid
        p = _Panel(i * PANEL_W, 0, (b0[0], b0[-1]), (bt[0], bt[-1]), f"OR_u = {r.or_u:g}")
        lo, hi = float(ll.min()), float(ll.max())
        # coarse cells keep the file small
        step = max(1, len(b0) // 30)
        for a in range(0, len(bt) - step, step):
            for b in range(0, len(b0) - step, step):
                level = (ll[a, b] - lo) / (hi - lo) if hi > lo else 0.0
                shade = int(255 - 150 * level ** 4)
                x1, x2 = p.px(b0[b]), p.px(b0[b + step])
                y1, y2 = p.py(bt[a + step]), p.py(bt[a])
                p.parts.append(
                    f'<rect x="{x1:.2f}" y="{y1:.2f}" width="{x2 - x1:.2f}" height="{y2 - y1:.2f}" '
                    f'fill="rgb({shade},{shade},255)"/>'
                )
        p.hline(r.beta_t_star, "#1f77b4")
        p.marker(r.beta0_star, r.beta_t_star, "#000", "rect", "rct")
        p.marker(r.full.params.beta0, r.full.params.beta_t, COLORS[MethodId.FULL_OBSERVATIONAL],
                 label="full")
        p.marker(r.offset.params.beta0, r.offset.params.beta_t, COLORS[MethodId.CONDITIONAL_OFFSET],
                 label="offset")
        panels.append(p.render("beta0", "beta_t"))
    return _document("\n".join(panels), max(1, len(results)) * PANEL_W, PANEL_H)


def collapsibility_svg(beta_t: float = 1.0, p_x1: float = 0.5, max_spread: float = 10.0) -> str:
    """Marginal log OR against the spread of baseline log odds (centred at -beta_t/2)."""
    spreads = np.linspace(0.0, max_spread, 101)
    gammas = []
    for s in spreads:
        c = -0.5 * beta_t
        gammas.append(collapsibility_pipeline({0: c - s / 2, 1: c + s / 2}, beta_t, p_x1)[0].gamma_t)
    p = _Panel(0, 0, (0.0, max_spread), (0.0, max(beta_t, 1e-3) * 1.05), "marginal vs conditional log OR")
    p.hline(beta_t, "#999")
    p.polyline(spreads, gammas, "#1f77b4")
    for label, s in (("a", 2.0), ("b", 6.0)):
        g = collapsibility_pipeline({0: -0.5 * beta_t - s / 2, 1: -0.5 * beta_t + s / 2}, beta_t, p_x1)
        p.marker(s, g[0].gamma_t, "#d62728", label=label)
    return _document(p.render("beta0(1) - beta0(0)", "gamma_t"), PANEL_W + 40, PANEL_H)
