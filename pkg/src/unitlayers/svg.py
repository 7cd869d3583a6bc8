"""Standalone SVG drawings of planar objects in a strip.

One unit of length is 100 SVG units and the y axis points up, so ``y = 0``
is the bottom boundary line.  Output bytes depend only on the input.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from .gadgets import Comb, CycleEmbedding, Sandwich, border_points
from .hopmetric import WitnessPath

__all__ = ["render_svg", "SCALE"]

SCALE = 100.0
_MARGIN = 30.0


def _fmt(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, xs, eps: float):
        self.x0 = float(min(xs)) - 0.3
        self.x1 = float(max(xs)) + 0.3
        self.eps = float(eps)
        self.items: list[str] = []

    def X(self, x):
        return _MARGIN + (x - self.x0) * SCALE

    def Y(self, y):
        return _MARGIN + (self.eps - y) * SCALE

    def line(self, p, q, color="black", width=1.5, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<line x1="{_fmt(self.X(p[0]))}" y1="{_fmt(self.Y(p[1]))}" '
            f'x2="{_fmt(self.X(q[0]))}" y2="{_fmt(self.Y(q[1]))}" '
            f'stroke="{color}" stroke-width="{width}"{extra}/>')

    def dot(self, p, color="black", r=3.5):
        self.items.append(f'<circle cx="{_fmt(self.X(p[0]))}" cy="{_fmt(self.Y(p[1]))}" '
                          f'r="{r}" fill="{color}"/>')

    def boundaries(self):
        for y in (0.0, self.eps):
            self.line((self.x0, y), (self.x1, y), color="#888888", width=1.0, dash="6,4")

    def text(self) -> str:
        w = (self.x1 - self.x0) * SCALE + 2 * _MARGIN
        h = self.eps * SCALE + 2 * _MARGIN
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
                f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">')
        body = "\n".join(["<rect width=\"100%\" height=\"100%\" fill=\"white\"/>"] + self.items)
        return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n{body}\n</svg>\n'


def _planar(pts) -> np.ndarray:
    arr = np.array([p.coords for p in pts], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("only planar objects (n = m = 1) can be drawn")
    return arr


def render_svg(obj, out: Optional[str | Path] = None, eps: Optional[float] = None) -> str:
    """Draw a witness path, comb, sandwich or odd cycle; optionally write it to ``out``.

    ``eps`` sets the strip drawn around the object.  Cycles carry their own
    width; for other objects it defaults to the vertical extent.
    """
    if isinstance(obj, WitnessPath):
        P = _planar(obj.vertices)
    elif isinstance(obj, Comb):
        P = _planar(obj.points())
    elif isinstance(obj, Sandwich):
        P = _planar(obj.points())
    elif isinstance(obj, CycleEmbedding):
        P = _planar(obj.vertices)
        eps = obj.eps if eps is None else eps
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    if eps is None:
        eps = float(P[:, 1].max())
    cv = _Canvas(P[:, 0], max(eps, 1e-3))
    cv.boundaries()

    if isinstance(obj, WitnessPath):
        for p, q in zip(P[:-1], P[1:]):
            cv.line(p, q, color="#1f4e9c")
        for p in P:
            cv.dot(p)
    elif isinstance(obj, Comb):
        A = _planar(obj.a)
        Z = _planar(obj.zigzag())
        for p, q in zip(A[:-1], A[1:]):
            cv.line(p, q, color="black", width=2.0)
        for p, q in zip(Z[:-1], Z[1:]):
            cv.line(p, q, color="#1f4e9c")
        for p in A:
            cv.dot(p)
        for p in _planar(obj.c):
            cv.dot(p, color="#c0392b")
    elif isinstance(obj, Sandwich):
        G = obj.grid()
        for col in G:
            cv.line(col[0], col[-1], color="#cccccc", width=1.0)
        border = {tuple(b.coords) for b in border_points(obj)}
        for p in P:
            cv.dot(p, color="#c0392b" if tuple(p) in border else "black")
    else:
        for i in range(len(P)):
            cv.line(P[i], P[(i + 1) % len(P)], color="#1f4e9c")
        for p in P:
            cv.dot(p)

    text = cv.text()
    if out is not None:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write SVG to {out}: {exc}") from exc
    return text
