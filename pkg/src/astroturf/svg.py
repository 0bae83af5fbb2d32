"""Minimal deterministic SVG charts: horizontal bars, vertical bars, lines."""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
FONT = 'font-family="sans-serif" font-size="11"'


def _num(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _doc(width, height, body, title):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    t = f'<text x="{width / 2}" y="16" text-anchor="middle" {FONT}>{escape(title)}</text>'
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', t, *body,
                      "</svg>", ""])


def bar_chart(labels: list[str], values: list[float], title: str = "") -> str:
    """Horizontal bars, first label on top."""
    row, left, width = 18, 180, 640
    height = 30 + row * len(labels) + 10
    top = max(values, default=0) or 1
    body = []
    for i, (lab, v) in enumerate(zip(labels, values)):
        y = 28 + i * row
        w = (width - left - 60) * v / top
        body.append(f'<text x="{left - 6}" y="{y + 12}" text-anchor="end" {FONT}>'
                    f"{escape(str(lab))}</text>")
        body.append(f'<rect x="{left}" y="{y}" width="{_num(w)}" height="{row - 4}" '
                    f'fill="{PALETTE[0]}"/>')
        body.append(f'<text x="{_num(left + w + 4)}" y="{y + 12}" {FONT}>{_num(v)}</text>')
    return _doc(width, height, body, title)


def column_chart(labels: list[str], values: list[float], title: str = "") -> str:
    """Vertical bars over ordered categories, e.g. a histogram by month."""
    width, height, pad = 720, 320, 40
    n = max(len(labels), 1)
    top = max(values, default=0) or 1
    slot = (width - 2 * pad) / n
    body = [f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
            f'stroke="black"/>']
    for i, (lab, v) in enumerate(zip(labels, values)):
        h = (height - 2 * pad - 10) * v / top
        x = pad + i * slot
        body.append(f'<rect x="{_num(x + 1)}" y="{_num(height - pad - h)}" '
                    f'width="{_num(max(slot - 2, 1))}" height="{_num(h)}" fill="{PALETTE[0]}">'
                    f"<title>{escape(str(lab))}: {_num(v)}</title></rect>")
    step = max(1, n // 12)
    for i in range(0, len(labels), step):
        x = pad + (i + 0.5) * slot
        body.append(f'<text x="{_num(x)}" y="{height - pad + 14}" text-anchor="middle" '
                    f"{FONT}>{escape(str(labels[i]))}</text>")
    body.append(f'<text x="{pad - 4}" y="{pad}" text-anchor="end" {FONT}>{_num(top)}</text>')
    return _doc(width, height, body, title)


def line_chart(series: dict[str, tuple[list[float], list[float]]], title: str = "",
               x_range: tuple[float, float] | None = None,
               y_range: tuple[float, float] | None = None,
               x_label: str = "", y_label: str = "") -> str:
    """One polyline per named (xs, ys) series with a legend."""
    width, height, pad = 720, 360, 50
    xs_all = [x for xs, _ in series.values() for x in xs] or [0.0, 1.0]
    ys_all = [y for _, ys in series.values() for y in ys] or [0.0, 1.0]
    x0, x1 = x_range or (min(xs_all), max(xs_all))
    y0, y1 = y_range or (min(0.0, min(ys_all)), max(ys_all))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return pad + (width - 2 * pad) * (min(max(x, x0), x1) - x0) / (x1 - x0)

    def py(y):
        return height - pad - (height - 2 * pad) * (min(max(y, y0), y1) - y0) / (y1 - y0)

    body = [f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
            f'fill="none" stroke="black"/>',
            f'<text x="{pad}" y="{height - pad + 14}" text-anchor="middle" {FONT}>{_num(x0)}</text>',
            f'<text x="{width - pad}" y="{height - pad + 14}" text-anchor="middle" {FONT}>'
            f"{_num(x1)}</text>",
            f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" {FONT}>{_num(y0)}</text>',
            f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" {FONT}>{_num(y1)}</text>']
    if x_label:
        body.append(f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" {FONT}>'
                    f"{escape(x_label)}</text>")
    if y_label:
        body.append(f'<text x="14" y="{height / 2}" text-anchor="middle" {FONT} '
                    f'transform="rotate(-90 14 {height / 2})">{escape(y_label)}</text>')
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = pad + 14 + 14 * i
        body.append(f'<line x1="{width - pad - 120}" y1="{ly - 4}" x2="{width - pad - 104}" '
                    f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="{width - pad - 100}" y="{ly}" {FONT}>{escape(name)}</text>')
    return _doc(width, height, body, title)


def write(path: str | Path, svg: str) -> None:
    Path(path).write_text(svg, encoding="utf-8")
