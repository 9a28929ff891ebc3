"""Minimal standalone SVG rendering of the champion and bootstrap tables."""

from __future__ import annotations

from .errors import FormatError

_WIDTH, _HEIGHT = 800, 500
_MARGIN = 60


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _scale(values, lo_pix, hi_pix):
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo

    def to_pix(v):
        return lo_pix + (v - lo) / span * (hi_pix - lo_pix)

    return to_pix, lo, hi


def _frame(title: str, x_label: str, y_label: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" y2="{_HEIGHT - _MARGIN}" stroke="black"/>',
        f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_WIDTH // 2}" y="{_HEIGHT - 16}" text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="18" y="{_HEIGHT // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {_HEIGHT // 2})">{y_label}</text>',
    ]


def champions_svg(header: list[str], rows: list[list[str]]) -> str:
    required = ["leaves", "df", "loglik", "c_lo", "c_hi"]
    if header[: len(required)] != required:
        raise FormatError(f"champion CSV must start with columns {required}")
    parts = _frame("log-likelihood by number of leaves", "leaves", "log-likelihood")
    if rows:
        try:
            points = sorted((int(r[0]), float(r[2])) for r in rows)
        except (ValueError, IndexError) as exc:
            raise FormatError(f"malformed champion CSV row: {exc}") from None
        to_x, _, _ = _scale([p[0] for p in points], _MARGIN + 10, _WIDTH - _MARGIN - 10)
        to_y, ylo, yhi = _scale([p[1] for p in points], _HEIGHT - _MARGIN - 10, _MARGIN + 10)
        coords = [(to_x(x), to_y(y)) for x, y in points]
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in coords)
        parts.append(f'<polyline points="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
        for x, y in coords:
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.5" fill="firebrick"/>')
        parts.append(f'<text x="{_MARGIN}" y="{_MARGIN - 6}" font-size="10">{_fmt(yhi)}</text>')
        parts.append(f'<text x="{_MARGIN}" y="{_HEIGHT - _MARGIN + 14}" font-size="10">{_fmt(ylo)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bootstrap_svg(header: list[str], rows: list[list[str]]) -> str:
    required = ["pair_index", "smaller_leaves", "larger_leaves", "n_j", "q1", "median", "q3"]
    if header[: len(required)] != required:
        raise FormatError(f"bootstrap CSV must start with columns {required}")
    parts = _frame("scaled likelihood gains by resample size", "pair / resample size", "gain per symbol")
    if rows:
        try:
            parsed = [(int(r[0]), int(r[3]), float(r[4]), float(r[5]), float(r[6])) for r in rows]
        except (ValueError, IndexError) as exc:
            raise FormatError(f"malformed bootstrap CSV row: {exc}") from None
        parsed.sort()
        pairs = sorted({p for p, *_ in parsed})
        sizes = sorted({s for _, s, *_ in parsed})
        slots = {(p, s): i for i, (p, s) in enumerate((p, s) for p in pairs for s in sizes)}
        n_slots = len(slots)
        slot_w = (_WIDTH - 2 * _MARGIN) / max(n_slots, 1)
        values = [v for row in parsed for v in row[2:]]
        to_y, _, _ = _scale(values, _HEIGHT - _MARGIN - 10, _MARGIN + 10)
        for p, s, q1, med, q3 in parsed:
            x0 = _MARGIN + slots[(p, s)] * slot_w + slot_w * 0.2
            w = slot_w * 0.6
            y_top, y_bot = to_y(q3), to_y(q1)
            parts.append(
                f'<rect class="box" x="{_fmt(x0)}" y="{_fmt(min(y_top, y_bot))}" width="{_fmt(w)}" '
                f'height="{_fmt(abs(y_bot - y_top))}" fill="lightsteelblue" stroke="black"/>'
            )
            ym = to_y(med)
            parts.append(
                f'<line x1="{_fmt(x0)}" y1="{_fmt(ym)}" x2="{_fmt(x0 + w)}" y2="{_fmt(ym)}" '
                f'stroke="firebrick" stroke-width="1.5"/>'
            )
        for p in pairs:
            x = _MARGIN + slots[(p, sizes[0])] * slot_w
            parts.append(f'<text x="{_fmt(x)}" y="{_HEIGHT - _MARGIN + 14}" font-size="10">pair {p}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
