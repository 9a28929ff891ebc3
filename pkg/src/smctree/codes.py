"""Integer packing of contexts.

A context ``(w[-L], ..., w[-1])`` over an alphabet of size ``m`` packs into
``sum(w[-i] * m**(i-1) for i in 1..L)``: the most recent symbol is the least
significant digit.  Dropping the oldest symbol is then ``code % m**(L-1)``,
appending a newer symbol ``a`` is ``code * m + a``, and prepending an older
symbol ``a`` is ``code + a * m**L``.
"""

from __future__ import annotations

from .trees import Context


def encode_context(w: Context, m: int) -> int:
    code = 0
    for s in w:
        code = code * m + int(s)
    return code


def decode_context(code: int, length: int, m: int) -> Context:
    out = []
    c = int(code)
    for _ in range(length):
        out.append(c % m)
        c //= m
    return tuple(reversed(out))
