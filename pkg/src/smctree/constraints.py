"""Incidence rules: which next-symbol transitions a model is allowed to use.

A rule assigns 0/1 to every (string, next symbol) pair and must be
suffix-consistent: once a transition is forbidden after some string, it stays
forbidden after every longer string ending the same way.  Degrees of freedom
of a tree are accumulated per context from the allowed transitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .codes import decode_context, encode_context
from .errors import FormatError
from .trees import Alphabet, Context, ContextTree, is_suffix


class DofMode(Enum):
    """How a context's allowed transitions convert to degrees of freedom."""

    ALLOWED = "allowed"  # count every permitted next symbol
    FREE = "free"        # permitted minus one, floored at zero


@dataclass(frozen=True)
class FullRule:
    """No restriction: every transition is allowed."""

    def allows(self, w: Context, a: int) -> bool:
        return True

    def chi_matrix(self, codes: np.ndarray, length: int, m: int) -> np.ndarray:
        return np.ones((len(codes), m), dtype=np.uint8)

    def describe(self) -> str:
        return "full"


@dataclass(frozen=True)
class SuffixPatternRule:
    """Forbids (pattern, symbol) pairs; a pattern matches any string ending with it.

    Suffix-consistency holds by construction: a string matching a pattern
    keeps matching it after arbitrary extension into the past.
    """

    forbidden: tuple[tuple[Context, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple((tuple(p), int(a)) for p, a in self.forbidden)
        object.__setattr__(self, "forbidden", pairs)
        if any(len(p) == 0 for p, _ in pairs):
            raise ValueError("forbidden patterns must be non-empty")

    def allows(self, w: Context, a: int) -> bool:
        w = tuple(w)
        return not any(a == b and is_suffix(p, w) for p, b in self.forbidden)

    def chi_matrix(self, codes: np.ndarray, length: int, m: int) -> np.ndarray:
        out = np.ones((len(codes), m), dtype=np.uint8)
        for pattern, symbol in self.forbidden:
            q = len(pattern)
            if q > length:
                continue
            target = encode_context(pattern, m)
            out[(codes % (m ** q)) == target, symbol] = 0
        return out

    def describe(self) -> str:
        return f"custom({len(self.forbidden)} patterns)"


# Rhythm coding over five symbols: 0/1 syllables inside a prosodic word
# (unstressed/stressed), 2/3 word-initial syllables (unstressed/stressed),
# 4 sentence boundary.
@dataclass(frozen=True)
class RhythmRule:
    """Transition restrictions of the rhythmic five-symbol coding.

    After a sentence boundary (4) only a word-initial syllable (2 or 3) may
    follow.  A stressed syllable (1 or 3) allows at most three unstressed
    syllables (0) right after it.  Between word boundaries a word carries one
    stress: after a 3, no 1 until a 2 opens a new word; after a 2, no 2 or 3
    until the word's 1 arrives.  A boundary 4 resets the word-internal state.
    """

    alphabet_size: int = 5

    def allows(self, w: Context, a: int) -> bool:
        w = tuple(w)
        if w and w[-1] == 4:
            return a in (2, 3)
        if a == 0 and len(w) >= 4 and w[-3:] == (0, 0, 0) and w[-4] in (1, 3):
            return False
        last_nonzero = next((s for s in reversed(w) if s != 0), None)
        if last_nonzero == 3 and a == 1:
            return False
        if last_nonzero == 2 and a in (2, 3):
            return False
        return True

    def chi_matrix(self, codes: np.ndarray, length: int, m: int) -> np.ndarray:
        if m != 5:
            raise ValueError("the rhythm rule is defined over a five-symbol alphabet")
        codes = np.asarray(codes, dtype=np.int64)
        out = np.ones((len(codes), 5), dtype=np.uint8)
        if length == 0:
            return out
        ends_4 = (codes % 5) == 4
        out[ends_4] = 0
        out[ends_4, 2] = 1
        out[ends_4, 3] = 1
        if length >= 4:
            tail = codes % (5 ** 4)
            stressed_run = (tail == encode_context((1, 0, 0, 0), 5)) | (tail == encode_context((3, 0, 0, 0), 5))
            out[stressed_run & ~ends_4, 0] = 0
        # Most recent non-zero symbol, scanning newest digit outward.
        last_nonzero = np.zeros(len(codes), dtype=np.int64)
        undecided = np.ones(len(codes), dtype=bool)
        for i in range(length):
            digit = (codes // (5 ** i)) % 5
            pick = undecided & (digit != 0)
            last_nonzero[pick] = digit[pick]
            undecided &= ~pick
        after_3 = (last_nonzero == 3) & ~ends_4
        out[after_3, 1] = 0
        after_2 = (last_nonzero == 2) & ~ends_4
        out[after_2, 2] = 0
        out[after_2, 3] = 0
        return out

    def describe(self) -> str:
        return "rhythm"


IncidenceRule = FullRule | RhythmRule | SuffixPatternRule


def chi(rule, w: Context, a: int) -> int:
    """Indicator of the transition ``w -> a`` being allowed."""
    return 1 if rule.allows(tuple(w), int(a)) else 0


def node_dof(rule, w: Context, m: int, mode: DofMode) -> int:
    allowed = sum(chi(rule, w, a) for a in range(m))
    if mode is DofMode.ALLOWED:
        return allowed
    return max(allowed - 1, 0)


def df_tree(tree: ContextTree, rule, m: int, mode: DofMode) -> int:
    """Degrees of freedom of a tree under a rule, per the selected mode."""
    return sum(node_dof(rule, w, m, mode) for w in tree.contexts)


def validate_consistency(rule, alphabet_size: int, probe_depth: int = 6):
    """Exhaustively check suffix-consistency up to ``probe_depth``.

    Checks every one-symbol extension, which by induction covers arbitrary
    extensions.  Returns ``None`` when consistent, otherwise the first
    violating triple ``(w, u, a)`` where prepending symbol ``u`` to ``w``
    re-allows the forbidden symbol ``a``.
    """
    m = alphabet_size
    if probe_depth < 1:
        raise ValueError("probe_depth must be at least 1")
    for length in range(0, probe_depth):
        base_codes = np.arange(m ** length, dtype=np.int64)
        chi_base = rule.chi_matrix(base_codes, length, m)
        ext_codes = np.arange(m ** (length + 1), dtype=np.int64)
        chi_ext = rule.chi_matrix(ext_codes, length + 1, m).reshape(m, m ** length, m)
        bad = (chi_base[None, :, :] == 0) & (chi_ext == 1)
        if bad.any():
            u, w_code, a = (int(v[0]) for v in np.nonzero(bad))
            return decode_context(w_code, length, m), u, a
    return None


def parse_rules_text(text: str, alphabet: Alphabet) -> SuffixPatternRule:
    """Parse ``forbid <pattern> -> <symbol>`` lines into a rule.

    Patterns are token strings read oldest-to-newest; multi-character tokens
    must be comma-separated.  Blank lines and ``#`` comments are skipped.
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "forbid" or parts[2] != "->":
            raise FormatError(f"line {lineno}: expected 'forbid <pattern> -> <symbol>'")
        pattern_text, symbol_text = parts[1], parts[3]
        tokens: Iterable[str]
        if "," in pattern_text:
            tokens = pattern_text.split(",")
        else:
            tokens = list(pattern_text)
        try:
            pattern = tuple(alphabet.index(t) for t in tokens)
            symbol = alphabet.index(symbol_text)
        except KeyError as exc:
            raise FormatError(f"line {lineno}: {exc.args[0]}") from None
        pairs.append((pattern, symbol))
    return SuffixPatternRule(tuple(pairs))
