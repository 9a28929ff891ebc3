"""File formats: sequences, tree files, champion and bootstrap tables.

Tree files are JSON documents with an ``alphabet`` (list of tokens) and
``contexts`` (records with a token-list ``context`` and an optional ``probs``
row).  Serialization is canonical, so parse(serialize(t)) reproduces t
bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import FormatError
from .estimation import ChampionSet
from .resampling import BootstrapReport
from .trees import Alphabet, Context, ContextTree, ProbabilisticContextTree, SymbolSequence


def read_sequence_text(text: str, mode: str = "char",
                       alphabet: Alphabet | None = None) -> SymbolSequence:
    """Decode a sequence payload.

    ``char`` mode treats every non-whitespace character as one symbol;
    ``token`` mode splits on whitespace.  Without an explicit alphabet the
    sorted set of tokens present becomes the alphabet.
    """
    if mode == "char":
        tokens = [ch for ch in text if not ch.isspace()]
    elif mode == "token":
        tokens = text.split()
    else:
        raise ValueError("mode must be 'char' or 'token'")
    if alphabet is None:
        if not tokens:
            raise FormatError("cannot infer an alphabet from an empty sequence")
        alphabet = Alphabet(tuple(sorted(set(tokens))))
    data = alphabet.encode(tokens)
    return SymbolSequence(data=data, alphabet=alphabet)


def write_sequence_text(seq: SymbolSequence, mode: str = "char") -> str:
    tokens = seq.tokens()
    if mode == "char":
        if any(len(t) != 1 for t in seq.alphabet.symbols):
            raise ValueError("char mode requires single-character tokens")
        body = "".join(tokens)
        lines = [body[i: i + 80] for i in range(0, len(body), 80)]
    elif mode == "token":
        lines = [" ".join(tokens[i: i + 40]) for i in range(0, len(tokens), 40)]
    else:
        raise ValueError("mode must be 'char' or 'token'")
    return "\n".join(lines) + ("\n" if lines else "")


def read_sequence_file(path: str | Path, mode: str = "char",
                       alphabet: Alphabet | None = None) -> SymbolSequence:
    return read_sequence_text(Path(path).read_text(encoding="utf-8"), mode, alphabet)


def write_sequence_file(path: str | Path, seq: SymbolSequence, mode: str = "char") -> None:
    Path(path).write_text(write_sequence_text(seq, mode), encoding="utf-8")


def _context_tokens(alphabet: Alphabet, context: Context) -> list[str]:
    return [alphabet.symbols[s] for s in context]


def serialize_tree(alphabet: Alphabet, tree: ContextTree,
                   probs: dict | None = None) -> str:
    records = []
    for w in tree:
        record: dict = {"context": _context_tokens(alphabet, w)}
        if probs is not None:
            record["probs"] = [float(p) for p in probs[w]]
        records.append(record)
    doc = {"alphabet": list(alphabet.symbols), "contexts": records}
    return json.dumps(doc, indent=2) + "\n"


def serialize_pct(alphabet: Alphabet, pct: ProbabilisticContextTree) -> str:
    return serialize_tree(alphabet, pct.tree, pct.probs)


def parse_tree(text: str):
    """Parse a tree file into (alphabet, tree, pct-or-None)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid tree file: {exc}") from None
    try:
        alphabet = Alphabet(tuple(doc["alphabet"]))
        records = doc["contexts"]
        contexts = [tuple(alphabet.index(t) for t in rec["context"]) for rec in records]
        tree = ContextTree.from_contexts(contexts)
        rows = {}
        with_probs = [rec for rec in records if "probs" in rec and rec["probs"] is not None]
        if with_probs:
            if len(with_probs) != len(records):
                raise FormatError("either all contexts carry probs or none do")
            for rec, w in zip(records, contexts):
                rows[w] = tuple(float(p) for p in rec["probs"])
            return alphabet, tree, ProbabilisticContextTree(tree=tree, probs=rows)
        return alphabet, tree, None
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid tree file: {exc}") from None


def load_tree_file(path: str | Path):
    return parse_tree(Path(path).read_text(encoding="utf-8"))


def _float_text(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def champions_csv(champions: ChampionSet) -> str:
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["leaves", "df", "loglik", "c_lo", "c_hi"])
    for e in champions:
        writer.writerow([e.leaves, e.df, _float_text(e.loglik),
                         _float_text(e.c_lo), _float_text(e.c_hi)])
    return out.getvalue()


def champions_json(champions: ChampionSet, alphabet: Alphabet) -> str:
    entries = []
    for e in champions:
        entries.append({
            "leaves": e.leaves,
            "df": e.df,
            "loglik": float(e.loglik),
            "c_lo": float(e.c_lo) if math.isfinite(e.c_lo) else None,
            "c_hi": float(e.c_hi) if math.isfinite(e.c_hi) else None,
            "contexts": [_context_tokens(alphabet, w) for w in e.tree],
        })
    doc = {
        "n": champions.n,
        "depth": champions.d,
        "alphabet": list(alphabet.symbols),
        "rule": champions.rule_description,
        "dof_mode": champions.dof_mode.value,
        "entries": entries,
    }
    return json.dumps(doc, indent=2) + "\n"


def bootstrap_csv(report: BootstrapReport) -> str:
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["pair_index", "smaller_leaves", "larger_leaves", "n_j", "q1", "median", "q3"])
    q1, med, q3 = report.q1, report.median, report.q3
    for p, (small, large) in enumerate(report.pair_leaves):
        for j, size in enumerate(report.sizes):
            writer.writerow([p, small, large, size,
                             _float_text(q1[p, j]), _float_text(med[p, j]), _float_text(q3[p, j])])
    return out.getvalue()


def read_csv_rows(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows:
        raise FormatError("empty CSV payload")
    return rows[0], rows[1:]


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_digest(path: str | Path) -> str:
    return sha256_hex(Path(path).read_bytes())


def manifest_text(payload: dict) -> str:
    def _convert(obj):
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        raise TypeError(f"not JSON serializable: {obj!r}")

    return json.dumps(payload, indent=2, sort_keys=True, default=_convert) + "\n"
