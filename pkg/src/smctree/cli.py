"""Command-line front end.

Subcommands: ``champions`` (solution path over the penalty constant),
``smc`` (bootstrap selection pipeline), ``simulate``, ``loglik``, ``plot``.
Every command writes a manifest capturing the resolved configuration, the
seed, and the input digest, so runs are reproducible bit-for-bit.

Exit codes: 0 success, 1 domain error, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .constraints import DofMode, FullRule, RhythmRule, parse_rules_text
from .counting import build_count_trie
from .errors import SmcTreeError
from .estimation import champion_set, df_tree, fit_pct, per_context_log_likelihood
from .io import (
    bootstrap_csv,
    champions_csv,
    champions_json,
    file_digest,
    load_tree_file,
    manifest_text,
    read_csv_rows,
    read_sequence_file,
    serialize_pct,
    write_sequence_file,
)
from .plots import bootstrap_svg, champions_svg
from .resampling import BootstrapConfig, SmcRule, bootstrap_deltas, smc_select, split_renewal_blocks
from .simulation import rhythm_reference_model, RHYTHM_ALPHABET, simulate
from .trees import Alphabet, SymbolSequence


def _parse_alphabet(text: str | None) -> Alphabet | None:
    if text is None:
        return None
    tokens = text.split(",") if "," in text else list(text)
    return Alphabet(tuple(tokens))


def default_depth(n: int, alphabet_size: int) -> int:
    if alphabet_size < 2:
        return 1
    return max(1, min(int(math.log(n) / math.log(alphabet_size)), 12))


def _resolve_rule(args, alphabet: Alphabet):
    if args.rule == "full":
        return FullRule()
    if args.rule == "rhythm":
        if alphabet.size != 5:
            raise SmcTreeError("the rhythm rule needs a five-symbol alphabet")
        return RhythmRule()
    if args.rules_file is None:
        raise SmcTreeError("--rules-file is required with --rule custom")
    return parse_rules_text(_read_text(args.rules_file), alphabet)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


@dataclass
class RunConfig:
    """Resolved settings of one command invocation, echoed into the manifest."""

    command: str
    options: dict
    input_path: str | None = None
    outputs: list = field(default_factory=list)

    def manifest(self) -> str:
        payload = {
            "command": self.command,
            "version": __version__,
            "options": self.options,
            "outputs": sorted(self.outputs),
        }
        if self.input_path is not None:
            payload["input"] = {
                "path": self.input_path,
                "sha256": file_digest(self.input_path),
            }
        return manifest_text(payload)


def _emit(out_dir: Path, name: str, text: str, config: RunConfig) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")
    config.outputs.append(name)


def _load_input(args) -> SymbolSequence:
    alphabet = _parse_alphabet(args.alphabet)
    return read_sequence_file(args.input, mode=args.mode, alphabet=alphabet)


def _prepare_estimation(args):
    seq = _load_input(args)
    if len(seq) == 0:
        raise SmcTreeError("input sequence is empty")
    depth = args.depth if args.depth is not None else default_depth(len(seq), seq.alphabet.size)
    rule = _resolve_rule(args, seq.alphabet)
    mode = DofMode(args.dof)
    trie = build_count_trie(seq, depth)
    return seq, depth, rule, mode, trie


def cmd_champions(args) -> int:
    seq, depth, rule, mode, trie = _prepare_estimation(args)
    champs = champion_set(trie, rule, mode)
    out_dir = Path(args.out_dir)
    config = RunConfig(
        command="champions",
        options={
            "input": args.input, "mode": args.mode,
            "alphabet": list(seq.alphabet.symbols), "depth": depth,
            "rule": champs.rule_description, "dof_mode": mode.value,
        },
        input_path=args.input,
    )
    _emit(out_dir, "champions.json", champions_json(champs, seq.alphabet), config)
    _emit(out_dir, "champions.csv", champions_csv(champs), config)
    _emit(out_dir, "manifest.json", config.manifest(), config)
    print(f"{len(champs)} champion trees written to {out_dir}")
    return 0


def cmd_smc(args) -> int:
    seq, depth, rule, mode, trie = _prepare_estimation(args)
    if args.renewal is not None:
        renewal_token = args.renewal
    elif "4" in seq.alphabet.symbols:
        renewal_token = "4"
    else:
        raise SmcTreeError("no renewal symbol: pass --renewal explicitly")
    renewal = seq.alphabet.index(renewal_token)

    if args.sizes is not None:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    else:
        step = len(seq) // 10
        if step <= depth:
            raise SmcTreeError("input too short for default resample sizes; pass --sizes")
        sizes = tuple(step * j for j in range(1, 9))
    smc_rule = SmcRule(method=args.shrink, strict=args.strict, epsilon=args.epsilon)
    cfg = BootstrapConfig(sizes=sizes, num_resamples=args.resamples, seed=args.seed, rule=smc_rule)

    champs = champion_set(trie, rule, mode)
    blocks = split_renewal_blocks(seq, renewal)
    report = bootstrap_deltas(champs, blocks, cfg, depth)
    selection = smc_select(champs, report, smc_rule)
    fitted = fit_pct(selection.tree, trie)

    out_dir = Path(args.out_dir)
    config = RunConfig(
        command="smc",
        options={
            "input": args.input, "mode": args.mode,
            "alphabet": list(seq.alphabet.symbols), "depth": depth,
            "rule": champs.rule_description, "dof_mode": mode.value,
            "renewal": renewal_token, "sizes": list(sizes),
            "resamples": cfg.num_resamples, "seed": cfg.seed,
            "shrink": smc_rule.method, "strict": smc_rule.strict,
            "epsilon": smc_rule.epsilon,
            "blocks": blocks.num_blocks, "discarded_tail": blocks.discarded_tail,
        },
        input_path=args.input,
    )
    diagnostics = {
        "selected_leaves": selection.entry.leaves,
        "selected_index_from_smallest": selection.index,
        "warning_no_pair_shrinks": selection.warning,
        "pairs": [
            {
                "pair_index": p,
                "smaller_leaves": report.pair_leaves[p][0],
                "larger_leaves": report.pair_leaves[p][1],
                "shrinks": selection.shrinks[p],
                "rss_const": selection.rss_const[p],
                "rss_decay": selection.rss_decay[p],
            }
            for p in range(report.num_pairs)
        ],
    }
    _emit(out_dir, "champions.json", champions_json(champs, seq.alphabet), config)
    _emit(out_dir, "champions.csv", champions_csv(champs), config)
    _emit(out_dir, "bootstrap.csv", bootstrap_csv(report), config)
    _emit(out_dir, "selected_tree.json", serialize_pct(seq.alphabet, fitted), config)
    _emit(out_dir, "smc.json", manifest_text(diagnostics), config)
    _emit(out_dir, "manifest.json", config.manifest(), config)
    print(f"selected tree with {selection.entry.leaves} leaves "
          f"({'warning: no pair shrinks' if selection.warning else 'ok'})")
    return 0


def cmd_simulate(args) -> int:
    if args.model == "builtin:rhythm":
        alphabet, model = RHYTHM_ALPHABET, rhythm_reference_model()
    else:
        alphabet, _, model = load_tree_file(args.model)
        if model is None:
            raise SmcTreeError("model file carries no probability rows")
    data = simulate(model, args.n, seed=args.seed, burn_in=args.burn_in)
    seq = SymbolSequence(data=data, alphabet=alphabet)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sequence_file(out, seq, mode=args.mode)
    config = RunConfig(
        command="simulate",
        options={
            "model": args.model, "n": args.n, "seed": args.seed,
            "burn_in": args.burn_in, "mode": args.mode, "out": str(out),
        },
    )
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest_path.write_text(config.manifest(), encoding="utf-8")
    print(f"wrote {args.n} symbols to {out}")
    return 0


def cmd_loglik(args) -> int:
    seq = _load_input(args)
    alphabet, tree, _ = load_tree_file(args.tree)
    if tuple(alphabet.symbols) != tuple(seq.alphabet.symbols):
        raise SmcTreeError("tree and sequence alphabets differ")
    depth = args.depth if args.depth is not None else max(
        tree.height, default_depth(len(seq), seq.alphabet.size))
    rule = _resolve_rule(args, seq.alphabet)
    mode = DofMode(args.dof)
    trie = build_count_trie(seq, depth)
    terms = per_context_log_likelihood(tree, trie)
    total = sum(terms.values())
    df = df_tree(tree, rule, seq.alphabet.size, mode)
    print(f"loglik {total!r}")
    print(f"df {df} ({mode.value}, {rule.describe()})")
    for w in tree:
        print(f"context {alphabet.format_context(w)}\t{terms[w]!r}")
    return 0


def cmd_plot(args) -> int:
    header, rows = read_csv_rows(_read_text(args.csv))
    if args.kind == "champions":
        svg = champions_svg(header, rows)
    else:
        svg = bootstrap_svg(header, rows)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")
    return 0


def _add_common_estimation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="sequence file")
    p.add_argument("--mode", choices=["char", "token"], default="char")
    p.add_argument("--alphabet", default=None,
                   help="explicit alphabet (characters, or comma-separated tokens)")
    p.add_argument("--depth", type=int, default=None,
                   help="max context length (default: log n / log |A|, capped at 12)")
    p.add_argument("--rule", choices=["full", "rhythm", "custom"], default="full")
    p.add_argument("--rules-file", default=None, help="custom rule file for --rule custom")
    p.add_argument("--dof", choices=[m.value for m in DofMode], default=DofMode.ALLOWED.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smctree")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("champions", help="solution path over the penalty constant")
    _add_common_estimation_args(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_champions)

    p = sub.add_parser("smc", help="bootstrap selection pipeline")
    _add_common_estimation_args(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--renewal", default=None, help="renewal token (default '4' when present)")
    p.add_argument("--sizes", default=None, help="comma-separated resample sizes")
    p.add_argument("--resamples", type=int, default=250, help="resamples per size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shrink", choices=["rate", "threshold"], default="rate")
    p.add_argument("--strict", action="store_true",
                   help="require every pair above the selection to shrink")
    p.add_argument("--epsilon", type=float, default=1e-4,
                   help="absolute bound for the threshold shrink test")
    p.set_defaults(func=cmd_smc)

    p = sub.add_parser("simulate", help="generate a sample from a model file")
    p.add_argument("--model", required=True, help="tree file with probs, or builtin:rhythm")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--mode", choices=["char", "token"], default="char")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("loglik", help="log-likelihood of a tree on a sequence")
    _add_common_estimation_args(p)
    p.add_argument("--tree", required=True, help="tree file")
    p.set_defaults(func=cmd_loglik)

    p = sub.add_parser("plot", help="render a CSV produced by this tool as SVG")
    p.add_argument("--csv", required=True)
    p.add_argument("--kind", choices=["champions", "bootstrap"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SmcTreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{name}: {exc.strerror}" if name else str(exc)
        print(f"error: {detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
