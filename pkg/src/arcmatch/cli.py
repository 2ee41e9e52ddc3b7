"""``arcmatch`` command line."""

from __future__ import annotations

import json
import os
import statistics
import sys
from typing import Any

import click
import numpy as np

from . import arctree
from .arcstr import read_dotbracket, wrap
from .crosscheck import CrossChecker
from .engine import MODES, EngineConfig, naps, naps_prepared, prepare_text, wrap_pair
from .errors import ArcMatchError, InputError
from .gamma import GammaSeq, PatternContext
from .instances import bench_instance, random_instance
from .oracle import MAX_TEXT
from .succinct import encode

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT = 0, 1, 2
REC_ORACLE_CAP = 400


def _default_mode() -> str:
    mode = os.environ.get("ARCMATCH_MODE", "uncompressed")
    if mode not in MODES:
        raise click.UsageError(f"ARCMATCH_MODE={mode!r} is not one of {', '.join(MODES)}")
    return mode


def _mutate_from_env() -> bool:
    return os.environ.get("ARCMATCH_MUTATE_PHI", "") not in ("", "0")


mode_option = click.option(
    "--mode",
    type=click.Choice(MODES),
    default=None,
    help="Engine mode (default: $ARCMATCH_MODE or uncompressed).",
)


def _emit(record: dict[str, Any], as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(record, sort_keys=True))
        return
    for key, value in record.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                click.echo(f"{key}.{sub}: {_plain(v)}")
        else:
            click.echo(f"{key}: {_plain(value)}")


def _plain(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _load_pairs(pattern_file: str, text_file: str):
    try:
        patterns = read_dotbracket(pattern_file)
        texts = read_dotbracket(text_file)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if not patterns or not texts:
        click.echo("error: no records found", err=True)
        sys.exit(EXIT_INPUT)
    return [(p, t) for p in patterns for t in texts]


def _run_report(p, t, mode: str, with_stats: bool, flip_phi: bool) -> tuple[dict[str, Any], Any]:
    res = naps(p.string, t.string, EngineConfig(mode=mode, flip_phi=flip_phi))
    rec: dict[str, Any] = {
        "pattern": p.name,
        "text": t.name,
        "mode": mode,
        "is_subsequence": res.is_subsequence,
        "gamma_root": res.gamma_root,
        "longest_prefix": res.longest_prefix,
        "wrapped": res.wrapped,
        "m": len(p.string),
        "n": len(t.string),
        "pattern_arcs": p.string.n_arcs,
        "text_arcs": t.string.n_arcs,
    }
    if with_stats:
        s = res.stats
        rec["stats"] = {
            "initialize": s.initialize,
            "extend": s.extend,
            "combine": s.combine,
            "meld": s.meld,
            "encode": s.encode,
            "decode": s.decode,
            "access": s.access,
            "peak_live_gamma": s.peak_live_gamma,
            "peak_gamma_bits": s.peak_gamma_bits,
            "lightdepth_max": res.lightdepth_max,
            "spaces_total": res.spaces_total,
            "tree_arcs": res.text_arcs,
            "wall_time": s.wall_time,
        }
    return rec, res


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Arc-preserving subsequence matching for nested arc-annotated strings."""


@main.command()
@click.argument("pattern_file", type=click.Path(dir_okay=False))
@click.argument("text_file", type=click.Path(dir_okay=False))
@mode_option
@click.option("--stats", "with_stats", is_flag=True, help="Include operation counts and peaks.")
@click.option("--json", "as_json", is_flag=True, help="One JSON record per pattern/text pair.")
@click.option("--mutate-phi", is_flag=True, hidden=True)
def check(pattern_file, text_file, mode, with_stats, as_json, mutate_phi):
    """Exit 0 if every pattern is an arc-preserving subsequence of every text, else 1."""
    mode = mode or _default_mode()
    flip = mutate_phi or _mutate_from_env()
    all_true = True
    for i, (p, t) in enumerate(_load_pairs(pattern_file, text_file)):
        rec, res = _run_report(p, t, mode, with_stats, flip)
        if i and not as_json:
            click.echo("")
        _emit(rec, as_json)
        all_true &= res.is_subsequence
    sys.exit(EXIT_TRUE if all_true else EXIT_FALSE)


@main.command()
@click.argument("pattern_file", type=click.Path(dir_okay=False))
@click.argument("text_file", type=click.Path(dir_okay=False))
@mode_option
@click.option("--json", "as_json", is_flag=True)
def prefix(pattern_file, text_file, mode, as_json):
    """Print the longest pattern prefix that embeds in the text."""
    mode = mode or _default_mode()
    for p, t in _load_pairs(pattern_file, text_file):
        res = naps(p.string, t.string, EngineConfig(mode=mode, collect_stats=False))
        if as_json:
            _emit({"pattern": p.name, "text": t.name, "mode": mode, "longest_prefix": res.longest_prefix}, True)
        else:
            click.echo(res.longest_prefix)


@main.command()
@click.option("--count", default=1000, show_default=True, type=click.IntRange(min=0))
@click.option("--max-m", default=8, show_default=True, type=click.IntRange(min=0))
@click.option("--max-n", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--alphabet", default="ACGU", show_default=True)
@click.option("--mutate-phi", is_flag=True, hidden=True)
def fuzz(count, max_m, max_n, seed, alphabet, mutate_phi):
    """Cross-check all engine modes against the oracles on random instances."""
    oracles = []
    if max_n + 2 <= MAX_TEXT:
        oracles += ["embed", "def"]
    if max_n + 2 <= REC_ORACLE_CAP:
        oracles.append("rec")
    checker = CrossChecker(MODES, oracles, flip_phi=mutate_phi or _mutate_from_env())
    rng = np.random.default_rng(seed)
    first = None
    for _ in range(count):
        P, Q = random_instance(rng, max_m, max_n, alphabet=alphabet)
        div = checker.check(P, Q)
        if div is not None and first is None:
            first = div
    tally = checker.tally
    click.echo(f"oracles: {', '.join(oracles) or 'none'}")
    click.echo(f"positives: {tally.positives}/{tally.instances}")
    click.echo(f"encodings audited: {tally.envelope_checked}, violations: {tally.envelope_violations}")
    click.echo(f"{tally.agree}/{tally.instances} agree")
    if first is not None:
        click.echo(str(first))
        sys.exit(1)


@main.command()
@click.option("--m", "ms", multiple=True, type=click.IntRange(min=1), default=(100,), show_default=True)
@click.option("--n", "ns", multiple=True, type=click.IntRange(min=2), default=(10_000,), show_default=True)
@click.option("--mode", "modes", multiple=True, type=click.Choice(MODES))
@click.option("--repeats", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--arc-fraction", default=0.25, show_default=True, type=click.FloatRange(0, 0.5))
@click.option("--json", "as_json", is_flag=True)
def bench(ms, ns, modes, repeats, seed, arc_fraction, as_json):
    """Time the engine on seeded instances; report medians and size ratios."""
    modes = modes or (_default_mode(),)
    rows = []
    for mode in modes:
        for m in ms:
            for n in ns:
                P, Q = bench_instance(m, n, seed, arc_fraction=arc_fraction)
                P2, Q2, wrapped = wrap_pair(P, Q)
                ctx, text = PatternContext(P2), prepare_text(Q2)
                codes = ctx.text_codes(Q2)
                cfg = EngineConfig(mode=mode)
                naps_prepared(ctx, text, cfg, wrapped=wrapped, qcodes=codes)  # warm-up
                runs = [naps_prepared(ctx, text, cfg, wrapped=wrapped, qcodes=codes) for _ in range(repeats)]
                s = runs[-1].stats
                rows.append(
                    {
                        "mode": mode,
                        "m": m,
                        "n": n,
                        "engine_m": ctx.m,
                        "engine_n": text.n,
                        "tree_arcs": text.n_arcs,
                        "lightdepth_max": text.max_lightdepth,
                        "spaces_total": text.spaces_total,
                        "is_subsequence": runs[-1].is_subsequence,
                        "initialize": s.initialize,
                        "extend": s.extend,
                        "combine": s.combine,
                        "meld": s.meld,
                        "encode": s.encode,
                        "decode": s.decode,
                        "access": s.access,
                        "peak_live_gamma": s.peak_live_gamma,
                        "peak_gamma_bits": s.peak_gamma_bits,
                        "per_sequence_bits_bound": 2 * ctx.m + 1,
                        "wall_time_median": statistics.median(r.stats.wall_time for r in runs),
                        "wall_times": [r.stats.wall_time for r in runs],
                    }
                )
    if as_json:
        for row in rows:
            click.echo(json.dumps(row, sort_keys=True))
        return
    cols = ["mode", "m", "n", "tree_arcs", "lightdepth_max", "spaces_total", "initialize", "extend",
            "combine", "meld", "peak_live_gamma", "peak_gamma_bits", "per_sequence_bits_bound", "wall_time_median"]
    table = [[_plain(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in table)) for i, c in enumerate(cols)]
    click.echo("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
    for row in table:
        click.echo("  ".join(v.rjust(w) for v, w in zip(row, widths)))
    for a, b in zip(rows, rows[1:]):
        if a["mode"] == b["mode"] and a["wall_time_median"] > 0:
            ratio = b["wall_time_median"] / a["wall_time_median"]
            click.echo(f"ratio {b['mode']} (m={b['m']}, n={b['n']}) / (m={a['m']}, n={a['n']}): {ratio:.3f}")


@main.command()
@click.argument("text_file", type=click.Path(dir_okay=False))
def tree(text_file):
    """Dump the heavy-path decomposed arc tree of each (wrapped) text record."""
    try:
        records = read_dotbracket(text_file)
    except (InputError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    for rec in records:
        T = arctree.heavy_decompose(arctree.build(wrap(rec.string)))
        click.echo(f">{rec.name} arcs={len(T)} lightdepth_max={T.max_lightdepth} spaces_total={arctree.spaces_count(T)}")
        click.echo(T.dump())


@main.command("encode")
@click.argument("values")
@click.option("--descending", is_flag=True, help="VALUES run from the last suffix to the first.")
def encode_cmd(values, descending):
    """Show the V/U bitstrings of a Gamma sequence given as comma-separated values."""
    try:
        seq = [int(v) for v in values.split(",") if v.strip()]
        g = GammaSeq.from_values(seq[::-1] if descending else seq)
        c = encode(g)
    except (ValueError, ArcMatchError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    click.echo(f"V={c.V.to_string()}")
    click.echo(f"U={c.U.to_string()}")
    click.echo(c.hexdump())


if __name__ == "__main__":
    main()
