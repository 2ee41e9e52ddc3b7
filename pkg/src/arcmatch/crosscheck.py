"""Cross-check the engine modes against each other and against the oracles.

Shared by the ``fuzz`` command and the test suites.  Wrapped patterns,
prepared texts and symbol codes are cached so exhaustive sweeps over
thousands of small strings stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .arcstr import ArcAnnotatedString
from .engine import MODES, EngineConfig, NapsResult, PreparedText, naps_prepared, prepare_text, wrap_pair
from .gamma import PatternContext
from .oracle import MAX_TEXT, embed_exists, gamma_def, gamma_rec


def _key(S: ArcAnnotatedString) -> tuple[str, str]:
    return S.bases, S.structure


@dataclass
class Divergence:
    pattern: ArcAnnotatedString
    text: ArcAnnotatedString
    detail: str

    def __str__(self) -> str:
        return (
            f"divergence: {self.detail}\n"
            f"  P = {self.pattern.bases!r} {self.pattern.structure!r}\n"
            f"  Q = {self.text.bases!r} {self.text.structure!r}"
        )


@dataclass
class CheckTally:
    instances: int = 0
    positives: int = 0
    envelope_checked: int = 0
    envelope_violations: int = 0
    divergences: list[Divergence] = field(default_factory=list)

    @property
    def agree(self) -> int:
        return self.instances - len(self.divergences)


class CrossChecker:
    """Runs every requested engine mode and oracle on one instance.

    ``oracles`` may contain ``"embed"`` (decision vs. backtracking search),
    ``"def"`` (gamma values vs. the definition, wrapped and unwrapped) and
    ``"rec"`` (gamma values vs. the memoized recurrence).  Oracles are
    skipped silently when the text exceeds ``cap``.
    """

    def __init__(
        self,
        modes: Sequence[str] = MODES,
        oracles: Iterable[str] = ("embed", "def", "rec"),
        *,
        flip_phi: bool = False,
        debug: bool = True,
        cap: int = MAX_TEXT,
    ):
        self.configs = [EngineConfig(mode=m, debug=debug, flip_phi=flip_phi) for m in modes]
        self.oracles = frozenset(oracles)
        unknown = self.oracles - {"embed", "def", "rec"}
        if unknown:
            raise ValueError(f"unknown oracles {sorted(unknown)}")
        self.cap = cap
        self.tally = CheckTally()
        self._contexts: dict[tuple[str, str], PatternContext] = {}
        self._texts: dict[tuple[str, str], PreparedText] = {}
        self._codes: dict[tuple[bytes, tuple[str, str]], np.ndarray] = {}

    def _prepared(self, P2: ArcAnnotatedString, Q2: ArcAnnotatedString):
        pk, qk = _key(P2), _key(Q2)
        ctx = self._contexts.get(pk)
        if ctx is None:
            ctx = self._contexts[pk] = PatternContext(P2)
        text = self._texts.get(qk)
        if text is None:
            text = self._texts[qk] = prepare_text(Q2)
        ck = (ctx.alphabet.tobytes(), qk)
        codes = self._codes.get(ck)
        if codes is None:
            codes = self._codes[ck] = ctx.text_codes(Q2)
        return ctx, text, codes

    def run(self, P: ArcAnnotatedString, Q: ArcAnnotatedString) -> tuple[list[NapsResult], Divergence | None]:
        P2, Q2, wrapped = wrap_pair(P, Q)
        ctx, text, codes = self._prepared(P2, Q2)
        results = []
        for cfg in self.configs:
            try:
                results.append(naps_prepared(ctx, text, cfg, wrapped=wrapped, qcodes=codes))
            except (ValueError, RuntimeError) as exc:
                return results, Divergence(P, Q, f"mode {cfg.mode} raised {type(exc).__name__}: {exc}")
        return results, self._compare(P, Q, P2, Q2, results)

    def _compare(self, P, Q, P2, Q2, results: list[NapsResult]) -> Divergence | None:
        first = results[0]
        for cfg, r in zip(self.configs, results):
            if r.stats is not None and r.stats.envelope_violations:
                return Divergence(P, Q, f"mode {cfg.mode}: {r.stats.envelope_violations} encodings broke the envelope")
            if not np.array_equal(r.root.values, first.root.values):
                return Divergence(
                    P, Q,
                    f"mode {cfg.mode} root {r.root.tolist()} != mode {self.configs[0].mode} root {first.root.tolist()}",
                )
        small = len(Q2) <= self.cap
        m2, n2 = len(P2), len(Q2)
        if small and "embed" in self.oracles:
            e = embed_exists(P, Q, cap=self.cap)
            if e != first.is_subsequence:
                return Divergence(P, Q, f"engine decision {first.is_subsequence}, embedding search {e}")
        if small and "def" in self.oracles:
            g = gamma_def(P2, Q2, 1, m2, 1, n2, cap=self.cap)
            if g != first.gamma_root:
                return Divergence(P, Q, f"engine gamma_root {first.gamma_root}, definition {g}")
            lp = gamma_def(P, Q, 1, len(P), 1, len(Q), cap=self.cap)
            if lp != first.longest_prefix:
                return Divergence(P, Q, f"engine longest_prefix {first.longest_prefix}, definition {lp}")
        if "rec" in self.oracles:
            g = gamma_rec(P2, Q2, 1, m2, 1, n2)
            if g != first.gamma_root:
                return Divergence(P, Q, f"engine gamma_root {first.gamma_root}, recurrence {g}")
        return None

    def check(self, P: ArcAnnotatedString, Q: ArcAnnotatedString) -> Divergence | None:
        results, div = self.run(P, Q)
        t = self.tally
        t.instances += 1
        t.positives += int(bool(results) and results[0].is_subsequence)
        for r in results:
            if r.stats is not None:
                t.envelope_checked += r.stats.envelope_checked
                t.envelope_violations += r.stats.envelope_violations
        if div is not None:
            t.divergences.append(div)
        return div
