"""Scoring oracles: anything mapping (tokens, label) to a finite loss.

The first three are analytic stubs with closed-form occlusion behavior,
useful for wiring checks. The lexicon oracle is a small deterministic
sentiment scorer so produced files carry non-trivial score variation.
"""

import math
import string
from dataclasses import dataclass, field


class TokenCountOracle:
    """Loss equals the token count; every occlusion delta is exactly 1."""

    def evaluate(self, tokens: list[str], label: int) -> float:
        return float(len(tokens))


@dataclass
class ConstantOracle:
    """Fixed loss regardless of input; every occlusion delta is exactly 0."""

    value: float = 3.7

    def evaluate(self, tokens: list[str], label: int) -> float:
        return self.value


@dataclass
class KeywordOracle:
    """Loss counts exact occurrences of one keyword.

    Occluding the keyword moves the loss by 1, occluding anything else
    moves it by 0, so the importance vector is a multiple of the keyword's
    indicator vector.
    """

    keyword: str

    def evaluate(self, tokens: list[str], label: int) -> float:
        return float(sum(1 for tok in tokens if tok == self.keyword))


_POSITIVE_WORDS = frozenset(
    """love like great amazing good best awesome wonderful excellent happy
    favourite favorite fresh friendly perfect nice enjoy enjoyed beautiful
    recommend clean cozy tasty delicious fun cool yay win sweet""".split()
)

_NEGATIVE_WORDS = frozenset(
    """bad worst hate awful terrible bummed sad angry broken dirty slow
    rude boring gross disappointing disappointed miss missing never no
    ugh meh poor cold stale wrong fail lost""".split()
)


def _collapse_runs(word: str) -> str:
    out = []
    for ch in word:
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


@dataclass
class LexiconOracle:
    """Deterministic logistic sentiment loss from tiny built-in lexicons.

    Each token votes +1/-1 when its lowercased, punctuation-stripped,
    run-collapsed form is in a lexicon; a token carrying a stretched
    letter or punctuation run doubles its own vote. The loss is the
    negative log-likelihood of the record's label under a logistic
    squash of the vote total, floored away from zero probability.
    """

    weight: float = 0.8
    positive: frozenset = field(default=_POSITIVE_WORDS)
    negative: frozenset = field(default=_NEGATIVE_WORDS)

    def _vote(self, token: str) -> float:
        stripped = token.strip(string.punctuation).lower()
        base = _collapse_runs(stripped)
        if base in self.positive:
            vote = 1.0
        elif base in self.negative:
            vote = -1.0
        else:
            return 0.0
        if stripped != base or token != token.strip(string.punctuation):
            vote *= 2.0
        return vote

    def evaluate(self, tokens: list[str], label: int) -> float:
        total = self.weight * sum(self._vote(tok) for tok in tokens)
        p_positive = 1.0 / (1.0 + math.exp(-total))
        p_label = p_positive if label == 1 else 1.0 - p_positive
        return -math.log(max(p_label, 1e-12))


def build_oracle(spec: str):
    """Build an oracle from its CLI spec string.

    Specs: "token-count", "constant" or "constant:VALUE",
    "keyword:WORD", "lexicon". The per-record surface oracle has no
    entry here; the adapter constructs it from each record.
    """
    name, _, arg = spec.partition(":")
    if name == "token-count" and not arg:
        return TokenCountOracle()
    if name == "constant":
        return ConstantOracle(float(arg)) if arg else ConstantOracle()
    if name == "keyword" and arg:
        return KeywordOracle(arg)
    if name == "lexicon" and not arg:
        return LexiconOracle()
    raise ValueError(f"unknown oracle spec {spec!r}")
