"""Fibonacci substitution words, the subshift they generate, and repeatability.

Words are plain ``str`` objects over the alphabet ``"ab"``.  Lengths follow
``F_k = |S^k(a)|``, so ``F_0 = 1, F_1 = 2, F_2 = 3, F_3 = 5, ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapExceeded

ALPHABET = "ab"
GOLDEN = (1 + math.sqrt(5)) / 2
# frequency of the letter b in u
B_FREQUENCY = 2 - GOLDEN

FIB_CONVENTION = "F_k = |S^k(a)|: F_0=1, F_1=2, F_2=3, F_3=5 (F_{k+1} = F_k + F_{k-1})"

DEFAULT_CAP = 10**6

_IMAGE = {"a": "ab", "b": "a"}
_prefix_cache = {"cap": DEFAULT_CAP, "word": "a"}


def set_length_cap(cap: int) -> None:
    """Change the maximum word length that may be materialized."""
    if cap < 2:
        raise ValueError("cap must be at least 2")
    _prefix_cache["cap"] = int(cap)
    if len(_prefix_cache["word"]) > cap:
        _prefix_cache["word"] = _prefix_cache["word"][:cap]


def length_cap() -> int:
    return _prefix_cache["cap"]


def _check_word(w: str) -> None:
    if not set(w) <= set(ALPHABET):
        raise ValueError(f"word {w!r} is not over the alphabet {{a, b}}")


def fib_length(k: int) -> int:
    """Return F_k = |S^k(a)|."""
    if k < -1:
        raise ValueError("k must be >= -1")
    prev, cur = 1, 1  # F_{-1} = |b| = 1, F_0 = 1
    for _ in range(k + 1):
        prev, cur = cur, cur + prev
    return prev


def fib_lengths(k_max: int) -> list[int]:
    return [fib_length(k) for k in range(k_max + 1)]


def substitute(w: str) -> str:
    """Apply a -> ab, b -> a letterwise."""
    _check_word(w)
    return "".join(_IMAGE[c] for c in w)


def fib_word(k: int) -> str:
    """Return s_k = S^k(a), built through s_{k+1} = s_k s_{k-1}."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if fib_length(k) > length_cap():
        raise CapExceeded(f"F_{k} = {fib_length(k)} exceeds the length cap {length_cap()}")
    prev, cur = "b", "a"
    for _ in range(k):
        prev, cur = cur, cur + prev
    return cur


def fixed_point_prefix(n: int) -> str:
    """First ``n`` letters of the fixed point u = abaababaabaab..."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > length_cap():
        raise CapExceeded(f"prefix length {n} exceeds the length cap {length_cap()}")
    word = _prefix_cache["word"]
    if len(word) < n:
        prev, cur = "b", "a"
        while len(cur) < n:
            prev, cur = cur, cur + prev
        _prefix_cache["word"] = cur[: max(n, min(len(cur), length_cap()))]
        word = _prefix_cache["word"]
    return word[:n]


def left_extension(n: int) -> str:
    """The ``n`` letters ω_{-n} ... ω_{-1} to the left of u in the two-sided point.

    The left half is the limit of s_{2j+1} read from its right end, so
    ω_{-1} = b and ω_{-2} = a.
    """
    if n <= 0:
        return ""
    k = 1
    while fib_length(k) < n:
        k += 2
    return fib_word(k)[-n:]


def _scan_length(m: int) -> int:
    k = 0
    while fib_length(k) < m:
        k += 1
    return fib_length(k + 1) + m


def is_factor(w: str) -> bool:
    """True iff ``w`` occurs in u."""
    _check_word(w)
    if not w:
        raise ValueError("is_factor needs a non-empty word")
    return w in fixed_point_prefix(_scan_length(len(w)))


def factors(length: int) -> set[str]:
    """All distinct factors of u of the given length."""
    if length < 1:
        raise ValueError("length must be positive")
    p = fixed_point_prefix(_scan_length(length))
    return {p[i : i + length] for i in range(len(p) - length + 1)}


def is_repeatable(w: str) -> bool:
    """True iff the periodic word with cell ``w`` is a shift of the one with cell u_0..u_{|w|-1}.

    That is the case exactly when ``w`` is a cyclic rotation of the prefix.
    """
    if not is_factor(w):
        raise ValueError(f"{w!r} is not a factor of the Fibonacci word")
    p = fixed_point_prefix(len(w))
    return w in p + p


def nonrepeatable_characterization(k: int) -> str:
    """The window of s_{k+1} s_k of length F_k that stops one letter before the end."""
    n = fib_length(k)
    w = fib_word(k + 2)  # s_{k+2} = s_{k+1} s_k
    return w[-1 - n : -1]


@dataclass(frozen=True)
class FactorCensus:
    k: int
    length: int
    count: int
    repeatable: int
    nonrepeatable_word: str

    def as_dict(self):
        return {
            "k": self.k,
            "F_k": self.length,
            "count": self.count,
            "repeatable": self.repeatable,
            "nonrepeatable_word": self.nonrepeatable_word,
        }


def factor_census(k: int) -> FactorCensus:
    """Enumerate the length-F_k factors of u and classify them by repeatability.

    Raises ``NumericalInconsistency`` if the counts are not F_k + 1 total,
    F_k repeatable, or if the single nonrepeatable factor is not the one
    predicted by :func:`nonrepeatable_characterization`.
    """
    from .errors import NumericalInconsistency

    if k < 2:
        raise ValueError("factor_census needs k >= 2")
    n = fib_length(k)
    if _scan_length(n) > length_cap():
        raise CapExceeded(f"F_{k} = {n} needs a prefix beyond the length cap")
    fs = factors(n)
    p = fixed_point_prefix(n)
    rep = [w for w in fs if w in p + p]
    non = sorted(w for w in fs if w not in p + p)
    if len(fs) != n + 1 or len(rep) != n or len(non) != 1:
        raise NumericalInconsistency(
            f"k={k}: {len(fs)} factors, {len(rep)} repeatable, {len(non)} nonrepeatable"
        )
    if non[0] != nonrepeatable_characterization(k):
        raise NumericalInconsistency(f"k={k}: nonrepeatable factor {non[0]!r} is not the predicted one")
    return FactorCensus(k, n, len(fs), len(rep), non[0])


class SubshiftPoint:
    """A two-sided sequence in the Fibonacci subshift.

    kind ``"shift"`` with parameter j >= 0 gives n -> ω^(u)_{n+j}, where
    ω^(u) is u on n >= 0 extended to the left by :func:`left_extension`.
    kind ``"rotation"`` with phase θ in [0, 1) codes the irrational
    rotation by ``2 - golden`` with the half-open interval [1 - α, 1) for b;
    θ = 0 reproduces u on n >= 0.
    """

    def __init__(self, kind: str = "shift", parameter: float = 0):
        if kind == "u":
            kind, parameter = "shift", 0
        if kind == "shift":
            if int(parameter) != parameter or parameter < 0:
                raise ValueError("shift must be a non-negative integer")
            parameter = int(parameter)
        elif kind == "rotation":
            parameter = float(parameter)
            if not 0.0 <= parameter < 1.0:
                raise ValueError(f"rotation phase {parameter} is outside [0, 1)")
        else:
            raise ValueError(f"unknown subshift point kind {kind!r}")
        self.kind = kind
        self.parameter = parameter

    def __repr__(self):
        return f"SubshiftPoint({self.kind!r}, {self.parameter!r})"

    def __eq__(self, other):
        return isinstance(other, SubshiftPoint) and (self.kind, self.parameter) == (other.kind, other.parameter)

    def __hash__(self):
        return hash((self.kind, self.parameter))

    def __getitem__(self, n: int) -> str:
        return self.window(n, n + 1)

    def window(self, start: int, stop: int) -> str:
        """Letters ω_start ... ω_{stop-1}."""
        if stop <= start:
            return ""
        if self.kind == "rotation":
            return "".join(self._rotation_letter(n) for n in range(start, stop))
        lo, hi = start + self.parameter, stop + self.parameter
        left = left_extension(-lo) if lo < 0 else ""
        right = fixed_point_prefix(hi) if hi > 0 else ""
        if lo < 0:
            return left[: hi - lo] if hi <= 0 else left + right
        return right[lo:hi]

    def _rotation_letter(self, n: int) -> str:
        x = ((n + 1) * B_FREQUENCY + self.parameter) % 1.0
        return "b" if x >= 1.0 - B_FREQUENCY else "a"

    @classmethod
    def parse(cls, text: str) -> "SubshiftPoint":
        """Parse the CLI descriptors ``u``, ``shift:J`` and ``rot:THETA``."""
        if text == "u":
            return cls("shift", 0)
        name, _, value = text.partition(":")
        if name == "shift" and value:
            return cls("shift", int(value))
        if name in ("rot", "rotation") and value:
            return cls("rotation", float(value))
        raise ValueError(f"cannot parse omega descriptor {text!r}")

    def describe(self) -> str:
        if self.kind == "shift":
            return "u" if self.parameter == 0 else f"shift:{self.parameter}"
        return f"rot:{self.parameter!r}"


def subshift_point(kind: str, parameter: float = 0) -> SubshiftPoint:
    return SubshiftPoint(kind, parameter)


def repeatable_prefix_lengths(point: SubshiftPoint, max_k: int) -> list[int]:
    """The F_k (k <= max_k) whose prefix ω_0 ... ω_{F_k - 1} is repeatable."""
    out = []
    for k in range(max_k + 1):
        n = fib_length(k)
        if is_repeatable(point.window(0, n)):
            out.append(n)
    return out
