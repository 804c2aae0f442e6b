import hashlib
import math
import random
from fractions import Fraction

from xwebbench.errors import ParameterError


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for one generation stream."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, label: str) -> random.Random:
    return random.Random(derive_seed(seed, label))


def skewed_random(
    rng: random.Random,
    lo: int,
    hi: int,
    hot_fraction: float = 0.8,
    hot_width: float = 0.1,
) -> int:
    """
    Draw an integer in [lo, hi] favouring "hot" low values.

    With probability hot_fraction the draw is uniform over the hot band
    [lo, lo + ceil((hi - lo + 1) * hot_width) - 1], otherwise uniform over the
    whole range.
    """
    if lo > hi:
        raise ParameterError(f"skewed_random: empty range [{lo}, {hi}]")
    width = hi - lo + 1
    hot_hi = lo + math.ceil(width * Fraction(str(hot_width))) - 1
    if rng.random() < hot_fraction:
        return rng.randint(lo, max(lo, hot_hi))
    return rng.randint(lo, hi)


def geometric_gap(rng: random.Random, p: float) -> int:
    """
    Number of rejected Bernoulli(p) trials before the next success.

    Skipping ahead by this gap yields the same retained set distribution as
    testing every candidate independently.
    """
    if p >= 1.0:
        return 0
    u = 1.0 - rng.random()  # (0, 1]
    return int(math.log(u) / math.log1p(-p))
