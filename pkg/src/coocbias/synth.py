"""Seeded generator for datasets with a planted class-concept correlation.

Each class is tied to one concept group. A record of that class draws most of
its concepts from the tied group with probability ``rho`` per record (the
bias strength), otherwise from one uniformly chosen other group. rho near 1
plants a strong spurious correlation, the regime where background concepts
predict the label almost perfectly; rho near 0.5 is mild.

Determinism matters more here than statistical pedigree, so the randomness
comes from a small self-contained SplitMix64 generator rather than the
platform RNG: same seed, same dataset, on any machine and Python build.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import AnnotationRecord, Dataset

__all__ = ["SplitMix64", "BiasSpec", "generate"]

_MASK = (1 << 64) - 1


class SplitMix64:
    """Minimal 64-bit mixing RNG (public-domain constants).

    State advances by the golden-ratio increment; output runs through two
    xor-shift-multiply rounds. Tiny state, full 2^64 period, and completely
    reproducible across platforms, which is all the generator needs.
    """

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0**-53)

    def randrange(self, n: int) -> int:
        """Uniform int in [0, n) by rejection, no modulo bias."""
        if n <= 0:
            raise ValueError(f"randrange needs n >= 1, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def sample(self, items: list[str], k: int) -> list[str]:
        """k distinct items, partial Fisher-Yates over a copy."""
        if k > len(items):
            raise ValueError(f"sample size {k} exceeds population {len(items)}")
        pool = list(items)
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class BiasSpec:
    """Recipe for a biased dataset.

    ``groups`` maps each class to its tied concept group. Groups must be
    pairwise disjoint and share no name with any class. ``rho`` is the
    per-record probability of drawing concepts from the tied group;
    ``concepts_per_record`` bounds the draw size (inclusive).
    """

    groups: dict[str, tuple[str, ...]]
    rho: float
    per_class_n: int
    concepts_per_record: tuple[int, int] = (1, 3)

    def __post_init__(self) -> None:
        if len(self.groups) < 2:
            raise ValueError("need at least two classes")
        if not 0.5 < self.rho <= 1.0:
            raise ValueError(f"rho must be in (0.5, 1.0], got {self.rho}")
        if self.per_class_n < 1:
            raise ValueError(f"per_class_n must be >= 1, got {self.per_class_n}")
        seen: dict[str, str] = {}
        for label, group in self.groups.items():
            if not group:
                raise ValueError(f"class {label!r}: empty concept group")
            if len(set(group)) < len(group):
                raise ValueError(f"class {label!r}: duplicate concepts in group")
            for c in group:
                if c in seen:
                    raise ValueError(
                        f"concept {c!r} appears in groups of both {seen[c]!r} and {label!r}"
                    )
                if c in self.groups:
                    raise ValueError(f"name {c!r} is both a class and a concept")
                seen[c] = label
        lo, hi = self.concepts_per_record
        smallest = min(len(g) for g in self.groups.values())
        if not 1 <= lo <= hi:
            raise ValueError(f"concepts_per_record must satisfy 1 <= lo <= hi, got {lo, hi}")
        if hi > smallest:
            raise ValueError(
                f"concepts_per_record upper bound {hi} exceeds smallest group size {smallest}"
            )


def generate(spec: BiasSpec, seed: int) -> Dataset:
    """Produce the dataset a BiasSpec describes, deterministically from seed.

    Records are emitted class by class (classes in sorted order), ids
    "<label>-<i>" with i counting from 0. Per record the generator draws, in
    a fixed order: the bias coin, the cross-group pick when the coin says so,
    the record size, then the concept sample. Fixed order keeps one stream of
    randomness reproducible regardless of outcome.
    """
    rng = SplitMix64(seed)
    labels = sorted(spec.groups)
    lo, hi = spec.concepts_per_record
    records: list[AnnotationRecord] = []
    for label in labels:
        own = list(spec.groups[label])
        other_labels = [y for y in labels if y != label]
        for i in range(spec.per_class_n):
            tied = rng.random() < spec.rho
            pick = rng.randrange(len(other_labels))
            size = lo + rng.randrange(hi - lo + 1)
            pool = own if tied else list(spec.groups[other_labels[pick]])
            concepts = rng.sample(pool, min(size, len(pool)))
            records.append(
                AnnotationRecord(
                    id=f"{label}-{i}",
                    label=label,
                    concepts=tuple(sorted(concepts)),
                )
            )
    return Dataset.from_records(records)
