"""Cyclic m-ary Gray codes with closed-form rank and unrank.

The word of rank i has digit j equal to b_j - b_{j+1} (mod m), where the b_j
are the base-m digits of i, least significant first. Consecutive ranks then
differ in exactly one coordinate and that coordinate increases by 1 mod m,
so a step reads r cells and writes one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Counter, Domain


def _base_digits(i: int, m: int, r: int) -> list[int]:
    out = []
    for _ in range(r):
        i, d = divmod(i, m)
        out.append(d)
    return out


def gray_unrank(i: int, m: int, r: int) -> tuple[int, ...]:
    if m < 2 or r < 1:
        raise ValueError("need m >= 2 and r >= 1")
    if not 0 <= i < m ** r:
        raise ValueError(f"rank {i} out of range for m={m}, r={r}")
    b = _base_digits(i, m, r) + [0]
    return tuple((b[j] - b[j + 1]) % m for j in range(r))


def gray_rank(word, m: int, r: int) -> int:
    if len(word) != r:
        raise ValueError(f"expected {r} digits, got {len(word)}")
    # digits telescope: b_j = g_j + b_{j+1}, recovered from the top down
    b = 0
    rank = 0
    for j in range(r - 1, -1, -1):
        b = (word[j] + b) % m
        rank = rank * m + b
    return rank


def gray_next(word, m: int, r: int) -> tuple[int, ...]:
    return gray_unrank((gray_rank(word, m, r) + 1) % m ** r, m, r)


def gray_prev(word, m: int, r: int) -> tuple[int, ...]:
    return gray_unrank((gray_rank(word, m, r) - 1) % m ** r, m, r)


@dataclass(frozen=True)
class BaseGrayCode:
    """The length-m^r cyclic Gray code over Z_m^r."""

    m: int
    r: int

    def __post_init__(self) -> None:
        if self.m < 2 or self.r < 1:
            raise ValueError("need m >= 2 and r >= 1")

    @property
    def length(self) -> int:
        return self.m ** self.r

    def unrank(self, i: int) -> tuple[int, ...]:
        return gray_unrank(i, self.m, self.r)

    def rank(self, word) -> int:
        return gray_rank(word, self.m, self.r)

    def next(self, word) -> tuple[int, ...]:
        return gray_next(word, self.m, self.r)

    def prev(self, word) -> tuple[int, ...]:
        return gray_prev(word, self.m, self.r)


def gray_counter(m: int, r: int) -> Counter:
    """Instrumented counter for the full Gray cycle on Z_m^r."""
    code = BaseGrayCode(m, r)
    length = code.length

    def step(tape, delta: int) -> None:
        w = tuple(tape.read(j) for j in range(r))
        i = gray_rank(w, m, r)
        target = gray_unrank((i + delta) % length, m, r)
        for j in range(r):
            if target[j] != w[j]:
                tape.write(j, target[j])
                break

    return Counter(Domain.uniform(m, r),
                   lambda tape: step(tape, 1),
                   lambda tape: step(tape, -1),
                   length, gray_unrank(0, m, r),
                   claimed_reads=r, claimed_writes=1,
                   recipe={"kind": "base", "m": m, "n": r})
