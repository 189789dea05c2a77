"""Composition engines: pointer-driven step lists, co-prime counter
products, and the radix views that tie mixed constructions together."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Counter, Domain, OffsetTape
from .graycode import BaseGrayCode, gray_counter, gray_rank, gray_unrank


@dataclass
class StepList:
    """Bijective steps sigma_1..sigma_k over one domain. ell is the length
    of the cycle their composition traces through the intended start word.
    Each step must offer apply_tape(tape) and inverse()."""

    steps: list
    domain: Domain
    ell: int


def cycle_compose(steps: StepList, pointer: BaseGrayCode, start_inner, *,
                  claimed_reads=None, claimed_writes=None, recipe=None) -> Counter:
    """Drive a step list with a Gray-code pointer.

    The pointer's rank selects which step to apply to the inner word (ranks
    past the end of the list do nothing), then the pointer advances one Gray
    step. One full pointer revolution applies the whole list once, so the
    cycle through <pointer start, start_inner> has length m^r * ell.
    """
    k = len(steps.steps)
    m, r = pointer.m, pointer.r
    k_prime = pointer.length
    if k_prime < k:
        raise ValueError(f"pointer cycle {k_prime} shorter than step list {k}")
    steps.domain.validate(start_inner)
    fwd = steps.steps
    inv = [s.inverse() for s in steps.steps]

    def write_pointer(tape, old, new) -> None:
        for c in range(r):
            if new[c] != old[c]:
                tape.write(c, new[c])
                return

    def next_fn(tape) -> None:
        ptr = tuple(tape.read(j) for j in range(r))
        j = gray_rank(ptr, m, r)
        if j < k:
            fwd[j].apply_tape(OffsetTape(tape, r))
        write_pointer(tape, ptr, gray_unrank((j + 1) % k_prime, m, r))

    def prev_fn(tape) -> None:
        ptr = tuple(tape.read(j) for j in range(r))
        j = (gray_rank(ptr, m, r) - 1) % k_prime
        write_pointer(tape, ptr, gray_unrank(j, m, r))
        if j < k:
            inv[j].apply_tape(OffsetTape(tape, r))

    domain = Domain((m,) * r + steps.domain.radices)
    start = gray_unrank(0, m, r) + tuple(start_inner)
    return Counter(domain, next_fn, prev_fn, k_prime * steps.ell, start,
                   claimed_reads=claimed_reads, claimed_writes=claimed_writes,
                   recipe=recipe)


def crt_compose(components: list[Counter], *, recipe=None) -> Counter:
    """Product counter over the concatenated domains.

    The first component steps every time. Component i+1 steps exactly when
    the first component currently shows the i-th word of its cycle, so the
    components advance at co-prime rates and the product closes after the
    product of all lengths. Lengths of components 2..r must be pairwise
    co-prime and the first component must be long enough to give each of the
    others its own trigger word.
    """
    if len(components) < 2:
        raise ValueError("need at least two components")
    lengths = [c.claimed_length for c in components]
    r = len(components)
    if lengths[0] < r - 1:
        raise ValueError(
            f"first component length {lengths[0]} cannot host {r - 1} trigger words")
    for a in range(1, r):
        for b in range(a + 1, r):
            g = math.gcd(lengths[a], lengths[b])
            if g != 1:
                raise ValueError(
                    f"component lengths {lengths[a]} and {lengths[b]} share "
                    f"factor {g}; they must be co-prime")

    clock = components[0]
    n1 = clock.domain.n
    markers = [clock.start]
    w = clock.start
    for _ in range(r - 2):
        w, _ = clock.next(w)
        markers.append(w)

    offsets = [0]
    for c in components[:-1]:
        offsets.append(offsets[-1] + c.domain.n)

    def next_fn(tape) -> None:
        w1 = tuple(tape.read(j) for j in range(n1))
        for idx, mk in enumerate(markers):
            if w1 == mk:
                components[idx + 1].next_tape(OffsetTape(tape, offsets[idx + 1]))
                break
        clock.next_tape(OffsetTape(tape, 0))

    def prev_fn(tape) -> None:
        clock.prev_tape(OffsetTape(tape, 0))
        w1 = tuple(tape.read(j) for j in range(n1))
        for idx, mk in enumerate(markers):
            if w1 == mk:
                components[idx + 1].prev_tape(OffsetTape(tape, offsets[idx + 1]))
                break

    radices = tuple(x for c in components for x in c.domain.radices)
    start = tuple(x for c in components for x in c.start)
    reads = writes = None
    if all(c.claimed_reads is not None for c in components[1:]):
        reads = n1 + max(c.claimed_reads for c in components[1:])
    if (clock.claimed_writes is not None
            and all(c.claimed_writes is not None for c in components[1:])):
        writes = clock.claimed_writes + max(c.claimed_writes for c in components[1:])
    if recipe is None:
        recipe = {"kind": "crt", "lengths": lengths,
                  "components": [c.recipe for c in components]}
    return Counter(Domain(radices), next_fn, prev_fn, math.prod(lengths), start,
                   claimed_reads=reads, claimed_writes=writes, recipe=recipe)


class _BlockTape:
    """Presents radix-2^k cells as k bits each; the first bit of a block is
    its most significant."""

    __slots__ = ("base", "k")

    def __init__(self, base, k: int):
        self.base = base
        self.k = k

    def read(self, i: int) -> int:
        b, pos = divmod(i, self.k)
        return (self.base.read(b) >> (self.k - 1 - pos)) & 1

    def write(self, i: int, bit: int) -> None:
        b, pos = divmod(i, self.k)
        shift = self.k - 1 - pos
        cur = self.base.read(b)
        self.base.write(b, (cur & ~(1 << shift)) | (bit << shift))


def stitch_radix(k: int, counter: Counter) -> Counter:
    """View a counter over bits as one over radix-2^k blocks of k bits.

    Reads and writes then count at block granularity: touching any bit of a
    block touches the block once.
    """
    if k < 1:
        raise ValueError("block size must be at least 1")
    if k == 1:
        return counter
    inner = counter.domain
    if any(r != 2 for r in inner.radices):
        raise ValueError("inner counter must be over bits")
    if inner.n % k:
        raise ValueError(f"width {inner.n} is not divisible by block size {k}")
    nb = inner.n // k

    def fuse(word):
        out = []
        for b in range(nb):
            v = 0
            for bit in word[b * k:(b + 1) * k]:
                v = v << 1 | bit
            out.append(v)
        return tuple(out)

    return Counter(Domain.uniform(2 ** k, nb),
                   lambda tape: counter.next_tape(_BlockTape(tape, k)),
                   lambda tape: counter.prev_tape(_BlockTape(tape, k)),
                   counter.claimed_length, fuse(counter.start),
                   claimed_reads=counter.claimed_reads,
                   claimed_writes=counter.claimed_writes,
                   recipe={"kind": "stitch", "block": k, "inner": counter.recipe})


def multiplicative_order(o: int, base: int = 2) -> int:
    if o < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(base, o) != 1:
        raise ValueError(f"{base} is not invertible modulo {o}")
    if o == 1:
        return 1
    e, v = 1, base % o
    while v != 1:
        v = v * base % o
        e += 1
    return e


class _MixedTape:
    """Splits radix-m data cells into their power-of-two and odd residues so
    sub-counters can work on virtual coordinates. Layout of the virtual
    word: n_clock clock cells, then n_data low-part cells, then (when the
    odd part is nontrivial) n_data odd-part cells, all over one physical
    cell per data position."""

    __slots__ = ("base", "n_clock", "n_data", "two_k", "o", "recombine")

    def __init__(self, base, n_clock, n_data, two_k, o, recombine):
        self.base = base
        self.n_clock = n_clock
        self.n_data = n_data
        self.two_k = two_k
        self.o = o
        self.recombine = recombine

    def read(self, v: int) -> int:
        if v < self.n_clock:
            return self.base.read(v)
        v -= self.n_clock
        if v < self.n_data:
            return self.base.read(self.n_clock + v) % self.two_k
        v -= self.n_data
        return self.base.read(self.n_clock + v) % self.o

    def write(self, v: int, val: int) -> None:
        if v < self.n_clock:
            self.base.write(v, val)
            return
        v -= self.n_clock
        if v < self.n_data:
            coord = self.n_clock + v
            cur = self.base.read(coord)
            self.base.write(coord, self.recombine(val, cur % self.o))
        else:
            v -= self.n_data
            coord = self.n_clock + v
            cur = self.base.read(coord)
            self.base.write(coord, self.recombine(cur % self.two_k, val))


def _fuse_mixed(m: int, two_k: int, o: int, n_clock: int,
                virtual: Counter, recipe=None) -> Counter:
    """Fold a counter over Z_m^i x (Z_2^l)^d [x (Z_o)^d] onto Z_m^(i+d)."""
    if o > 1:
        n_data = (virtual.domain.n - n_clock) // 2
        inv_t = pow(two_k, -1, o)
    else:
        n_data = virtual.domain.n - n_clock
        inv_t = 0
    inv_o = pow(o, -1, two_k)

    def recombine(a: int, b: int) -> int:
        # unique residue mod m that is a mod 2^l and b mod o
        return (a * o * inv_o + b * two_k * inv_t) % m

    def view(tape) -> _MixedTape:
        return _MixedTape(tape, n_clock, n_data, two_k, o, recombine)

    vs = virtual.start
    start = tuple(vs[:n_clock]) + tuple(
        recombine(vs[n_clock + j], vs[n_clock + n_data + j] if o > 1 else 0)
        for j in range(n_data))
    return Counter(Domain.uniform(m, n_clock + n_data),
                   lambda tape: virtual.next_tape(view(tape)),
                   lambda tape: virtual.prev_tape(view(tape)),
                   virtual.claimed_length, start,
                   claimed_reads=virtual.claimed_reads,
                   claimed_writes=virtual.claimed_writes,
                   recipe=recipe or virtual.recipe)


def general_counter(m: int, n: int) -> Counter:
    """Counter over Z_m^n for even m that writes at most 3 cells per step.

    The data cells carry two independent counters at once: their low bits
    run a pointer-driven linear counter and their odd residues run the
    odd-radix counter. A Gray clock on the leading cells multiplexes the
    two, and the clock width is chosen to make the data cycle lengths
    co-prime, so the whole thing is one cycle. Scan order is deterministic:
    clock width first, then extra pointer padding.
    """
    from .linear import Field, linear_counter, row_op_count
    from .permdecomp import min_width, odd_counter

    if m < 2 or m % 2:
        raise ValueError("even radix required; odd radices have their own construction")
    ell = (m & -m).bit_length() - 1
    o = m >> ell
    f2 = Field(2)
    ord2 = multiplicative_order(o) if o > 1 else 1
    d_min = min_width(o) if o > 1 else 1

    def solve_bits(bits):
        # smallest Gray pointer covering the row operations at that width
        for r in range(1, bits - 1):
            n_in = bits - r
            if 2 ** r >= row_op_count(f2, n_in):
                return n_in, r
        return None

    chosen = None
    for i in range(1, ord2 + 1):
        d = n - i
        if d < d_min or ell * d < 3:
            break
        sol = solve_bits(ell * d)
        if sol is None:
            continue
        n_in, r = sol
        if o == 1 or math.gcd(2 ** n_in - 1, o) == 1:
            chosen = (i, d, n_in, r)
            break
    if chosen is None and o > 1:
        # pad the pointer beyond its minimum: consecutive inner widths make
        # a co-prime one appear within ord(2 mod o) tries
        for i in range(1, ord2 + 1):
            d = n - i
            if d < d_min or ell * d < 3:
                break
            sol = solve_bits(ell * d)
            if sol is None:
                continue
            n_in, r = sol
            for extra in range(1, ord2 + 1):
                n2, r2 = n_in - extra, r + extra
                if n2 < 2:
                    break
                if (math.gcd(2 ** n2 - 1, o) == 1
                        and 2 ** r2 >= row_op_count(f2, n2)):
                    chosen = (i, d, n2, r2)
                    break
            if chosen:
                break
    if chosen is None:
        raise ValueError(
            f"width {n} too small for radix {m}: the odd part needs "
            f"{d_min} data cells and the binary part needs at least 3 bits")

    i, d, n_in, r = chosen
    clock = gray_counter(m, i)
    binary = stitch_radix(ell, linear_counter(f2, n_in, r))
    parts = [clock, binary]
    if o > 1:
        parts.append(odd_counter(o, d))
    lengths = {"clock": m ** i, "binary": binary.claimed_length,
               "odd": o ** d if o > 1 else 1}
    recipe = {"kind": "general", "m": m, "n": n, "clock": i,
              "binary": {"bits": ell * d, "inner": n_in, "pointer": r},
              "odd": ({"radix": o, "width": d} if o > 1 else None),
              "lengths": lengths}
    virtual = crt_compose(parts)
    return _fuse_mixed(m, 1 << ell, o, i, virtual, recipe=recipe)
