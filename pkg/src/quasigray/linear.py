"""Counters from invertible linear maps over finite fields.

A primitive polynomial's companion matrix cycles through every nonzero
vector of F_q^n. Factoring the matrix into single-row operations and driving
those with a Gray-code pointer gives a counter of length q^(n+r) - q^r that
reads r+2 and writes 2 cells per step.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass

from .compose import StepList, cycle_compose
from .core import BoundExceeded, Counter, Domain
from .graycode import BaseGrayCode

# One irreducible modulus over F_2 per extension degree, bit i holding the
# coefficient of z^i. Degree 16 is as far as the field table goes.
_F2_MODULI = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

_FACTOR_LIMIT = 2 ** 48
_TRIAL_LIMIT = 2 ** 16


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for anything this package can reach."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """One nontrivial factor of an odd composite."""
    rng = random.Random(0xC0FFEE ^ n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors, smallest first. Trial division handles the
    small part; Miller-Rabin plus Pollard rho split whatever is left."""
    if n > _FACTOR_LIMIT:
        raise BoundExceeded(f"refusing to factor {n} > 2^48")
    out = []
    for d in (2, 3):
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
    d = 5
    while d <= _TRIAL_LIMIT and d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 2
    if n == 1:
        return out
    stack = [n]
    found = set()
    while stack:
        c = stack.pop()
        if _is_prime(c):
            found.add(c)
            continue
        f = _pollard_rho(c)
        stack.append(f)
        stack.append(c // f)
    return out + sorted(found)


class Field:
    """F_q arithmetic with elements encoded as integers 0..q-1.

    q must be prime or a power of two up to 2^16. Extension-field elements
    are bit vectors of polynomial coefficients.
    """

    __slots__ = ("q", "char", "k", "modulus")

    def __init__(self, q: int):
        if q < 2:
            raise ValueError("field order must be at least 2")
        if _is_prime(q):
            self.char = q
            self.k = 1
            self.modulus = None
        else:
            k = q.bit_length() - 1
            if 2 ** k != q or k not in _F2_MODULI:
                raise ValueError("field order must be prime or 2^k with k <= 16")
            self.char = 2
            self.k = k
            self.modulus = _F2_MODULI[k]
        self.q = q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q if self.modulus is None else a ^ b

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q if self.modulus is None else a ^ b

    def neg(self, a: int) -> int:
        return (-a) % self.q if self.modulus is None else a

    def mul(self, a: int, b: int) -> int:
        if self.modulus is None:
            return a * b % self.q
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            b >>= 1
            a <<= 1
            if a >> self.k & 1:
                a ^= self.modulus
        return acc

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        acc = 1
        while e:
            if e & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            e >>= 1
        return acc

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.q - 2)

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("Field", self.q))

    def __repr__(self) -> str:
        return f"Field({self.q})"


@dataclass(frozen=True)
class Poly:
    """Polynomial over a field, coefficients stored constant-term first."""

    field: Field
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("empty coefficient list")
        if any(not 0 <= c < self.field.q for c in self.coeffs):
            raise ValueError("coefficient out of range")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __str__(self) -> str:
        terms = []
        for j in range(self.degree, -1, -1):
            c = self.coeffs[j]
            if c == 0:
                continue
            if j == 0:
                terms.append(str(c))
            else:
                z = "z" if j == 1 else f"z^{j}"
                terms.append(z if c == 1 else f"{c}{z}")
        return " + ".join(terms) if terms else "0"


def _residue_mul(field: Field, a: list[int], b: list[int], p) -> list[int]:
    """a*b reduced by the monic polynomial p (coefficient tuple)."""
    n = len(p) - 1
    prod = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                prod[i + j] = field.add(prod[i + j], field.mul(ai, bj))
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d]
        if c == 0:
            continue
        for t in range(n + 1):
            if p[t]:
                prod[d - n + t] = field.sub(prod[d - n + t], field.mul(c, p[t]))
    return prod[:n]


def _residue_pow(field: Field, base: list[int], e: int, p) -> list[int]:
    n = len(p) - 1
    acc = [1] + [0] * (n - 1)
    while e:
        if e & 1:
            acc = _residue_mul(field, acc, base, p)
        base = _residue_mul(field, base, base, p)
        e >>= 1
    return acc


def is_primitive(p: Poly, field: Field | None = None) -> bool:
    """Whether z generates the full multiplicative group modulo p.

    That forces p irreducible, so this single test suffices. Refuses
    q^deg - 1 beyond the factoring limit.
    """
    field = field or p.field
    if field != p.field:
        raise ValueError("field mismatch")
    n = p.degree
    if n < 1:
        raise ValueError("degree must be at least 1")
    if not p.is_monic:
        raise ValueError("polynomial must be monic")
    size = field.q ** n
    if size - 1 > _FACTOR_LIMIT:
        raise BoundExceeded(f"q^n - 1 = {size - 1} exceeds the factoring limit 2^48")
    if p.coeffs[0] == 0:
        return False  # divisible by z, so z is not invertible mod p
    order = size - 1
    one = [1] + [0] * (n - 1)
    if n == 1:
        z = [field.neg(p.coeffs[0])]
    else:
        z = [0, 1] + [0] * (n - 2)
    if _residue_pow(field, z, order, p.coeffs) != one:
        return False
    for rho in prime_factors(order):
        if _residue_pow(field, z, order // rho, p.coeffs) == one:
            return False
    return True


def find_primitive(field: Field, n: int) -> Poly:
    """First primitive monic polynomial of degree n, ordered by comparing
    coefficient tuples from the leading coefficient down."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    q = field.q
    if q ** n - 1 > _FACTOR_LIMIT:
        raise BoundExceeded(f"q^n - 1 exceeds the factoring limit 2^48")
    for i in range(q ** n):
        coeffs = tuple((i // q ** j) % q for j in range(n)) + (1,)
        p = Poly(field, coeffs)
        if is_primitive(p, field):
            return p
    raise RuntimeError("no primitive polynomial found")  # cannot happen


def companion_matrix(p: Poly) -> list[list[int]]:
    """Companion matrix acting on column vectors: first column holds the
    negated coefficients, leading one first; the superdiagonal is ones."""
    if not p.is_monic or p.degree < 1:
        raise ValueError("need a monic polynomial of positive degree")
    field = p.field
    n = p.degree
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        mat[i][0] = field.neg(p.coeffs[n - 1 - i])
        if i + 1 < n:
            mat[i][i + 1] = 1
    return mat


def mat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(field: Field, a, b) -> list[list[int]]:
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for t in range(n):
            v = a[i][t]
            if v == 0:
                continue
            row = b[t]
            oi = out[i]
            for j in range(n):
                if row[j]:
                    oi[j] = field.add(oi[j], field.mul(v, row[j]))
    return out


def mat_vec(field: Field, a, x) -> list[int]:
    out = []
    for row in a:
        v = 0
        for c, xi in zip(row, x):
            if c and xi:
                v = field.add(v, field.mul(c, xi))
        out.append(v)
    return out


def mat_inverse(field: Field, a) -> list[list[int]]:
    n = len(a)
    work = [row[:] + ident[:] for row, ident in zip(a, mat_identity(n))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        work[col], work[pivot] = work[pivot], work[col]
        pv = field.inv(work[col][col])
        work[col] = [field.mul(pv, v) for v in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                c = work[r][col]
                work[r] = [field.sub(v, field.mul(c, w))
                           for v, w in zip(work[r], work[col])]
    return [row[n:] for row in work]


@dataclass(frozen=True)
class Scale:
    """Row operation x_i <- c * x_i."""

    field: Field
    i: int
    c: int

    def __post_init__(self) -> None:
        if not 0 < self.c < self.field.q:
            raise ValueError("scale factor must be a nonzero field element")

    def apply_tape(self, tape) -> None:
        tape.write(self.i, self.field.mul(self.c, tape.read(self.i)))

    def apply(self, word) -> tuple[int, ...]:
        out = list(word)
        out[self.i] = self.field.mul(self.c, out[self.i])
        return tuple(out)

    def inverse(self) -> "Scale":
        return Scale(self.field, self.i, self.field.inv(self.c))

    def matrix(self, n: int) -> list[list[int]]:
        mat = mat_identity(n)
        mat[self.i][self.i] = self.c
        return mat


@dataclass(frozen=True)
class AddRow:
    """Row operation x_i <- x_i + c * x_j."""

    field: Field
    i: int
    j: int
    c: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError("source and destination rows must differ")
        if not 0 < self.c < self.field.q:
            raise ValueError("multiplier must be a nonzero field element")

    def apply_tape(self, tape) -> None:
        v = self.field.mul(self.c, tape.read(self.j))
        tape.write(self.i, self.field.add(tape.read(self.i), v))

    def apply(self, word) -> tuple[int, ...]:
        out = list(word)
        out[self.i] = self.field.add(out[self.i], self.field.mul(self.c, out[self.j]))
        return tuple(out)

    def inverse(self) -> "AddRow":
        return AddRow(self.field, self.i, self.j, self.field.neg(self.c))

    def matrix(self, n: int) -> list[list[int]]:
        mat = mat_identity(n)
        mat[self.i][self.j] = self.c
        return mat


def decompose_elementary(a, field: Field) -> list:
    """Write an invertible matrix as a product of single-row operations.

    Applied first to last as left multiplications the result rebuilds the
    input: E_k ... E_1 = A. Row swaps are emulated by three additions and a
    scale by -1 (the scale drops out in characteristic 2), keeping the
    count within n^2 + 4(n-1).
    """
    n = len(a)
    work = [row[:] for row in a]
    ops: list = []

    def addrow(i: int, j: int, c: int) -> None:
        ops.append(AddRow(field, i, j, c))
        wj = work[j]
        wi = work[i]
        for t in range(n):
            if wj[t]:
                wi[t] = field.add(wi[t], field.mul(c, wj[t]))

    def scale(i: int, c: int) -> None:
        ops.append(Scale(field, i, c))
        work[i] = [field.mul(c, v) for v in work[i]]

    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        if pivot != col:
            # swap rows col and pivot without a swap primitive
            addrow(col, pivot, 1)
            addrow(pivot, col, field.neg(1))
            addrow(col, pivot, 1)
            if field.char != 2:
                scale(pivot, field.neg(1))
        pv = work[col][col]
        if pv != 1:
            scale(col, field.inv(pv))
        for row in range(n):
            if row != col and work[row][col] != 0:
                addrow(row, col, field.neg(work[row][col]))

    assert work == mat_identity(n)
    return [op.inverse() for op in reversed(ops)]


@functools.lru_cache(maxsize=None)
def _row_ops_cached(q: int, n: int) -> int:
    field = Field(q)
    return len(decompose_elementary(companion_matrix(find_primitive(field, n)), field))


def row_op_count(field: Field, n: int) -> int:
    """Length of the row-operation list for the degree-n companion matrix."""
    return _row_ops_cached(field.q, n)


def linear_counter(field: Field, n: int, r: int | None = None) -> Counter:
    """Counter of length q^(n+r) - q^r over Z_q^(r+n).

    The first r cells hold a Gray pointer, the rest a nonzero vector of
    F_q^n. Each pointer revolution pushes the vector once through the
    companion matrix of the first primitive polynomial of degree n. The
    pointer must be wide enough to index every row operation; by default it
    is the smallest such width. The only words never visited are the q^r
    pointer settings over the zero vector.
    """
    if n < 1:
        raise ValueError("vector width must be at least 1")
    p = find_primitive(field, n)
    mat = companion_matrix(p)
    steps = decompose_elementary(mat, field)
    k = len(steps)
    q = field.q
    r_min = 1
    while q ** r_min < k:
        r_min += 1
    if r is None:
        r = r_min
    elif q ** r < k:
        raise ValueError(f"pointer width {r} cannot index {k} row operations")
    sl = StepList(steps, Domain.uniform(q, n), q ** n - 1)
    return cycle_compose(sl, BaseGrayCode(q, r), (0,) * (n - 1) + (1,),
                         claimed_reads=r + 2, claimed_writes=2,
                         recipe={"kind": "linear", "q": q, "n": n, "r": r,
                                 "polynomial": str(p), "row_ops": k})


def companion_counter(field: Field, n: int) -> Counter:
    """Counter applying the companion matrix once per step, visiting every
    nonzero vector of F_q^n. Reads and writes all n cells."""
    p = find_primitive(field, n)
    mat = companion_matrix(p)
    mat_inv = mat_inverse(field, mat)
    domain = Domain.uniform(field.q, n)

    def make(m):
        def fn(tape):
            x = [tape.read(i) for i in range(n)]
            y = mat_vec(field, m, x)
            for i in range(n):
                tape.write(i, y[i])
        return fn

    return Counter(domain, make(mat), make(mat_inv), field.q ** n - 1,
                   (0,) * (n - 1) + (1,),
                   claimed_reads=n, claimed_writes=n,
                   recipe={"kind": "companion", "q": field.q, "n": n,
                           "polynomial": str(p)})
