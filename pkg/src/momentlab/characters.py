"""Dirichlet character groups mod q via CRT on prime-power components.

Characters are stored as exact root-of-unity exponents (numerator over the
group exponent) next to a complex table, so multiplicativity, parity, and
orthogonality can be tested without floating noise.  Indexing is by exponent
vectors on fixed component generators (for 2^e with e >= 3 the generators
are -1 and 5), lexicographic with the first component most significant.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import divisors, euler_phi, factorize, moebius, phi_star


def _primitive_root_odd_prime_power(p: int, e: int) -> int:
    """Smallest primitive root mod p that also generates mod p^e."""
    phi_p = p - 1
    prime_divs = [r for r, _ in factorize(phi_p).factors]
    g = 2
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, phi_p // r, p) != 1 for r in prime_divs):
            break
        g += 1
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _Component:
    prime_power: int      # p^e
    generator: int        # generator residue mod q (lifted via CRT)
    order: int


@dataclass
class CharacterGroup:
    """Full multiplicative character table mod q.

    exponents[i, x] holds num with chi_i(x) = e(num / group_exponent) for
    units x, and -1 for non-units.  values is the matching complex table.
    """

    modulus: int
    components: tuple[_Component, ...]
    group_exponent: int
    exponents: np.ndarray        # (n_chars, q) int64, -1 on non-units
    values: np.ndarray           # (n_chars, q) complex128, 0 on non-units
    parity: np.ndarray           # (n_chars,) int8, chi(-1)
    conductor: np.ndarray        # (n_chars,) int64
    is_primitive: np.ndarray     # (n_chars,) bool

    @property
    def n_chars(self) -> int:
        return self.exponents.shape[0]

    def chi(self, index: int, x: int) -> complex:
        return self.values[index, x % self.modulus]

    def primitive_indices(self, parity: int | None = None) -> list[int]:
        idx = np.nonzero(self.is_primitive)[0]
        if parity is not None:
            idx = idx[self.parity[idx] == parity]
        return [int(i) for i in idx]


def _component_dlogs(q: int) -> tuple[list[_Component], list[np.ndarray]]:
    """Generators with orders, and per-component discrete-log tables mod q."""
    comps: list[_Component] = []
    dlogs: list[np.ndarray] = []
    units = [x for x in range(q) if math.gcd(x, q) == 1] if q > 1 else [0]
    for p, e in factorize(q).factors:
        pe = p**e
        rest = q // pe
        if p == 2 and e == 1:
            continue  # trivial unit group mod 2
        if p == 2 and e >= 3:
            gens = [(pe - 1, 2), (5, 2 ** (e - 2))]
        elif p == 2:  # e == 2
            gens = [(3, 2)]
        else:
            gens = [(_primitive_root_odd_prime_power(p, e), euler_phi(pe))]
        # discrete logs of every unit x (mod pe) on this generator system
        if p == 2 and e >= 3:
            table = -np.ones(pe, dtype=np.int64)  # combined (s, t) -> packed later
            sign_log = -np.ones(pe, dtype=np.int64)
            five_log = -np.ones(pe, dtype=np.int64)
            val = 1
            for t in range(2 ** (e - 2)):
                sign_log[val] = 0
                five_log[val] = t
                sign_log[pe - val] = 1
                five_log[pe - val] = t
                val = val * 5 % pe
            for g_res, order, log_tab in ((pe - 1, 2, sign_log), (5, 2 ** (e - 2), five_log)):
                g_lift = _crt_lift(g_res, pe, rest, q)
                comps.append(_Component(pe, g_lift, order))
                dl = np.zeros(len(units), dtype=np.int64)
                for j, x in enumerate(units):
                    dl[j] = log_tab[x % pe]
                dlogs.append(dl)
        else:
            g_res, order = gens[0]
            log_tab = -np.ones(pe, dtype=np.int64)
            val = 1
            for t in range(order):
                log_tab[val] = t
                val = val * g_res % pe
            g_lift = _crt_lift(g_res, pe, rest, q)
            comps.append(_Component(pe, g_lift, order))
            dl = np.zeros(len(units), dtype=np.int64)
            for j, x in enumerate(units):
                dl[j] = log_tab[x % pe]
            dlogs.append(dl)
    return comps, dlogs


def _crt_lift(res: int, pe: int, rest: int, q: int) -> int:
    """Residue mod q that is `res` mod pe and 1 mod rest."""
    if rest == 1:
        return res % q
    inv = pow(pe, -1, rest)
    return (res + pe * ((1 - res) * inv % rest)) % q


@lru_cache(maxsize=256)
def build_group(q: int) -> CharacterGroup:
    """Construct the complete character table mod q (deterministic indexing)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    units = [x for x in range(q) if math.gcd(x, q) == 1] if q > 1 else [0]
    comps, dlogs = _component_dlogs(q)
    orders = [c.order for c in comps]
    n_chars = math.prod(orders) if orders else 1
    assert n_chars == euler_phi(q)
    group_exp = math.lcm(*orders) if orders else 1

    # all exponent vectors, lexicographic (first component most significant)
    if orders:
        grids = np.indices(orders).reshape(len(orders), -1).T  # (n_chars, ncomp)
    else:
        grids = np.zeros((1, 0), dtype=np.int64)

    exponents = -np.ones((n_chars, q if q > 1 else 1), dtype=np.int64)
    unit_idx = np.array(units, dtype=np.int64)
    if comps:
        dl_mat = np.stack(dlogs)                        # (ncomp, n_units)
        weights = np.array([group_exp // c.order for c in comps], dtype=np.int64)
        nums = (grids * weights) @ dl_mat % group_exp   # (n_chars, n_units)
    else:
        nums = np.zeros((1, len(units)), dtype=np.int64)
    exponents[:, unit_idx] = nums
    values = np.zeros(exponents.shape, dtype=np.complex128)
    values[:, unit_idx] = np.exp(2j * np.pi * nums / group_exp)

    minus_one = (q - 1) % max(q, 1) if q > 1 else 0
    parity = np.where(exponents[:, minus_one] == 0, 1, -1).astype(np.int8)

    conductor = np.zeros(n_chars, dtype=np.int64)
    for i in range(n_chars):
        conductor[i] = _conductor(q, units, exponents[i])
    is_primitive = conductor == q
    assert int(is_primitive.sum()) == phi_star(q)

    return CharacterGroup(q, tuple(comps), group_exp, exponents, values,
                          parity, conductor, is_primitive)


def _conductor(q: int, units: list[int], expo: np.ndarray) -> int:
    if q == 1:
        return 1
    for f in divisors(q):
        # chi factors through f iff chi is trivial on {x = 1 mod f}
        if all(expo[x] == 0 for x in units if x % f == 1 % f):
            return f
    return q


@dataclass(frozen=True)
class GaussData:
    """Normalized Gauss sum data for a primitive character."""

    char_index: int
    eps_chi: complex      # q^{-1/2} sum_x chi(x) e(x/q)
    eps: complex          # i^{-a} * eps_chi with a the parity exponent


def gauss_eps(group: CharacterGroup, index: int) -> GaussData:
    """eps_chi by direct q-term summation; requires a primitive character."""
    q = group.modulus
    if not group.is_primitive[index]:
        raise ValueError(f"character {index} mod {q} is not primitive")
    if q == 1:
        return GaussData(index, 1.0 + 0j, 1.0 + 0j)
    phases = np.exp(2j * np.pi * np.arange(q) / q)
    eps_chi = complex(np.sum(group.values[index] * phases)) / math.sqrt(q)
    if abs(abs(eps_chi) - 1.0) > 1e-10:
        raise ArithmeticError(f"|eps_chi| = {abs(eps_chi)} deviates from 1")
    a = 0 if group.parity[index] == 1 else 1
    return GaussData(index, eps_chi, (-1j) ** a * eps_chi)


def orthogonality_sum(q: int, m: int, n: int, sigma: int) -> Fraction:
    """Divisor-sum side of the primitive-character orthogonality formula.

    Returns (1/2)(sum_{d|(q,m-n)} phi(d) mu(q/d)
                  + sigma sum_{d|(q,m+n)} phi(d) mu(q/d)) exactly.
    """
    if sigma not in (-1, 1):
        raise ValueError("sigma must be +1 or -1")
    if math.gcd(m * n, q) != 1:
        raise ValueError("(mn, q) = 1 required")
    s_minus = sum(euler_phi(d) * moebius(q // d) for d in divisors(math.gcd(q, abs(m - n)) or q))
    s_plus = sum(euler_phi(d) * moebius(q // d) for d in divisors(math.gcd(q, m + n)))
    return Fraction(s_minus + sigma * s_plus, 2)


def enumerated_orthogonality(q: int, m: int, n: int, sigma: int) -> complex:
    """Direct enumeration oracle for the orthogonality formula."""
    group = build_group(q)
    total = 0j
    for i in group.primitive_indices(parity=sigma):
        total += group.chi(i, m) * group.chi(i, n).conjugate()
    return total


_CACHE_MAGIC = b"MLCT"


def save_group(group: CharacterGroup, path) -> None:
    """Binary character-table cache: header (q, phi(q), group exponent) then
    the exponent matrix row-major as little-endian uint32 (non-units as
    0xFFFFFFFF)."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<III", group.modulus, group.n_chars, group.group_exponent))
        mat = group.exponents.astype(np.int64).copy()
        mat[mat < 0] = 0xFFFFFFFF
        fh.write(mat.astype("<u4").tobytes())


def load_group(path) -> CharacterGroup:
    with open(path, "rb") as fh:
        if fh.read(4) != _CACHE_MAGIC:
            raise ValueError("not a momentlab character-table cache")
        q, n_chars, group_exp = struct.unpack("<III", fh.read(12))
        mat = np.frombuffer(fh.read(), dtype="<u4").reshape(n_chars, max(q, 1)).astype(np.int64)
    group = build_group(q)
    if group.group_exponent != group_exp or group.n_chars != n_chars:
        raise ValueError("cache inconsistent with freshly built group")
    check = group.exponents.copy()
    check[check < 0] = 0xFFFFFFFF
    if not np.array_equal(check, mat):
        raise ValueError("cache exponent matrix mismatch")
    return group
