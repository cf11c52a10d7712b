"""Arithmetic in the finite field F_q, q = p^ell an odd prime power.

Elements are encoded as integers ``0..q-1``: the element whose polynomial
coefficients are ``(c_{ell-1}, ..., c_1, c_0)`` (highest degree first) gets
index ``sum(c_i * p**i)``.  The canonical element order is the index order,
i.e. lexicographic on coefficient vectors as written; prime-subfield elements
occupy indices ``0..p-1``.

All arithmetic is table driven, so every operation accepts plain ints or
numpy arrays of element indices and broadcasts like a ufunc.  On top of the
ring operations the field carries the canonical additive character
``chi(x) = exp(2*pi*i*Tr(x)/p)`` with the absolute trace ``Tr``, the quadratic
character ``eta`` (0 at 0, +1 on squares, -1 on non-squares), and both a
summed and a closed-form Gauss sum.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# Tables are dense q x q arrays; keep q small enough that they stay cheap.
MAX_Q = 1024


class FieldError(ValueError):
    """Invalid field parameters (even/composite characteristic, bad modulus)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    # Coefficient lists are low-degree-first here (internal helper only).
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    # Reduce a by the monic polynomial m (low-first, m[-1] == 1).
    a = list(a)
    n = len(m) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] % p
        if c:
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * m[j]) % p
    return [c % p for c in a[:n]] + [0] * max(0, n - len(a))


def _is_irreducible(m: list[int], p: int) -> bool:
    """Trial division of the monic polynomial m (low-first) over F_p."""
    deg = len(m) - 1
    if deg <= 0:
        return False
    # Divisor of degree k exists iff a *monic* one does; scan k <= deg/2.
    for k in range(1, deg // 2 + 1):
        for idx in range(p**k):
            div = _int_to_coeffs(idx, p, k) + [1]
            rem = _poly_mod(m, div, p)
            if not any(rem):
                return False
    return True


def _int_to_coeffs(idx: int, p: int, ell: int) -> list[int]:
    # Low-degree-first coefficient list of length ell.
    out = []
    for _ in range(ell):
        out.append(idx % p)
        idx //= p
    return out


def _coeffs_to_int(coeffs: list[int], p: int) -> int:
    idx = 0
    for c in reversed(coeffs):
        idx = idx * p + (c % p)
    return idx


def smallest_irreducible(p: int, ell: int) -> tuple[int, ...]:
    """First monic irreducible of degree ell over F_p in canonical order.

    Returns the coefficient tuple highest degree first, e.g. F_9 gives
    ``(1, 0, 1)`` for t^2 + 1.
    """
    if ell == 1:
        return (1, 0)
    for idx in range(p**ell):
        low = _int_to_coeffs(idx, p, ell)
        if _is_irreducible(low + [1], p):
            return tuple(reversed(low + [1]))
    raise FieldError(f"no irreducible polynomial of degree {ell} over F_{p}")


class FiniteField:
    """F_q with table-driven arithmetic, characters and Gauss sums.

    Parameters
    ----------
    p : odd prime characteristic.
    ell : extension degree (q = p**ell).
    modulus : optional coefficient tuple (highest degree first) of a monic
        irreducible degree-ell polynomial; defaults to the canonically
        smallest one.
    """

    def __init__(self, p: int, ell: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p) or p == 2:
            raise FieldError(f"characteristic must be an odd prime, got {p}")
        if ell < 1:
            raise FieldError(f"extension degree must be >= 1, got {ell}")
        q = p**ell
        if q > MAX_Q:
            raise FieldError(f"q = {q} exceeds the table budget ({MAX_Q})")
        self.p = p
        self.ell = ell
        self.q = q
        if modulus is None:
            modulus = smallest_irreducible(p, ell)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != ell + 1 or modulus[0] != 1:
            raise FieldError(f"modulus must be monic of degree {ell}: {modulus}")
        low = list(reversed(modulus))
        if ell > 1 and not _is_irreducible(low, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.modulus = modulus
        self._modulus_low = low
        self._build_tables()

    # -- construction of the operation tables --------------------------------

    def _build_tables(self) -> None:
        p, ell, q = self.p, self.ell, self.q
        idx = np.arange(q)
        # coeffs[i] = low-degree-first digits of element i
        digits = np.empty((q, ell), dtype=np.int64)
        t = idx.copy()
        for k in range(ell):
            digits[:, k] = t % p
            t //= p
        self._digits = digits
        pw = p ** np.arange(ell)

        self.add_table = ((digits[:, None, :] + digits[None, :, :]) % p @ pw).astype(np.int64)
        self.neg_table = ((-digits) % p @ pw).astype(np.int64)
        self.sub_table = self.add_table[:, self.neg_table]

        if ell == 1:
            self.mul_table = (idx[:, None] * idx[None, :]) % p
        else:
            # x^k mod modulus for k = 0..2*ell-2, as low-first digit rows.
            red = np.zeros((2 * ell - 1, ell), dtype=np.int64)
            for k in range(2 * ell - 1):
                red[k] = _poly_mod([0] * k + [1], self._modulus_low, p)[:ell]
            # Raw product coefficients via outer convolution, then reduce.
            conv = np.zeros((q, q, 2 * ell - 1), dtype=np.int64)
            for i in range(ell):
                for j in range(ell):
                    conv[:, :, i + j] += digits[:, None, i] * digits[None, :, j]
            self.mul_table = ((conv % p) @ (red % p) % p @ pw).astype(np.int64)

        one_hits = self.mul_table == 1
        self.inv_table = np.argmax(one_hits, axis=1)
        self.inv_table[0] = 0  # convention; inverting 0 raises via inv()

        # Frobenius x -> x^p, iterated to build the absolute trace.
        frob = self._pow_vec(idx, p)
        self.frobenius_table = frob
        tr = idx.copy()
        acc = idx.copy()
        for _ in range(ell - 1):
            acc = frob[acc]
            tr = self.add_table[tr, acc]
        if np.any(tr >= p):
            raise FieldError("trace left the prime subfield; modulus tables corrupt")
        self.trace_table = tr
        self.char_table = np.exp(2j * np.pi * tr / p)

        squares = np.unique(self.mul_table[idx, idx])
        eta = -np.ones(q, dtype=np.int64)
        eta[squares] = 1
        eta[0] = 0
        self.eta_table = eta

    def _pow_vec(self, base: np.ndarray, e: int) -> np.ndarray:
        out = np.ones_like(base)
        b = base.copy()
        while e:
            if e & 1:
                out = self.mul_table[out, b]
            b = self.mul_table[b, b]
            e >>= 1
        return out

    # -- element helpers ------------------------------------------------------

    def coeffs(self, x: int) -> tuple[int, ...]:
        """Coefficient vector of element x, highest degree first."""
        return tuple(int(c) for c in self._digits[x][::-1])

    def from_coeffs(self, coeffs) -> int:
        return _coeffs_to_int(list(reversed([int(c) for c in coeffs])), self.p)

    def element(self, n: int) -> int:
        """The image of the integer n in the prime subfield."""
        return n % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q)

    # -- arithmetic (ints or index arrays) ------------------------------------

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.sub_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverting 0 in a finite field")
        return self.inv_table[a]

    def pow(self, a, e: int):
        e = int(e)
        if e < 0:
            return self._pow_vec(np.asarray(self.inv(a)), -e)
        return self._pow_vec(np.asarray(a), e)

    def dot(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Componentwise field dot product along the last axis."""
        prods = self.mul_table[x, y]
        out = prods[..., 0]
        for k in range(1, prods.shape[-1]):
            out = self.add_table[out, prods[..., k]]
        return out

    # -- characters and Gauss sums --------------------------------------------

    def trace(self, x):
        """Absolute trace Tr(x) = x + x^p + ... + x^(p^(ell-1)), in 0..p-1."""
        return self.trace_table[x]

    def additive_character(self, x):
        """chi(x) = exp(2*pi*i*Tr(x)/p), the canonical additive character."""
        return self.char_table[x]

    def quadratic_character(self, x):
        """eta(x): 0 at x=0, +1 on nonzero squares, -1 otherwise."""
        return self.eta_table[x]

    def gauss_sum_direct(self) -> complex:
        """G(eta, chi) summed term by term over the nonzero elements."""
        return complex(np.sum(self.eta_table[1:] * self.char_table[1:]))

    def gauss_sum_explicit(self) -> complex:
        """Closed-form G(eta, chi).

        Equals (-1)^(ell-1) sqrt(q) when p = 1 mod 4 and
        (-1)^(ell-1) i^ell sqrt(q) when p = 3 mod 4.
        """
        sign = (-1) ** (self.ell - 1)
        root = math.sqrt(self.q)
        if self.p % 4 == 1:
            return complex(sign * root)
        return sign * (1j**self.ell) * root

    # -- misc ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteField)
            and (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ell, self.modulus))

    def __repr__(self) -> str:
        if self.ell == 1:
            return f"FiniteField({self.p})"
        return f"FiniteField({self.p}, {self.ell}, modulus={self.modulus})"


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            ell = 0
            t = q
            while t % p == 0:
                t //= p
                ell += 1
            if t != 1:
                raise FieldError(f"{q} is not a prime power")
            return p, ell
    raise FieldError(f"{q} is not a prime power")


@lru_cache(maxsize=None)
def field_for_order(q: int) -> FiniteField:
    """The canonical F_q (smallest modulus) for an odd prime power q."""
    p, ell = _factor_prime_power(q)
    return FiniteField(p, ell)
