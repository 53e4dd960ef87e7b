"""Exact cospectrality via characteristic polynomials over prime fields.

``det(xI - A)`` is computed modulo each prime by reducing A to upper
Hessenberg form with similarity transforms and expanding the Hessenberg
determinant by the usual recurrence. Everything is integer arithmetic, so
a mismatch at any prime is a proof that the spectra differ.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import BudgetExceeded, Graph

# The five smallest primes above 2**62. Changing this list changes every
# certificate, so it carries a version tag.
DEFAULT_PRIMES: tuple[int, ...] = (
    4611686018427388039,
    4611686018427388073,
    4611686018427388081,
    4611686018427388091,
    4611686018427388093,
)
PRIME_LIST_VERSION = "p62x5-v1"
DENSE_BUDGET = 2000


class Cospectrality(str, enum.Enum):
    COSPECTRAL_MOD_PRIMES = "COSPECTRAL_MOD_PRIMES"
    NOT_COSPECTRAL = "NOT_COSPECTRAL"


@dataclass(frozen=True)
class SpectralCertificate:
    primes: tuple[int, ...]
    residues: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "primes": [str(p) for p in self.primes],
            "prime_list_version": PRIME_LIST_VERSION if self.primes == DEFAULT_PRIMES else None,
            "residues": [[str(c) for c in r] for r in self.residues],
        }


def _is_prime(p: int) -> bool:
    if p in DEFAULT_PRIMES:
        return True
    from sympy import isprime

    return bool(isprime(p))


def hessenberg_charpoly(matrix: np.ndarray, p: int) -> list[int]:
    """Coefficients c_0..c_n of det(xI - M) mod p, lowest degree first."""
    n = matrix.shape[0]
    H = np.empty((n, n), dtype=object)
    H[:] = [[int(x) % p for x in row] for row in matrix]
    for j in range(n - 2):
        col = H[j + 1 :, j]
        nz = np.flatnonzero(col != 0)
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[i, j + 1], :] = H[[j + 1, i], :]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        if j + 2 >= n:
            continue
        below = H[j + 2 :, j]
        if not below.any():
            continue
        inv = pow(int(H[j + 1, j]), -1, p)
        u = (below * inv) % p
        H[j + 2 :, :] = (H[j + 2 :, :] - np.multiply.outer(u, H[j + 1, :])) % p
        H[:, j + 1] = (H[:, j + 1] + H[:, j + 2 :].dot(u)) % p

    # P[m] holds the characteristic polynomial of the leading m x m block.
    P = np.zeros((n + 1, n + 1), dtype=object)
    P[0, 0] = 1
    for m in range(1, n + 1):
        prev = P[m - 1]
        cur = np.zeros(n + 1, dtype=object)
        cur[1:] = prev[:-1]
        cur = (cur - H[m - 1, m - 1] * prev) % p
        if m > 1:
            # t[i] = h[i, m-1] * h[m-1, m-2] * ... * h[i+1, i]  (0-based)
            t = np.zeros(m - 1, dtype=object)
            prod = 1
            for i in range(m - 2, -1, -1):
                prod = prod * H[i + 1, i] % p
                t[i] = H[i, m - 1] * prod % p
            cur = (cur - t.dot(P[: m - 1])) % p
        P[m] = cur
    return [int(c) for c in P[n]]


def char_poly_mod(g: Graph, p: int) -> list[int]:
    """Coefficients of det(xI - A) mod p, lowest degree first (length v + 1)."""
    if g.v > DENSE_BUDGET:
        raise BudgetExceeded(f"{g.v} vertices exceeds the dense budget {DENSE_BUDGET}")
    if not 2 <= p < 1 << 63 or not _is_prime(p):
        raise ValueError(f"{p} is not a prime below 2**63")
    if p <= g.v * g.v:
        raise ValueError(f"prime {p} must exceed |V|^2 = {g.v * g.v}")
    if g.v == 0:
        return [1]
    return hessenberg_charpoly(g.matrix, p)


def _default_workers() -> int:
    return max(1, int(os.environ.get("JS_WORKERS", os.cpu_count() or 1)))


def certificate(
    g: Graph, primes: tuple[int, ...] = DEFAULT_PRIMES, workers: int | None = None
) -> SpectralCertificate:
    workers = _default_workers() if workers is None else workers
    if workers > 1 and g.v >= 96 and len(primes) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(primes))) as pool:
            residues = list(pool.map(char_poly_mod, [g] * len(primes), primes))
    else:
        residues = [char_poly_mod(g, p) for p in primes]
    return SpectralCertificate(tuple(primes), tuple(tuple(r) for r in residues))


def cospectral(
    g: Graph,
    h: Graph,
    primes: tuple[int, ...] = DEFAULT_PRIMES,
    workers: int | None = None,
) -> tuple[Cospectrality, SpectralCertificate, SpectralCertificate]:
    if g.v != h.v:
        raise ValueError(f"vertex counts differ: {g.v} vs {h.v}")
    cg = certificate(g, primes, workers)
    ch = certificate(h, primes, workers)
    same = cg.residues == ch.residues
    return (Cospectrality.COSPECTRAL_MOD_PRIMES if same else Cospectrality.NOT_COSPECTRAL), cg, ch


def eigenvalues(g: Graph) -> np.ndarray:
    """Floating-point spectrum, ascending. For display only; never used for verdicts."""
    return np.linalg.eigvalsh(g.matrix.astype(float))
