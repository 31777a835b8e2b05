"""Prime-window non-integrality certificates.

A certificate for the pair (n, k) is a prime p with

    n/(k+3) < p <= n/(k+1)   and   p > max{(k+2)(k+3)/2, 3k+8}.

Whenever such a prime exists, every omit-one value at (n, i, k) has
p-adic valuation exactly -k and therefore cannot be an integer, for
every omitted index i.  Window membership is decided by integer
cross-multiplication only: the window boundaries n/(k+1) and n/(k+3)
can be hit exactly, and float rounding there could mis-certify.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .primes import PrimeTable
from .rational import Rational, make_rational, p_adic_valuation
from .symfun import EsfRow, esf_rows, k_cap


def certificate_threshold(k: int) -> int:
    """max{(k+2)(k+3)/2, 3k+8}; (k+2)(k+3) is even, so the division is exact."""
    return max((k + 2) * (k + 3) // 2, 3 * k + 8)


@dataclass(frozen=True)
class Certificate:
    """Witness that the prime window certifies (n, k); validated on construction."""

    n: int
    k: int
    p: int
    window_lo: Rational
    window_hi: Rational
    threshold: int
    multiples_in_range: int

    def __post_init__(self):
        n, k, p = self.n, self.k, self.p
        if not 1 <= k < n:
            raise ValueError(f"certificate requires 1 <= k < n, got k={k}, n={n}")
        if (k + 3) * p <= n:
            raise ValueError(f"p={p} at or below the window for (n={n}, k={k})")
        if (k + 1) * p > n:
            raise ValueError(f"p={p} above the window for (n={n}, k={k})")
        if p <= self.threshold:
            raise ValueError(f"p={p} does not exceed the threshold {self.threshold}")
        if self.threshold != certificate_threshold(k):
            raise ValueError(f"threshold {self.threshold} wrong for k={k}")
        if self.window_lo != make_rational(n, k + 3):
            raise ValueError("window_lo is not n/(k+3)")
        if self.window_hi != make_rational(n, k + 1):
            raise ValueError("window_hi is not n/(k+1)")
        if self.multiples_in_range != n // p:
            raise ValueError("multiples_in_range is not floor(n/p)")
        if self.multiples_in_range not in (k + 1, k + 2):
            raise ValueError(f"floor(n/p)={self.multiples_in_range} outside {{k+1, k+2}}")

    @classmethod
    def for_prime(cls, n: int, k: int, p: int) -> "Certificate":
        return cls(
            n=n,
            k=k,
            p=p,
            window_lo=make_rational(n, k + 3),
            window_hi=make_rational(n, k + 1),
            threshold=certificate_threshold(k),
            multiples_in_range=n // p,
        )


def find_certificate(n: int, k: int, table: PrimeTable) -> Optional[Certificate]:
    """Largest qualifying prime for (n, k), or None.

    Any qualifying prime would do; the largest makes the output
    deterministic.  Since the threshold does not depend on p, only the
    largest prime <= n/(k+1) can qualify: if it fails any condition, no
    smaller prime can do better.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if table.limit < n:
        raise ValueError(f"prime table limit {table.limit} < n={n}")
    p = table.largest_leq(n // (k + 1))
    if p is None:
        return None
    if (k + 3) * p <= n or p <= certificate_threshold(k):
        return None
    return Certificate.for_prime(n, k, p)


@dataclass(frozen=True)
class CertifyResult:
    n_lo: int
    n_hi: int
    pairs_checked: int
    certificates: Tuple[Certificate, ...]
    gaps: Tuple[Tuple[int, int], ...]


def certify_range(n_lo: int, n_hi: int, table: PrimeTable) -> CertifyResult:
    """Attempt a certificate for every n in [n_lo, n_hi] and every scanned k.

    The k range at each n is 1..k_cap(n) (always < n).  Pairs with no
    qualifying prime are reported as gaps.
    """
    if not 2 <= n_lo <= n_hi:
        raise ValueError(f"need 2 <= n_lo <= n_hi, got [{n_lo}, {n_hi}]")
    if n_hi > table.limit:
        raise ValueError(f"prime table limit {table.limit} < n_hi={n_hi}")
    certificates: List[Certificate] = []
    gaps: List[Tuple[int, int]] = []
    pairs = 0
    for n in range(n_lo, n_hi + 1):
        for k in range(1, k_cap(n) + 1):
            pairs += 1
            cert = find_certificate(n, k, table)
            if cert is None:
                gaps.append((n, k))
            else:
                certificates.append(cert)
    return CertifyResult(
        n_lo=n_lo,
        n_hi=n_hi,
        pairs_checked=pairs,
        certificates=tuple(certificates),
        gaps=tuple(gaps),
    )


def certificate_lines(result: CertifyResult) -> Iterable[str]:
    """Render the certificate list format: one tab-separated line per
    certificate (n, k, p, threshold, floor(n/p)); gap lines prefixed GAP."""
    by_pair = {(c.n, c.k): c for c in result.certificates}
    gap_set = set(result.gaps)
    for n in range(result.n_lo, result.n_hi + 1):
        for k in range(1, k_cap(n) + 1):
            if (n, k) in gap_set:
                yield f"GAP\t{n}\t{k}"
            else:
                c = by_pair[(n, k)]
                yield f"{c.n}\t{c.k}\t{c.p}\t{c.threshold}\t{c.multiples_in_range}"


def write_certificates(path: str, result: CertifyResult) -> None:
    """Write the certificate list file (UTF-8, LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in certificate_lines(result):
            fh.write(line + "\n")


def verify_valuation_property(n: int, i: int, k: int, cert: Certificate) -> bool:
    """Check v_p(omit(n, i, k)) == -k for the certificate's prime.

    Recomputes the value exactly from scratch; fine for single calls,
    use :func:`check_valuations` to sweep all i over many pairs.
    """
    if cert.n != n or cert.k != k:
        raise ValueError(f"certificate is for ({cert.n}, {cert.k}), not ({n}, {k})")
    from .symfun import compute_omit

    return p_adic_valuation(compute_omit(n, i, k), cert.p) == -k


@dataclass(frozen=True)
class ValuationCheck:
    n: int
    k: int
    p: int
    indices_checked: int
    failures: Tuple[int, ...]  # omitted indices i where v_p != -k

    @property
    def passed(self) -> bool:
        return not self.failures


def check_valuations(pairs: Sequence[Tuple[int, int]], table: PrimeTable) -> List[ValuationCheck]:
    """Verify the valuation property for every omitted index i at each pair.

    One rolling-row sweep up to max n serves all pairs; per pair the
    omit-one values are accumulated over ascending k for each i, so the
    total cost is sum over pairs of n*k exact operations.
    """
    if not pairs:
        return []
    by_n: dict = {}
    for n, k in pairs:
        by_n.setdefault(n, []).append(k)
    n_max = max(by_n)
    cap = max(k for ks in by_n.values() for k in ks)
    results: List[ValuationCheck] = []
    prev: Optional[EsfRow] = None
    for row in esf_rows(n_max, cap=cap):
        n = row.n
        if n in by_n and prev is not None:
            for k in sorted(by_n[n]):
                cert = find_certificate(n, k, table)
                if cert is None:
                    raise ValueError(f"no certificate exists for (n={n}, k={k})")
                failures = []
                for i in range(1, n + 1):
                    if i == n:
                        val = prev.value(k)
                    else:
                        acc = row.harmonic - make_rational(1, i)
                        r_i = make_rational(1, i)
                        for j in range(2, k + 1):
                            acc = row.value(j) - acc * r_i
                        val = acc
                    if p_adic_valuation(val, cert.p) != -k:
                        failures.append(i)
                results.append(
                    ValuationCheck(
                        n=n, k=k, p=cert.p, indices_checked=n, failures=tuple(failures)
                    )
                )
        prev = row
    return results


def sample_certified_pairs(
    table: PrimeTable, n_max: int, count: int, seed: int = 2024
) -> List[Tuple[int, int]]:
    """Deterministically sample ``count`` certified (n, k) pairs with n <= n_max."""
    certified = [
        (n, k)
        for n in range(2, n_max + 1)
        for k in range(1, k_cap(n) + 1)
        if find_certificate(n, k, table) is not None
    ]
    if len(certified) < count:
        raise ValueError(f"only {len(certified)} certified pairs below {n_max}")
    rng = random.Random(seed)
    return sorted(rng.sample(certified, count))
