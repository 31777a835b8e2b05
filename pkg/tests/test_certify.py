import bisect

import pytest

from esfscan.certify import (
    Certificate,
    certificate_threshold,
    certify_range,
    check_valuations,
    find_certificate,
    sample_certified_pairs,
    verify_valuation_property,
    write_certificates,
)
from esfscan.rational import make_rational
from esfscan.symfun import k_cap


def brute_certificate_prime(n, k, table):
    """Reference scan of the whole window, largest qualifying prime."""
    threshold = certificate_threshold(k)
    primes = table.primes
    start = bisect.bisect_left(primes, max(2, n // (k + 3)))
    best = None
    for p in primes[start:]:
        if (k + 1) * p > n:
            break
        if (k + 3) * p > n and p > threshold:
            best = p
    return best


class TestThreshold:
    def test_values(self):
        assert certificate_threshold(1) == 11  # max(6, 11)
        assert certificate_threshold(2) == 14  # max(10, 14)
        assert certificate_threshold(3) == 17  # max(15, 17)
        assert certificate_threshold(4) == 21  # max(21, 20)
        assert certificate_threshold(10) == 78


class TestCertificate:
    def test_valid(self):
        cert = Certificate.for_prime(100, 1, 47)
        assert cert.window_lo == make_rational(100, 4)
        assert cert.window_hi == make_rational(100, 2)
        assert cert.threshold == 11
        assert cert.multiples_in_range == 2

    def test_prime_below_window_rejected(self):
        with pytest.raises(ValueError):
            Certificate.for_prime(100, 1, 23)

    def test_prime_above_window_rejected(self):
        with pytest.raises(ValueError):
            Certificate.for_prime(100, 1, 53)

    def test_prime_below_threshold_rejected(self):
        # 7 lies in the window (5, 10] for n=20, k=1 but misses the threshold.
        with pytest.raises(ValueError):
            Certificate.for_prime(20, 1, 7)

    def test_tampered_fields_rejected(self):
        good = dict(
            n=100,
            k=1,
            p=47,
            window_lo=make_rational(100, 4),
            window_hi=make_rational(100, 2),
            threshold=11,
            multiples_in_range=2,
        )
        for field, bad in [
            ("threshold", 10),
            ("multiples_in_range", 3),
            ("window_lo", make_rational(100, 5)),
            ("window_hi", make_rational(100, 3)),
        ]:
            with pytest.raises(ValueError):
                Certificate(**{**good, field: bad})


class TestFindCertificate:
    def test_smallest_certified_n(self, table_5000):
        cert = find_certificate(26, 1, table_5000)
        assert cert is not None and cert.p == 13
        assert all(find_certificate(n, 1, table_5000) is None for n in range(2, 26))

    def test_absent_small_n(self, table_5000):
        assert find_certificate(20, 1, table_5000) is None
        assert find_certificate(4, 1, table_5000) is None

    def test_exact_boundary_prime_included(self, table_50216):
        # 29 * 467 = 13543: the window top is hit exactly, and the
        # comparison must include it.
        cert = find_certificate(13543, 28, table_50216)
        assert cert is not None and cert.p == 467

    def test_window_top_prime(self, table_50216):
        cert = find_certificate(13543, 1, table_50216)
        assert cert is not None and cert.p == 6763  # largest prime <= 6771

    def test_table_too_small_rejected(self, table_5000):
        with pytest.raises(ValueError):
            find_certificate(6000, 1, table_5000)

    def test_domain_rejected(self, table_5000):
        with pytest.raises(ValueError):
            find_certificate(10, 10, table_5000)

    def test_matches_brute_force_scan(self, table_5000):
        for n in range(2, 5001):
            for k in range(1, k_cap(n) + 1):
                expected = brute_certificate_prime(n, k, table_5000)
                cert = find_certificate(n, k, table_5000)
                got = cert.p if cert else None
                assert got == expected, (n, k)


class TestCertifyRange:
    def test_all_gaps_at_n4(self, table_5000):
        result = certify_range(4, 4, table_5000)
        assert result.gaps == ((4, 1), (4, 2), (4, 3))
        assert not result.certificates

    def test_tiny_range_fully_gapped(self, table_5000):
        result = certify_range(2, 5, table_5000)
        assert result.pairs_checked == len(result.gaps) == 10

    def test_zero_gaps_above_sieve_handoff(self, table_50216):
        result = certify_range(13543, 13600, table_50216)
        assert not result.gaps
        assert result.pairs_checked == sum(k_cap(n) for n in range(13543, 13601))

    def test_pair_accounting(self, table_5000):
        result = certify_range(100, 140, table_5000)
        assert result.pairs_checked == sum(k_cap(n) for n in range(100, 141))
        assert len(result.certificates) + len(result.gaps) == result.pairs_checked

    def test_rejects_bad_range(self, table_5000):
        with pytest.raises(ValueError):
            certify_range(50, 40, table_5000)
        with pytest.raises(ValueError):
            certify_range(2, 6000, table_5000)

    def test_file_format(self, table_5000, tmp_path):
        result = certify_range(25, 26, table_5000)
        path = tmp_path / "certs.tsv"
        write_certificates(str(path), result)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == f"GAP\t25\t1"
        idx = k_cap(25)  # first line of n=26 block
        assert lines[idx] == "26\t1\t13\t11\t2"
        assert lines[idx + 1] == "GAP\t26\t2"
        assert len(lines) == k_cap(25) + k_cap(26)


class TestValuationProperty:
    def test_single_checks(self, table_5000):
        cert = find_certificate(100, 1, table_5000)
        assert cert.p == 47
        # i coprime to p, i equal to p, i a proper multiple of p, i = n.
        for i in (1, 47, 94, 100):
            assert verify_valuation_property(100, i, 1, cert)

    def test_pair_mismatch_rejected(self, table_5000):
        cert = find_certificate(100, 1, table_5000)
        with pytest.raises(ValueError):
            verify_valuation_property(100, 1, 2, cert)

    def test_batch_all_indices(self, table_5000):
        pairs = [(100, 1), (150, 2), (321, 3), (400, 1)]
        results = check_valuations(pairs, table_5000)
        assert [(r.n, r.k) for r in results] == sorted(pairs)
        for r in results:
            assert r.passed and r.indices_checked == r.n

    def test_batch_rejects_uncertified_pair(self, table_5000):
        with pytest.raises(ValueError):
            check_valuations([(4, 1)], table_5000)


class TestSampling:
    def test_deterministic(self, table_5000):
        a = sample_certified_pairs(table_5000, n_max=300, count=20, seed=7)
        b = sample_certified_pairs(table_5000, n_max=300, count=20, seed=7)
        assert a == b and len(a) == 20
        for n, k in a:
            assert find_certificate(n, k, table_5000) is not None

    def test_rejects_oversized_request(self, table_5000):
        with pytest.raises(ValueError):
            sample_certified_pairs(table_5000, n_max=30, count=100, seed=7)
