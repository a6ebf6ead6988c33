#!/usr/bin/env python3

"""Module containing the closed-form deletion-rate and performance-retention formulas."""
from dataclasses import asdict, dataclass
import numpy as np
from biobb_unlearning.s3t.core import InvalidInputError, check_budget, check_count

EULER_GAMMA = 0.5772156649015329
FALLING_FACTORIAL_CAP = 2 ** 62


@dataclass(frozen=True)
class BoundReport:
    m: int
    L: int
    B: int
    b_prime: int
    sisa_bound: float
    s3t_bound: float
    s3t_asymptotic: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RetentionPoint:
    k: int
    r: int
    p_sisa: float
    p_s3t: float
    gap: float
    b_eff: int

    def to_dict(self) -> dict:
        return asdict(self)


def harmonic(n: int) -> float:
    """n-th harmonic number by direct summation."""
    n = check_count('n', n)
    return float(np.sum(1.0 / np.arange(1, n + 1, dtype=np.float64)))


def effective_budget(B: int, L: int) -> int:
    return min(check_budget(B), check_count('L', L))


def s3t_deletion_bound(m: int, L: int, B: int) -> float:
    """Expected requests until every shard loses all variants: m*L*H(m*min(B, L))."""
    m, L = check_count('m', m), check_count('L', L)
    return m * L * harmonic(m * effective_budget(B, L))


def sisa_deletion_bound(m: int, L: int) -> float:
    return s3t_deletion_bound(m, L, 1)


def asymptotic_deletion_bound(m: int, L: int, B: int) -> float:
    """m*L*(ln(m*B') + gamma), reported next to the exact harmonic bound."""
    m, L = check_count('m', m), check_count('L', L)
    return m * L * (float(np.log(m * effective_budget(B, L))) + EULER_GAMMA)


def bound_report(m: int, L: int, B: int) -> BoundReport:
    return BoundReport(m, L, B, effective_budget(B, L), sisa_deletion_bound(m, L),
                       s3t_deletion_bound(m, L, B), asymptotic_deletion_bound(m, L, B))


def falling_factorial(L: int, k: int, cap: int = FALLING_FACTORIAL_CAP) -> int:
    """L!/(L-k)!, saturating at ``cap``."""
    value = 1
    for factor in range(L - k + 1, L + 1):
        value *= factor
        if value >= cap:
            return cap
    return value


def _check_retention_args(k: int, L: int, r: int) -> None:
    L = check_count('L', L)
    if not 1 <= k <= L:
        raise InvalidInputError(f"prefix length k must lie in [1, L={L}], got {k}")
    check_count('r', r, 0)


def retention_budget(k: int, L: int, B: int) -> int:
    return min(check_budget(B), falling_factorial(L, k))


def retention_prob_sisa(k: int, L: int, r: int) -> float:
    """Probability that none of the first k of L slices is hit by r deletions."""
    _check_retention_args(k, L, r)
    return (1.0 - k / L) ** r


def _zeta(k: int, L: int, r: int) -> float:
    return 1.0 - retention_prob_sisa(k, L, r)


def retention_prob_s3t(k: int, L: int, r: int, B: int) -> float:
    zeta = _zeta(k, L, r)
    return 1.0 - zeta ** retention_budget(k, L, B)


def retention_gap(k: int, L: int, r: int, B: int) -> float:
    zeta = _zeta(k, L, r)
    return zeta * (1.0 - zeta ** (retention_budget(k, L, B) - 1))


def retention_point(k: int, L: int, r: int, B: int) -> RetentionPoint:
    return RetentionPoint(k, r, retention_prob_sisa(k, L, r), retention_prob_s3t(k, L, r, B),
                          retention_gap(k, L, r, B), retention_budget(k, L, B))
