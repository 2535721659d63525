"""Certificates for the four dichotomy concepts, windows, and witnesses.

A certificate asserts, for every pair m >= n in the scanned window and
every state x,

    exp(alpha (m-n)) (|A_P(m,n) x| + |Q(n) x|)
        <= R_P(n) |P(n) x| + R_Q(m) |A_Q(m,n) x|

with the right-hand weights determined by the kind:

    UED:  R_P(n) = N,            R_Q(m) = N            (N >= 1, alpha > 0)
    NED:  R_P(n) = N(n),         R_Q(m) = N(m)         (N nondecreasing > 0)
    ED:   R_P(n) = N e^(beta n), R_Q(m) = N e^(beta m) (N >= 1, beta >= 0)
    SED:  as ED with 0 <= beta < alpha
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import InvalidCertificateError, OutOfRangeError
from .logscalar import LogMag, LogScalar, ladd, lfloat


class Kind(str, Enum):
    UED = "UED"
    NED = "NED"
    ED = "ED"
    SED = "SED"


@dataclass(frozen=True)
class WindowSpec:
    """Finite scan window: pairs n_min <= n <= m <= m_max, or the triplets
    n_min <= p <= n <= m <= m_max when triplet mode is set."""

    n_min: int
    m_max: int
    triplet: bool = False

    def __post_init__(self):
        if self.n_min < 0:
            raise ValueError("window start must be nonnegative")
        if self.n_min > self.m_max:
            raise ValueError(f"empty window: {self.n_min} > {self.m_max}")

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Lexicographic (n, m); this order fixes witness selection."""
        for n in range(self.n_min, self.m_max + 1):
            for m in range(n, self.m_max + 1):
                yield n, m

    def triplets(self) -> Iterator[tuple[int, int, int]]:
        for p in range(self.n_min, self.m_max + 1):
            for n in range(p, self.m_max + 1):
                for m in range(n, self.m_max + 1):
                    yield p, n, m

    def half(self) -> "WindowSpec":
        mid = self.n_min + (self.m_max - self.n_min) // 2
        return WindowSpec(self.n_min, mid, self.triplet)


# -- nonuniform profiles -----------------------------------------------------


class Profile:
    """Nondecreasing positive sequence n -> value, kept in the log domain."""

    def log_at(self, n: int) -> LogMag:
        raise NotImplementedError

    def at(self, n: int) -> LogScalar:
        return LogScalar.from_log(self.log_at(n))

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(Profile):
    value: float

    def log_at(self, n: int) -> LogMag:
        if self.value < 0:
            raise InvalidCertificateError("profile values must be nonnegative")
        return math.log(self.value) if self.value > 0 else -math.inf

    def describe(self) -> dict:
        return {"form": "constant", "value": self.value}


@dataclass(frozen=True)
class ShiftedPowerProfile(Profile):
    """(n + shift) ** power, e.g. the linear envelope (n + 2)."""

    shift: float
    power: float

    def log_at(self, n: int) -> LogMag:
        return self.power * math.log(n + self.shift)

    def describe(self) -> dict:
        return {"form": "shifted_power", "shift": self.shift, "power": self.power}


@dataclass(frozen=True)
class TowerExponentProfile(Profile):
    """exp((n+1) * (1 + 2**(n+1))): integer log-magnitudes, exact at any n."""

    def log_at(self, n: int) -> LogMag:
        return (n + 1) * (1 + 2 ** (n + 1))

    def describe(self) -> dict:
        return {"form": "tower_exponent"}


@dataclass(frozen=True)
class ScaledProfile(Profile):
    """A base profile multiplied by a fixed positive factor (log-domain)."""

    base: Profile
    log_factor: float

    def log_at(self, n: int) -> LogMag:
        return ladd(self.base.log_at(n), self.log_factor)

    def describe(self) -> dict:
        return {"form": "scaled", "log_factor": self.log_factor, "base": self.base.describe()}


@dataclass(frozen=True)
class TabulatedProfile(Profile):
    """Explicit values on [n_min, n_min + len - 1]; out-of-range access fails."""

    n_min: int
    values: tuple[LogScalar, ...]

    def log_at(self, n: int) -> LogMag:
        idx = n - self.n_min
        if not 0 <= idx < len(self.values):
            raise OutOfRangeError(f"profile tabulated on [{self.n_min}, "
                                  f"{self.n_min + len(self.values) - 1}], asked for {n}")
        return self.values[idx].logmag

    def describe(self) -> dict:
        return {
            "form": "tabulated",
            "n_min": self.n_min,
            "values": [{"sign": v.sign, "logmag": lfloat(v.logmag)} for v in self.values],
        }


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class DichotomyCertificate:
    kind: Kind
    alpha: float
    n_const: float | None = None
    beta: float | None = None
    profile: Profile | None = None

    def validate(self, window: WindowSpec | None = None) -> None:
        if not self.alpha > 0:
            raise InvalidCertificateError(f"alpha must be positive, got {self.alpha}")
        if self.kind is Kind.NED:
            if self.profile is None:
                raise InvalidCertificateError("nonuniform certificate needs a profile")
            if window is not None:
                prev = None
                for n in range(window.n_min, window.m_max + 1):
                    cur = self.profile.log_at(n)
                    if prev is not None and cur < prev:
                        raise InvalidCertificateError(f"profile decreases at n={n}")
                    prev = cur
            return
        if self.n_const is None or self.n_const < 1:
            raise InvalidCertificateError("constant N must satisfy N >= 1")
        if self.kind is Kind.UED:
            return
        if self.beta is None or self.beta < 0:
            raise InvalidCertificateError("beta must satisfy beta >= 0")
        if self.kind is Kind.SED and not self.beta < self.alpha:
            raise InvalidCertificateError(
                f"strong certificate needs beta < alpha, got beta={self.beta}, alpha={self.alpha}"
            )

    def log_n(self) -> float:
        return math.log(self.n_const) if self.n_const is not None else 0.0

    def r_p_log(self, n: int) -> LogMag:
        """log R_P(n), the weight multiplying |P(n) x|."""
        if self.kind is Kind.NED:
            return self.profile.log_at(n)
        if self.kind is Kind.UED:
            return self.log_n()
        return self.log_n() + self.beta * n

    def r_q_log(self, m: int) -> LogMag:
        """log R_Q(m), the weight multiplying |A_Q(m,n) x|."""
        if self.kind is Kind.NED:
            return self.profile.log_at(m)
        if self.kind is Kind.UED:
            return self.log_n()
        return self.log_n() + self.beta * m

    def scale_offset_p(self, n: int) -> LogMag:
        """log(R_P(n) / N): the profile part of the P-side weight."""
        if self.kind is Kind.NED:
            return 0
        if self.kind is Kind.UED:
            return 0
        return self.beta * n

    def scale_offset_q(self, m: int) -> LogMag:
        if self.kind in (Kind.NED, Kind.UED):
            return 0
        return self.beta * m


# -- witnesses ----------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A single (m, n, direction) at which a required constant was extracted."""

    m: int
    n: int
    direction: tuple[float, ...]
    required_constant: LogScalar
    side: str = "P"


@dataclass(frozen=True)
class WitnessReport:
    """Family of witnesses with the growth trend of the required constants."""

    concept: Kind
    schedule: str
    witnesses: tuple[Witness, ...]
    trend: str  # "bounded" | "divergent"
    log_slope: float
    trial_alpha: float
    trial_beta: float | None = None

    @property
    def divergent(self) -> bool:
        return self.trend == "divergent"


@dataclass(frozen=True)
class VerificationOutcome:
    """Result of a certificate scan: either holds, or the first witness."""

    holds: bool
    witness: Witness | None
    pairs_checked: int
    min_slack: float  # smallest log-domain slack seen across the window

    def __bool__(self) -> bool:
        return self.holds
