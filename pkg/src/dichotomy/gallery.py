"""Built-in two-coordinate diagonal systems with closed-form product tables.

Each entry pairs a diagonal system with the constant projection onto the
first coordinate and carries executable claims: certificates expected to
verify, witness schedules expected to diverge, or grid instability expected
under the strong admissibility gate. The shared scalar sequence a_n of each
entry has a parity-based closed form for the running product
a_{mn} = a_{n+1} * ... * a_m, used as an independent oracle against the
evolution machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .certificates import (
    DichotomyCertificate,
    Kind,
    ShiftedPowerProfile,
    TowerExponentProfile,
)
from .checkers import WitnessSchedule
from .errors import IndexOrderError, ParamOutOfRangeError, UnknownExampleError
from .logscalar import LogMag, LogScalar, ladd
from .system import DiagonalClosedForm, ProjectionFamily, SystemDescription

FIRST_COORDINATE = (True, False)


@dataclass(frozen=True)
class CertificateClaim:
    """This certificate is expected to verify on the default window."""

    cert: DichotomyCertificate
    window_m_max: int


@dataclass(frozen=True)
class FalsificationClaim:
    """This witness schedule is expected to report a divergent constant."""

    concept: Kind
    schedule: str
    k_max: int
    alpha: float
    beta: float | None = None


@dataclass(frozen=True)
class StrongInstabilityClaim:
    """Every strong grid pair (beta < alpha) is expected to be unstable."""

    window_m_max: int
    alpha_points: int = 32
    beta_points: int = 16


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    params: dict[str, float]
    system: SystemDescription
    projection: ProjectionFamily
    claims: tuple
    schedules: dict[str, WitnessSchedule] = field(default_factory=dict)
    description: str = ""
    verify_m_max: int = 200

    def schedule(self, name: str) -> WitnessSchedule:
        if name not in self.schedules:
            raise UnknownExampleError(f"{self.name} has no schedule {name!r}")
        return self.schedules[name]


def gallery_names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def _resolve_params(name, defaults: dict[str, float], params: Mapping | None, kw) -> dict:
    merged = dict(defaults)
    given = dict(params or {})
    given.update(kw)
    for key, value in given.items():
        if key not in defaults:
            raise ParamOutOfRangeError(f"{name} has no parameter {key!r}")
        if value is not None:
            merged[key] = float(value)
    return merged


def make_example(name: str, params: Mapping | None = None, **kw) -> GalleryEntry:
    """Construct a built-in example by name, with optional parameter overrides."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownExampleError(
            f"unknown example {name!r}; known: {', '.join(_BUILDERS)}"
        ) from None
    return builder(params, kw)


def closed_form_amn(name: str, params: Mapping | None, m: int, n: int) -> LogScalar:
    """Tabulated closed form of the scalar product a_{n+1} * ... * a_m."""
    if m < n:
        raise IndexOrderError(f"need m >= n, got ({m}, {n})")
    if name not in _BUILDERS:
        raise UnknownExampleError(f"unknown example {name!r}")
    entry_params = _resolve_params(name, _DEFAULTS[name], params, {})
    if m == n:
        return LogScalar.one()
    return LogScalar.from_log(_CLOSED_FORMS[name](entry_params, m, n))


def raw_factor_log(name: str, params: Mapping | None, n: int) -> LogMag:
    """log a_n of the entry's shared scalar sequence."""
    if name not in _BUILDERS:
        raise UnknownExampleError(f"unknown example {name!r}")
    entry_params = _resolve_params(name, _DEFAULTS[name], params, {})
    return _RAW_LOGS[name](entry_params, n)


def _diag_system(entry_logs: list[Callable[[int], LogMag]]) -> SystemDescription:
    coords = tuple(
        (lambda f: (lambda n: LogScalar.from_log(f(n))))(f) for f in entry_logs
    )
    return SystemDescription(len(coords), DiagonalClosedForm(coords))


def _projection(dim: int = 2) -> ProjectionFamily:
    return ProjectionFamily(dim, mask=FIRST_COORDINATE[:dim])


# -- contracting/expanding split with quadratic envelope ------------------------


def _ued_raw(params, n) -> LogMag:
    return n + 0.5


def _ued_closed(params, m, n) -> LogMag:
    return ((m + 1) ** 2 - (n + 1) ** 2) / 2


def _build_ued(params, kw) -> GalleryEntry:
    _resolve_params("ued_example", {}, params, kw)
    system = _diag_system([lambda n: -(n + 0.5), lambda n: n + 0.5])
    claims = (
        CertificateClaim(DichotomyCertificate(Kind.UED, alpha=0.5, n_const=1.0), 200),
    )
    schedules = {
        "odd_after_even": WitnessSchedule(
            "odd_after_even", lambda k: (2 * k + 1, 2 * k), 0, default_alpha=0.5,
            description="pairs (2k+1, 2k) probed along the first coordinate",
        )
    }
    return GalleryEntry(
        name="ued_example",
        params={},
        system=system,
        projection=_projection(),
        claims=claims,
        schedules=schedules,
        description="first coordinate contracts by e^(n+1/2) per step, second expands",
        verify_m_max=10**6,
    )


# -- polynomially nonuniform split ----------------------------------------------


def _ned_raw(params, n) -> LogMag:
    c = params["c"]
    if n % 2 == 0:
        return -c * math.log(n + 2)
    return c * math.log(n + 1)


def _ned_closed(params, m, n) -> LogMag:
    c = params["c"]
    if m % 2 == 1 and n % 2 == 1:
        return 0.0
    if m % 2 == 1 and n % 2 == 0:
        return c * math.log(n + 2)
    if m % 2 == 0 and n % 2 == 0:
        return c * (math.log(n + 2) - math.log(m + 2))
    return -c * math.log(m + 2)


def _build_ned(params, kw) -> GalleryEntry:
    merged = _resolve_params("ned_example", {"b": 0.5, "c": 1.0}, params, kw)
    b, c = merged["b"], merged["c"]
    if not 0 < b < 1:
        raise ParamOutOfRangeError(f"ned_example needs b in (0, 1), got {b}")
    if not c > 0:
        raise ParamOutOfRangeError(f"ned_example needs c > 0, got {c}")
    log_b = math.log(b)
    system = _diag_system(
        [lambda n: ladd(log_b, _ned_raw(merged, n)), lambda n: -log_b]
    )
    alpha = -log_b
    claims = (
        CertificateClaim(
            DichotomyCertificate(Kind.NED, alpha=alpha, profile=ShiftedPowerProfile(2.0, c)),
            200,
        ),
        FalsificationClaim(Kind.UED, "odd_after_even", k_max=50, alpha=0.25),
    )
    schedules = {
        "odd_after_even": WitnessSchedule(
            "odd_after_even", lambda k: (2 * k + 1, 2 * k), 0, default_alpha=0.25,
            description="pairs (2q+1, 2q) along the first coordinate",
        )
    }
    return GalleryEntry(
        name="ned_example",
        params=merged,
        system=system,
        projection=_projection(),
        claims=claims,
        schedules=schedules,
        description="per-step contraction b with polynomial parity ripple (n+2)^c",
        verify_m_max=10**5,
    )


# -- alternating split, both coordinates driven by the same sequence -------------


def _sed_raw(params, n) -> LogMag:
    return -n if n % 2 == 0 else n + 1


def _sed_closed(params, m, n) -> LogMag:
    if m % 2 == 0 and n % 2 == 0:
        return 0
    if m % 2 == 0 and n % 2 == 1:
        return -(n + 1)
    if m % 2 == 1 and n % 2 == 0:
        return m + 1
    return m - n


def _build_sed_family(name, defaults, claims_fn, params, kw) -> GalleryEntry:
    merged = _resolve_params(name, defaults, params, kw)
    c1, c2 = merged["c1"], merged["c2"]
    if not c1 > 0 or not c2 > 0:
        raise ParamOutOfRangeError(f"{name} needs c1 > 0 and c2 > 0")
    log_c1, log_c2 = math.log(c1), math.log(c2)
    system = _diag_system(
        [
            lambda n: ladd(log_c1, _sed_raw(merged, n)),
            lambda n: ladd(log_c2, _sed_raw(merged, n)),
        ]
    )
    schedules = {
        "odd_after_even": WitnessSchedule(
            "odd_after_even", lambda k: (2 * k + 1, 2 * k), 0, default_alpha=1.0,
            description="pairs (2k+1, 2k) along the first coordinate",
        )
    }
    return GalleryEntry(
        name=name,
        params=merged,
        system=system,
        projection=_projection(),
        claims=claims_fn(merged),
        schedules=schedules,
        description="both coordinates share an alternating step, scaled by c1 and c2",
        verify_m_max=10**5,
    )


def _build_sed(params, kw) -> GalleryEntry:
    def claims(merged):
        return (
            CertificateClaim(
                DichotomyCertificate(Kind.SED, alpha=2.0, n_const=math.e, beta=1.0), 200
            ),
            FalsificationClaim(Kind.UED, "odd_after_even", k_max=50, alpha=1.0),
        )

    return _build_sed_family(
        "sed_example", {"c1": math.exp(-4.0), "c2": math.exp(2.0)}, claims, params, kw
    )


def _build_ed(params, kw) -> GalleryEntry:
    def claims(merged):
        return (
            CertificateClaim(
                DichotomyCertificate(Kind.ED, alpha=0.5, n_const=math.e, beta=1.0), 200
            ),
            StrongInstabilityClaim(window_m_max=120),
        )

    return _build_sed_family(
        "ed_example", {"c1": math.exp(-1.5), "c2": math.exp(0.5)}, claims, params, kw
    )


# -- tower-exponent split: exact integer log-magnitudes --------------------------


def _tower_raw(params, n) -> LogMag:
    if n % 2 == 0:
        return n * (1 + 2**n)
    return -(n + 1) * (1 + 2 ** (n + 1))


def _tower_closed(params, m, n) -> LogMag:
    if m % 2 == 0 and n % 2 == 0:
        return 0
    if m % 2 == 0 and n % 2 == 1:
        return (n + 1) * (1 + 2 ** (n + 1))
    if m % 2 == 1 and n % 2 == 0:
        return -(m + 1) * (1 + 2 ** (m + 1))
    return (n + 1) * (1 + 2 ** (n + 1)) - (m + 1) * (1 + 2 ** (m + 1))


def _build_tower(params, kw) -> GalleryEntry:
    merged = _resolve_params("ned_not_ed_example", {"c": 1.0 / math.e}, params, kw)
    c = merged["c"]
    if not c > 0:
        raise ParamOutOfRangeError(f"ned_not_ed_example needs c > 0, got {c}")
    log_c = math.log(c)
    alpha = -log_c
    system = _diag_system(
        [lambda n: ladd(log_c, _tower_raw(merged, n)), lambda n: -log_c]
    )
    claims = [
        CertificateClaim(
            DichotomyCertificate(Kind.NED, alpha=alpha, profile=TowerExponentProfile()),
            25,
        )
    ]
    schedules = {
        # the three regimes of e^alpha * c: balanced (= 1), above 1, below 1
        "tower_balanced": WitnessSchedule(
            "tower_balanced", lambda k: (2 * k + 2, 2 * k + 1), 0,
            default_alpha=alpha, default_beta=1.0,
            description="adjacent pairs at odd start, trial rate matching the drift",
        ),
        "tower_expanding": WitnessSchedule(
            "tower_expanding", lambda k: (2 * k + 2, 2), 0,
            default_alpha=alpha + 0.5, default_beta=1.0,
            description="even horizon growing from n = 2, trial rate above the drift",
        ),
        "tower_contracting": WitnessSchedule(
            "tower_contracting", lambda k: (2 * k + 2, 2 * k + 1), 0,
            default_alpha=alpha * 0.5 if alpha > 0 else 0.25, default_beta=1.0,
            description="adjacent pairs at odd start, trial rate below the drift",
        ),
    }
    for sched in schedules.values():
        claims.append(
            FalsificationClaim(
                Kind.ED, sched.name, k_max=8,
                alpha=sched.default_alpha, beta=sched.default_beta,
            )
        )
    return GalleryEntry(
        name="ned_not_ed_example",
        params=merged,
        system=system,
        projection=_projection(),
        claims=tuple(claims),
        schedules=schedules,
        description="first coordinate rides a 2^n-sized seesaw; only a tower-size "
        "profile covers it",
        verify_m_max=25,
    )


_BUILDERS = {
    "ued_example": _build_ued,
    "ned_example": _build_ned,
    "sed_example": _build_sed,
    "ed_example": _build_ed,
    "ned_not_ed_example": _build_tower,
}

_DEFAULTS = {
    "ued_example": {},
    "ned_example": {"b": 0.5, "c": 1.0},
    "sed_example": {"c1": math.exp(-4.0), "c2": math.exp(2.0)},
    "ed_example": {"c1": math.exp(-1.5), "c2": math.exp(0.5)},
    "ned_not_ed_example": {"c": 1.0 / math.e},
}

_RAW_LOGS = {
    "ued_example": _ued_raw,
    "ned_example": _ned_raw,
    "sed_example": _sed_raw,
    "ed_example": _sed_raw,
    "ned_not_ed_example": _tower_raw,
}

_CLOSED_FORMS = {
    "ued_example": _ued_closed,
    "ned_example": _ned_closed,
    "sed_example": _sed_closed,
    "ed_example": _sed_closed,
    "ned_not_ed_example": _tower_closed,
}
