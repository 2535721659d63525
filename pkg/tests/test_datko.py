import math

import pytest

from dichotomy import (
    ConstantProfile,
    DecayGapError,
    DichotomyCertificate,
    InvalidConstantsError,
    Kind,
    NoDecayCertificateError,
    ShiftedPowerProfile,
    TowerExponentProfile,
    WindowSpec,
    certificate_to_datko,
    datko_lhs,
    make_example,
    overall_verdict,
    projected_sum,
    verify_datko_ed,
    verify_datko_ned,
    verify_datko_ued,
)
from dichotomy.logscalar import lfloat

LN2 = math.log(2.0)

UED_QUAD = DichotomyCertificate(Kind.UED, alpha=0.5, n_const=1.0)
NED_RIPPLE = DichotomyCertificate(Kind.NED, alpha=LN2, profile=ShiftedPowerProfile(2.0, 1.0))


def test_constant_mapping_uniform():
    got = certificate_to_datko(UED_QUAD, 0.25)
    assert got.form == "uniform"
    # 1 + e^0.5 / (e^0.5 - e^0.25), frozen from direct arithmetic
    assert got.big_d == pytest.approx(5.5208116641877965, rel=1e-12)
    assert got.c == 0.0


def test_constant_mapping_nonuniform():
    got = certificate_to_datko(NED_RIPPLE, LN2 / 2)
    assert got.form == "nonuniform"
    # S(n) = 2 (n + 2) / (2 - sqrt(2)); frozen at n = 0
    assert math.exp(lfloat(got.s_profile.log_at(0))) == pytest.approx(
        6.828427124746192, rel=1e-12
    )


def test_constant_mapping_exponential_keeps_beta():
    cert = DichotomyCertificate(Kind.ED, alpha=0.5, n_const=math.e, beta=1.0)
    got = certificate_to_datko(cert, 0.25)
    assert got.form == "exponential"
    assert got.c == 1.0
    assert got.big_d == pytest.approx(1 + math.e * math.exp(0.5) / (math.exp(0.5) - math.exp(0.25)))


def test_constant_mapping_requires_decay_gap():
    with pytest.raises(DecayGapError):
        certificate_to_datko(UED_QUAD, 0.5)
    with pytest.raises(DecayGapError):
        certificate_to_datko(UED_QUAD, 0.7)


def test_lhs_q_sum_matches_brute_force():
    # frozen oracle: sum_{k=2}^{5} e^{(5-k)/4} e^{((k+1)^2 - 9)/2} along e2
    entry = make_example("ued_example")
    _, q_sum, _ = datko_lhs(
        entry.system, entry.projection, 0.25, 5, 2, 0, (0.0, 1.0), 60, UED_QUAD
    )
    assert lfloat(q_sum.logmag) == pytest.approx(13.505311143424379, abs=1e-12)


def test_lhs_p_part_vanishes_for_expanding_seed():
    entry = make_example("ued_example")
    p_sum, q_sum, tail = datko_lhs(
        entry.system, entry.projection, 0.25, 5, 2, 0, (0.0, 1.0), 60, UED_QUAD
    )
    assert p_sum.is_zero
    assert tail.is_zero
    assert not q_sum.is_zero


def test_lhs_truncation_agreement_within_tail():
    entry = make_example("ued_example")
    args = (entry.system, entry.projection, 0.25, 5, 2, 0, (1.0, 0.0))
    p_short, _, tail_short = datko_lhs(*args, 60, UED_QUAD)
    p_long, _, _ = datko_lhs(*args, 200, UED_QUAD)
    assert p_short <= p_long
    assert p_long <= p_short + tail_short


def test_lhs_requires_dominating_certificate():
    entry = make_example("ued_example")
    with pytest.raises(NoDecayCertificateError):
        datko_lhs(entry.system, entry.projection, 0.6, 5, 2, 0, (1.0, 0.0), 60, UED_QUAD)
    with pytest.raises(NoDecayCertificateError):
        datko_lhs(entry.system, entry.projection, 0.25, 5, 2, 0, (1.0, 0.0), 60, None)


def test_index_origin_discipline():
    # the uniform-form P sum restarts at j = m; seeding both sums identically
    # on the contracting coordinate shows a strict gap once m > n
    entry = make_example("ued_example")
    d, m, n = 0.25, 5, 2
    from_n = projected_sum(entry.system, entry.projection, d, (1.0, 0.0), n, n, 60, n)
    from_m = projected_sum(entry.system, entry.projection, d, (1.0, 0.0), n, m, 60, m)
    assert from_m < from_n
    same = projected_sum(entry.system, entry.projection, d, (1.0, 0.0), n, n, 60, n)
    assert same == from_n


def test_roundtrip_uniform():
    entry = make_example("ued_example")
    sc = certificate_to_datko(UED_QUAD, 0.25)
    reports = verify_datko_ued(
        entry.system, entry.projection, 0.25, sc.big_d, WindowSpec(0, 40), 120,
        cert=UED_QUAD,
    )
    assert overall_verdict(reports) == "holds"
    assert all(r.max_tail_rhs_log < math.log(1e-6) for r in reports if r.side == "P")


def test_roundtrip_uniform_unweighted():
    entry = make_example("ued_example")
    sc = certificate_to_datko(UED_QUAD, 0.0)
    reports = verify_datko_ued(
        entry.system, entry.projection, 0.0, sc.big_d, WindowSpec(0, 40), 120,
        cert=UED_QUAD,
    )
    assert overall_verdict(reports) == "holds"


def test_roundtrip_nonuniform():
    entry = make_example("ned_example")
    d = LN2 / 2
    sc = certificate_to_datko(NED_RIPPLE, d)
    reports = verify_datko_ned(
        entry.system, entry.projection, d, sc.s_profile, WindowSpec(0, 40), 120,
        cert=NED_RIPPLE,
    )
    assert overall_verdict(reports) == "holds"


def test_zero_profile_is_violated():
    entry = make_example("ued_example")
    reports = verify_datko_ned(
        entry.system, entry.projection, 0.25, ConstantProfile(0.0), WindowSpec(0, 10), 60,
        cert=UED_QUAD,
    )
    assert overall_verdict(reports) == "violated"


def test_uniform_form_eventually_fails_without_uniformity():
    # the polynomially rippled system defeats any constant D on long windows
    entry = make_example("ned_example")
    reports = verify_datko_ued(
        entry.system, entry.projection, LN2 / 2, 100.0, WindowSpec(0, 160), 300,
        cert=None,
    )
    assert overall_verdict(reports) == "violated"
    short = verify_datko_ued(
        entry.system, entry.projection, LN2 / 2, 100.0, WindowSpec(0, 40), 300,
        cert=None,
    )
    assert overall_verdict(short) != "violated"


def test_without_certificate_passing_checks_are_inconclusive():
    entry = make_example("ued_example")
    reports = verify_datko_ued(
        entry.system, entry.projection, 0.25, 100.0, WindowSpec(0, 20), 60, cert=None
    )
    assert overall_verdict(reports) == "inconclusive-tail"
    sides = {r.side: r.verdict for r in reports}
    assert sides["P"] == "inconclusive-tail"
    assert sides["Q"] == "holds"  # the expanding sum is finite and exact


def test_truncation_soundness():
    entry = make_example("ned_example")
    d = LN2 / 2
    sc = certificate_to_datko(NED_RIPPLE, d)
    tails = []
    for m_trunc in (60, 120, 240):
        reports = verify_datko_ned(
            entry.system, entry.projection, d, sc.s_profile, WindowSpec(0, 30), m_trunc,
            cert=NED_RIPPLE,
        )
        assert overall_verdict(reports) == "holds"
        tails.append(max(r.max_tail_rhs_log for r in reports if r.side == "P"))
    assert tails[0] > tails[1] > tails[2]


def test_sufficiency_direction_term_bounds():
    # a passing summation report implies the single-term bounds
    #   e^{d(m-n)} |A_P(m,n) x| <= S(n) |P(n) x|
    #   e^{d(m-n)} |Q(n) x|     <= S(m) |A_Q(m,n) x|
    # check them directly on basis directions over the window
    entry = make_example("ned_example")
    d = LN2 / 2
    sc = certificate_to_datko(NED_RIPPLE, d)
    s_log = sc.s_profile.log_at
    for n in range(0, 30):
        for m in range(n, 30):
            lam_p = entry.system.diag_factor(0, m, n)
            assert d * (m - n) + lfloat(lam_p.logmag) <= lfloat(s_log(n)) + 1e-9
            lam_q = entry.system.diag_factor(1, m, n)
            assert d * (m - n) <= lfloat(s_log(m)) + lfloat(lam_q.logmag) + 1e-9


def test_strong_gate():
    entry = make_example("sed_example")
    with pytest.raises(InvalidConstantsError):
        verify_datko_ed(
            entry.system, entry.projection, 1.0, 1.0, 5.0, WindowSpec(0, 10), 60,
            strong=True,
        )
    reports = verify_datko_ed(
        entry.system, entry.projection, 1.0, 0.5, 7.0, WindowSpec(0, 10), 60,
        cert=DichotomyCertificate(Kind.SED, alpha=2.0, n_const=math.e, beta=1.0),
        strong=True,
    )
    assert isinstance(reports, list)


def test_exponential_form_eventually_fails_on_tower():
    entry = make_example("ned_not_ed_example")
    reports = verify_datko_ed(
        entry.system, entry.projection, 0.5, 1.0, 50.0, WindowSpec(0, 20), 60, cert=None
    )
    assert overall_verdict(reports) == "violated"


def test_roundtrip_tower_nonuniform_exact():
    entry = make_example("ned_not_ed_example")
    cert = DichotomyCertificate(Kind.NED, alpha=1.0, profile=TowerExponentProfile())
    sc = certificate_to_datko(cert, 0.5)
    reports = verify_datko_ned(
        entry.system, entry.projection, 0.5, sc.s_profile, WindowSpec(0, 25), 80,
        cert=cert,
    )
    assert overall_verdict(reports) == "holds"
