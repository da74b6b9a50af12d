import numpy as np
import pytest

from majorize.campaigns import CAMPAIGNS, CampaignSummary, TrialRecord, replay, run_campaign, trial_dim
from majorize.errors import UnknownTheorem

POOLS = [(t, p) for t, pools in CAMPAIGNS.items() for p in pools]


@pytest.mark.parametrize("theorem, pool", POOLS)
def test_every_campaign_runs_without_asserted_failures(theorem, pool):
    s = run_campaign(theorem, 40, seed=3, pool=pool)
    assert s.trials == 40 and s.asserted_failures == 0
    assert s.holds + s.asserted_failures + s.exploratory_violations == 40


@pytest.mark.parametrize("theorem, pool", POOLS)
def test_campaigns_are_deterministic(theorem, pool):
    a = run_campaign(theorem, 10, seed=11, pool=pool)
    b = run_campaign(theorem, 10, seed=11, pool=pool)
    assert a.to_dict() == b.to_dict() and a.to_csv() == b.to_csv()


def test_replay_matches_campaign_record():
    s = run_campaign("jensen_majorization", 20, seed=5)
    rec = s.records[13]
    report, inputs = replay("jensen_majorization", 5, 13)
    assert report.verdict.min_margin == rec.min_margin
    assert inputs["f"].label == rec.function


def test_default_dims_cycle():
    assert [trial_dim(k, None) for k in range(9)] == [2, 3, 4, 5, 6, 7, 8, 2, 3]
    assert trial_dim(4, 6) == 6


def test_fixed_dim_is_used():
    s = run_campaign("jensen_spectral", 5, seed=0, dim=6)
    assert {r.dim for r in s.records} == {6}


def test_summary_is_order_independent():
    s = run_campaign("jensen_spectral", 30, seed=1, pool="nonmonotone")
    shuffled = CampaignSummary(s.theorem_id, s.seed, s.pool)
    for k in np.random.default_rng(0).permutation(len(s.records)):
        shuffled.add(s.records[k])
    assert shuffled.to_dict() == s.to_dict()
    assert shuffled.to_csv() == s.to_csv()


def test_summary_worst_margin_tracks_trial():
    s = CampaignSummary("x", 0, "default")
    s.add(TrialRecord("x", 0, 0, 2, True, True, 0.5))
    s.add(TrialRecord("x", 0, 1, 2, True, False, -0.5))
    s.add(TrialRecord("x", 0, 2, 2, False, False, -2.0))
    d = s.to_dict()
    assert (d["worst_margin"], d["worst_trial"]) == (-0.5, 1)
    assert (d["worst_exploratory_margin"], d["worst_exploratory_trial"]) == (-2.0, 2)
    assert (d["asserted_failures"], d["exploratory_violations"], d["holds"]) == (1, 1, 1)


def test_nonmonotone_spectral_finds_and_reverifies_violation():
    s = run_campaign("jensen_spectral", 300, seed=0, pool="nonmonotone")
    assert s.exploratory_violations >= 1 and s.asserted_failures == 0
    report, inputs = replay("jensen_spectral", 0, s.worst_exploratory_trial, pool="nonmonotone")
    f, phi, a = inputs["f"], inputs["phi"], inputs["a"]
    # direct recomputation with numpy only
    def fc(m):
        x, u = np.linalg.eigh(m)
        return (u * f(x)) @ u.conj().T
    from majorize.maps import apply

    lhs = fc(apply(phi, a).entries)
    rhs = apply(phi, fc(a.entries)).entries
    gap = np.linalg.eigvalsh(rhs)[::-1] - np.linalg.eigvalsh(lhs)[::-1]
    assert gap.min() == pytest.approx(s.worst_exploratory_margin, abs=1e-10)
    assert gap.min() < 0


def test_unknown_theorem_and_pool():
    with pytest.raises(UnknownTheorem):
        run_campaign("jensen_nowhere", 1)
    with pytest.raises(UnknownTheorem):
        run_campaign("jensen_spectral", 1, pool="exotic")


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        run_campaign("jensen_state", 0)


def test_csv_has_one_row_per_trial():
    lines = run_campaign("holder", 3, seed=0).to_csv().strip().splitlines()
    assert lines[0].startswith("theorem_id,seed,dim,holds,min_margin,trial")
    assert len(lines) == 4
