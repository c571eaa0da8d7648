import math

import numpy as np
import pytest

import oracles
from spectral_balls.errors import EmptyIntersection, FixtureExhausted, InclusionNotEstablished
from spectral_balls.geometry import Intersect, SymPolytope, Translate, cube, cross_polytope, unit_disk
from spectral_balls.geometry import box_polytope, to_dict
from spectral_balls.oracle import EigenOracle, FDSettings, MCSettings
from spectral_balls.verdict import Status, Verdict
from spectral_balls import verifier

DISK, SQUARE = unit_disk(), cube()
DIAMOND = cross_polytope(1.2)
FD = EigenOracle()


# -- verdict semantics --------------------------------------------------------------

@pytest.mark.parametrize("margin,error,status", [(1.0, 0.5, "Holds"), (-1.0, 0.5, "Violated"),
                                                 (0.2, 0.5, "Inconclusive"), (0.5, 0.5, "Inconclusive")])
def test_strict_verdict(margin, error, status):
    v = Verdict.strict(margin, error)
    assert v.status.value == status
    if v.status == Status.HOLDS:
        assert v.margin > v.error
    if v.status == Status.VIOLATED:
        assert v.margin < -v.error


def test_equality_and_nonstrict_verdicts():
    assert Verdict.equality(-0.1, 0.2).status == Status.HOLDS
    assert Verdict.equality(0.3, 0.2).status == Status.VIOLATED
    assert Verdict.nonstrict(-0.1, 0.2).status == Status.HOLDS
    assert Verdict.nonstrict(-0.3, 0.2).status == Status.VIOLATED


# -- theorem-class checks ---------------------------------------------------------------

def test_subadditivity_disk_square():
    r = verifier.check_subadditivity(DISK, SQUARE)
    assert r.verdict.status == Status.HOLDS
    assert r.verdict.margin == pytest.approx(oracles.SQUARE, rel=1e-3)
    assert r.verdict.sub["lower_bound"].status == Status.HOLDS


def test_subadditivity_square_diamond():
    r = verifier.check_subadditivity(SQUARE, DIAMOND)
    assert r.verdict.status == Status.HOLDS
    assert verifier.lower_bound_result(r).verdict.status == Status.HOLDS


def test_subadditivity_same_body():
    r = verifier.check_subadditivity(DISK, DISK)
    assert r.verdict.status == Status.HOLDS
    assert r.verdict.margin == pytest.approx(oracles.DISK, rel=1e-3)


def test_subadditivity_unresolved_intersection():
    # a grid that cannot resolve the 0.2 x 0.2 intersection
    with pytest.raises(EmptyIntersection):
        verifier.check_subadditivity(box_polytope([1, 0.1]), box_polytope([0.1, 1]),
                                     fd=EigenOracle(FDSettings(h0=0.15)))


def test_monotonicity_nested_disks():
    from spectral_balls.geometry import Scale
    r = verifier.check_monotonicity(DISK, Scale(2, DISK))
    assert r.verdict.status == Status.HOLDS
    assert r.verdict.margin == pytest.approx(oracles.DISK * 0.75, rel=1e-3)


def test_monotonicity_disk_square():
    r = verifier.check_monotonicity(DISK, SQUARE)
    assert r.verdict.status == Status.HOLDS
    assert r.verdict.margin == pytest.approx(oracles.DISK - oracles.SQUARE, rel=1e-3)


def test_monotonicity_equal_regions_not_violated():
    r = verifier.check_monotonicity(DISK, DISK)
    assert r.verdict.status in (Status.HOLDS, Status.INCONCLUSIVE)
    assert r.verdict.margin == 0.0


def test_monotonicity_requires_inclusion():
    with pytest.raises(InclusionNotEstablished):
        verifier.check_monotonicity(SQUARE, DISK)
    with pytest.raises(InclusionNotEstablished):
        verifier.check_monotonicity(Translate(DISK, [0.5, 0]), SQUARE)


def test_homogeneity_discrete_invariance():
    for omega, c in [(DISK, math.sqrt(2)), (SQUARE, 2.0), (Intersect(SQUARE, DIAMOND), math.sqrt(2))]:
        r = verifier.check_homogeneity(omega, c, FD)
        assert r.verdict.status == Status.HOLDS
        assert r.verdict.sub["discrete"].margin <= 1e-10


def test_lieb_scan_grid():
    offs = [[x, y] for x in np.linspace(-0.4, 0.4, 5) for y in np.linspace(-0.4, 0.4, 5)]
    r = verifier.lieb_translation_scan(SQUARE, DISK, offs, FD)
    assert r.verdict.status == Status.HOLDS
    rows = [row for row in r.details["rows"] if "bound" in row]
    assert len(rows) == 25
    assert all(row["bound"]["status"] == "Holds" for row in rows)
    assert r.details["zero_offset_holds"] is True


def test_lieb_scan_zero_row_matches_subadditivity():
    r = verifier.lieb_translation_scan(SQUARE, DIAMOND, [[0.0, 0.0]], FD)
    sub = verifier.check_subadditivity(SQUARE, DIAMOND, fd=FD)
    row = r.details["rows"][0]
    assert row["bound"]["margin"] == pytest.approx(sub.verdict.margin, rel=1e-12)


def test_symmetry_fd_and_mc():
    r = verifier.check_symmetry(SQUARE, DISK, [0.3, 0.0], FD, MCSettings(dt=1e-3, n_paths=10_000, seed=1))
    assert r.verdict.status == Status.HOLDS
    assert set(r.verdict.sub) == {"fd", "mc"}


def test_logconcavity_with_minkowski_average_target():
    from spectral_balls.geometry import minkowski_average
    C = minkowski_average(SQUARE, DISK, 0.5, 180)
    r = verifier.check_logconcavity(SQUARE, DISK, C, np.zeros(2), np.zeros(2), 0.5, 0.5,
                                    MCSettings(dt=1e-3, n_paths=20_000, seed=3))
    assert r.verdict.status in (Status.HOLDS, Status.INCONCLUSIVE)
    assert r.verdict.margin >= -r.verdict.error


def test_logconcavity_rejects_bad_hypothesis():
    with pytest.raises(InclusionNotEstablished):
        verifier.check_logconcavity(SQUARE, SQUARE, DISK, np.zeros(2), np.zeros(2), 0.5, 0.5)


def test_kac_consistency():
    r = verifier.check_kac(DISK, FD, MCSettings(dt=1e-3, n_paths=20_000, seed=5))
    assert r.verdict.status == Status.HOLDS
    assert "curve" in r.attachments


# -- descriptive checks ---------------------------------------------------------------------

def test_sqrt2_inclusion_degenerate():
    r = verifier.check_sqrt2_inclusion(DISK, DISK)
    assert r.verdict.status == Status.DEGENERATE
    assert not r.theorem_class


def test_sqrt2_inclusion_square_disk_records_both_labelings():
    r = verifier.check_sqrt2_inclusion(SQUARE, unit_disk(1.2))
    labs = r.details["labelings"]
    assert set(labs) == {"B1\\B2", "B2\\B1"}
    for lab in labs.values():
        assert lab["verdict"]["status"] in ("Violated", "NoViolationFound")
        assert len(lab["components"]) == 4
        assert all("x_prime" in c for c in lab["components"])
    assert r.details["selected_labeling"] == "B1\\B2"


def test_sqrt2_inclusion_rectangle_witness_replays():
    from spectral_balls.geometry import Scale, replay_witness
    rect = box_polytope([10, 0.1])
    r = verifier.check_sqrt2_inclusion(rect, DISK)
    assert r.verdict.status in (Status.VIOLATED, Status.NO_VIOLATION_FOUND)
    if r.verdict.status == Status.VIOLATED:
        target = Scale(math.sqrt(2), Intersect(rect, DISK))
        assert replay_witness(target, r.verdict.witness)


def test_proof_chain_same_disk():
    r = verifier.check_proof_chain(DISK, DISK, FD)
    assert r.verdict.status == Status.HOLDS
    assert r.verdict.sub["i_homogeneity"].status == Status.HOLDS
    assert r.verdict.sub["ii_scaled_vs_average"].status == Status.HOLDS
    assert r.verdict.sub["iii_average_vs_mean"].status == Status.HOLDS


def test_proof_chain_square_diamond():
    r = verifier.check_proof_chain(SQUARE, DIAMOND, FD)
    assert set(r.verdict.sub) == {"i_homogeneity", "ii_scaled_vs_average", "iii_average_vs_mean"}
    assert all(s.status != Status.VIOLATED for s in r.verdict.sub.values())


# -- fixtures -------------------------------------------------------------------------------

@pytest.mark.parametrize("cls", verifier.BODY_CLASSES)
def test_random_pairs_deterministic_and_admissible(cls):
    a = verifier.random_body_pair(cls, seed=7)
    b = verifier.random_body_pair(cls, seed=7)
    assert [to_dict(x) for x in a] == [to_dict(x) for x in b]
    for body in a:
        assert verifier.aspect_ratio(body) <= verifier.ASPECT_MAX
    from spectral_balls.geometry import component_apertures
    rep = component_apertures(*a)
    assert not rep.b1_subset_b2 and not rep.b2_subset_b1


def test_random_pair_exhaustion():
    with pytest.raises(FixtureExhausted):
        verifier.random_body_pair("mixed", seed=0, max_attempts=0)
