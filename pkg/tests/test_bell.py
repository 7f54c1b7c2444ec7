import numpy as np
import pytest

from QCP.protocol.bell import BellPlan, run_bell
from QCP.protocol.errors import DomainError, ProtocolLogicError
from QCP.protocol.measurement import MeasurementKind, MeasurementRequest
from QCP.protocol.model import DEFAULT, SourceModel, StateLabel, sample_sequence
from QCP.protocol.orthogonal import worst_case_measurements
from QCP.protocol.results import Status


def bell_seq(n, k, mutation=1):
    return sample_sequence(SourceModel.bell(n), k, mutation)


def check_sound(seq, result):
    assert result.reported_change_point.contains(seq.k)
    if result.reported_mutation is not None:
        assert result.reported_mutation == seq.mutation
        assert not seq.change_point.is_no_change
    assert result.consumed + result.distilled + result.residual_unknown == seq.n
    for position, label in result.implied_labels().items():
        assert seq.label_at(position) == label


class TestBranches:
    def test_a12_distills_suffix_and_finds_change(self, rng):
        seq = bell_seq(16, 3, mutation=1)
        result = run_bell(seq, rng)
        assert result.branch_trace == ("a1", "a1.2")
        assert result.measured_positions[-2:] == [8, 9]
        assert result.status is Status.IDENTIFIED
        assert result.reported_change_point.tag == "3"
        assert result.reported_mutation == 1
        implied = result.implied_labels()
        assert all(implied[p] == StateLabel(1) for p in range(10, 17))

    def test_a2_identifies_mutation_from_next_pair(self, rng):
        seq = bell_seq(16, 3, mutation=2)
        result = run_bell(seq, rng)
        assert result.branch_trace == ("a2",)
        assert [record.position for record in result.transcript[:2]] == [9, 10]
        assert result.transcript[1].outcome == "M2"
        assert result.status is Status.IDENTIFIED
        assert result.reported_change_point.tag == "3"
        assert result.reported_mutation == 2
        implied = result.implied_labels()
        assert all(implied[p] == StateLabel(2) for p in range(11, 17))

    def test_no_change_is_never_confirmed(self, rng):
        seq = bell_seq(16, 17)
        result = run_bell(seq, rng)
        assert result.branch_trace == ("a1", "a1.1") * 3 + ("a1",)
        assert result.status is Status.NO_CHANGE_UNRESOLVED
        assert result.reported_mutation is None
        assert result.distilled_mutation == 0
        assert result.consumed + result.distilled_default + result.residual_unknown == 16
        check_sound(seq, result)

    def test_change_at_a_consumed_midpoint_gives_interval(self, rng):
        seq = bell_seq(16, 9, mutation=1)
        result = run_bell(seq, rng)
        assert result.branch_trace == ("a1", "a1.1", "a1", "a1.2")
        assert result.reported_change_point.tag == "9-10"
        assert result.reported_mutation == 1
        assert result.status is Status.DISTILLED_ONLY
        check_sound(seq, result)

    def test_csv_row_adds_branch_counts(self, rng):
        result = run_bell(bell_seq(16, 3, mutation=1), rng)
        assert result.csv_row(3, 1) == [16, 3, "3", 5, 1, 10, "identified", 1, 1, 1, 0, 1, 0]

    def test_unknown_mutation_in_csv(self, rng):
        result = run_bell(bell_seq(16, 17), rng)
        assert result.csv_row(17, "none")[8] == "unknown"


class TestLastPair:
    @pytest.mark.parametrize("n", [1, 2, 3, 8, 16, 33])
    def test_mutation_one_at_last_pair_never_identified(self, n):
        for seed in range(20):
            result = run_bell(bell_seq(n, n, mutation=1), np.random.default_rng(seed))
            assert result.reported_mutation is None
            assert result.status is Status.NO_CHANGE_UNRESOLVED

    @pytest.mark.parametrize("n", [1, 2, 3, 8, 16, 33])
    @pytest.mark.parametrize("mutation", [2, 3])
    def test_odd_mutation_at_last_pair_found_but_not_named(self, n, mutation):
        for seed in range(20):
            result = run_bell(bell_seq(n, n, mutation), np.random.default_rng(seed))
            assert result.reported_change_point.tag == str(n)
            assert result.reported_mutation is None
            assert result.status is Status.DISTILLED_ONLY


class TestSoundness:
    @pytest.mark.parametrize("n, seeds", [
        (8, 50),
        (16, 50),
        pytest.param(8, 1000, marks=pytest.mark.slow),
        pytest.param(16, 1000, marks=pytest.mark.slow),
        pytest.param(32, 1000, marks=pytest.mark.slow),
        pytest.param(64, 200, marks=pytest.mark.slow),
    ])
    def test_exhaustive_sweep(self, n, seeds):
        bound = 2 + worst_case_measurements(n)
        for k in range(1, n + 2):
            for mutation in (1, 2, 3):
                seq = bell_seq(n, k, mutation)
                for seed in range(seeds):
                    result = run_bell(seq, np.random.default_rng(seed))
                    check_sound(seq, result)
                    trace = result.branch_trace
                    if seq.change_point.is_no_change:
                        assert result.status is Status.NO_CHANGE_UNRESOLVED
                    if trace[:2] == ("a1", "a1.2") or (trace == ("a2",) and k < n):
                        assert result.status is Status.IDENTIFIED
                        assert result.reported_change_point.lo == k
                        assert result.consumed <= bound

    def test_odd_mutations_found_exactly(self, rng):
        n = 32
        for k in range(1, n):
            for mutation in (2, 3):
                result = run_bell(bell_seq(n, k, mutation), rng)
                assert result.branch_trace[-1] == "a2"
                assert result.reported_change_point.tag == str(k)
                if result.status is Status.IDENTIFIED:
                    assert result.reported_mutation == mutation
                else:
                    # odd parity landed on the last pair
                    computational = {r.position for r in result.transcript
                                     if r.kind is MeasurementKind.COMPUTATIONAL}
                    assert result.status is Status.DISTILLED_ONLY
                    assert n in computational


class TestPlan:
    def test_first_request_is_midpoint_parity(self):
        request = BellPlan(16).next_request()
        assert request == MeasurementRequest(9, MeasurementKind.COMPUTATIONAL)

    def test_out_of_turn_outcome_rejected(self):
        plan = BellPlan(16)
        with pytest.raises(ProtocolLogicError):
            plan.apply(MeasurementRequest(3, MeasurementKind.LOCC, (DEFAULT, StateLabel(1))), DEFAULT)

    def test_single_pair(self, rng):
        for k, mutation in [(1, 1), (1, 2), (2, 1)]:
            seq = bell_seq(1, k, mutation)
            result = run_bell(seq, rng)
            assert result.consumed == 1
            check_sound(seq, result)

    def test_rejects_other_sources(self, rng):
        with pytest.raises(DomainError):
            run_bell(sample_sequence(SourceModel.orthogonal(4), 2), rng)
        with pytest.raises(DomainError):
            run_bell(bell_seq(4, 2), None)
