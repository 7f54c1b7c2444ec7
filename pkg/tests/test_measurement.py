from fractions import Fraction

import numpy as np
import pytest

from QCP.protocol.errors import DomainError, ProtocolLogicError
from QCP.protocol.measurement import (BellBasisOutcome, MeasurementKind, MeasurementRequest, PriorPair,
                                      PriorsVariant, SharedPairs, UsdOutcome, bell_computational_measure,
                                      bell_outcome_distribution, discriminate_orthogonal, outcome_distribution,
                                      priors_for_window, usd_failure_probabilities, usd_measure,
                                      usd_outcome_distribution)
from QCP.protocol.model import DEFAULT, SourceModel, StateLabel, sample_sequence

M1, M2, M3 = StateLabel(1), StateLabel(2), StateLabel(3)


def brute_force_failure(priors, s, grid=4001):
    """
    Smallest total failure over unambiguous two-outcome-plus-failure POVMs.

    For pure states with overlap s, an unambiguous measurement is fixed by the
    conditional failures (q_d, q_m) subject to q_d * q_m >= s^2.
    """
    q_d = np.linspace(0.0, 1.0, grid)
    q_m = np.clip(np.where(q_d > 0, s * s / np.maximum(q_d, 1e-300), 1.0), 0.0, 1.0)
    feasible = q_d * q_m >= s * s - 1e-12
    failure = priors.p_default * q_d + priors.p_mutation * q_m
    return failure[feasible].min()


class TestPriors:
    @pytest.mark.parametrize("m, expected", [(1, Fraction(1, 2)), (2, Fraction(1, 3)), (16, Fraction(8, 17))])
    def test_window_priors(self, m, expected):
        assert priors_for_window(m, exact=True).p_mutation == expected
        assert priors_for_window(m).p_mutation == pytest.approx(float(expected), abs=1e-15)

    def test_formula_pointwise(self):
        for m in range(1, 10_001):
            priors = priors_for_window(m)
            assert priors.p_mutation == pytest.approx(((m + 1) // 2) / (m + 1), abs=1e-15)
            assert priors.p_default + priors.p_mutation == pytest.approx(1.0, abs=1e-12)

    def test_midpoint_variant(self):
        assert priors_for_window(2, PriorsVariant.MIDPOINT, exact=True).p_mutation == Fraction(2, 3)
        assert priors_for_window(3, PriorsVariant.MIDPOINT, exact=True).p_mutation == Fraction(1, 2)

    def test_empty_window(self):
        with pytest.raises(DomainError):
            priors_for_window(0)

    def test_prior_pair_must_sum_to_one(self):
        with pytest.raises(DomainError):
            PriorPair(0.5, 0.6)


class TestUsdFailure:
    def test_equal_priors(self):
        q_d, q_m = usd_failure_probabilities(PriorPair(0.5, 0.5), 0.5)
        assert q_d == pytest.approx(0.5)
        assert q_m == pytest.approx(0.5)
        assert 0.5 * q_d + 0.5 * q_m == pytest.approx(0.5)

    def test_skewed_priors_hit_the_boundary(self):
        priors = PriorPair(0.9, 0.1)
        q_d, q_m = usd_failure_probabilities(priors, 0.5)
        assert q_m == 1.0
        assert q_d == pytest.approx(0.25)
        assert priors.p_default * q_d + priors.p_mutation * q_m == pytest.approx(0.1 + 0.9 * 0.25)

    @pytest.mark.parametrize("p_mutation", [0.1, 0.3, 0.5, 0.7, 0.9])
    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_matches_brute_force_optimum(self, p_mutation, s):
        priors = PriorPair(1 - p_mutation, p_mutation)
        q_d, q_m = usd_failure_probabilities(priors, s)
        total = priors.p_default * q_d + priors.p_mutation * q_m
        assert total == pytest.approx(brute_force_failure(priors, s), abs=1e-3)

    @pytest.mark.parametrize("s", [0.0, 1.0, -0.1, 1.5])
    def test_overlap_outside_open_interval(self, s):
        with pytest.raises(DomainError):
            usd_failure_probabilities(PriorPair(0.5, 0.5), s)

    def test_distribution_lists_inconclusive_first(self):
        dist = usd_outcome_distribution(M1, PriorPair(0.5, 0.5), 0.5)
        assert dist[0][0] is UsdOutcome.INCONCLUSIVE
        assert dist[1][0] is UsdOutcome.CONCLUSIVE_MUTATION
        assert sum(p for _, p in dist) == pytest.approx(1.0)


class TestUsdMeasure:
    def test_scripted_draws_pick_each_outcome(self, scripted):
        priors = PriorPair(0.5, 0.5)
        assert usd_measure(DEFAULT, priors, 0.5, scripted([0.1])) is UsdOutcome.INCONCLUSIVE
        assert usd_measure(DEFAULT, priors, 0.5, scripted([0.9])) is UsdOutcome.CONCLUSIVE_DEFAULT
        assert usd_measure(M1, priors, 0.5, scripted([0.9])) is UsdOutcome.CONCLUSIVE_MUTATION

    def test_never_names_the_wrong_state(self):
        rng = np.random.default_rng(7)
        wrong = 0
        for s in np.arange(0.1, 1.0, 0.1):
            for m in (1, 2, 3, 10, 33):
                priors = priors_for_window(m)
                for _ in range(1000):
                    wrong += usd_measure(DEFAULT, priors, s, rng) is UsdOutcome.CONCLUSIVE_MUTATION
                    wrong += usd_measure(M1, priors, s, rng) is UsdOutcome.CONCLUSIVE_DEFAULT
        assert wrong == 0

    @pytest.mark.slow
    def test_never_names_the_wrong_state_million_draws(self):
        rng = np.random.default_rng(8)
        wrong = 0
        overlaps = np.arange(0.1, 1.0, 0.1)
        for i in range(500_000):
            s = overlaps[i % len(overlaps)]
            priors = priors_for_window(1 + i % 50)
            wrong += usd_measure(DEFAULT, priors, s, rng) is UsdOutcome.CONCLUSIVE_MUTATION
            wrong += usd_measure(M1, priors, s, rng) is UsdOutcome.CONCLUSIVE_DEFAULT
        assert wrong == 0

    def test_empirical_failure_rate(self):
        rng = np.random.default_rng(9)
        draws = [usd_measure(DEFAULT, PriorPair(0.5, 0.5), 0.5, rng) for _ in range(20000)]
        rate = draws.count(UsdOutcome.INCONCLUSIVE) / len(draws)
        assert rate == pytest.approx(0.5, abs=0.02)


class TestOrthogonalDiscrimination:
    def test_returns_true_label(self):
        assert discriminate_orthogonal(DEFAULT, (DEFAULT, M1)) == DEFAULT
        assert discriminate_orthogonal(M1, (DEFAULT, M1)) == M1
        assert discriminate_orthogonal(M2, (M2, M3)) == M2

    def test_true_label_outside_hypotheses(self):
        with pytest.raises(ProtocolLogicError):
            discriminate_orthogonal(M2, (DEFAULT, M1))

    def test_needs_two_distinct_hypotheses(self):
        with pytest.raises(DomainError):
            discriminate_orthogonal(DEFAULT, (DEFAULT, DEFAULT))


class TestBellMeasurement:
    def test_default_gives_equal_bits(self):
        rng = np.random.default_rng(11)
        draws = [bell_computational_measure(DEFAULT, rng) for _ in range(100_000)]
        assert set(draws) == {BellBasisOutcome(0, 0), BellBasisOutcome(1, 1)}
        assert draws.count(BellBasisOutcome(0, 0)) / len(draws) == pytest.approx(0.5, abs=0.01)

    def test_m3_gives_unequal_bits(self, rng):
        draws = {bell_computational_measure(M3, rng) for _ in range(1000)}
        assert draws == {BellBasisOutcome(0, 1), BellBasisOutcome(1, 0)}

    def test_parity_matches_subset(self, rng):
        for label in (DEFAULT, M1, M2, M3):
            for _ in range(200):
                outcome = bell_computational_measure(label, rng)
                assert outcome.parity_even == (label.index in (0, 1))

    def test_zero_probability_outcome(self):
        dist = dict(bell_outcome_distribution(DEFAULT))
        assert BellBasisOutcome(0, 1) not in dist
        assert sum(dist.values()) == 1.0


class TestSharedPairs:
    def test_every_measurement_consumes_one_pair(self, rng):
        seq = sample_sequence(SourceModel.orthogonal(4), 3)
        pairs = SharedPairs(seq)
        for position in (1, 2, 3):
            pairs.measure(MeasurementRequest(position, MeasurementKind.LOCC, (DEFAULT, M1)), rng)
            assert pairs.consumed == position
        assert [record.outcome for record in pairs.transcript] == ["D", "D", "M1"]

    def test_consumed_pair_cannot_be_measured_again(self, rng):
        pairs = SharedPairs(sample_sequence(SourceModel.orthogonal(4), 3))
        request = MeasurementRequest(2, MeasurementKind.LOCC, (DEFAULT, M1))
        pairs.measure(request, rng)
        with pytest.raises(ProtocolLogicError):
            pairs.measure(request, rng)

    def test_computational_basis_needs_bell_source(self, rng):
        pairs = SharedPairs(sample_sequence(SourceModel.orthogonal(4), 3))
        with pytest.raises(DomainError):
            pairs.measure(MeasurementRequest(1, MeasurementKind.COMPUTATIONAL), rng)

    def test_blind_measurement_always_fails(self):
        pairs = SharedPairs(sample_sequence(SourceModel.orthogonal(2), 1))
        assert pairs.measure(MeasurementRequest(1, MeasurementKind.BLIND)) is UsdOutcome.INCONCLUSIVE
        assert pairs.transcript[0].to_dict() == {"position": 1, "kind": "blind", "outcome": "?", "consumed": 1}

    def test_outcome_distribution_matches_kind(self):
        request = MeasurementRequest(1, MeasurementKind.LOCC, (DEFAULT, M1))
        assert outcome_distribution(request, M1) == ((M1, 1),)
        assert outcome_distribution(MeasurementRequest(1, MeasurementKind.BLIND), DEFAULT) == \
            ((UsdOutcome.INCONCLUSIVE, 1),)
