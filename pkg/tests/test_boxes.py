"""Single-pair box construction, validation, correlators and serialization."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from macrobox import (
    DomainError,
    OUTCOMES,
    PairBox,
    as_rational,
    chsh_value,
    make_deterministic_box,
    make_isotropic_box,
    make_pr_box,
    pair_correlation,
    rational_to_str,
    validate_pairbox,
)
from tests.conftest import no_signalling_boxes

F = Fraction


def four_term_correlator(box, i, j):
    """Oracle: the explicit signed four-term sum defining <a_i b_j>."""
    return (box.prob(i, j, 1, 1) + box.prob(i, j, -1, -1)
            - box.prob(i, j, 1, -1) - box.prob(i, j, -1, 1))


class TestPrBox:
    def test_table_values(self):
        pr = make_pr_box()
        assert pr.prob(0, 0, 1, 1) == F(1, 2)
        assert pr.prob(0, 0, 1, -1) == 0
        assert pr.prob(1, 1, 1, -1) == F(1, 2)
        assert pr.prob(1, 1, 1, 1) == 0

    def test_correlations(self):
        pr = make_pr_box()
        assert pair_correlation(pr, 0, 1) == 1
        assert pair_correlation(pr, 1, 1) == -1
        for i, j in product((0, 1), repeat=2):
            assert pair_correlation(pr, i, j) == (-1) ** (i * j)

    def test_uniform_marginals(self):
        pr = make_pr_box()
        for i in (0, 1):
            for x in OUTCOMES:
                assert pr.marginal_a(i, x) == F(1, 2)
                assert pr.marginal_b(i, x) == F(1, 2)

    def test_validates_clean(self):
        assert validate_pairbox(make_pr_box()).ok

    def test_chsh_is_four(self):
        pr = make_pr_box()
        oracle = (four_term_correlator(pr, 0, 0) + four_term_correlator(pr, 0, 1)
                  + four_term_correlator(pr, 1, 0) - four_term_correlator(pr, 1, 1))
        assert oracle == 4
        assert chsh_value(pr) == 4


class TestIsotropicBox:
    def test_zero_visibility_is_uniform(self):
        box = make_isotropic_box(0)
        for i, j, x, y in product((0, 1), (0, 1), OUTCOMES, OUTCOMES):
            assert box.prob(i, j, x, y) == F(1, 4)

    def test_full_visibility_is_pr(self):
        assert make_isotropic_box(1).table == make_pr_box().table

    def test_half_visibility_cell(self):
        # direct evaluation of the law: (1 + (1/2)(-1)(+1)(+1)) / 4 = 1/8
        assert make_isotropic_box(F(1, 2)).prob(1, 1, 1, 1) == F(1, 8)

    def test_half_visibility_correlation(self):
        box = make_isotropic_box(F(1, 2))
        assert four_term_correlator(box, 0, 0) == F(1, 2)
        assert pair_correlation(box, 0, 0) == F(1, 2)

    def test_chsh_scales_with_visibility(self):
        assert chsh_value(make_isotropic_box(F(1, 2))) == 2

    @pytest.mark.parametrize("bad", [F(3, 2), F(-3, 2), 2, -2])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(DomainError):
            make_isotropic_box(bad)

    @given(visibility=st.fractions(min_value=-1, max_value=1))
    def test_correlation_law(self, visibility):
        box = make_isotropic_box(visibility)
        for i, j in product((0, 1), repeat=2):
            assert pair_correlation(box, i, j) == visibility * (-1) ** (i * j)
        assert chsh_value(box) == 4 * visibility
        assert validate_pairbox(box).ok

    @given(visibility=st.fractions(min_value=-1, max_value=1))
    def test_uniform_marginals(self, visibility):
        box = make_isotropic_box(visibility)
        for i in (0, 1):
            for x in OUTCOMES:
                assert box.marginal_a(i, x) == F(1, 2)
                assert box.marginal_b(i, x) == F(1, 2)


class TestDeterministicBox:
    def test_point_mass(self):
        box = make_deterministic_box(1, 1, 1, 1)
        assert box.prob(0, 0, 1, 1) == 1
        assert box.prob(0, 0, 1, -1) == 0

    def test_mixed_assignment(self):
        box = make_deterministic_box(1, -1, 1, -1)
        assert box.prob(1, 1, -1, -1) == 1

    def test_chsh_classical_value(self):
        assert chsh_value(make_deterministic_box(1, 1, 1, 1)) == 2

    @pytest.mark.parametrize("outcomes", list(product(OUTCOMES, repeat=4)))
    def test_all_vertices_validate(self, outcomes):
        assert validate_pairbox(make_deterministic_box(*outcomes)).ok

    def test_rejects_non_outcomes(self):
        with pytest.raises(DomainError):
            make_deterministic_box(0, 1, 1, 1)


class TestValidation:
    def test_flags_signalling_marginal(self):
        # Alice's marginal at i=0 is fair via j=0 but deterministic via j=1.
        table = dict(make_pr_box().table)
        table[(0, 1, 1, 1)] = F(1, 2)
        table[(0, 1, 1, -1)] = F(1, 2)
        table[(0, 1, -1, 1)] = F(0)
        table[(0, 1, -1, -1)] = F(0)
        report = validate_pairbox(PairBox(s_a=2, s_b=2, table=table))
        kinds = {v.kind for v in report.violations}
        assert "no-signalling" in kinds

    def test_flags_bad_normalization(self):
        table = {k: v / 2 if k[:2] == (0, 0) else v
                 for k, v in make_pr_box().table.items()}
        report = validate_pairbox(PairBox(s_a=2, s_b=2, table=table))
        bad = [v for v in report.violations if v.kind == "normalization"]
        assert len(bad) == 1
        assert bad[0].where == (0, 0)
        assert bad[0].residual == F(-1, 2)

    def test_flags_negative_entry(self):
        table = dict(make_pr_box().table)
        table[(0, 0, 1, -1)] = F(-1, 4)
        table[(0, 0, 1, 1)] = F(3, 4)
        report = validate_pairbox(PairBox(s_a=2, s_b=2, table=table))
        assert any(v.kind == "negativity" for v in report.violations)

    @given(box=no_signalling_boxes())
    def test_random_mixtures_validate(self, box):
        assert validate_pairbox(box).ok

    def test_chsh_needs_two_settings(self):
        pr = make_pr_box()
        stripped = PairBox(s_a=1, s_b=2, table={
            k: v for k, v in pr.table.items() if k[0] == 0})
        with pytest.raises(DomainError):
            chsh_value(stripped)


class TestSerialization:
    def test_rational_strings(self):
        assert rational_to_str(F(0)) == "0/1"
        assert rational_to_str(F(-1, 2)) == "-1/2"
        assert as_rational("3/6") == F(1, 2)
        with pytest.raises(DomainError):
            as_rational("3/0")
        with pytest.raises(DomainError):
            as_rational("nope")

    def test_pair_box_round_trip(self):
        pr = make_pr_box()
        text = pr.to_json()
        again = PairBox.from_json(text)
        assert again.table == pr.table
        assert again.to_json() == text

    @given(box=no_signalling_boxes())
    def test_round_trip_random(self, box):
        assert PairBox.from_json(box.to_json()).table == box.table
