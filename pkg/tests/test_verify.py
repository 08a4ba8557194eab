"""
Tests for the property suite runner, its samplers and the witness shrinker.
"""

import pytest
import random
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from abelian import IntMatrix
from eigen import constants_sample, weigh_generators, weight_of
from errors import OreForgeError
from exact import BaseAlgebra, BasePoly, BaseRatFun
from verify import (
    BASE_ALGEBRAS, MUTATIONS, SUITES, BaseSampler, CheckResult, ElementSampler, HomogeneousSampler, SuiteResult,
    _coset_counts, _predicted_counts, act_on_polynomial, random_square_matrix, run_suite, run_suites, shrink_witness,
)


class TestElementSampler:
    """Seeded random elements."""

    def test_same_seed_same_elements(self, t2):
        first = ElementSampler(t2, random.Random(5))
        second = ElementSampler(t2, random.Random(5))
        assert [first.element() for _ in range(10)] == [second.element() for _ in range(10)]

    def test_rationals_are_nonzero_and_bounded(self, a1):
        sampler = ElementSampler(a1, random.Random(1), height=3)
        for _ in range(100):
            q = sampler.rational()
            assert q != 0
            assert abs(q.numerator) <= 3
            assert 1 <= q.denominator <= 3

    def test_only_units_get_negative_exponents(self, lw1):
        sampler = ElementSampler(lw1, random.Random(2))
        for _ in range(50):
            x_exp, d_exp = sampler.exponents(4)
            assert d_exp >= 0
            assert abs(x_exp) + d_exp == 4

    def test_units(self, t2, a1):
        sampler = ElementSampler(t2, random.Random(3))
        assert sampler.has_units()
        for _ in range(20):
            assert t2.is_unit(sampler.unit()) is not None
        assert not ElementSampler(a1, random.Random(3)).has_units()

    def test_rational_function_coefficients(self, rw1):
        sampler = ElementSampler(rw1, random.Random(4))
        elements = [sampler.element() for _ in range(30)]
        assert all(e.owner is rw1 for e in elements)
        assert all(e for e in elements)

    def test_homogeneous_sampler(self, catalog, t2):
        wt = weigh_generators(t2, [catalog.map("T2", "conj_x"), catalog.map("T2", "conj_y")])
        sampler = HomogeneousSampler(wt, ElementSampler(t2, random.Random(6)), constants_sample(wt, 2).monomials)
        for _ in range(30):
            weight_of(wt, sampler.element())


class TestBaseSampler:
    """Seeded random base elements."""

    def test_kinds(self):
        rng = random.Random(8)
        assert isinstance(BaseSampler(BaseAlgebra.rationals(), rng).element(), Fraction)
        assert isinstance(BaseSampler(BaseAlgebra.ratfun("t"), rng).element(), BaseRatFun)

    def test_laurent_exponents(self):
        base = BASE_ALGEBRAS[1][1]
        sampler = BaseSampler(base, random.Random(9), max_degree=2)
        exps = [e for _ in range(50) for e, _ in sampler.element().items()]
        assert all(abs(x) <= 2 and 0 <= y <= 2 for x, y in exps)
        assert any(x < 0 for x, _ in exps)

    def test_same_seed_same_elements(self):
        base = BaseAlgebra.ratfun("t")
        first = BaseSampler(base, random.Random(4))
        second = BaseSampler(base, random.Random(4))
        assert [first.element() for _ in range(10)] == [second.element() for _ in range(10)]

    def test_square_matrices(self):
        m = random_square_matrix(random.Random(1))
        assert m.shape == (4, 4)
        assert all(-10 <= v <= 10 for row in m.rows for v in row)


class TestShrinkWitness:
    """Greedy term dropping."""

    def test_drops_terms_while_failing(self, a1):
        x, d = a1.gen("x"), a1.gen("d")
        args = shrink_witness([x + 3, d + x * x], lambda a, b: a * b != b * a)
        assert args == [x, d]

    def test_single_terms_are_kept(self, a1):
        x = a1.gen("x")
        assert shrink_witness([x], lambda a: True) == [x]

    def test_errors_count_as_passing(self, a1):
        x, d = a1.gen("x"), a1.gen("d")

        def fails(a):
            if len(a) < 3:
                raise OreForgeError("too small")
            return True

        assert len(shrink_witness([x + d + 1], fails)[0]) == 3


class TestOracles:
    """Brute-force references used by the suites."""

    def test_operator_action(self, a1):
        x = a1.base.variables
        square = BasePoly(x, {(2,): Fraction(1)})
        assert act_on_polynomial(a1.gen("d"), square) == BasePoly(x, {(1,): Fraction(2)})
        assert act_on_polynomial(a1.gen("x"), square) == BasePoly(x, {(3,): Fraction(1)})
        assert act_on_polynomial(a1.gen("d") * a1.gen("d") * a1.gen("d"), square) == BasePoly.zero(x)

    def test_coset_counts_cyclic(self):
        assert _coset_counts(IntMatrix([[2]], n_cols=1)) == {1: 1, 2: 2}

    def test_coset_counts_match_invariant_factors(self):
        counts = _coset_counts(IntMatrix([[2, 0], [0, 3]], n_cols=2))
        assert counts == _predicted_counts([6], sorted(counts))
        assert counts[6] == 6

    def test_short_rank_skipped(self):
        assert _coset_counts(IntMatrix([[1, 1]], n_cols=2)) is None

    def test_predicted_counts(self):
        assert _predicted_counts([2, 4], [1, 2, 4]) == {1: 1, 2: 4, 4: 8}


class TestResults:
    """Check and suite result records."""

    def test_status(self):
        assert CheckResult("tower", "a", True, 5).status == "PASS"
        assert CheckResult("tower", "a", False, 1, witness="(x)").status == "FAIL"
        assert CheckResult("tower", "a", True, 0, skipped="no units").status == "SKIP"

    def test_suite_passes_when_all_checks_pass(self):
        result = SuiteResult("endo", [CheckResult("endo", "a", True, 1), CheckResult("endo", "b", True, 0, skipped="x")])
        assert result.passed
        result.checks.append(CheckResult("endo", "c", False, 1))
        assert not result.passed
        assert [c.name for c in result.failures] == ["c"]


class TestRunner:
    """The suites on the builtin catalog."""

    def test_unknown_suite(self, small_sampling, small_eigen):
        with pytest.raises(OreForgeError):
            run_suite("geometry", small_sampling, small_eigen)

    def test_unknown_mutation(self, small_sampling, small_eigen):
        with pytest.raises(OreForgeError):
            run_suite("tower", small_sampling, small_eigen, mutation="flip")

    def test_abelian_suite(self, small_sampling, small_eigen):
        result = run_suite("abelian", small_sampling, small_eigen)
        assert result.passed, [c.witness for c in result.failures]
        assert len(result.checks) == 3

    def test_deterministic(self, small_sampling, small_eigen):
        first = run_suite("abelian", small_sampling, small_eigen)
        second = run_suite("abelian", small_sampling, small_eigen)
        assert [(c.name, c.passed, c.checked) for c in first.checks] == \
            [(c.name, c.passed, c.checked) for c in second.checks]

    @pytest.mark.slow
    @pytest.mark.parametrize("suite", ["tower", "endo", "eigen"])
    def test_suites_pass(self, suite, small_sampling, small_eigen):
        result = run_suite(suite, small_sampling, small_eigen)
        assert result.passed, [(c.name, c.witness) for c in result.failures]
        assert result.checks

    @pytest.mark.slow
    def test_tower_suite_covers_ring_laws(self, small_sampling, small_eigen):
        names = [c.name for c in run_suite("tower", small_sampling, small_eigen).checks]
        for label, _ in BASE_ALGEBRAS:
            assert f"base {label}: distributivity" in names
        assert "A1: unit law" in names
        assert "T2: distributivity" in names

    @pytest.mark.slow
    @pytest.mark.parametrize("mutation", MUTATIONS)
    def test_mutations_are_caught(self, mutation, small_sampling, small_eigen):
        result = run_suite("tower", small_sampling, small_eigen, mutation=mutation)
        assert not result.passed
        assert all(c.witness for c in result.failures)

    @pytest.mark.slow
    def test_opposite_sign_witness(self, small_sampling, small_eigen):
        result = run_suite("tower", small_sampling, small_eigen, mutation="opposite-sign")
        names = [c.name for c in result.failures]
        assert "A1: opposite reverses products" in names

    @pytest.mark.slow
    def test_run_all_in_order(self, small_sampling, small_eigen):
        results = run_suites("all", small_sampling, small_eigen, workers=2)
        assert [r.suite for r in results] == list(SUITES)
