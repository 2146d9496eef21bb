import itertools
import json
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from oracles import brute_force_completions, random_config, random_convex_config
from polyreal.certify import (
    BfpCertificate,
    GPTriple,
    bfp,
    certify_nonrealizable,
    complete,
    gp_propagate,
    triple_table,
    verify_certificate,
)
from polyreal.core import Chirotope, check_axioms, chirotope_of_points, facets_of, r_subsets
from polyreal.data import bek_sphere, cyclic_sphere, moment_curve, simplex_sphere, t2766_sphere
from polyreal.errors import Contradiction, NotUniform
from polyreal.lp import is_farkas_certificate, solve_feasibility
from polyreal.sphere import PartialChirotope, partial_from_sphere, sphere_from_facets

from test_sphere import RP2


@pytest.fixture(scope="module")
def t2766_completions():
    forced = gp_propagate(partial_from_sphere(t2766_sphere()))
    return forced, complete(forced)


@pytest.fixture(scope="module")
def t2766_certificates(t2766_completions):
    _, result = t2766_completions
    return [(chi, bfp(chi)) for chi in result.completions]


def flip_one(signs, index):
    s = list(signs.signs)
    s[index] = -s[index]
    return type(signs)(signs.n, signs.r, tuple(s))


class TestTriples:
    def test_brackets_and_parities(self):
        t = GPTriple((0,), (1, 2, 3, 4))
        assert t.brackets == ((0, 1, 2), (0, 3, 4), (0, 1, 3), (0, 2, 4), (0, 1, 4), (0, 2, 3))
        assert t.coefficients() == (1, -1, 1)

    def test_lambda_between(self):
        t = GPTriple((2,), (0, 1, 3, 4))
        # (2,0,1) sorts to (0,1,2) with an even permutation; (2,3,4) is already sorted
        assert t.brackets[0] == (0, 1, 2)
        assert t.parities[0] == 1

    def test_table_size(self):
        table = triple_table(8, 5)
        assert len(table.triples) == len(list(itertools.combinations(range(8), 3))) * 5


class TestPropagate:
    def test_complete_chirotope_is_fixed_point(self):
        chi = chirotope_of_points(moment_curve(8, 4))
        assert gp_propagate(PartialChirotope.from_chirotope(chi)).signs == chi.signs

    def test_rank_two_forcing(self):
        # order: ab ac ad bc bd cd; bd = - makes the first two products +, so ad*bc must be -
        pc = PartialChirotope(4, 2, (1, 1, 1, 0, -1, 1))
        assert gp_propagate(pc).signs == (1, 1, 1, -1, -1, 1)

    def test_rank_two_mixed_products_force_nothing(self):
        pc = PartialChirotope(4, 2, (1, 1, 1, 0, 1, 1))
        assert gp_propagate(pc).signs == pc.signs

    def test_contradiction_has_witness(self):
        pc = PartialChirotope(4, 2, (1, 1, 1, 1, -1, 1))
        with pytest.raises(Contradiction) as exc:
            gp_propagate(pc)
        assert exc.value.triple.quad == (0, 1, 2, 3)

    def test_cyclic_nine_extends_and_matches(self):
        pc = partial_from_sphere(cyclic_sphere(9, 4))
        out = gp_propagate(pc)
        assert out.known > pc.known and out.extends(pc)
        chi = chirotope_of_points(moment_curve(9, 4))
        flip = pc.signs[0] * chi.signs[0]
        assert all(v == flip * c for v, c in zip(out.signs, chi.signs) if v)

    def test_soundness_on_random_polytopes(self):
        rng = random.Random(21)
        for _ in range(12):
            config = random_convex_config(rng, rng.randint(6, 8), 4)
            chi = chirotope_of_points(config)
            s = sphere_from_facets(sorted(facets_of(chi)), n=config.n, d=4)
            out = gp_propagate(partial_from_sphere(s))
            ref = next(v * c for v, c in zip(out.signs, chi.signs) if v)
            assert all(v == ref * c for v, c in zip(out.signs, chi.signs) if v)

    def test_non_uniform_rejected(self):
        with pytest.raises(NotUniform):
            gp_propagate(Chirotope(4, 3, (1, 0, 1, 1)))


class TestComplete:
    def test_simplex(self):
        result = complete(partial_from_sphere(simplex_sphere(4)))
        assert result.status == "completions" and len(result.completions) == 1

    @pytest.mark.parametrize("n", [6, 7, 8, 9])
    def test_cyclic_rigidity(self, n):
        result = complete(gp_propagate(partial_from_sphere(cyclic_sphere(n, 4))))
        assert not result.truncated and len(result.completions) == 1
        chi = chirotope_of_points(moment_curve(n, 4))
        assert result.completions[0].normalized() == chi.normalized()

    def test_completions_are_valid(self, t2766_completions):
        forced, result = t2766_completions
        assert len(result.completions) == 4 and result.nodes == 8
        for chi in result.completions:
            assert check_axioms(chi) == []
            assert PartialChirotope.from_chirotope(chi).extends(forced)
            assert facets_of(chi) == set(t2766_sphere().facets)

    def test_cap_honored(self):
        pc = PartialChirotope(6, 3, (1,) + (0,) * 19)
        result = complete(pc, cap=7)
        assert result.truncated and result.status == "cap_exceeded"
        assert len(result.completions) == 7

    def test_node_cap(self):
        pc = PartialChirotope(6, 3, (1,) + (0,) * 19)
        result = complete(pc, node_cap=5)
        assert result.truncated and result.nodes <= 6

    def test_no_completion(self):
        pc = PartialChirotope(4, 2, (1, 1, 1, 1, -1, 1))
        assert complete(pc).status == "no_completion"

    def test_unconstrained_rank_three_six(self):
        pc = PartialChirotope(6, 3, (1,) + (0,) * 19)
        expected = brute_force_completions(6, 3, pc.signs)
        result = complete(pc, cap=10**6)
        assert len(expected) > 10_000
        assert not result.truncated
        assert {c.signs for c in result.completions} == expected

    def test_brute_force_random_partials(self):
        rng = random.Random(8)
        for trial in range(12):
            n, r = rng.choice([(6, 3), (7, 3), (7, 4), (6, 4)])
            chi = chirotope_of_points(random_config(rng, n, r - 1))
            signs = list(chi.signs)
            if trial % 3 == 2:
                # unrealizable noise: flip a few known entries
                for i in rng.sample(range(len(signs)), 3):
                    signs[i] = -signs[i]
            k = min(len(signs) - 1, rng.randint(8, 20))
            for i in rng.sample(range(len(signs)), k):
                signs[i] = 0
            pc = PartialChirotope(n, r, tuple(signs))
            result = complete(pc)
            assert not result.truncated
            assert {c.signs for c in result.completions} == brute_force_completions(n, r, pc.signs)


class TestBfp:
    def test_cyclic_has_none(self):
        assert bfp(chirotope_of_points(moment_curve(8, 4))) is None

    def test_random_realizable_have_none(self):
        rng = random.Random(13)
        for _ in range(50):
            r = rng.randint(3, 5)
            chi = chirotope_of_points(random_config(rng, rng.randint(r + 1, 9), r - 1))
            assert bfp(chi) is None

    def test_bek_partial_has_none(self):
        assert bfp(gp_propagate(partial_from_sphere(bek_sphere()))) is None

    def test_t2766_completions_certified(self, t2766_certificates):
        for chi, cert in t2766_certificates:
            assert cert is not None
            assert verify_certificate(cert, chi)
            assert verify_certificate(cert, chi.negated())
            assert all(m > 0 for m in cert.multipliers)

    def test_zeroed_multiplier_rejected(self, t2766_certificates):
        chi, cert = t2766_certificates[0]
        mults = list(cert.multipliers)
        mults[0] = Fraction(0)
        assert not verify_certificate(replace(cert, multipliers=tuple(mults)), chi)

    def test_dropped_inequality_rejected(self, t2766_certificates):
        chi, cert = t2766_certificates[0]
        broken = BfpCertificate(cert.inequalities[1:], cert.multipliers[1:])
        assert not verify_certificate(broken, chi)

    def test_flipped_sign_rejected(self, t2766_certificates):
        chi, cert = t2766_certificates[0]
        cited = {b for q in cert.inequalities for b in q.triple.brackets}
        index = {t: i for i, t in enumerate(r_subsets(chi.n, chi.r))}
        target = index[sorted(cited)[0]]
        assert not verify_certificate(cert, flip_one(chi, target))

    def test_unknown_cited_sign_rejected(self, t2766_certificates):
        chi, cert = t2766_certificates[0]
        bracket = cert.inequalities[0].triple.brackets[0]
        signs = list(chi.signs)
        signs[r_subsets(chi.n, chi.r).index(bracket)] = 0
        assert not verify_certificate(cert, PartialChirotope(chi.n, chi.r, tuple(signs)))

    def test_json_round_trip(self, t2766_certificates):
        chi, cert = t2766_certificates[1]
        text = json.dumps(cert.to_json())
        again = BfpCertificate.from_json(json.loads(text))
        assert again == cert and verify_certificate(again, chi)
        entry = json.loads(text)[0]
        assert set(entry) == {"lambda", "quad", "minority", "majority", "multiplier"}
        assert "/" in entry["multiplier"] or entry["multiplier"].isdigit()

    def test_t2766_partial_has_none(self, t2766_completions):
        forced, _ = t2766_completions
        assert bfp(forced) is None


class TestCertifyNonrealizable:
    def test_cyclic_is_undecided(self):
        assert certify_nonrealizable(cyclic_sphere(8, 4)).kind == "undecided"

    def test_t2766(self):
        v = certify_nonrealizable(t2766_sphere())
        assert v.kind == "bfp_on_all_completions"
        assert len(v.certificates) == 4
        assert v.diagnostics["known_from_faces"] == 130
        for signs, cert in v.certificates:
            assert verify_certificate(cert, signs)

    def test_non_polytopal_eight_vertex_contradiction(self, spheres8_path):
        lines = [json.loads(line) for line in spheres8_path.read_text().splitlines()]
        s = sphere_from_facets(next(e for e in lines if e["id"] == "S8_42")["facets"])
        with pytest.raises(Contradiction):
            gp_propagate(partial_from_sphere(s))
        v = certify_nonrealizable(s)
        assert v.kind == "no_compatible_chirotope" and v.witness["kind"] == "contradiction"

    def test_non_orientable(self):
        v = certify_nonrealizable(sphere_from_facets(RP2))
        assert v.kind == "no_compatible_chirotope"
        assert v.witness["kind"] == "inconsistent_orientation"

    def test_truncation_is_undecided(self):
        v = certify_nonrealizable(t2766_sphere(), cap=2)
        assert v.kind == "undecided" and v.diagnostics["truncated"]


class TestExactLP:
    def test_feasible_solution(self):
        A = [[1, 1, 0], [0, 1, 1]]
        res = solve_feasibility(A, [2, 3])
        assert res.feasible
        y = res.solution
        assert all(v >= 0 for v in y)
        assert [sum(a * v for a, v in zip(row, y)) for row in A] == [2, 3]

    def test_infeasible_has_farkas(self):
        A = [[1, 1], [1, 1]]
        res = solve_feasibility(A, [1, 2])
        assert not res.feasible and is_farkas_certificate(A, [1, 2], res.farkas)

    def test_negative_rhs(self):
        res = solve_feasibility([[1, 0]], [-1])
        assert not res.feasible and is_farkas_certificate([[1, 0]], [-1], res.farkas)

    def test_random_systems(self):
        rng = random.Random(17)
        for _ in range(150):
            m, n = rng.randint(1, 5), rng.randint(1, 6)
            A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
            b = [rng.randint(-4, 4) for _ in range(m)]
            res = solve_feasibility(A, b)
            if res.feasible:
                y = res.solution
                assert all(v >= 0 for v in y)
                assert [sum(a * v for a, v in zip(row, y)) for row in A] == [Fraction(v) for v in b]
            else:
                assert is_farkas_certificate(A, b, res.farkas)

    def test_degenerate_terminates(self):
        # a classic cycling-prone degenerate system; Bland's rule must finish
        A = [[Fraction(1, 4), -8, -1, 9, 1, 0, 0],
             [Fraction(1, 2), -12, Fraction(-1, 2), 3, 0, 1, 0],
             [0, 0, 1, 0, 0, 0, 1]]
        res = solve_feasibility(A, [0, 0, 1], max_pivots=200)
        assert res.feasible
