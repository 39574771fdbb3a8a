"""
測試改寫系統

涵蓋：
  - 規則方向與正規形
  - 燃料上限
  - 內部化簡
  - 二次關係導出（量子平面）
  - 臨界對與局部合流（含不可合流的反例）
  - 擬縮放、開根與擴充
  - 代入與殘差分類
"""

import pytest

from core.ncpoly import Alphabet, Family, Letter, NCPoly
from core.report import CheckStatus
from core.rewriting import (
    NonTerminationError, RootNotAdjoinableError, RuleOrderError, RuleSet, ScalingError,
    UnmappedLetterError, adjoin_root, apply_map, check_local_confluence, classify_residual,
    critical_overlaps, derive_quadratic_rules, derive_scaling, relations_from_matrix, root_of_scaling,
)
from core.scalar import I, ONE, UNIT_CIRCLE, equal, k, q, spow
from core.tensor import IndexScheme, projector


def _alphabet(*names, family=Family.COORD):
    return Alphabet(Letter(n, family, position=i) for i, n in enumerate(names))


def _x(name):
    return NCPoly.letter(name)


def _qcommuting(fuel=1_000_000):
    """x、y、z 兩兩 q-交換"""
    rules = RuleSet(_alphabet("x", "y", "z"), fuel=fuel)
    rules.add_rule(("y", "x"), NCPoly.word(("x", "y"), q))
    rules.add_rule(("z", "x"), NCPoly.word(("x", "z"), q))
    rules.add_rule(("z", "y"), NCPoly.word(("y", "z"), q))
    return rules


@pytest.fixture(scope='module')
def qplane():
    return _qcommuting()


# ── 規則與正規形 ───────────────────────────────────────────────────────────────

class TestNormalForm:

    def test_reorders(self, qplane):
        nf = qplane.normal_form(NCPoly.word(("y", "y", "x")))
        assert nf.terms.keys() == {("x", "y", "y")}
        assert equal(nf.coeff(("x", "y", "y")), q * q)

    def test_nf_of_factors(self, qplane):
        nf = qplane.nf(_x("z"), _x("y"), _x("x"))
        assert equal(nf.coeff(("x", "y", "z")), q ** 3)

    def test_normal_words_untouched(self, qplane):
        p = NCPoly.word(("x", "y", "z"), spow(3))
        assert qplane.normal_form(p).terms == p.terms

    def test_rejects_increasing_rule(self):
        rules = RuleSet(_alphabet("x", "y"))
        with pytest.raises(RuleOrderError):
            rules.add_rule(("x", "y"), NCPoly.word(("y", "x")))

    def test_rejects_empty_lhs(self):
        with pytest.raises(RuleOrderError):
            RuleSet(_alphabet("x")).add_rule((), NCPoly.one())

    def test_fuel_exhausted(self):
        rules = _qcommuting(fuel=2)
        with pytest.raises(NonTerminationError):
            rules.normal_form(NCPoly.word(("z", "z", "y", "y", "x", "x")))

    def test_inter_reduce_drops_redundant(self):
        """左邊可被較短規則化簡的規則改寫後消失或重新定向"""
        rules = _qcommuting()
        rules.add_rule(("z", "y", "x"), NCPoly.word(("x", "y", "z"), q ** 3))
        rules.inter_reduce()
        assert ("z", "y", "x") not in rules
        assert len(rules) == 3

    def test_stats_and_dict(self, qplane):
        stats = qplane.stats()
        assert stats["rules"] == 3
        assert stats["rules_by_length"] == {"2": 3}
        restored = RuleSet.from_dict(qplane.to_dict())
        assert restored.normal_form(NCPoly.word(("z", "x"))).terms == \
            qplane.normal_form(NCPoly.word(("z", "x"))).terms


# ── 二次關係 ───────────────────────────────────────────────────────────────────

class TestQuadraticRules:

    def test_sl2_quantum_plane(self):
        """P_a 的列空間給出 x2 x1 = q^-1 x1 x2"""
        scheme = IndexScheme("sl", 2)
        alphabet = _alphabet("x1", "x2")
        relations = relations_from_matrix(projector(scheme, "a"), lambda i: f"x{i}")
        rules = derive_quadratic_rules(relations, alphabet)
        assert len(rules) == 1
        lhs, rhs = rules[0]
        assert lhs == ("x2", "x1")
        assert equal(rhs.coeff(("x1", "x2")), ONE / q)

    def test_so3_rank(self):
        """so3 的 P_a 秩 3 → 三條規則"""
        scheme = IndexScheme("so", 3)
        alphabet = _alphabet("a", "b", "c")
        names = {-1: "a", 0: "b", 1: "c"}
        relations = relations_from_matrix(projector(scheme, "a"), names.get)
        assert len(derive_quadratic_rules(relations, alphabet)) == 3

    def test_empty(self):
        assert derive_quadratic_rules([], _alphabet("x")) == []


# ── 合流 ───────────────────────────────────────────────────────────────────────

class TestConfluence:

    def test_overlaps_found(self, qplane):
        words = {o.word for o in critical_overlaps(qplane)}
        assert ("z", "y", "x") in words

    def test_qcommuting_confluent(self, qplane):
        report = check_local_confluence(qplane)
        assert report.notes["overlaps"] >= 1
        assert report.all_passed()

    def test_non_confluent_fails(self):
        """z y → y z + x x 與 q-交換衝突：殘差 (1 − q²) x x x"""
        rules = RuleSet(_alphabet("x", "y", "z"))
        rules.add_rule(("y", "x"), NCPoly.word(("x", "y"), q))
        rules.add_rule(("z", "x"), NCPoly.word(("x", "z"), q))
        rules.add_rule(("z", "y"), NCPoly.word(("y", "z")) + NCPoly.word(("x", "x")))
        report = check_local_confluence(rules)
        failed = report.failures()
        assert len(failed) == 1
        assert failed[0].id == "overlap[z·y·x@1]"
        assert failed[0].residual_terms == 1

    def test_select_and_sample(self, qplane):
        report = check_local_confluence(qplane, select=lambda o: False)
        assert report.checks == []
        sampled = check_local_confluence(qplane, sample=0, seed=1)
        assert sampled.notes["overlaps"] == 0


# ── 擬縮放與開根 ───────────────────────────────────────────────────────────────

class TestScaling:

    def test_derive_scaling(self, qplane):
        """z x = q x z → 比值 q"""
        assert equal(derive_scaling(_x("z"), "x", qplane), q)

    def test_not_scaling(self):
        rules = RuleSet(_alphabet("x", "y"))
        with pytest.raises(ScalingError):
            derive_scaling(_x("x") + _x("y"), "x", rules)

    def test_root_of_scaling(self):
        assert equal(root_of_scaling(spow(4), 4, "x"), spow(1))
        assert equal(root_of_scaling(spow(-6), 2, "x"), spow(-3))

    @pytest.mark.parametrize("c", [spow(3), -spow(4), I * spow(4), ONE + q])
    def test_root_not_adjoinable(self, c):
        with pytest.raises(RootNotAdjoinableError):
            root_of_scaling(c, 2, "x")

    def test_adjoin_inverse(self, qplane):
        """加入 z 的逆元：z·w = 1，w x = q^-1 x w"""
        root, rules = adjoin_root(_x("z"), 1, qplane, "w", position=0)
        inv = root.inverse
        assert rules.nf(_x("w"), _x(inv)).terms == NCPoly.one().terms
        assert rules.nf(_x(inv), _x("w")).terms == NCPoly.one().terms
        moved = rules.nf(_x("x"), _x("w"))
        assert moved.terms.keys() == {("w", "x")}

    def test_adjoin_zero(self, qplane):
        with pytest.raises(RootNotAdjoinableError):
            adjoin_root(NCPoly(), 2, qplane, "w", position=0)


# ── 代入與分類 ─────────────────────────────────────────────────────────────────

class TestApplyMap:

    def test_homomorphism(self, qplane):
        mapping = {"x": _x("y"), "y": _x("z"), "z": _x("x")}
        image = apply_map(mapping, NCPoly.word(("x", "y")), qplane)
        assert image.terms == {("y", "z"): ONE}

    def test_anti_with_conjugation(self, qplane):
        mapping = {"x": _x("x"), "y": _x("y"), "z": _x("z")}
        image = apply_map(mapping, NCPoly.word(("x", "y"), q), qplane, anti=True, conj_mode=UNIT_CIRCLE)
        # (q x y)* = q^-1 y x = x y
        assert equal(image.coeff(("x", "y")), ONE)

    def test_unmapped(self, qplane):
        with pytest.raises(UnmappedLetterError):
            apply_map({"x": _x("x")}, NCPoly.word(("x", "y")), qplane)


class TestClassifyResidual:

    def test_zero_passes(self, qplane):
        assert classify_residual(NCPoly(), qplane) == CheckStatus.PASS

    def test_l_free_fails(self, qplane):
        assert classify_residual(NCPoly.word(("x", "y"), k), qplane) == CheckStatus.FAIL

    def test_same_family_quadratic_fails(self):
        alphabet = Alphabet([
            Letter("A", Family.LPLUS, index=(1, 2), position=0, weight=3),
            Letter("B", Family.LPLUS, index=(2, 2), position=1, weight=3),
        ])
        rules = RuleSet(alphabet)
        assert classify_residual(NCPoly.word(("A", "B")), rules) == CheckStatus.FAIL

    def test_diagonal_mixed_quadratic_fails(self):
        alphabet = Alphabet([
            Letter("A", Family.LPLUS, index=(1, 1), position=0, weight=3),
            Letter("B", Family.LMINUS, index=(1, 1), position=1, weight=3),
        ])
        rules = RuleSet(alphabet)
        assert classify_residual(NCPoly.word(("A", "B"), k), rules) == CheckStatus.FAIL

    def test_cubic_inconclusive(self):
        """L 次數 3 的殘差不判 FAIL"""
        alphabet = Alphabet([
            Letter("A", Family.LPLUS, index=(1, 2), position=0, weight=3),
            Letter("B", Family.LPLUS, index=(2, 2), position=1, weight=3),
        ])
        rules = RuleSet(alphabet)
        assert classify_residual(NCPoly.word(("A", "B", "A")), rules) == CheckStatus.INCONCLUSIVE

    def test_opaque_blocks(self):
        alphabet = Alphabet([
            Letter("A", Family.LPLUS, index=(1, 2), position=0, weight=3),
            Letter("r", Family.AUX, position=0, weight=1),
        ])
        rules = RuleSet(alphabet, opaque={"r"})
        assert classify_residual(NCPoly.word(("r", "A")), rules) == CheckStatus.INCONCLUSIVE


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
