"""
測試歐氏量子空間與交叉積預設

涵蓋：
  - so3 的二次規則與根字母
  - P² 的中心性
  - γ 拆分的約束、覆寫檔與實性搜尋
  - 索引組取樣
  - *-結構的建構錯誤
  - 混合交換規則的負控制組
  - 對極與其逆、交叉積臨界對的篩選
  - φ(S L) 的穿越關係與 ζ8 反同態的清除因子
"""

import pytest

from core.ncpoly import NCPoly
from core.report import CheckStatus
from core.scalar import ONE, equal, q
from presets.euclid.algebra import (
    CARTAN, CARTAN_INV, build_cross, build_euclid, center_instances, coord_name, crossing_instances,
    eta, in_borel, root_name,
)
from presets.euclid.batteries import (
    Sampling, homomorphism_instances, reading_consistency, reading_tally, variant_instances,
)
from presets.euclid.decouple import (
    DecoupleContext, Zeta, default_gamma, k_degree, load_gamma, real_gamma_search, real_q_gamma,
    sample_instances, shift_past,
)
from presets.euclid.engine import is_cross_overlap
from presets.euclid.stars import StarConstructionError, build_star, stars_for
from utils.config_loader import ConfigError


@pytest.fixture(scope='module')
def euclid3():
    return build_euclid(3)


@pytest.fixture(scope='module')
def cross3(euclid3):
    return build_cross(3, euclid=euclid3)


@pytest.fixture(scope='module')
def ctx3(cross3):
    return DecoupleContext(cross3, default_gamma(3))


# ── 歐氏量子空間 ───────────────────────────────────────────────────────────────

class TestEuclid:

    def test_quadratic_rules(self, euclid3):
        """so3 的 P_a 秩 3"""
        assert euclid3.quadratic_rules == 3
        assert euclid3.preset_id == "euclid:so3"

    def test_roots(self, euclid3):
        assert set(euclid3.roots) == {0, 1}
        assert euclid3.roots[0].name == root_name(0)
        assert euclid3.roots[0].k == 2
        assert euclid3.roots[1].k == 4

    def test_p0_is_root_squared(self, euclid3):
        assert euclid3.nf(euclid3.p(0)).terms == euclid3.root(0, 2).terms

    def test_coord_inverse(self, euclid3):
        """p⁰ (p⁰)^(-1) = 1"""
        assert euclid3.nf(euclid3.p(0), euclid3.coord_inverse(0)).terms == NCPoly.one().terms

    def test_no_inverse_for_p1(self, euclid3):
        with pytest.raises(ValueError):
            euclid3.coord_inverse(1)

    def test_center(self, euclid3):
        for check_id, check in center_instances(euclid3):
            assert check().status == CheckStatus.PASS, check_id

    def test_coordinates_listed(self, euclid3):
        assert euclid3.coords() == [coord_name(-1), coord_name(0), coord_name(1)]

    def test_even_has_cartan(self):
        euclid4 = build_euclid(4)
        assert CARTAN in euclid4.rules.alphabet
        assert CARTAN_INV in euclid4.rules.alphabet
        assert 0 not in euclid4.roots


class TestHelpers:

    def test_eta(self):
        assert (eta(1), eta(-1), eta(0), eta(2)) == (1, -1, 0, 0)

    def test_borel(self):
        assert in_borel("+", -1, 1)
        assert not in_borel("+", 1, -1)
        assert in_borel("-", 1, -1)

    def test_zeta_shift(self):
        assert Zeta("+", 1, -1).shift == 2
        assert Zeta("-", 0, 0).shift == 0

    def test_k_degree(self):
        assert k_degree((CARTAN, CARTAN_INV, CARTAN, "p[1]")) == 1
        assert k_degree(("p[1]",)) == 0

    def test_shift_past(self):
        poly = NCPoly({(CARTAN, "p[1]"): ONE, ("p[1]",): ONE})
        shifted = shift_past(poly, 1)
        assert equal(shifted.coeff((CARTAN, "p[1]")), q)
        assert shifted.coeff(("p[1]",)) == ONE
        assert shift_past(poly, 0) is poly

    def test_reading_tally(self):
        class _Check:
            def __init__(self, detail):
                self.detail = detail

        checks = [_Check("reading=literal"), _Check("reading=collapsed"), _Check("reading=collapsed"), _Check("")]
        assert reading_tally(checks) == {"literal": 1, "collapsed": 2}

    def test_reading_consistency(self):
        """同一套件內兩種讀法都出現時判 FAIL"""
        class _Check:
            def __init__(self, detail):
                self.detail = detail

        mixed = reading_consistency([_Check("reading=literal"), _Check("reading=collapsed")])
        assert mixed.id == "reading-consistency"
        assert mixed.status == CheckStatus.FAIL

        single = reading_consistency([_Check("reading=collapsed"), _Check("reading=collapsed"), _Check("")])
        assert single.status == CheckStatus.PASS
        assert single.detail == "一致讀法: collapsed"

        assert reading_consistency([]).status == CheckStatus.PASS


# ── γ ────────────────────────────────────────────────────────────────────────

class TestGamma:

    @pytest.mark.parametrize("N", [3, 4, 5, 6])
    def test_default_valid(self, N):
        gamma = default_gamma(N)
        assert gamma.valid, gamma.violations()

    @pytest.mark.parametrize("N", [3, 4, 5])
    def test_real_valid(self, N):
        gamma = real_q_gamma(N)
        assert gamma.valid, gamma.violations()
        assert gamma.label == "real"

    def test_load_named(self):
        assert load_gamma(3, "default").label == "default"
        assert load_gamma(3, "").label == "default"
        assert load_gamma(3, "real").label == "real"

    def test_override_file(self, tmp_path):
        path = tmp_path / "gamma.yaml"
        path.write_text('gamma:\n  0: "( 1 ) / ( 1 )"\n', encoding="utf-8")
        gamma = load_gamma(3, str(path))
        assert equal(gamma.gamma[0], ONE)
        assert "γ_0" in gamma.violations()
        # 未列出的索引沿用預設
        assert equal(gamma.gamma[1], default_gamma(3).gamma[1])

    def test_override_out_of_range(self, tmp_path):
        path = tmp_path / "gamma.yaml"
        path.write_text('gamma:\n  5: "( 1 ) / ( 1 )"\n', encoding="utf-8")
        with pytest.raises(ConfigError):
            load_gamma(3, str(path))

    def test_override_missing_section(self, tmp_path):
        path = tmp_path / "gamma.yaml"
        path.write_text('gamma_bar:\n  0: "( 1 ) / ( 1 )"\n', encoding="utf-8")
        with pytest.raises(ConfigError):
            load_gamma(3, str(path))

    def test_override_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_gamma(3, str(tmp_path / "nope.yaml"))

    def test_to_dict(self):
        doc = default_gamma(4).to_dict()
        assert doc["label"] == "default"
        assert doc["violations"] == []
        assert set(doc["gamma"]) == {"-2", "-1", "1", "2"}

    def test_real_search_keys(self):
        assert set(real_gamma_search(3)) == {1}

    def test_context_rejects_mismatched_n(self, cross3):
        with pytest.raises(ConfigError):
            DecoupleContext(cross3, default_gamma(5))


# ── 取樣 ───────────────────────────────────────────────────────────────────────

class TestSampling:

    def test_exhaustive(self):
        tuples = sample_instances((-1, 0, 1), 4, True, seed=1)
        assert len(tuples) == 81

    def test_window_only(self):
        """so7 的索引 −3..3，窗口 2 → 每個分量 5 種"""
        tuples = sample_instances(range(-3, 4), 2, False, seed=1, window=2, extra=0)
        assert len(tuples) == 25
        assert all(abs(i) <= 2 for t in tuples for i in t)

    def test_extra_deterministic(self):
        indices = range(-3, 4)
        first = sample_instances(indices, 3, False, seed=7, extra=20)
        assert first == sample_instances(indices, 3, False, seed=7, extra=20)
        assert first == sorted(set(first))

    def test_sampling_dataclass(self):
        sampling = Sampling(exhaustive=False, seed=3, window=1, extra=0)
        assert sampling.tuples((-2, -1, 1, 2), 2) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


# ── *-結構 ─────────────────────────────────────────────────────────────────────

class TestStars:

    def test_stars_for(self, euclid3, cross3):
        assert stars_for(euclid3) == ["euclid-unit", "euclid-real"]
        assert stars_for(cross3) == ["frt-noncompact", "frt-compact"]

    def test_unknown_star(self, euclid3):
        with pytest.raises(StarConstructionError):
            build_star("euclid-complex", euclid3)

    def test_frt_needs_cross(self, euclid3):
        with pytest.raises(StarConstructionError):
            build_star("frt-compact", euclid3)

    def test_unit_star_fixes_coordinates(self, euclid3):
        star = build_star("euclid-unit", euclid3)
        assert star.letter(coord_name(1)).terms == euclid3.p(1).terms

    def test_involution(self, euclid3):
        star = build_star("euclid-unit", euclid3)
        for name in euclid3.coords():
            assert star.involution_check(name).status == CheckStatus.PASS


# ── 交叉積 ─────────────────────────────────────────────────────────────────────

class TestCross:

    def test_preset_id(self, cross3):
        assert cross3.preset_id == "cross:so3"

    def test_zero_pattern(self, cross3):
        assert cross3.frt("+", 1, -1).is_zero()
        assert not cross3.frt("-", 1, -1).is_zero()

    def test_coordinate_crossing(self, cross3):
        checks = [(cid, c) for cid, c in crossing_instances(cross3) if cid.startswith("gio")]
        assert checks
        for check_id, check in checks:
            assert check().status == CheckStatus.PASS, check_id

    def test_tampered_swap_differs(self, cross3):
        """混合交換右側改用 \\hat R 後，至少一組 L⁻L⁺ 的正規形不同"""
        tampered = build_cross(3, tamper_swap=True)
        assert tampered.rules.meta["params"]["tamper_swap"] is True
        differs = False
        for (sign, b, y), minus in cross3.frt_letters.items():
            if sign != "-":
                continue
            for (sign2, a, x), plus in cross3.frt_letters.items():
                if sign2 != "+":
                    continue
                word = NCPoly.word((minus, plus))
                if (cross3.rules.normal_form(word) - tampered.rules.normal_form(word)).terms:
                    differs = True
        assert differs

    def test_antipode_inverse_undoes_antipode(self, cross3):
        """S^(-1)(S L^a_b) = L^a_b"""
        for (sign, a, b), name in cross3.frt_letters.items():
            image = cross3.frt_letters[(sign, -b, -a)]
            forward = cross3.antipode(sign, a, b).coeff((image,))
            back = cross3.antipode_inverse(sign, -b, -a).coeff((name,))
            assert equal(forward * back, ONE), (sign, a, b)

    def test_p0_root_is_opaque(self, cross3):
        assert root_name(0) in cross3.rules.opaque

    def test_cross_overlap_words(self, cross3):
        rules = cross3.rules
        p1, p0 = coord_name(1), coord_name(0)
        lp = cross3.frt_letters[("+", 1, 1)]
        lm = cross3.frt_letters[("-", 1, 1)]
        assert is_cross_overlap((p1, p0, coord_name(-1)), rules)
        assert is_cross_overlap((p1, p0, lp), rules)
        assert is_cross_overlap((p1, lm, lp), rules)
        assert not is_cross_overlap((root_name(0), root_name(1), lp), rules)
        assert not is_cross_overlap((lp, p1, p0), rules)
        assert not is_cross_overlap((p1, lp), rules)


# ── 解耦映射的實例 ───────────────────────────────────────────────────────────

class TestDecouplingBatteries:

    @pytest.fixture(scope='class')
    def homomorphism(self, ctx3):
        return dict(homomorphism_instances(ctx3, Sampling(exhaustive=True)))

    def test_only_same_sign_frt(self, homomorphism):
        """φ⁺、φ⁻ 各自只代入自己的 Borel 關係"""
        assert not [cid for cid in homomorphism if cid.startswith(("frt[+-", "frt[-+", "diag-inverse"))]
        assert any(cid.startswith("frt[++") for cid in homomorphism)
        assert any(cid.startswith("frt[--") for cid in homomorphism)

    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_crossing_s(self, homomorphism, sign):
        """φ(S L) 與座標的穿越關係，兩個符號都成立"""
        checks = {cid: check for cid, check in homomorphism.items() if cid.startswith(f"crossing-S[{sign},")}
        assert checks
        for check_id, check in checks.items():
            assert check().status == CheckStatus.PASS, check_id

    def test_pair_multiplier_doubles(self, ctx3):
        (single,) = ctx3.opaque_multiplier().terms
        (pair,) = ctx3.opaque_multiplier(2).terms
        assert single
        assert len(pair) == 2 * len(single)
        assert set(pair) == set(single)

    def test_zeta8_anti_decided(self, ctx3):
        """兩個影像相乘含兩份不透明根的逆元，清除後可判定"""
        anti = [(cid, c) for cid, c in variant_instances(ctx3, Sampling(exhaustive=True))
                if cid.startswith("zeta8-anti[")]
        assert anti
        for check_id, check in anti:
            assert check().status == CheckStatus.PASS, check_id


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
