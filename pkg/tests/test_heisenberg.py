"""
測試協變 Heisenberg 代數預設

涵蓋：
  - 預設識別字解析
  - sl2 的 x-x、∂-∂、∂x 規則與 λ 的縮放
  - 根字母與快取還原
  - ∂ 的 * 常數、*-結構的建構錯誤
  - φ 影像的可用性與 α
"""

import pytest

from core.ncpoly import Alphabet, NCPoly
from core.report import CheckResult, CheckStatus
from core.rewriting import RuleSet, derive_scaling
from core.scalar import I, ONE, equal, q, qpow, spow
from core.tensor import IndexScheme, build_rhat
from presets.euclid.stars import StarConstructionError
from presets.heisenberg.algebra import (
    LAMBDA, SQRT_B, HeisenbergPreset, build_heisenberg, d_name, dilatation, frt_name,
    heisenberg_from_rules, in_borel, laplacian, parse_heis_id, radius_squared, x_name,
)
from presets.heisenberg.batteries import admissible_alphas, not_shipped_instance
from presets.heisenberg.images import (
    HeisImages, ImagesNotShippedError, alpha_label, images_shipped, parse_alpha,
)
from presets.heisenberg.stars import build_heis_star, derivative_scale, heis_stars_for


@pytest.fixture(scope='module')
def sl2():
    return build_heisenberg("sl", 2)


# ── 識別字 ─────────────────────────────────────────────────────────────────────

class TestParseId:

    def test_default_epsilon(self):
        assert parse_heis_id("heis:sl2") == ("sl", 2, 1)
        assert parse_heis_id("heis:so3", default_epsilon=-1) == ("so", 3, -1)

    @pytest.mark.parametrize("tag,expected", [("eps+1", 1), ("eps1", 1), ("eps-1", -1)])
    def test_epsilon_tag(self, tag, expected):
        assert parse_heis_id(f"heis:so5:{tag}") == ("so", 5, expected)

    @pytest.mark.parametrize("text", ["heis", "heis:sp4", "heis:so", "euclid:so3", "heis:so3:eps2",
                                      "heis:so3:eps+1:x"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_heis_id(text)

    def test_build_rejects_epsilon(self):
        with pytest.raises(ValueError):
            build_heisenberg("sl", 2, epsilon=0)


# ── 建構元素 ───────────────────────────────────────────────────────────────────

class TestElements:

    def test_dilatation_sl2(self):
        """1 + (q²−1)(x¹∂_1 + x²∂_2)"""
        raw = dilatation(IndexScheme("sl", 2), 1)
        assert len(raw) == 3
        assert equal(raw.coeff((x_name(1), d_name(1))), q * q - ONE)
        assert raw.constant() == ONE

    def test_dilatation_epsilon_minus(self):
        raw = dilatation(IndexScheme("sl", 2), -1)
        assert equal(raw.coeff((x_name(2), d_name(2))), ONE / (q * q) - ONE)

    def test_so3_quadratic_forms(self):
        scheme = IndexScheme("so", 3)
        assert len(radius_squared(scheme)) == 3
        assert len(laplacian(scheme)) == 3
        # so 的 Λ^(-2) 另含 (g x x)(g ∂ ∂)
        assert len(dilatation(scheme, 1)) == 1 + 3 + 9

    def test_borel(self):
        scheme = IndexScheme("so", 3)
        assert in_borel(scheme, "+", -1, 1)
        assert not in_borel(scheme, "+", 1, -1)
        assert in_borel(scheme, "-", 1, -1)
        assert in_borel(scheme, "-", 0, 0)


# ── sl2 規則 ───────────────────────────────────────────────────────────────────

class TestSl2Rules:

    def test_quadratic_count(self, sl2):
        assert sl2.rules.meta["notes"]["quadratic_rules"] == 2

    def test_coordinates(self, sl2):
        """x² x¹ = q^-1 x¹ x²"""
        nf = sl2.nf(sl2.x(2), sl2.x(1))
        assert nf.terms.keys() == {(x_name(1), x_name(2))}
        assert equal(nf.coeff((x_name(1), x_name(2))), ONE / q)

    def test_derivatives(self, sl2):
        """∂_2 ∂_1 = q ∂_1 ∂_2"""
        nf = sl2.nf(sl2.d(2), sl2.d(1))
        assert nf.terms.keys() == {(d_name(1), d_name(2))}
        assert equal(nf.coeff((d_name(1), d_name(2))), q)

    @pytest.mark.parametrize("i,j", [(1, 2), (2, 1)])
    def test_mixed_off_diagonal(self, sl2, i, j):
        """i ≠ j 時 ∂_i x^j = q x^j ∂_i"""
        nf = sl2.nf(sl2.d(i), sl2.x(j))
        assert nf.terms.keys() == {(x_name(j), d_name(i))}
        assert equal(nf.coeff((x_name(j), d_name(i))), q)

    def test_lambda_adjoined(self, sl2):
        assert sl2.has_root(LAMBDA)
        info = sl2.roots[LAMBDA]
        assert info.k == 4
        assert sl2.nf(sl2.root(LAMBDA, 1), sl2.root(LAMBDA, -1)).terms == NCPoly.one().terms

    def test_dilatation_scales_coordinates(self, sl2):
        """Λ^(-2) x = q² x Λ^(-2)"""
        raw = sl2.roots[LAMBDA].raw
        assert equal(derive_scaling(raw, x_name(1), sl2.rules), q * q)

    def test_lambda_moves_past_x(self, sl2):
        """λ x¹ = s x¹ λ"""
        lam = sl2.roots[LAMBDA].name
        nf = sl2.nf(sl2.x(1), sl2.root(LAMBDA, 1))
        assert nf.terms.keys() == {(lam, x_name(1))}
        assert equal(nf.coeff((lam, x_name(1))), spow(-1))

    def test_lambda_power_is_dilatation(self, sl2):
        assert sl2.rules.normal_form(sl2.roots[LAMBDA].raw).terms == sl2.root(LAMBDA, 4).terms

    def test_skipped_roots_recorded(self, sl2):
        """√B 不是加入就是記錄在 skipped"""
        assert sl2.has_root(SQRT_B) != (SQRT_B in sl2.skipped)

    def test_restore_from_rules(self, sl2):
        rules = RuleSet.from_dict(sl2.rules.to_dict())
        restored = heisenberg_from_rules("sl", 2, 1, rules)
        assert set(restored.roots) == set(sl2.roots)
        assert restored.roots[LAMBDA].inverse == sl2.roots[LAMBDA].inverse
        assert restored.skipped == sl2.skipped

    def test_frt_letters(self, sl2):
        letters = sl2.frt_letters()
        assert len(letters) == 6
        assert letters[("+", 1, 2)] == frt_name("+", 1, 2)
        assert sl2.frt("+", 2, 1).is_zero()

    def test_cross_rules_make_roots_opaque(self, sl2):
        cross = sl2.cross_rules
        assert sl2.roots[LAMBDA].name in cross.opaque
        assert len(cross) > len(sl2.rules)


# ── *-結構 ─────────────────────────────────────────────────────────────────────

class TestStars:

    def test_derivative_scale_sl2(self, sl2):
        assert equal(derivative_scale(sl2, 1), qpow(4))
        assert equal(derivative_scale(sl2, 2), qpow(2))

    def test_derivative_scale_so3(self):
        preset = HeisenbergPreset(IndexScheme("so", 3), 1, build_rhat(IndexScheme("so", 3)),
                                  RuleSet(Alphabet()))
        assert equal(derivative_scale(preset, 1), qpow(2))
        assert equal(derivative_scale(preset, 0), qpow(3))
        assert equal(derivative_scale(preset, -1), qpow(4))

    def test_real_star_needs_so(self, sl2):
        with pytest.raises(StarConstructionError):
            build_heis_star("heis-real", sl2)

    def test_unknown_star(self, sl2):
        with pytest.raises(StarConstructionError):
            build_heis_star("heis-imaginary", sl2)

    def test_stars_for(self, sl2):
        assert heis_stars_for(sl2) == ["heis-unit"]


# ── φ 影像 ─────────────────────────────────────────────────────────────────────

class TestImages:

    def test_parse_alpha(self):
        assert parse_alpha("1") == ONE
        assert parse_alpha("-I") == -I
        with pytest.raises(ValueError):
            parse_alpha("2")

    def test_alpha_label(self):
        assert alpha_label(I) == "i"
        assert alpha_label(-ONE) == "-1"
        assert alpha_label(q) == "( s^2 ) / ( 1 )"

    def test_shipped(self, sl2):
        assert images_shipped(sl2)

    def test_not_shipped_for_negative_epsilon(self):
        scheme = IndexScheme("sl", 2)
        preset = HeisenbergPreset(scheme, -1, build_rhat(scheme), RuleSet(Alphabet()))
        assert not images_shipped(preset)
        with pytest.raises(ImagesNotShippedError):
            HeisImages(preset)
        check_id, check = not_shipped_instance(preset)
        assert check_id == "images[heis:sl2:eps-1]"
        assert check().status == CheckStatus.INCONCLUSIVE

    def test_non_borel_image_is_zero(self, sl2):
        images = HeisImages(sl2)
        assert images.phi("+", 2, 1).is_zero()
        assert images.phi_S("-", 1, 2).is_zero()

    def test_diagonal_inverse(self, sl2):
        """φ(L⁺¹₁) φ(SL⁺¹₁) = 1（√B 缺席時影像為 None）"""
        images = HeisImages(sl2)
        diag = images.phi("+", 1, 1)
        if not sl2.has_root(SQRT_B):
            assert diag is None
            return
        assert sl2.nf(diag, images.phi_S("+", 1, 1)).terms == NCPoly.one().terms

    def test_alpha_scales_diagonal(self, sl2):
        if not sl2.has_root(SQRT_B):
            pytest.skip("√B 未加入")
        plain, twisted = HeisImages(sl2), HeisImages(sl2, alpha=I)
        assert twisted.label == "i"
        assert twisted.phi("+", 1, 1).terms == plain.phi("+", 1, 1).scale(I).terms

    def test_admissible_alphas(self):
        checks = [
            CheckResult("alpha[1]:mixed", CheckStatus.PASS),
            CheckResult("alpha[1]:star-unit", CheckStatus.PASS),
            CheckResult("alpha[i]:mixed", CheckStatus.INCONCLUSIVE),
            CheckResult("alpha[-1]:mixed", CheckStatus.PASS),
        ]
        assert admissible_alphas(checks) == ["1", "-1"]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
