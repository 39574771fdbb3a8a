"""
Heisenberg 代數上的 φ 影像
sl2、so3（ε = +1）的 U_q g → D_{ε,g} 同態；φ(SL) 由三角反矩陣得出，ζ(L^i_j) = Σ L^i_h φ(SL^h_j)

影像中需要未加入的根（例如 M^-1）時記為 None，相關檢查判 INCONCLUSIVE。
"""

from typing import Callable, Dict, Optional, Tuple

from core.ncpoly import NCPoly
from core.scalar import I, ONE, Scalar, format_scalar, k, q, spow

from .algebra import LAMBDA, M_LETTER, SHIPPED, SIGNS, SQRT_B, HeisenbergPreset, completion_raw, in_borel


Image = Optional[NCPoly]
ImageKey = Tuple[str, int, int]

ALPHAS: Dict[str, Scalar] = {"1": ONE, "-1": -ONE, "i": I, "-i": -I}


class ImagesNotShippedError(ValueError):
    """沒有提供此 (case, N, ε) 的 φ 影像"""


def parse_alpha(label: str) -> Scalar:
    """
    Raises:
        ValueError: 不是 ±1、±i
    """
    try:
        return ALPHAS[label.strip().lower()]
    except KeyError:
        raise ValueError(f"α 只能是 {', '.join(ALPHAS)}，得到 {label}") from None


def alpha_label(alpha: Scalar) -> str:
    for label, value in ALPHAS.items():
        if value == alpha:
            return label
    return format_scalar(alpha)


def images_shipped(preset: HeisenbergPreset) -> bool:
    return (preset.case, preset.N) in SHIPPED and preset.epsilon == 1


def _product(preset: HeisenbergPreset) -> Callable[..., Image]:
    """任一因子為 None 時結果為 None"""
    def product(coeff: Scalar, *factors: Image) -> Image:
        if any(f is None for f in factors):
            return None
        return preset.nf(*factors).scale(coeff)
    return product


def _optional_root(preset: HeisenbergPreset, kind: str, exponent: int) -> Image:
    return preset.root(kind, exponent) if preset.has_root(kind) else None


def _sl2_images(preset: HeisenbergPreset, alpha: Scalar) -> Dict[ImageKey, Image]:
    """
    D = α Λ^(1/2) B^(1/2) = α λ^-1 √B
    φ(L⁺¹₁) = φ(L⁻²₂) = D，φ(L⁻¹₁) = φ(L⁺²₂) = D^-1
    """
    x, d = preset.x, preset.d
    mul = _product(preset)
    lam, lam_inv = preset.root(LAMBDA, 1), preset.root(LAMBDA, -1)
    sb, sb_inv = _optional_root(preset, SQRT_B, 1), _optional_root(preset, SQRT_B, -1)

    diag = mul(alpha, lam_inv, sb)
    diag_inv = mul(ONE / alpha, sb_inv, lam)
    return {
        ("+", 1, 1): diag,
        ("+", 2, 2): diag_inv,
        ("+", 1, 2): mul(-alpha * k / q, lam_inv, sb_inv, x(1), d(2)),
        ("-", 1, 1): diag_inv,
        ("-", 2, 2): diag,
        ("-", 2, 1): mul(alpha * k * q ** 3, lam_inv, sb_inv, x(2), d(1)),
    }


def _so3_images(preset: HeisenbergPreset, alpha: Scalar) -> Dict[ImageKey, Image]:
    """
    Λ = λ^-2；M 的原始元素不需要根字母，只有 M^-1 需要

    φ(L⁺⁻₋) = φ(L⁻⁺₊) = −αΛM，φ(L⁺⁺₊) = φ(L⁻⁻₋) = −α^-1 M^-1 Λ^-1
    """
    x, d = preset.x, preset.d
    mul = _product(preset)
    big = preset.root(LAMBDA, -2)
    big_inv = preset.root(LAMBDA, 2)
    m = preset.root(M_LETTER, 1) if preset.has_root(M_LETTER) else preset.rules.normal_form(
        completion_raw(preset.scheme, M_LETTER))
    m_inv = _optional_root(preset, M_LETTER, -1)
    sq = spow(1)

    upper_shift = x(-1) * d(0) - (x(0) * d(1)).scale(sq)
    lower_shift = x(0) * d(-1) - (x(1) * d(0)).scale(sq)

    corner = mul(-alpha, big, m)
    corner_inv = mul(-ONE / alpha, m_inv, big_inv)
    plus_mid = mul(alpha * k, big, upper_shift)
    plus_right = mul(-ONE / sq, corner_inv, plus_mid)
    minus_mid = mul(-alpha * q ** 2 * k, corner_inv, big, lower_shift)
    minus_low = mul(-alpha * q * sq * k, big, lower_shift)

    one = NCPoly.one()
    return {
        ("+", -1, -1): corner,
        ("+", -1, 0): plus_mid,
        ("+", -1, 1): mul(ONE / (ONE + ONE / q), plus_mid, plus_right),
        ("+", 0, 0): one,
        ("+", 0, 1): plus_right,
        ("+", 1, 1): corner_inv,
        ("-", -1, -1): corner_inv,
        ("-", 0, -1): minus_mid,
        ("-", 1, -1): mul(ONE / (ONE + q), minus_low, minus_mid),
        ("-", 0, 0): one,
        ("-", 1, 0): minus_low,
        ("-", 1, 1): corner,
    }


class HeisImages:
    """
    φ_α、φ_α(SL) 與 ζ 的影像快取

    φ_α(L^a_b) = α^{d(a,b)} φ_1(L^a_b)，α ∈ {±1, ±i}。

    Raises:
        ImagesNotShippedError: (case, N, ε) 沒有影像
    """

    def __init__(self, preset: HeisenbergPreset, alpha: Scalar = ONE):
        if not images_shipped(preset):
            raise ImagesNotShippedError(f"{preset.preset_id} 沒有提供 φ 影像")
        self.preset = preset
        self.alpha = alpha
        build = _sl2_images if preset.case == "sl" else _so3_images
        self._phi: Dict[ImageKey, Image] = build(preset, alpha)
        self._phi_s: Dict[ImageKey, Image] = {}
        for sign in SIGNS:
            self._phi_s.update(self._triangular_inverse(sign))
        self._zeta: Dict[ImageKey, Image] = {}

    @property
    def scheme(self):
        return self.preset.scheme

    @property
    def label(self) -> str:
        return alpha_label(self.alpha)

    def phi(self, sign: str, i: int, j: int) -> Image:
        if not in_borel(self.scheme, sign, i, j):
            return NCPoly()
        return self._phi[(sign, i, j)]

    def phi_S(self, sign: str, i: int, j: int) -> Image:
        if not in_borel(self.scheme, sign, i, j):
            return NCPoly()
        return self._phi_s[(sign, i, j)]

    def missing(self) -> Dict[ImageKey, bool]:
        """哪些影像因缺根而無法使用"""
        return {key: value is None for key, value in self._phi.items()}

    def _diag_inverse(self, sign: str, i: int) -> Image:
        """φ(L^±^i_i)^-1 = φ(L^∓^i_i)"""
        other = "-" if sign == "+" else "+"
        return self._phi[(other, i, i)]

    def _triangular_inverse(self, sign: str) -> Dict[ImageKey, Image]:
        """
        Σ_h φ(L^i_h) S^h_j = δ^i_j 的三角解

        L⁺：S^i_j = φ(L^i_i)^-1 (δ − Σ_{h>i} φ(L^i_h) S^h_j)
        L⁻：求和改為 h < i
        """
        idx = self.scheme.indices
        nf = self.preset.nf
        out: Dict[ImageKey, Image] = {}
        order = list(reversed(idx)) if sign == "+" else list(idx)
        for j in idx:
            for i in order:
                if not in_borel(self.scheme, sign, i, j):
                    continue
                inv = self._diag_inverse(sign, i)
                acc: Image = NCPoly.one() if i == j else NCPoly()
                for h in idx:
                    if h == i or not in_borel(self.scheme, sign, i, h) or not in_borel(self.scheme, sign, h, j):
                        continue
                    left, right = self._phi[(sign, i, h)], out.get((sign, h, j))
                    if acc is None or left is None or right is None:
                        acc = None
                        break
                    acc = acc - nf(left, right)
                out[(sign, i, j)] = None if inv is None or acc is None else nf(inv, acc)
        return out

    def zeta(self, sign: str, i: int, j: int) -> Image:
        """ζ(L^i_j) = Σ_h L^i_h φ(SL^h_j)，在交叉積規則中化簡"""
        key = (sign, i, j)
        if key in self._zeta:
            return self._zeta[key]
        rules = self.preset.cross_rules
        out: Image = NCPoly()
        for h in self.scheme.indices:
            if not in_borel(self.scheme, sign, i, h) or not in_borel(self.scheme, sign, h, j):
                continue
            tail = self._phi_s[(sign, h, j)]
            if tail is None:
                out = None
                break
            out = out + rules.nf(self.preset.frt(sign, i, h), tail)
        self._zeta[key] = out
        return out


__all__ = [
    "ALPHAS", "HeisImages", "Image", "ImagesNotShippedError", "alpha_label", "images_shipped",
    "parse_alpha",
]
