"""
Heisenberg 代數與其交叉積的 *-結構
x、∂ 逐字母指定；根字母的 * 由其原始元素推得：b* = c·b 給 r* = c^(1/k) r，
NF(b*·b) = c 給 r* = c^(1/k) r^-1
"""

from typing import Dict, List

from core.ncpoly import NCPoly
from core.rewriting import RootNotAdjoinableError, RuleSet, apply_map, root_of_scaling
from core.scalar import ONE, REAL_Q, UNIT_CIRCLE, Scalar, qpow
from presets.euclid.stars import StarConstructionError, StarStructure

from .algebra import LAMBDA, HeisenbergPreset, HeisRoot, d_name, frt_name, in_borel, laplacian, x_name


HEIS_STAR_MODES = {
    "heis-unit": UNIT_CIRCLE,
    "heis-real": REAL_Q,
}


def derivative_scale(preset: HeisenbergPreset, i: int) -> Scalar:
    """
    |q|=1 時 ∂_i* = −c_i ∂_i

    sl: c_i = q^(2ε(N−i+1))；so: c_i = q^(ε(N+2ρ_i))
    """
    eps = preset.epsilon
    if preset.case == "sl":
        return qpow(2 * eps * (preset.N - i + 1))
    return qpow(eps * (preset.N + 2 * preset.scheme.weights[i]))


def _unit_mapping(preset: HeisenbergPreset) -> Dict[str, NCPoly]:
    mapping = {}
    for i in preset.scheme.indices:
        mapping[x_name(i)] = preset.x(i)
        mapping[d_name(i)] = preset.d(i).scale(-derivative_scale(preset, i))
    return mapping


def _real_mapping(preset: HeisenbergPreset) -> Dict[str, NCPoly]:
    """
    (x^h)* = g_{-h,h} x^{-h}
    ∂_i* = −λ^-4 / (q^(εN) + q^(2ε)) · [g^{jh}∂_h∂_j, x^i]
    """
    if preset.case != "so":
        raise StarConstructionError(f"heis-real 只定義在 so 上，得到 {preset.scheme.label}")
    g = preset.metric
    eps = preset.epsilon
    factor = -ONE / (qpow(eps * preset.N) + qpow(2 * eps))
    lam = preset.root(LAMBDA, -4)
    lap = laplacian(preset.scheme)
    mapping = {}
    for i in preset.scheme.indices:
        mapping[x_name(i)] = preset.x(-i).scale(g.g(-i, i))
        bracket = preset.nf(lap, preset.x(i)) - preset.nf(preset.x(i), lap)
        mapping[d_name(i)] = preset.nf(lam, bracket).scale(factor)
    return mapping


def root_star(info: HeisRoot, mapping: Dict[str, NCPoly], rules: RuleSet, mode: str) -> Dict[str, NCPoly]:
    """
    由原始元素 b 推出根字母 r（r^k ≡ b）的 *

    Raises:
        StarConstructionError: b* 不是 b 的倍數也不是 b 的倒數倍
    """
    base = rules.normal_form(info.raw)
    image = apply_map(mapping, info.raw, rules, anti=True, conj_mode=mode)
    lead, c_lead = base.leading(rules.alphabet)
    ratio = image.coeff(lead) / c_lead
    try:
        if ratio and rules.normal_form(image - base.scale(ratio)).is_zero():
            d = root_of_scaling(ratio, info.k, info.name)
            return {info.name: NCPoly.letter(info.name, d), info.inverse: NCPoly.letter(info.inverse, ONE / d)}
        product = rules.nf(image, base)
        c = product.constant()
        if c and (product - NCPoly.const(c)).is_zero():
            d = root_of_scaling(c, info.k, info.name)
            return {info.name: NCPoly.letter(info.inverse, d), info.inverse: NCPoly.letter(info.name, ONE / d)}
    except RootNotAdjoinableError as e:
        raise StarConstructionError(str(e)) from e
    raise StarConstructionError(f"{info.name}: 原始元素的 * 不是其倍數或倒數倍")


def _frt_mapping(preset: HeisenbergPreset, mode: str) -> Dict[str, NCPoly]:
    """
    |q|=1：sl 為 (L^i_j)* = q^(i−j) L^i_j，so 為 q^(2(ρ_i − ρ_j)) L^i_j
    q 實數：(L^±^i_j)* = g_{i,-i} L^∓^{-i}_{-j} g^{-j,j}
    """
    mapping: Dict[str, NCPoly] = {}
    scheme = preset.scheme
    for (sign, i, j), name in preset.frt_letters().items():
        if mode == UNIT_CIRCLE:
            if preset.case == "sl":
                c = qpow(i - j)
            else:
                c = qpow(2 * (scheme.weights[i] - scheme.weights[j]))
            mapping[name] = NCPoly.letter(name, c)
        else:
            other = "-" if sign == "+" else "+"
            if not in_borel(scheme, other, -i, -j):
                raise StarConstructionError(f"{name} 的 * 影像不在對應的 Borel 子代數中")
            g = preset.metric
            mapping[name] = NCPoly.letter(frt_name(other, -i, -j), g.g(i, -i) * g.ginv(-j, j))
    return mapping


def build_heis_star(name: str, preset: HeisenbergPreset, cross: bool = False) -> StarStructure:
    """
    建構 heis-unit / heis-real；cross=True 時作用於交叉積（加上 L 字母的 *）

    Raises:
        StarConstructionError: 名稱未知、模式不支援或根字母的 * 推不出來
    """
    if name not in HEIS_STAR_MODES:
        raise StarConstructionError(f"未知的 *-結構: {name}")
    mode = HEIS_STAR_MODES[name]
    mapping = _unit_mapping(preset) if mode == UNIT_CIRCLE else _real_mapping(preset)
    for info in preset.roots.values():
        mapping.update(root_star(info, mapping, preset.rules, mode))
    if not cross:
        return StarStructure(name, mode, mapping, preset.rules)
    mapping.update(_frt_mapping(preset, mode))
    return StarStructure(f"{name}-cross", mode, mapping, preset.cross_rules)


def heis_stars_for(preset: HeisenbergPreset) -> List[str]:
    return ["heis-unit", "heis-real"] if preset.case == "so" else ["heis-unit"]


__all__ = [
    "HEIS_STAR_MODES", "build_heis_star", "derivative_scale", "heis_stars_for", "root_star",
]
