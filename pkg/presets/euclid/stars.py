"""
*-結構
歐氏量子空間與 FRT 生成元的反線性反同態：逐字母指定，係數依模式取共軛
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple, Union

from core.ncpoly import Family, NCPoly
from core.report import CheckResult, CheckStatus
from core.rewriting import RuleSet, apply_map, identity_check
from core.scalar import REAL_Q, UNIT_CIRCLE, qpow

from .algebra import CrossPreset, EuclidPreset, in_borel


STAR_MODES = {
    "euclid-unit": UNIT_CIRCLE,
    "euclid-real": REAL_Q,
    "frt-noncompact": UNIT_CIRCLE,
    "frt-compact": REAL_Q,
}


class StarConstructionError(ValueError):
    """*-結構不是對合或不保持定義關係"""


@dataclass
class StarStructure:
    """逐字母的 * 指定（反同態延拓，係數取共軛）"""
    name: str
    mode: str
    mapping: Dict[str, NCPoly]
    rules: RuleSet = field(repr=False)

    def apply(self, poly: NCPoly) -> NCPoly:
        return apply_map(self.mapping, poly, self.rules, anti=True, conj_mode=self.mode)

    def letter(self, name: str) -> NCPoly:
        return self.apply(NCPoly.letter(name))

    def involution_check(self, name: str) -> CheckResult:
        u = NCPoly.letter(name)
        residual = self.rules.normal_form(self.apply(self.apply(u)) - u)
        return identity_check("", residual, self.rules)

    def relation_check(self, lhs, rhs: NCPoly) -> CheckResult:
        residual = self.apply(NCPoly.word(lhs)) - self.apply(rhs)
        return identity_check("", self.rules.normal_form(residual), self.rules)

    def instances(self) -> List[Tuple[str, Callable[[], CheckResult]]]:
        """對合與每條規則的檢查實例"""
        out = []
        for name in self.rules.alphabet.names():
            out.append((f"{self.name}:involution[{name}]", lambda name=name: self.involution_check(name)))
        for n, (lhs, rhs) in enumerate(self.rules.sorted_rules()):
            label = "·".join(lhs)
            out.append((f"{self.name}:relation[{n:04d}:{label}]",
                        lambda lhs=lhs, rhs=rhs: self.relation_check(lhs, rhs)))
        return out

    def verify(self) -> None:
        """
        Raises:
            StarConstructionError: 第一個不成立的對合或關係
        """
        for check_id, check in self.instances():
            result = check()
            if result.status == CheckStatus.FAIL:
                raise StarConstructionError(f"{check_id}: {result.detail}")


def _euclid_mapping(euclid: EuclidPreset, mode: str) -> Dict[str, NCPoly]:
    """座標：|q|=1 時 p* = p；q 實數時 (p^i)* = g_{-i,i} p^{-i}；根與 Cartan 字母自伴"""
    mapping: Dict[str, NCPoly] = {}
    for i in euclid.scheme.indices:
        name = euclid.coords()[euclid.scheme.indices.index(i)]
        if mode == UNIT_CIRCLE:
            mapping[name] = NCPoly.letter(name)
        else:
            mapping[name] = euclid.p(-i).scale(euclid.metric.g(-i, i))
    for letter in euclid.rules.alphabet:
        if letter.family in (Family.AUX, Family.CARTAN):
            mapping[letter.name] = NCPoly.letter(letter.name)
    return mapping


def _frt_mapping(cross: CrossPreset, mode: str) -> Dict[str, NCPoly]:
    """
    |q|=1：(L^±^i_j)* = U^(-1)^i_i L^±^i_j U^j_j = q^(2(ρ_i − ρ_j)) L^±^i_j
    q 實數：(L^±^i_j)* = g_{i,-i} L^∓^{-i}_{-j} g^{-j,j}
    """
    rho = cross.scheme.weights
    g = cross.metric
    mapping: Dict[str, NCPoly] = {}
    for (sign, i, j), name in cross.frt_letters.items():
        if mode == UNIT_CIRCLE:
            mapping[name] = NCPoly.letter(name, qpow(2 * (rho[i] - rho[j])))
        else:
            other = "-" if sign == "+" else "+"
            if not in_borel(other, -i, -j):
                raise StarConstructionError(f"{name} 的 * 影像不在對應的 Borel 子代數中")
            mapping[name] = cross.frt(other, -i, -j).scale(g.g(i, -i) * g.ginv(-j, j))
    return mapping


def build_star(name: str, preset: Union[EuclidPreset, CrossPreset], verify: bool = False) -> StarStructure:
    """
    建構指定的 *-結構

    euclid-* 作用於歐氏量子空間（給交叉積時只取其 A 部分）；frt-* 作用於交叉積，
    座標部分沿用同模式的歐氏 *。

    Raises:
        StarConstructionError: 名稱與預設不相容，或 verify=True 時檢查失敗
    """
    if name not in STAR_MODES:
        raise StarConstructionError(f"未知的 *-結構: {name}")
    mode = STAR_MODES[name]
    if name.startswith("euclid"):
        euclid = preset.euclid if isinstance(preset, CrossPreset) else preset
        star = StarStructure(name, mode, _euclid_mapping(euclid, mode), euclid.rules)
    else:
        if not isinstance(preset, CrossPreset):
            raise StarConstructionError(f"{name} 需要交叉積預設")
        mapping = _euclid_mapping(preset.euclid, mode)
        mapping.update(_frt_mapping(preset, mode))
        star = StarStructure(name, mode, mapping, preset.rules)
    if verify:
        star.verify()
    return star


def stars_for(preset: Union[EuclidPreset, CrossPreset]) -> List[str]:
    if isinstance(preset, CrossPreset):
        return ["frt-noncompact", "frt-compact"]
    return ["euclid-unit", "euclid-real"]


__all__ = ["STAR_MODES", "StarConstructionError", "StarStructure", "build_star", "stars_for"]
