"""
協變 Heisenberg 代數預設
x^i、∂_i 的二次規則、∂x 交換規則、λ = Λ^(-1/2) 等根字母，
以及與 U_q g 交叉積的穿越規則（x 依 ρ(L)，∂ 依 ρ(S^(-1)L)）
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from core.ncpoly import Alphabet, Family, Letter, NCPoly
from core.rewriting import (
    RootNotAdjoinableError, RuleOrderError, RuleSet, ScalingError, adjoin_root,
    derive_quadratic_rules, relations_from_matrix,
)
from core.scalar import ONE, omega, q, qpow, spow
from core.tensor import FrtRep, IndexScheme, Mat4, Metric, build_metric, build_rhat, projector, rep_frt


SIGNS = ("+", "-")
L_WEIGHT = 3
LAMBDA = "λ"                 # λ^4 = Λ^(-2)
SQRT_B = "√B"                # √B^2 = 1 + (q²−1)x²∂_2（sl2）
M_LETTER = "M"               # 1 + (q−1)x⁰∂_0 + (q²−1)x⁺∂_+（so3）
SHIPPED = (("sl", 2), ("so", 3))


def x_name(i: int) -> str:
    return f"x[{i}]"


def d_name(i: int) -> str:
    return f"d[{i}]"


def frt_name(sign: str, a: int, b: int) -> str:
    return f"L{sign}[{a},{b}]"


def in_borel(scheme: IndexScheme, sign: str, a: int, b: int) -> bool:
    """L⁺^a_b = 0 若 a > b；L⁻^a_b = 0 若 a < b（依索引在方案中的位置）"""
    pa, pb = scheme.indices.index(a), scheme.indices.index(b)
    return pa <= pb if sign == "+" else pa >= pb


def epsilon_label(epsilon: int) -> str:
    return "eps+1" if epsilon > 0 else "eps-1"


@dataclass
class HeisRoot:
    """已加入的根字母：name^k ≡ raw"""
    kind: str
    name: str
    inverse: str
    raw: NCPoly
    k: int


@dataclass
class HeisenbergPreset:
    scheme: IndexScheme
    epsilon: int
    rhat: Mat4
    rules: RuleSet
    roots: Dict[str, HeisRoot] = field(default_factory=dict)
    skipped: Dict[str, str] = field(default_factory=dict)
    _rep: Optional[FrtRep] = field(default=None, repr=False)
    _cross: Optional[RuleSet] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.scheme.N

    @property
    def case(self) -> str:
        return self.scheme.case

    @property
    def preset_id(self) -> str:
        return f"heis:{self.scheme.label}:{epsilon_label(self.epsilon)}"

    @property
    def metric(self) -> Metric:
        return build_metric(self.scheme)

    def x(self, i: int) -> NCPoly:
        return NCPoly.letter(x_name(i))

    def d(self, i: int) -> NCPoly:
        return NCPoly.letter(d_name(i))

    def generators(self) -> List[str]:
        idx = self.scheme.indices
        return [x_name(i) for i in idx] + [d_name(i) for i in idx]

    def has_root(self, kind: str) -> bool:
        return kind in self.roots

    def root(self, kind: str, exponent: int) -> NCPoly:
        info = self.roots[kind]
        name = info.name if exponent >= 0 else info.inverse
        return NCPoly.word((name,) * abs(exponent))

    def nf(self, *factors: NCPoly) -> NCPoly:
        return self.rules.nf(*factors)

    # ── 表示與交叉積 ──────────────────────────────────────────

    @property
    def rep(self) -> FrtRep:
        """
        基本表示；sl 用 q^(-1/N)\\hat R′ 使 ∏ρ(L^i_i) = 1

        Raises:
            ValueError: q^(1/N) 不在係數體中（sl 只支援 N = 2）
        """
        if self._rep is None:
            mat = self.rhat
            if self.case == "sl":
                if self.N != 2:
                    raise ValueError(f"sl{self.N} 的表示需要 q^(1/{self.N})，不在係數體中")
                mat = mat.scale(spow(-1))
            self._rep = rep_frt(self.scheme, mat)
        return self._rep

    def frt_letters(self) -> Dict[Tuple[str, int, int], str]:
        return {
            (sign, a, b): frt_name(sign, a, b)
            for sign in SIGNS for a, b in self.scheme.pairs
            if in_borel(self.scheme, sign, a, b)
        }

    def frt(self, sign: str, a: int, b: int) -> NCPoly:
        if not in_borel(self.scheme, sign, a, b):
            return NCPoly()
        return NCPoly.letter(frt_name(sign, a, b))

    def crossing_rhs(self, generator: str, i: int, sign: str, a: int, b: int) -> NCPoly:
        """
        x^i L^a_b = Σ L^a_c ρ^i_j(L^c_b) x^j
        ∂_i L^a_b = Σ L^a_c ρ^h_i(S^(-1)L^c_b) ∂_h
        """
        rep = self.rep
        out = NCPoly()
        for c in self.scheme.indices:
            left = self.frt(sign, a, c)
            if not left:
                continue
            if generator == "x":
                block = rep.table(sign).get((c, b), {})
                for (row, col), value in block.items():
                    if row == i:
                        out = out + (left * self.x(col)).scale(value)
            else:
                block = rep.table(sign, "Sinv").get((c, b), {})
                for (row, col), value in block.items():
                    if col == i:
                        out = out + (left * self.d(row)).scale(value)
        return out

    @property
    def cross_rules(self) -> RuleSet:
        """A 的規則加上 x、∂ 穿越 L 的規則（根字母對 L 不透明）"""
        if self._cross is None:
            self._cross = build_cross_rules(self)
        return self._cross


# ─────────────────────────────────────────────────────────────
# 建構
# ─────────────────────────────────────────────────────────────

def _alphabet(scheme: IndexScheme) -> Alphabet:
    """so 的 ∂_i 排在 x^{-i} 的位置（p^i ≡ g^{ij}∂_j），sl 直接依索引"""
    letters = []
    for n, i in enumerate(scheme.indices):
        letters.append(Letter(x_name(i), Family.COORD, index=(i,), position=n))
        dual = scheme.indices.index(-i) if scheme.case == "so" else n
        letters.append(Letter(d_name(i), Family.DERIV, index=(i,), position=dual))
    return Alphabet(letters)


def _derivative_rules(scheme: IndexScheme, rhat: Mat4, epsilon: int) -> List[Tuple[Tuple[str, str], NCPoly]]:
    """∂_i x^j = δ^j_i + (q\\hat R)^ε{}^{jk}_{ih} x^h ∂_k"""
    mat = rhat if epsilon > 0 else rhat.inverse()
    factor = q if epsilon > 0 else ONE / q
    out = []
    for i in scheme.indices:
        for j in scheme.indices:
            rhs = NCPoly.one() if i == j else NCPoly()
            for ((jj, kk), (ii, hh)), value in mat.entries.items():
                if jj == j and ii == i:
                    rhs = rhs + NCPoly.word((x_name(hh), d_name(kk)), factor * value)
            out.append(((d_name(i), x_name(j)), rhs))
    return out


def euler_operator(scheme: IndexScheme) -> NCPoly:
    """x^i ∂_i"""
    return NCPoly({(x_name(i), d_name(i)): ONE for i in scheme.indices})


def radius_squared(scheme: IndexScheme) -> NCPoly:
    """g_{ij} x^i x^j"""
    g = build_metric(scheme)
    return NCPoly({(x_name(i), x_name(-i)): g.g(i, -i) for i in scheme.indices})


def laplacian(scheme: IndexScheme) -> NCPoly:
    """g^{hk} ∂_k ∂_h"""
    g = build_metric(scheme)
    return NCPoly({(d_name(-h), d_name(h)): g.ginv(h, -h) for h in scheme.indices})


def dilatation(scheme: IndexScheme, epsilon: int) -> NCPoly:
    """
    Λ^(-2)（ε = −1 時 q² 換成 q^(-2)）

    sl: 1 + (q²−1) x^i∂_i
    so: 1 + (q²−1) x^i∂_i + (q²−1)²/ω_n² (g x x)(g ∂ ∂)
    """
    c = qpow(2 * epsilon) - ONE
    out = NCPoly.one() + euler_operator(scheme).scale(c)
    if scheme.case == "so":
        w = omega(scheme.weights[scheme.indices[-1]])
        out = out + (radius_squared(scheme) * laplacian(scheme)).scale(c * c / (w * w))
    return out


def completion_raw(scheme: IndexScheme, kind: str) -> NCPoly:
    """φ 影像所需的額外可逆元素"""
    if kind == SQRT_B:
        return NCPoly.one() + NCPoly.word((x_name(2), d_name(2)), q * q - ONE)
    if kind == M_LETTER:
        return (NCPoly.one()
                + NCPoly.word((x_name(0), d_name(0)), q - ONE)
                + NCPoly.word((x_name(1), d_name(1)), q * q - ONE))
    if kind == LAMBDA:
        raise ValueError("λ 的原始元素依 ε 而定，請用 dilatation()")
    raise KeyError(kind)


def _completions(scheme: IndexScheme, epsilon: int) -> List[Tuple[str, int]]:
    """(case, N, ε) 對應要加入的額外根：(字母, 次數)"""
    if epsilon < 0:
        return []
    if (scheme.case, scheme.N) == ("sl", 2):
        return [(SQRT_B, 2)]
    if (scheme.case, scheme.N) == ("so", 3):
        return [(M_LETTER, 1)]
    return []


def build_heisenberg(case: str, N: int, epsilon: int = 1, fuel: int = 1_000_000) -> HeisenbergPreset:
    """
    建構 Heisenberg 代數 D_{ε,g}

    先由 P_a 導出 x-x、∂-∂ 規則並裝上 ∂x 規則，再加入 λ（λ^4 = Λ^(-2)）；
    sl2 / so3 另嘗試加入 √B / M，失敗時只記錄，依賴它的 φ 影像之後會被略過。

    Raises:
        ScalingError, RootNotAdjoinableError: λ 無法加入
    """
    if epsilon not in (1, -1):
        raise ValueError(f"ε 只能是 +1 或 -1，得到 {epsilon}")
    scheme = IndexScheme(case, N)
    rhat = build_rhat(scheme)
    alphabet = _alphabet(scheme)
    preset_id = f"heis:{scheme.label}:{epsilon_label(epsilon)}"
    rules = RuleSet(alphabet, fuel=fuel,
                    meta={"preset": preset_id, "params": {"case": case, "N": N, "epsilon": epsilon}})

    p_a = projector(scheme, "a", rhat)
    quadratic = derive_quadratic_rules(relations_from_matrix(p_a, x_name), alphabet)
    quadratic += derive_quadratic_rules(relations_from_matrix(p_a, d_name, reverse=True), alphabet)
    for lhs, rhs in quadratic:
        rules.add_rule(lhs, rhs)
    for lhs, rhs in _derivative_rules(scheme, rhat, epsilon):
        rules.add_rule(lhs, rhs)
    rules.inter_reduce()
    rules.meta["notes"] = {"quadratic_rules": len(quadratic), "roots": [], "skipped": {}}

    preset = HeisenbergPreset(scheme, epsilon, rhat, rules)
    raw = dilatation(scheme, epsilon)
    root, preset.rules = adjoin_root(raw, 4, preset.rules, LAMBDA, position=0)
    preset.roots[LAMBDA] = HeisRoot(LAMBDA, root.name, root.inverse, raw, 4)
    preset.rules.meta["notes"]["roots"].append({"kind": LAMBDA, "k": 4})

    for position, (kind, k) in enumerate(_completions(scheme, epsilon), start=1):
        raw = completion_raw(scheme, kind)
        try:
            root, extended = adjoin_root(raw, k, preset.rules, kind, position=2 * position)
        except (ScalingError, RootNotAdjoinableError, RuleOrderError) as e:
            preset.skipped[kind] = str(e)
            preset.rules.meta["notes"]["skipped"][kind] = str(e)
            continue
        preset.rules = extended
        preset.roots[kind] = HeisRoot(kind, root.name, root.inverse, raw, k)
        preset.rules.meta["notes"]["roots"].append({"kind": kind, "k": k})
    return preset


def build_cross_rules(preset: HeisenbergPreset) -> RuleSet:
    """交叉積規則：A 的規則 + x/∂ 穿越 L；L 之間不裝規則"""
    letters = [
        Letter(name, Family.LPLUS if sign == "+" else Family.LMINUS, index=(a, b), position=n,
               weight=L_WEIGHT)
        for n, ((sign, a, b), name) in enumerate(sorted(preset.frt_letters().items()))
    ]
    rules = preset.rules.with_alphabet(preset.rules.alphabet.extended(letters))
    rules.meta = {**preset.rules.meta, "preset": preset.preset_id.replace("heis", "heis-cross")}
    for (sign, a, b), name in preset.frt_letters().items():
        for i in preset.scheme.indices:
            rules.add_rule((x_name(i), name), preset.crossing_rhs("x", i, sign, a, b))
            rules.add_rule((d_name(i), name), preset.crossing_rhs("d", i, sign, a, b))
    rules.opaque |= {r.name for r in preset.roots.values()} | {r.inverse for r in preset.roots.values()}
    return rules


def heisenberg_from_rules(case: str, N: int, epsilon: int, rules: RuleSet) -> HeisenbergPreset:
    """以快取規則還原（根字母的原始元素重新計算）"""
    scheme = IndexScheme(case, N)
    preset = HeisenbergPreset(scheme, epsilon, build_rhat(scheme), rules)
    notes = rules.meta.get("notes", {})
    for entry in notes.get("roots", []):
        kind, k = entry["kind"], int(entry["k"])
        raw = dilatation(scheme, epsilon) if kind == LAMBDA else completion_raw(scheme, kind)
        preset.roots[kind] = HeisRoot(kind, kind, rules.alphabet.inverse_of(kind), raw, k)
    preset.skipped = dict(notes.get("skipped", {}))
    return preset


def parse_heis_id(preset: str, default_epsilon: int = 1) -> Tuple[str, int, int]:
    """
    "heis:sl2:eps+1" → ("sl", 2, 1)

    Raises:
        ValueError: 格式錯誤
    """
    parts = preset.split(":")
    if len(parts) not in (2, 3) or parts[0] != "heis":
        raise ValueError(f"Heisenberg 預設格式錯誤: {preset}")
    label = parts[1]
    case, digits = label[:2], label[2:]
    if case not in ("sl", "so") or not digits.isdigit():
        raise ValueError(f"Heisenberg 預設格式錯誤: {preset}")
    epsilon = default_epsilon
    if len(parts) == 3:
        tag = parts[2]
        if tag not in ("eps1", "eps+1", "eps-1"):
            raise ValueError(f"ε 標記錯誤: {tag}")
        epsilon = -1 if tag == "eps-1" else 1
    return case, int(digits), epsilon


__all__ = [
    "HeisRoot", "HeisenbergPreset", "LAMBDA", "M_LETTER", "SHIPPED", "SIGNS", "SQRT_B",
    "build_cross_rules", "build_heisenberg", "completion_raw", "d_name", "dilatation",
    "epsilon_label", "euler_operator", "frt_name", "heisenberg_from_rules", "in_borel",
    "laplacian", "parse_heis_id", "radius_squared", "x_name",
]
