"""
歐氏量子空間預設
R_q^N 的二次規則、√P_a / √p⁰ 根、偶數 N 的 Cartan 字母，
以及與 U_q so(N) 兩個 Borel 子代數的交叉積（穿越規則、混合交換規則）
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from core.ncpoly import Alphabet, Family, Letter, NCPoly
from core.report import CheckResult
from core.rewriting import (
    L_FAMILIES, RootNotAdjoinableError, RuleSet, ScalingError, adjoin_root, derive_quadratic_rules,
    derive_scaling, identity_check, install_scaling, relations_from_matrix, root_of_scaling,
)
from core.scalar import ONE, Scalar, format_scalar, monomial_parts, omega, qpow
from core.tensor import IndexScheme, Mat4, Metric, build_metric, build_rhat, projector


CARTAN = "K"                 # L⁻^1_1 = L⁺^{-1}_{-1}
CARTAN_INV = "K^-1"          # L⁺^1_1 = L⁻^{-1}_{-1}
L_WEIGHT = 3
SIGNS = ("+", "-")


def coord_name(i: int) -> str:
    return f"p[{i}]"


def root_name(a: int) -> str:
    return "√p0" if a == 0 else f"√P[{a}]"


def frt_name(sign: str, a: int, b: int) -> str:
    return f"L{sign}[{a},{b}]"


def eta(i: int) -> int:
    """η_i = δ_i^1 − δ_i^{-1}"""
    return (1 if i == 1 else 0) - (1 if i == -1 else 0)


def in_borel(sign: str, a: int, b: int) -> bool:
    """零模式：L⁺^a_b = 0 若 a > b；L⁻^a_b = 0 若 a < b"""
    return a <= b if sign == "+" else a >= b


def cartan_of(sign: str, a: int, b: int) -> Optional[str]:
    """偶數 N 的對角 ±1 生成元對應的 Cartan 字母"""
    if a != b or abs(a) != 1:
        return None
    if sign == "-":
        return CARTAN if a == 1 else CARTAN_INV
    return CARTAN_INV if a == 1 else CARTAN


@dataclass
class RootInfo:
    """已加入的根字母：name^k ≡ raw"""
    a: int
    name: str
    inverse: str
    raw: NCPoly
    k: int


# ─────────────────────────────────────────────────────────────
# 歐氏量子空間
# ─────────────────────────────────────────────────────────────

@dataclass
class EuclidPreset:
    scheme: IndexScheme
    rhat: Mat4
    metric: Metric
    rules: RuleSet
    roots: Dict[int, RootInfo] = field(default_factory=dict)
    quadratic_rules: int = 0

    @property
    def N(self) -> int:
        return self.scheme.N

    @property
    def n(self) -> int:
        return self.scheme.n

    @property
    def odd(self) -> bool:
        return self.scheme.odd

    @property
    def preset_id(self) -> str:
        return f"euclid:so{self.N}"

    def p(self, i: int) -> NCPoly:
        return NCPoly.letter(coord_name(i))

    def coords(self) -> List[str]:
        return [coord_name(i) for i in self.scheme.indices]

    def root(self, a: int, exponent: int) -> NCPoly:
        """(√P_a)^e，a = 0 為 √p⁰"""
        info = self.roots[a]
        name = info.name if exponent >= 0 else info.inverse
        return NCPoly.word((name,) * abs(exponent))

    def P(self, a: int, exponent: int = 1) -> NCPoly:
        """P_a^e；P_0 依慣例為 p⁰（N 奇數）"""
        if a == 0 and not self.odd:
            return NCPoly.one()
        return self.root(a, 2 * exponent)

    def P_squared(self, a: int) -> NCPoly:
        """P_a² = Σ_{|h|≤a} g_{h,-h} p^h p^{-h}（未化簡）"""
        out = NCPoly()
        for h in self.scheme.indices:
            if abs(h) <= a:
                out = out + (self.p(h) * self.p(-h)).scale(self.metric.g(h, -h))
        return out

    def coord_inverse(self, i: int) -> NCPoly:
        """
        (p^i)^(-1)：N 奇數只有 p⁰；N 偶數只有 p^{±1}（P_1² = ω_1 p^{-1}p^1）

        Raises:
            ValueError: 該座標沒有逆元
        """
        if i == 0 and self.odd:
            return self.root(0, -2)
        if abs(i) == 1 and not self.odd:
            w = omega(self.scheme.weights[1])
            return (self.p(-i) * self.root(1, -4)).scale(w)
        raise ValueError(f"p^{i} 在此預設中不可逆")

    def ratio(self, s: int) -> NCPoly:
        """p^{-s}/p^s"""
        return self.p(-s) * self.coord_inverse(s)

    def nf(self, *factors: NCPoly) -> NCPoly:
        return self.rules.nf(*factors)


def _install_cartan_rules(rules: RuleSet, scheme: IndexScheme) -> None:
    """K p^{±1} = q^{±1} p^{±1} K，其餘座標與 K 交換"""
    for i in scheme.indices:
        e = eta(i)
        rules.add_rule((coord_name(i), CARTAN), NCPoly.word((CARTAN, coord_name(i)), qpow(-e)))
        rules.add_rule((coord_name(i), CARTAN_INV), NCPoly.word((CARTAN_INV, coord_name(i)), qpow(e)))
    rules.add_rule((CARTAN, CARTAN_INV), NCPoly.one())
    rules.add_rule((CARTAN_INV, CARTAN), NCPoly.one())


def build_euclid(N: int, fuel: int = 1_000_000) -> EuclidPreset:
    """
    建構擴充的歐氏量子空間

    二次規則由 P_a 的列空間導出；N 奇數先加 √p⁰，再依 a = 1..n 加 √P_a；
    N 偶數另含 Cartan 字母 K = L⁻^1_1 及其逆元。
    """
    scheme = IndexScheme("so", N)
    rhat = build_rhat(scheme)
    metric = build_metric(scheme)
    n = scheme.n

    letters = [
        Letter(coord_name(i), Family.COORD, index=(i,), position=i + n)
        for i in scheme.indices
    ]
    if not scheme.odd:
        letters.append(Letter(CARTAN, Family.CARTAN, index=(1, 1), position=0, inverse=CARTAN_INV))
        letters.append(Letter(CARTAN_INV, Family.CARTAN, index=(-1, -1), position=1, base=CARTAN))
    alphabet = Alphabet(letters)
    rules = RuleSet(alphabet, fuel=fuel, meta={"preset": f"euclid:so{N}", "params": {"N": N}})

    relations = relations_from_matrix(projector(scheme, "a", rhat), coord_name)
    quadratic = derive_quadratic_rules(relations, alphabet)
    rules.meta["notes"] = {"quadratic_rules": len(quadratic)}
    for lhs, rhs in quadratic:
        rules.add_rule(lhs, rhs)
    if not scheme.odd:
        _install_cartan_rules(rules, scheme)

    preset = EuclidPreset(scheme, rhat, metric, rules, quadratic_rules=len(quadratic))
    if scheme.odd:
        raw = preset.p(0)
        root, preset.rules = adjoin_root(raw, 2, preset.rules, root_name(0), position=2 * n)
        preset.roots[0] = RootInfo(0, root.name, root.inverse, raw, 2)
    for a in range(1, n + 1):
        raw = preset.P_squared(a)
        root, preset.rules = adjoin_root(raw, 4, preset.rules, root_name(a), position=2 * (n - a))
        preset.roots[a] = RootInfo(a, root.name, root.inverse, raw, 4)
    return preset


# ─────────────────────────────────────────────────────────────
# 交叉積
# ─────────────────────────────────────────────────────────────

CrossTable = Dict[Tuple[int, int], List[Tuple[Tuple[int, int], Scalar]]]


def _crossing_table(mat: Mat4) -> CrossTable:
    """(i, b) → [((c, j), M^{ci}_{jb})]"""
    table: CrossTable = {}
    for ((c, i), (j, b)), value in mat.entries.items():
        table.setdefault((i, b), []).append(((c, j), value))
    return table


def rows_of(mat: Mat4) -> Dict[Tuple[int, int], List[Tuple[Tuple[int, int], Scalar]]]:
    out: Dict = {}
    for (row, col), value in mat.entries.items():
        out.setdefault(row, []).append((col, value))
    return out


def cols_of(mat: Mat4) -> Dict[Tuple[int, int], List[Tuple[Tuple[int, int], Scalar]]]:
    out: Dict = {}
    for (row, col), value in mat.entries.items():
        out.setdefault(col, []).append((row, value))
    return out


@dataclass
class CrossPreset:
    euclid: EuclidPreset
    rules: RuleSet
    rinv: Mat4
    frt_letters: Dict[Tuple[str, int, int], str] = field(default_factory=dict)
    _cross: Dict[str, CrossTable] = field(default_factory=dict, repr=False)

    @property
    def scheme(self) -> IndexScheme:
        return self.euclid.scheme

    @property
    def metric(self) -> Metric:
        return self.euclid.metric

    @property
    def preset_id(self) -> str:
        return f"cross:so{self.scheme.N}"

    def braid(self, sign: str) -> Mat4:
        return self.euclid.rhat if sign == "+" else self.rinv

    def frt(self, sign: str, a: int, b: int) -> NCPoly:
        """L^±^a_b 作為元素（零模式回傳 0，偶數 N 對角 ±1 回傳 Cartan 字母）"""
        if not in_borel(sign, a, b):
            return NCPoly()
        if not self.scheme.odd:
            cartan = cartan_of(sign, a, b)
            if cartan is not None:
                return NCPoly.letter(cartan)
        return NCPoly.letter(self.frt_letters[(sign, a, b)])

    def antipode(self, sign: str, a: int, b: int) -> NCPoly:
        """S L^a_b = g_{b,-b} L^{-b}_{-a} g^{-a,a}"""
        g = self.metric
        return self.frt(sign, -b, -a).scale(g.g(b, -b) * g.ginv(-a, a))

    def antipode_inverse(self, sign: str, a: int, b: int) -> NCPoly:
        """S^(-1) L^a_b = L^{-b}_{-a} / (g_{-a,a} g^{b,-b})（S² 在生成元上是純量倍）"""
        g = self.metric
        return self.frt(sign, -b, -a).scale(ONE / (g.g(-a, a) * g.ginv(b, -b)))

    def l_letters(self) -> List[str]:
        return sorted(self.frt_letters.values(), key=self.rules.alphabet.rank)

    def cross_through(self, poly: NCPoly, sign: str, a: int, b: int) -> Dict[int, NCPoly]:
        """
        poly·L^±^a_b = Σ_c L^±^a_c · out[c]，poly 只含座標字母（未化簡）
        """
        table = self._cross[sign]
        index = {coord_name(i): i for i in self.scheme.indices}
        out: Dict[int, NCPoly] = {}
        for word, coeff in poly.items():
            state = {b: NCPoly.const(coeff)}
            for name in reversed(word):
                i = index[name]
                new: Dict[int, NCPoly] = {}
                for bb, tail in state.items():
                    for (c, j), value in table.get((i, bb), ()):
                        new[c] = new.get(c, NCPoly()) + (self.euclid.p(j) * tail).scale(value)
                state = new
            for c, tail in state.items():
                out[c] = out.get(c, NCPoly()) + tail
        return {c: v for c, v in out.items() if v}

    def crossing_rhs(self, poly: NCPoly, sign: str, a: int, b: int) -> NCPoly:
        out = NCPoly()
        for c, tail in self.cross_through(poly, sign, a, b).items():
            out = out + self.frt(sign, a, c) * tail
        return out

    def swap_rhs(self, b: int, y: int, a: int, x: int, right: Optional[Mat4] = None) -> NCPoly:
        """L⁻^b_y L⁺^a_x = Σ \\hat R^{ab}_{cd} L⁺^d_f L⁻^c_e (\\hat R^(-1))^{ef}_{xy}"""
        right = right if right is not None else self.rinv
        out = NCPoly()
        rows = rows_of(self.euclid.rhat).get((a, b), ())
        cols = cols_of(right).get((x, y), ())
        for (c, d), r1 in rows:
            for (e, f), r2 in cols:
                term = self.frt("+", d, f) * self.frt("-", c, e)
                if term:
                    out = out + term.scale(r1 * r2)
        return out

    def nf(self, *factors: NCPoly) -> NCPoly:
        return self.rules.nf(*factors)


def _frt_alphabet(scheme: IndexScheme) -> Tuple[List[Letter], Dict[Tuple[str, int, int], str]]:
    letters: List[Letter] = []
    names: Dict[Tuple[str, int, int], str] = {}
    for sign, family in (("+", Family.LPLUS), ("-", Family.LMINUS)):
        position = 0
        for a, b in scheme.pairs:
            if not in_borel(sign, a, b):
                continue
            if not scheme.odd and cartan_of(sign, a, b) is not None:
                continue
            name = frt_name(sign, a, b)
            letters.append(Letter(name, family, index=(a, b), position=position, weight=L_WEIGHT))
            names[(sign, a, b)] = name
            position += 1
    return letters, names


def _l_scaling(preset: CrossPreset, info: RootInfo) -> Optional[Dict[str, Scalar]]:
    """raw·X = c·X·raw 對每個 L 字母成立時回傳 c^(1/k)，否則 None"""
    euclid_rules = preset.euclid.rules
    raw_nf = euclid_rules.normal_form(info.raw)
    out: Dict[str, Scalar] = {}
    for (sign, a, b), name in preset.frt_letters.items():
        crossed = preset.cross_through(info.raw, sign, a, b)
        ratio = None
        for c, tail in crossed.items():
            tail_nf = euclid_rules.normal_form(tail)
            if c != b:
                if tail_nf:
                    return None
                continue
            if set(tail_nf.terms) != set(raw_nf.terms):
                return None
            for w, v in raw_nf.terms.items():
                r = tail_nf.terms[w] / v
                if ratio is None:
                    ratio = r
                elif ratio - r:
                    return None
        if ratio is None or monomial_parts(ratio) is None:
            return None
        try:
            out[name] = root_of_scaling(ratio, info.k, name)
        except RootNotAdjoinableError:
            return None
    return out


def build_cross(N: int, fuel: int = 1_000_000, euclid: Optional[EuclidPreset] = None,
                tamper_swap: bool = False) -> CrossPreset:
    """
    交叉積 R_q^N ⋊ U_q^± so(N)

    tamper_swap=True 時混合交換規則右側改用 \\hat R（負控制組）。
    """
    euclid = euclid or build_euclid(N, fuel)
    scheme = euclid.scheme
    rinv = euclid.rhat.inverse()
    letters, names = _frt_alphabet(scheme)
    alphabet = euclid.rules.alphabet.extended(letters)
    rules = euclid.rules.with_alphabet(alphabet)
    rules.meta = {"preset": f"cross:so{N}", "params": {"N": N, "tamper_swap": tamper_swap},
                  "notes": dict(euclid.rules.meta.get("notes", {}))}

    preset = CrossPreset(euclid, rules, rinv, names)
    preset._cross = {"+": _crossing_table(euclid.rhat), "-": _crossing_table(rinv)}

    # 1. p^i 穿越 L（p⁰ 以 √p⁰√p⁰ 為左邊）
    for i in scheme.indices:
        lead = next(iter(euclid.rules.normal_form(euclid.p(i)).terms))
        for (sign, a, b), name in names.items():
            rules.add_rule(lead + (name,), preset.crossing_rhs(euclid.p(i), sign, a, b))

    # 2. Cartan 與 L 的 q-交換
    if not scheme.odd:
        for (sign, a, b), name in names.items():
            e = eta(a) - eta(b)
            rules.add_rule((CARTAN, name), NCPoly.word((name, CARTAN), qpow(e)))
            rules.add_rule((CARTAN_INV, name), NCPoly.word((name, CARTAN_INV), qpow(-e)))

    # 3. 混合交換 L⁻L⁺ → L⁺L⁻
    right = euclid.rhat if tamper_swap else rinv
    for (sign, b, y), minus in names.items():
        if sign != "-":
            continue
        for (sign2, a, x), plus in names.items():
            if sign2 != "+":
                continue
            rules.add_rule((minus, plus), preset.swap_rhs(b, y, a, x, right), check_order=False)

    # 4. 根字母與 L：擬縮放則裝規則，否則標記不透明，只保留 r^k 整體穿越
    for info in euclid.roots.values():
        scalings = _l_scaling(preset, info)
        if scalings is not None:
            for name, d in scalings.items():
                install_scaling(rules, info.name, info.inverse, name, d)
            continue
        rules.opaque |= {info.name, info.inverse}
        if info.a == 0:
            continue    # √p0·√p0 穿越已由步驟 1 安裝
        for (sign, a, b), name in names.items():
            rules.add_rule((info.name,) * info.k + (name,), preset.crossing_rhs(info.raw, sign, a, b))

    rules.inter_reduce()
    return preset


# ─────────────────────────────────────────────────────────────
# 由快取規則還原
# ─────────────────────────────────────────────────────────────

def euclid_from_rules(N: int, rules: RuleSet) -> EuclidPreset:
    """以快取中的規則集重建 EuclidPreset（矩陣資料重新計算）"""
    scheme = IndexScheme("so", N)
    preset = EuclidPreset(scheme, build_rhat(scheme), build_metric(scheme), rules,
                          quadratic_rules=int(rules.meta.get("notes", {}).get("quadratic_rules", 0)))
    for a in range(0 if scheme.odd else 1, scheme.n + 1):
        name = root_name(a)
        if name not in rules.alphabet:
            continue
        raw = preset.p(0) if a == 0 else preset.P_squared(a)
        preset.roots[a] = RootInfo(a, name, rules.alphabet.inverse_of(name), raw, 2 if a == 0 else 4)
    return preset


def _without_l(rules: RuleSet) -> RuleSet:
    """交叉積規則中不含 L 字母的部分（即歐氏量子空間本身）"""
    alphabet = rules.alphabet
    letters = [x for x in alphabet if x.family not in L_FAMILIES]
    out = RuleSet(Alphabet(letters), fuel=rules.fuel,
                  meta={**rules.meta, "preset": rules.meta.get("preset", "").replace("cross", "euclid")})
    for lhs, rhs in rules.sorted_rules():
        if all(alphabet[x].family not in L_FAMILIES for x in lhs):
            out.add_rule(lhs, rhs, check_order=False)
    return out


def cross_from_rules(N: int, rules: RuleSet) -> CrossPreset:
    euclid = euclid_from_rules(N, _without_l(rules))
    _, names = _frt_alphabet(euclid.scheme)
    preset = CrossPreset(euclid, rules, euclid.rhat.inverse(), names)
    preset._cross = {"+": _crossing_table(euclid.rhat), "-": _crossing_table(preset.rinv)}
    return preset


# ─────────────────────────────────────────────────────────────
# 結構檢查
# ─────────────────────────────────────────────────────────────

def crossing_instances(preset: CrossPreset) -> List[Tuple[str, Callable[[], CheckResult]]]:
    """座標穿越 L 與反元素穿越座標的逐實例檢查"""
    scheme = preset.scheme
    euclid = preset.euclid
    out = []
    for sign in SIGNS:
        for a, b in scheme.pairs:
            if not in_borel(sign, a, b):
                continue
            for i in scheme.indices:
                def gio(sign=sign, a=a, b=b, i=i) -> CheckResult:
                    lhs = preset.nf(euclid.p(i), preset.frt(sign, a, b))
                    rhs = preset.rules.normal_form(preset.crossing_rhs(euclid.p(i), sign, a, b))
                    return identity_check("", lhs - rhs, preset.rules)

                def giu(sign=sign, a=a, b=b, i=i) -> CheckResult:
                    m = preset.braid(sign)
                    lhs = preset.nf(preset.antipode(sign, a, b), euclid.p(i))
                    rhs = NCPoly()
                    for ((aa, ii), (j, kk)), value in m.entries.items():
                        if aa == a and ii == i:
                            rhs = rhs + (euclid.p(j) * preset.antipode(sign, kk, b)).scale(value)
                    return identity_check("", lhs - preset.rules.normal_form(rhs), preset.rules)

                out.append((f"gio[{sign},a={a},b={b},i={i}]", gio))
                out.append((f"giu[{sign},a={a},b={b},i={i}]", giu))
    return out


def center_instances(euclid: EuclidPreset, cross: Optional[CrossPreset] = None) -> List[Tuple[str, Callable[[], CheckResult]]]:
    """P² = P_n² 與所有座標、Cartan 字母、L 字母交換"""
    top = euclid.n
    raw = euclid.P_squared(top)
    rules = euclid.rules
    out = []
    others = [x for x in rules.alphabet.names() if rules.alphabet[x].family in (Family.COORD, Family.CARTAN)]
    for name in others:
        def commute(name=name) -> CheckResult:
            u = NCPoly.letter(name)
            return identity_check("", rules.normal_form(raw * u - u * raw), rules)
        out.append((f"center[P{top}²,{name}]", commute))
    if cross is None:
        return out
    for (sign, a, b), name in cross.frt_letters.items():
        def commute_l(sign=sign, a=a, b=b, name=name) -> CheckResult:
            crossed = cross.cross_through(raw, sign, a, b)
            residual = NCPoly()
            for c, tail in crossed.items():
                diff = tail - raw if c == b else tail
                residual = residual + cross.frt(sign, a, c) * rules.normal_form(diff)
            if b not in crossed:
                residual = residual - cross.frt(sign, a, b) * rules.normal_form(raw)
            return identity_check("", residual, cross.rules)
        out.append((f"center[P{top}²,{name}]", commute_l))
    return out


def scaling_summary(euclid: EuclidPreset) -> Dict[str, Dict[str, str]]:
    """每個根字母對各字母的縮放（推導結果，供 derive 輸出）"""
    out: Dict[str, Dict[str, str]] = {}
    rules = euclid.rules
    for info in euclid.roots.values():
        row = {}
        for name in rules.alphabet.names():
            if name in (info.name, info.inverse) or name in rules.reducible_letters():
                continue
            try:
                row[name] = format_scalar(derive_scaling(NCPoly.letter(info.name), name, rules))
            except ScalingError:
                row[name] = "n/a"
        out[info.name] = row
    return out


__all__ = [
    "CARTAN", "CARTAN_INV", "SIGNS", "CrossPreset", "EuclidPreset", "RootInfo",
    "build_cross", "build_euclid", "cartan_of", "center_instances", "coord_name",
    "cols_of", "cross_from_rules", "crossing_instances", "euclid_from_rules", "eta",
    "frt_name", "in_borel", "root_name", "rows_of", "scaling_summary",
]
