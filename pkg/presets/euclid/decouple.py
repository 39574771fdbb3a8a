"""
解耦映射
γ 規範化常數、μ_a / \\bar μ_a、φ± 與 ζ5± 的影像，以及把 ζ 當成原子字母的第二層求值器

φ 影像只含擴充 A 的字母（偶數 N 另含 Cartan 字母）；ζ 影像每項恰有一個 L 字母在最左。
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.ncpoly import NCPoly, Word
from core.scalar import ONE, UNIT_CIRCLE, ZERO, Scalar, conjugate, format_scalar, gaussian, h, k, omega, q, qpow, spow
from core.tensor import IndexScheme
from utils.config_loader import ConfigError, ConfigLoader

from .algebra import CARTAN, CARTAN_INV, CrossPreset, eta


GAMMA_DEFAULT = "default"
GAMMA_REAL = "real"


# ─────────────────────────────────────────────────────────────
# γ
# ─────────────────────────────────────────────────────────────

@dataclass
class GammaConfig:
    """φ± 影像的規範化常數 γ_a、\\bar γ_a"""
    N: int
    gamma: Dict[int, Scalar]
    gamma_bar: Dict[int, Scalar]
    label: str = GAMMA_DEFAULT

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    def ratio(self, a: int) -> Scalar:
        """γ_a / \\bar γ_a"""
        return self.gamma[a] / self.gamma_bar[a]

    def bar_ratio(self, a: int) -> Scalar:
        """\\bar γ_a / γ_a"""
        return self.gamma_bar[a] / self.gamma[a]

    def constraints(self) -> List[Tuple[str, Scalar, Scalar]]:
        """(名稱, 實際值, 應有值)"""
        scheme = IndexScheme("so", self.N)
        w = scheme.weights
        g, gb = self.gamma, self.gamma_bar
        out = []
        if self.odd:
            out.append(("γ_0", g[0], -qpow(Fraction(-1, 2)) / h))
            out.append(("γ̄_0", gb[0], qpow(Fraction(1, 2)) / h))
            out.append(("γ_1γ_-1", g[1] * g[-1], -qpow(-1) / h ** 2))
            out.append(("γ̄_1γ̄_-1", gb[1] * gb[-1], -q / h ** 2))
        else:
            for a in (1, -1):
                out.append((f"γ_{a}", g[a], -ONE / k))
                out.append((f"γ̄_{a}", gb[a], ONE / k))
        for a in range(2, scheme.n + 1):
            ww = omega(w[a]) * omega(w[a - 1])
            out.append((f"γ_{a}γ_-{a}", g[a] * g[-a], -qpow(-1) * ww / k ** 2))
            out.append((f"γ̄_{a}γ̄_-{a}", gb[a] * gb[-a], -q * ww / k ** 2))
        return out

    def violations(self) -> List[str]:
        return [name for name, value, expected in self.constraints() if value - expected]

    @property
    def valid(self) -> bool:
        return not self.violations()

    def to_dict(self) -> Dict:
        return {
            "label": self.label,
            "gamma": {str(a): format_scalar(v) for a, v in sorted(self.gamma.items())},
            "gamma_bar": {str(a): format_scalar(v) for a, v in sorted(self.gamma_bar.items())},
            "violations": self.violations(),
        }


def default_gamma(N: int) -> GammaConfig:
    """
    預設的 γ 拆分

    γ_a = k^(-1)、γ_{-a} = −q^(-1)k^(-1)ω_aω_{a-1}（a > 1）；N 奇數 γ_1 = h^(-1)、γ_{-1} = −q^(-1)h^(-1)；
    \\bar γ = −q·γ，唯偶數 N 的 \\bar γ_{±1} = k^(-1)。
    """
    scheme = IndexScheme("so", N)
    w = scheme.weights
    gamma: Dict[int, Scalar] = {}
    for a in range(2, scheme.n + 1):
        gamma[a] = ONE / k
        gamma[-a] = -qpow(-1) * omega(w[a]) * omega(w[a - 1]) / k
    if scheme.odd:
        gamma[0] = -qpow(Fraction(-1, 2)) / h
        gamma[1] = ONE / h
        gamma[-1] = -qpow(-1) / h
    else:
        gamma[1] = gamma[-1] = -ONE / k
    gamma_bar = {a: -q * v for a, v in gamma.items()}
    if not scheme.odd:
        gamma_bar[1] = gamma_bar[-1] = ONE / k
    return GammaConfig(N, gamma, gamma_bar, GAMMA_DEFAULT)


def real_q_gamma(N: int) -> GammaConfig:
    """
    q 實數時讓 [φ^∓(α)]* = φ^±(α*) 成立的拆分

    γ 同預設；\\bar γ_{-a} = −q²γ_a、\\bar γ_a = −γ_{-a}（a > 1，N 奇數時含 a = 1）。
    """
    base = default_gamma(N)
    gamma_bar = dict(base.gamma_bar)
    first = 1 if base.odd else 2
    for a in range(first, N // 2 + 1):
        gamma_bar[-a] = -q ** 2 * base.gamma[a]
        gamma_bar[a] = -base.gamma[-a]
    return GammaConfig(N, dict(base.gamma), gamma_bar, GAMMA_REAL)


def load_gamma(N: int, spec: str) -> GammaConfig:
    """
    依 --gamma 取得設定：default、real，或覆寫檔路徑（未列出的索引沿用預設）

    Raises:
        ConfigError
    """
    if spec in ("", GAMMA_DEFAULT):
        return default_gamma(N)
    if spec == GAMMA_REAL:
        return real_q_gamma(N)
    base = default_gamma(N)
    gamma, gamma_bar = ConfigLoader.load_gamma(spec)
    scheme = IndexScheme("so", N)
    for a in list(gamma) + list(gamma_bar):
        if a not in scheme.indices:
            raise ConfigError(f"γ 索引 {a} 不在 so{N} 的範圍內")
    return GammaConfig(N, {**base.gamma, **gamma}, {**base.gamma_bar, **gamma_bar}, spec)


def _unit_real_conditions(a: int, N: int) -> Optional[Scalar]:
    """|q|=1 時 γ_a* = −c·γ_a 中的 c；不受約束的索引回傳 None"""
    odd = N % 2 == 1
    if a > 1 or (a == 1 and odd):
        return qpow(-2)
    if a < -1 or (a == -1 and odd):
        return ONE
    return None


def real_gamma_search(N: int, span: int = 8) -> Dict[int, Optional[Tuple[Scalar, Scalar]]]:
    """
    在「單位 × 預設值 × s^m」之中尋找同時滿足乘積約束與 |q|=1 實性條件的 (γ_a, γ_{-a})

    夥伴值由乘積約束決定；回傳每個 a > 0 的第一組解，找不到為 None。
    """
    base = default_gamma(N)
    out: Dict[int, Optional[Tuple[Scalar, Scalar]]] = {}
    units = [gaussian(1), gaussian(-1), gaussian(0, 1), gaussian(0, -1)]
    for a in range(1, N // 2 + 1):
        if _unit_real_conditions(a, N) is None:
            continue
        product = base.gamma[a] * base.gamma[-a]
        found = None
        for u in units:
            for m in range(-span, span + 1):
                ga = u * base.gamma[a] * spow(m)
                gm = product / ga
                ok = all(
                    not (conjugate(v, UNIT_CIRCLE) + _unit_real_conditions(b, N) * v)
                    for b, v in ((a, ga), (-a, gm))
                )
                if ok:
                    found = (ga, gm)
                    break
            if found:
                break
        out[a] = found
    return out


# ─────────────────────────────────────────────────────────────
# 影像
# ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Zeta:
    """第二層求值中的原子字母 ζ5^±(L^±^i_j)"""
    sign: str
    i: int
    j: int

    @property
    def shift(self) -> int:
        """Cartan 字母穿過它時的 q 指數（每個 K）"""
        return eta(self.i) - eta(self.j)


Factor = Union[Zeta, NCPoly]


def k_degree(word: Word) -> int:
    """#K − #K^-1"""
    return sum(1 for x in word if x == CARTAN) - sum(1 for x in word if x == CARTAN_INV)


def shift_past(poly: NCPoly, exponent: int) -> NCPoly:
    """A 元素往右穿過總 η 差為 exponent 的 ζ 串：每個字乘 q^(t·exponent)"""
    if exponent == 0:
        return poly
    terms = {}
    for w, c in poly.terms.items():
        t = k_degree(w)
        terms[w] = c * qpow(t * exponent) if t else c
    return NCPoly(terms)


class DecoupleContext:
    """
    交叉積上的 φ± / ζ5± 影像（逐項快取）

    建構後只增加快取內容，影像本身不變，可在執行緒之間共用。
    """

    def __init__(self, cross: CrossPreset, gamma: GammaConfig):
        if gamma.N != cross.scheme.N:
            raise ConfigError(f"γ 設定的 N={gamma.N} 與預設 so{cross.scheme.N} 不符")
        self.cross = cross
        self.gamma = gamma
        self.euclid = cross.euclid
        self.scheme = cross.scheme
        self.metric = cross.metric
        self.rules = cross.rules
        self._phi: Dict[Tuple[str, int, int], NCPoly] = {}
        self._zeta: Dict[Tuple[str, int, int], NCPoly] = {}
        self._zeta8: Dict[Tuple[str, int, int], NCPoly] = {}
        self._products: Dict[Tuple, NCPoly] = {}

    @property
    def odd(self) -> bool:
        return self.scheme.odd

    def nf(self, *factors: NCPoly) -> NCPoly:
        return self.rules.nf(*factors)

    def _check_index(self, *indices: int) -> None:
        for a in indices:
            if a not in self.scheme.indices:
                raise ValueError(f"索引 {a} 不在 so{self.scheme.N} 的範圍內")

    # ── μ ────────────────────────────────────────────────────

    def _mu(self, a: int, value: Scalar, cartan_sign: str) -> NCPoly:
        self._check_index(a)
        euclid = self.euclid
        if a == 0:
            return euclid.coord_inverse(0).scale(value)
        if not self.odd and abs(a) == 1:
            return (euclid.coord_inverse(a) * self.cross.frt(cartan_sign, 1, 1)).scale(value)
        b = abs(a)
        return (euclid.P(b, -1) * euclid.P(b - 1, -1) * euclid.p(-a)).scale(value)

    def mu(self, a: int) -> NCPoly:
        """μ_a（偶數 N 的 μ_{±1} 帶 L^±^1_1）"""
        return self._mu(a, self.gamma.gamma[a], "+" if a > 0 else "-")

    def mubar(self, a: int) -> NCPoly:
        """\\bar μ_a（偶數 N 的 \\bar μ_{±1} 帶 L^∓^1_1）"""
        return self._mu(a, self.gamma.gamma_bar[a], "-" if a > 0 else "+")

    # ── φ ────────────────────────────────────────────────────

    def phi(self, sign: str, i: int, j: int) -> NCPoly:
        """
        φ^±(L^±^i_j) = g^{i,-i}[μ_{-i}, p^{-j}]_x g_{-j,j}

        φ⁻ 用 μ 與 x = q；φ⁺ 用 \\bar μ 與 x = q^(-1)。零模式之外的索引也照公式計算。
        """
        key = (sign, i, j)
        cached = self._phi.get(key)
        if cached is not None:
            return cached
        self._check_index(i, j)
        m = self.mu(-i) if sign == "-" else self.mubar(-i)
        x = q if sign == "-" else qpow(-1)
        p = self.euclid.p(-j)
        g = self.metric
        value = (m * p - (p * m).scale(x)).scale(g.ginv(i, -i) * g.g(-j, j))
        result = self.nf(value)
        self._phi[key] = result
        return result

    def phi_minus(self, i: int, j: int) -> NCPoly:
        return self.phi("-", i, j)

    def phi_plus(self, i: int, j: int) -> NCPoly:
        return self.phi("+", i, j)

    def phi_S(self, sign: str, a: int, b: int) -> NCPoly:
        """φ(S L^a_b) = g_{b,-b} g^{-a,a} φ(L^{-b}_{-a})"""
        g = self.metric
        return self.phi(sign, -b, -a).scale(g.g(b, -b) * g.ginv(-a, a))

    # ── ζ ────────────────────────────────────────────────────

    def zeta(self, sign: str, i: int, j: int) -> NCPoly:
        """ζ5^±(L^±^i_j) = Σ_h L^±^i_h φ^±(S L^±^h_j)"""
        key = (sign, i, j)
        cached = self._zeta.get(key)
        if cached is not None:
            return cached
        self._check_index(i, j)
        out = NCPoly()
        for hh in self.scheme.indices:
            letter = self.cross.frt(sign, i, hh)
            if letter:
                out = out + letter * self.phi_S(sign, hh, j)
        result = self.nf(out)
        self._zeta[key] = result
        return result

    def zeta_minus(self, i: int, j: int) -> NCPoly:
        return self.zeta("-", i, j)

    def zeta_plus(self, i: int, j: int) -> NCPoly:
        return self.zeta("+", i, j)

    def zeta_S(self, sign: str, a: int, b: int) -> NCPoly:
        """ζ5(S L^a_b)"""
        g = self.metric
        return self.zeta(sign, -b, -a).scale(g.g(b, -b) * g.ginv(-a, a))

    def zeta8(self, sign: str, i: int, j: int) -> NCPoly:
        """
        ζ8(L^i_j) = Σ_h φ(L^i_h) S L^h_j（A 在左，未乘不透明字母的清除因子）
        """
        key = (sign, i, j)
        cached = self._zeta8.get(key)
        if cached is not None:
            return cached
        out = NCPoly()
        for hh in self.scheme.indices:
            s_letter = self.cross.antipode(sign, hh, j)
            if s_letter:
                out = out + self.phi(sign, i, hh) * s_letter
        self._zeta8[key] = out
        return out

    def zeta_Sinv(self, sign: str, a: int, b: int) -> NCPoly:
        """ζ5(S^(-1) L^a_b)"""
        g = self.metric
        return self.zeta(sign, -b, -a).scale(ONE / (g.g(-a, a) * g.ginv(b, -b)))

    def zeta7(self, sign: str, i: int, j: int) -> NCPoly:
        """ζ7(L^i_j) = Σ_h S^(-1)L^h_j φ(L^i_h)"""
        out = NCPoly()
        for hh in self.scheme.indices:
            s_letter = self.cross.antipode_inverse(sign, hh, j)
            if s_letter:
                out = out + s_letter * self.phi(sign, i, hh)
        return out

    def opaque_multiplier(self, factors: int = 1) -> NCPoly:
        """
        左乘後可消去 φ 影像中不透明根的逆元的因子：每個不透明根取 r^(k·factors)

        k 即該根的整體穿越規則 r^k·L 的長度；factors 為乘積中 φ 影像的個數。
        """
        out = NCPoly.one()
        for info in self.euclid.roots.values():
            if info.name in self.rules.opaque:
                out = out * NCPoly.word((info.name,) * (info.k * factors))
        return out

    # ── 第二層 ──────────────────────────────────────────────

    def _a_product(self, keys: Tuple[Tuple[str, int, int, int], ...]) -> NCPoly:
        """NF(φ'_m … φ'_1)，keys 由左到右，每個為 (sign, h, j, η 位移)"""
        if not keys:
            return NCPoly.one()
        cached = self._products.get(keys)
        if cached is not None:
            return cached
        sign, hh, j, shift = keys[0]
        head = shift_past(self.phi_S(sign, hh, j), shift)
        result = self.nf(head, self._a_product(keys[1:]))
        self._products[keys] = result
        return result

    def evaluate(self, factors: Sequence[Factor]) -> NCPoly:
        """
        ζ 與 A 元素交錯的乘積化為「L 字 · A 正規形」

        先把 A 因子往右移到尾端（偶數 N 帶上 Cartan 的 q 冪），
        再展開 ζ_1…ζ_m = Σ L_1…L_m φ'_m…φ'_1；A 因子從不越過 L 字母。
        """
        zetas: List[Zeta] = []
        tail = NCPoly.one()
        passed = 0
        for factor in reversed(factors):
            if isinstance(factor, Zeta):
                zetas.insert(0, factor)
                passed += factor.shift
            else:
                tail = shift_past(factor, passed) * tail
        tail = self.nf(tail)

        # (L 字, keys) → 係數
        layers: Dict[Word, Dict[Tuple, Scalar]] = {(): {(): ONE}}
        remaining = sum(z.shift for z in zetas)
        for z in zetas:
            remaining -= z.shift
            grown: Dict[Word, Dict[Tuple, Scalar]] = {}
            for hh in self.scheme.indices:
                letter = self.cross.frt(z.sign, z.i, hh)
                if not letter:
                    continue
                (lw, lc), = letter.terms.items()
                for word, combos in layers.items():
                    bucket = grown.setdefault(word + lw, {})
                    for keys, c in combos.items():
                        new_keys = ((z.sign, hh, z.j, remaining),) + keys
                        bucket[new_keys] = bucket.get(new_keys, ZERO) + c * lc
            layers = grown

        out = NCPoly()
        for word, combos in layers.items():
            a_part = NCPoly()
            for keys, c in combos.items():
                if c:
                    a_part = a_part + self._a_product(keys).scale(c)
            if a_part:
                out = out + self.nf(NCPoly.word(word), self.nf(a_part, tail))
        return self.nf(out)

    def evaluate_sum(self, terms: Sequence[Tuple[Scalar, Sequence[Factor]]]) -> NCPoly:
        out = NCPoly()
        for c, factors in terms:
            if c:
                out = out + self.evaluate(factors).scale(c)
        return out

    # ── 分解 ────────────────────────────────────────────────

    def letter_spec(self, name: str) -> Optional[Tuple[str, int, int]]:
        for key, letter in self.cross.frt_letters.items():
            if letter == name:
                return key
        return None

    def decompose_word(self, word: Word) -> List[List[Factor]]:
        """
        交叉積的字改寫為 ζ5 影像與 A 元素的交錯乘積

        每個 L^a_b 換成 Σ_c ζ5(L^a_c)·φ(L^c_b)，其餘字母原樣當作 A 因子。
        """
        expansions: List[List[Factor]] = [[]]
        for name in word:
            spec = self.letter_spec(name)
            if spec is None:
                expansions = [e + [NCPoly.letter(name)] for e in expansions]
                continue
            sign, a, b = spec
            grown = []
            for c in self.scheme.indices:
                if not self.cross.frt(sign, a, c):
                    continue
                phi = self.phi(sign, c, b)
                if not phi:
                    continue
                for e in expansions:
                    grown.append(e + [Zeta(sign, a, c), phi])
            expansions = grown
        return expansions


def sample_instances(indices: Sequence[int], arity: int, exhaustive: bool, seed: int,
                     window: int = 2, extra: int = 50) -> List[Tuple[int, ...]]:
    """
    索引組的取樣排程

    exhaustive 時列舉全部；否則取所有分量落在 [-window, window] 的組合，
    再加上 extra 個以固定種子均勻抽取的全範圍組合。結果排序且不重複。
    """
    if exhaustive:
        return list(itertools.product(indices, repeat=arity))
    local = [i for i in indices if abs(i) <= window]
    chosen = set(itertools.product(local, repeat=arity))
    rng = random.Random(seed)
    for _ in range(extra):
        chosen.add(tuple(rng.choice(indices) for _ in range(arity)))
    return sorted(chosen)


__all__ = [
    "DecoupleContext", "Factor", "GAMMA_DEFAULT", "GAMMA_REAL", "GammaConfig", "Zeta",
    "default_gamma", "k_degree", "load_gamma", "real_gamma_search", "real_q_gamma",
    "sample_instances", "shift_past",
]
