"""
驗證套件
每個套件產生 (實例鍵, 檢查函數) 清單，由引擎並行執行；
φ 類檢查完全在擴充 A 中封閉，ζ 重排類檢查經 DecoupleContext.evaluate 進行第二層求值
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from core.ncpoly import Family, NCPoly
from core.report import CheckResult, CheckStatus
from core.rewriting import L_FAMILIES, RuleSet, apply_map, classify_residual, identity_check
from core.scalar import Scalar, format_scalar, numeric_agree, probe_points, q, qpow
from utils.config_loader import DEFAULT_SEED

from .algebra import CARTAN, CARTAN_INV, SIGNS, cols_of, eta, in_borel, rows_of
from .decouple import (
    GAMMA_DEFAULT, DecoupleContext, Factor, Zeta, real_gamma_search, real_q_gamma,
    sample_instances,
)
from .stars import build_star, stars_for


Instance = Tuple[str, Callable[[], CheckResult]]

READING_LITERAL = "literal"
READING_COLLAPSED = "collapsed"


@dataclass
class Sampling:
    """索引組取樣排程與數值交叉檢查設定"""
    exhaustive: bool
    seed: int = DEFAULT_SEED
    window: int = 2
    extra: int = 50
    probe: bool = False

    def tuples(self, indices: Sequence[int], arity: int) -> List[Tuple[int, ...]]:
        return sample_instances(indices, arity, self.exhaustive, self.seed, self.window, self.extra)


def _probe(lhs: NCPoly, rhs: NCPoly, seed: int, unit_circle: bool) -> bool:
    """逐字比對係數在隨機點的數值"""
    points = probe_points(seed, unit_circle)
    for word in set(lhs.terms) | set(rhs.terms):
        if not numeric_agree(lhs.coeff(word), rhs.coeff(word), points):
            return False
    return True


def verdict(rules: RuleSet, lhs: NCPoly, rhs: NCPoly, sampling: Optional[Sampling] = None) -> CheckResult:
    """NF(lhs − rhs) 的判定；開啟 probe 時對 PASS 再做數值比對"""
    lhs = rules.normal_form(lhs)
    rhs = rules.normal_form(rhs)
    result = identity_check("", lhs - rhs, rules)
    if result.status == CheckStatus.PASS and sampling is not None and sampling.probe:
        if not _probe(lhs, rhs, sampling.seed, unit_circle=False):
            result.status = CheckStatus.INCONCLUSIVE
            result.detail = "精確判定為零但數值比對不一致"
    return result


def _label(*parts) -> str:
    return ",".join(str(x) for x in parts)


# ─────────────────────────────────────────────────────────────
# φ 同態
# ─────────────────────────────────────────────────────────────

def _phi(ctx: DecoupleContext, sign: str, i: int, j: int) -> NCPoly:
    """零模式之外為 0（L 本身為 0）"""
    return ctx.phi(sign, i, j) if in_borel(sign, i, j) else NCPoly()


def phi_mapping(ctx: DecoupleContext) -> Dict[str, NCPoly]:
    """φ 延拓到交叉積：L 字母送往 φ 影像，A 字母（含 Cartan）不動"""
    mapping = {}
    for x in ctx.rules.alphabet:
        spec = ctx.letter_spec(x.name)
        mapping[x.name] = ctx.phi(*spec) if spec else NCPoly.letter(x.name)
    return mapping


def homomorphism_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """
    φ± 代入 Borel 的 FRT 關係、度量關係、對角乘積、零模式與穿越關係

    φ⁺ 與 φ⁻ 各自只在自己的 Borel 子代數上檢查；兩者之間的混合關係不屬於這個套件。
    """
    cross = ctx.cross
    scheme = ctx.scheme
    idx = scheme.indices
    rhat = ctx.euclid.rhat
    rows, cols = rows_of(rhat), cols_of(rhat)
    g = ctx.metric
    out: List[Instance] = []

    def frt(s1: str, s2: str, a: int, b: int, e: int, f: int) -> CheckResult:
        lhs = NCPoly()
        for (c, d), v in rows.get((a, b), ()):
            lhs = lhs + ctx.nf(_phi(ctx, s1, d, f), _phi(ctx, s2, c, e)).scale(v)
        rhs = NCPoly()
        for (d, c), v in cols.get((e, f), ()):
            rhs = rhs + ctx.nf(_phi(ctx, s2, b, c), _phi(ctx, s1, a, d)).scale(v)
        return verdict(ctx.rules, lhs, rhs, sampling)

    for a, b, e, f in sampling.tuples(idx, 4):
        for sign in SIGNS:
            out.append((f"frt[{sign}{sign},{_label(a, b, e, f)}]",
                        lambda s=sign, t=(a, b, e, f): frt(s, s, *t)))

    for sign in SIGNS:
        for i in idx:
            for h in idx:
                def upper(sign=sign, i=i, h=h) -> CheckResult:
                    lhs = NCPoly()
                    for kk in idx:
                        c = g.ginv(kk, -kk)
                        lhs = lhs + ctx.nf(_phi(ctx, sign, i, -kk), _phi(ctx, sign, h, kk)).scale(c)
                    return verdict(ctx.rules, lhs, NCPoly.const(g.ginv(h, i)), sampling)

                def lower(sign=sign, i=i, h=h) -> CheckResult:
                    lhs = NCPoly()
                    for kk in idx:
                        c = g.g(kk, -kk)
                        lhs = lhs + ctx.nf(_phi(ctx, sign, -kk, i), _phi(ctx, sign, kk, h)).scale(c)
                    return verdict(ctx.rules, lhs, NCPoly.const(g.g(h, i)), sampling)

                out.append((f"metric-upper[{sign},{_label(i, h)}]", upper))
                out.append((f"metric-lower[{sign},{_label(i, h)}]", lower))

        def diag_product(sign=sign) -> CheckResult:
            return verdict(ctx.rules, ctx.nf(*[_phi(ctx, sign, i, i) for i in idx]), NCPoly.one())
        out.append((f"diag-product[{sign}]", diag_product))

        for i in idx:
            for j in idx:
                if in_borel(sign, i, j):
                    continue
                out.append((f"zero-pattern[{sign},{_label(i, j)}]",
                            lambda sign=sign, i=i, j=j: verdict(ctx.rules, ctx.phi(sign, i, j), NCPoly())))

    if not ctx.odd:
        for sign in SIGNS:
            for a in (1, -1):
                out.append((f"cartan-image[{sign},{a}]",
                            lambda sign=sign, a=a: verdict(ctx.rules, ctx.phi(sign, a, a), cross.frt(sign, a, a))))

    for sign in SIGNS:
        mat_rows = rows_of(cross.braid(sign))
        for a, b, i in sampling.tuples(idx, 3):
            if not in_borel(sign, a, b):
                continue

            def crossing(sign=sign, a=a, b=b, i=i) -> CheckResult:
                p = ctx.euclid.p(i)
                rhs = NCPoly()
                for c, tail in cross.cross_through(p, sign, a, b).items():
                    rhs = rhs + ctx.nf(_phi(ctx, sign, a, c), tail)
                return verdict(ctx.rules, ctx.nf(p, ctx.phi(sign, a, b)), rhs, sampling)

            def crossing_s(sign=sign, a=a, b=b, i=i, mat_rows=mat_rows) -> CheckResult:
                lhs = ctx.nf(ctx.phi_S(sign, a, b), ctx.euclid.p(i))
                rhs = NCPoly()
                for (j, kk), v in mat_rows.get((a, i), ()):
                    rhs = rhs + ctx.nf(ctx.euclid.p(j), ctx.phi_S(sign, kk, b)).scale(v)
                return verdict(ctx.rules, lhs, rhs, sampling)

            out.append((f"crossing[{sign},{_label(a, b, i)}]", crossing))
            out.append((f"crossing-S[{sign},{_label(a, b, i)}]", crossing_s))

    mapping = phi_mapping(ctx)
    for x in ctx.rules.alphabet:
        if x.family in L_FAMILIES:
            continue

        def identity(name=x.name) -> CheckResult:
            u = NCPoly.letter(name)
            return verdict(ctx.rules, apply_map(mapping, u, ctx.rules), u)
        out.append((f"identity-on-A[{x.name}]", identity))
    return out


# ─────────────────────────────────────────────────────────────
# ζ 的交換子
# ─────────────────────────────────────────────────────────────

def _borel_pairs(ctx: DecoupleContext, sign: str) -> List[Tuple[int, int]]:
    return [(i, j) for i, j in ctx.scheme.pairs if in_borel(sign, i, j)]


def commutant_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """[ζ5^±(L^±^i_j), p^k] = 0；N 偶數另含與 Cartan 字母的 q-交換及 ζ5(L^{±1}_{±1}) = 1"""
    out: List[Instance] = []
    idx = ctx.scheme.indices
    for sign in SIGNS:
        for i, j in _borel_pairs(ctx, sign):
            for kk in idx:
                def commute(sign=sign, i=i, j=j, kk=kk) -> CheckResult:
                    z = ctx.zeta(sign, i, j)
                    p = ctx.euclid.p(kk)
                    return verdict(ctx.rules, ctx.nf(z, p), ctx.nf(p, z), sampling)
                out.append((f"commutant[{sign},i={i},j={j},k={kk}]", commute))

            if not ctx.odd:
                for letter, e in ((CARTAN, 1), (CARTAN_INV, -1)):
                    def q_commute(sign=sign, i=i, j=j, letter=letter, e=e) -> CheckResult:
                        z = ctx.zeta(sign, i, j)
                        c = NCPoly.letter(letter)
                        rhs = ctx.nf(z, c).scale(qpow(e * (eta(i) - eta(j))))
                        return verdict(ctx.rules, ctx.nf(c, z), rhs, sampling)
                    out.append((f"cartan-commutant[{sign},i={i},j={j},{letter}]", q_commute))

            if not (not ctx.odd and i == j and abs(i) == 1):
                def support(sign=sign, i=i, j=j) -> CheckResult:
                    name = ctx.cross.frt_letters[(sign, i, j)]
                    z = ctx.zeta(sign, i, j)
                    found = any(w and w[0] == name for w in z.terms)
                    others = {w[0] for w in z.terms if w} - {name}
                    status = CheckStatus.PASS if found else CheckStatus.FAIL
                    return CheckResult("", status, detail="" if found else f"首字母: {sorted(others)}")
                out.append((f"support[{sign},i={i},j={j}]", support))

    if not ctx.odd:
        for sign in SIGNS:
            for a in (1, -1):
                out.append((f"unit-image[{sign},{a}]",
                            lambda sign=sign, a=a: verdict(ctx.rules, ctx.zeta(sign, a, a), NCPoly.one())))
    return out


# ─────────────────────────────────────────────────────────────
# 重排引理的組成部分
# ─────────────────────────────────────────────────────────────

def _lemma_bracket(ctx: DecoupleContext, l: int, m: int, kk: int, j: int, cols) -> NCPoly:
    """Σ_{r,s} \\hat R^{rs}_{kj}(\\bar γ_s/γ_s)·φ⁺(SL⁺^l_r)φ⁻(SL⁻^m_s)，偶數 N 的 s = ±1 項換成 φ⁻(SL⁻^m_{-s})·(p^{-s}/p^s)·q²"""
    out = NCPoly()
    for (r, s), v in cols.get((kk, j), ()):
        c = v * ctx.gamma.bar_ratio(s)
        if not ctx.odd and abs(s) == 1:
            term = ctx.nf(ctx.phi_S("+", l, r), ctx.phi_S("-", m, -s), ctx.euclid.ratio(s)).scale(c * q ** 2)
        else:
            term = ctx.nf(ctx.phi_S("+", l, r), ctx.phi_S("-", m, s)).scale(c)
        out = out + term
    return out


def lemma_rhs(ctx: DecoupleContext, i: int, kk: int, h: int, j: int) -> NCPoly:
    """φ⁻(SL⁻^i_k)φ⁺(SL⁺^h_j) 依 N 的奇偶與 k 是否為 ±1 的重排展開"""
    rinv_rows = rows_of(ctx.cross.rinv)
    rhat_cols = cols_of(ctx.euclid.rhat)
    special = not ctx.odd and abs(kk) == 1
    target = -kk if special else kk
    out = NCPoly()
    for (l, m), v in rinv_rows.get((i, h), ()):
        out = out + _lemma_bracket(ctx, l, m, target, j, rhat_cols).scale(v)
    if special:
        factor = -qpow(-2 + 2 * eta(j) * eta(kk))
        return ctx.nf(out, ctx.euclid.ratio(kk)).scale(factor)
    return out.scale(ctx.gamma.ratio(kk))


def lemma1_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """μ 與 φ(SL) 的交換、偶數 N 的 \\bar μ_{±1} 關係、φ⁻φ⁺ 重排"""
    idx = ctx.scheme.indices
    out: List[Instance] = []
    rinv_cols = cols_of(ctx.cross.rinv)
    rhat_cols = cols_of(ctx.euclid.rhat)

    for a, i, b in sampling.tuples(idx, 3):
        def rmux_minus(a=a, i=i, b=b) -> CheckResult:
            lhs = ctx.nf(ctx.mu(a), ctx.phi_S("-", i, b))
            rhs = NCPoly()
            for (c, d), v in rinv_cols.get((a, b), ()):
                rhs = rhs + ctx.nf(ctx.phi_S("-", i, c), ctx.mu(d)).scale(v)
            return verdict(ctx.rules, lhs, rhs, sampling)

        def rmux_plus(a=a, i=i, b=b) -> CheckResult:
            lhs = ctx.nf(ctx.mubar(a), ctx.phi_S("+", i, b))
            rhs = NCPoly()
            for (c, d), v in rhat_cols.get((a, b), ()):
                rhs = rhs + ctx.nf(ctx.phi_S("+", i, c), ctx.mubar(d)).scale(v)
            return verdict(ctx.rules, lhs, rhs, sampling)

        out.append((f"mu-exchange[-,{_label(a, i, b)}]", rmux_minus))
        out.append((f"mu-exchange[+,{_label(a, i, b)}]", rmux_plus))

    if not ctx.odd:
        for s in (1, -1):
            def mubar(s=s) -> CheckResult:
                rhs = ctx.nf(ctx.mu(-s), ctx.euclid.ratio(s)).scale(-q ** 2)
                return verdict(ctx.rules, ctx.mubar(s), rhs, sampling)
            out.append((f"mubar[{s}]", mubar))

    for i, kk, h, j in sampling.tuples(idx, 4):
        def reorder(i=i, kk=kk, h=h, j=j) -> CheckResult:
            lhs = ctx.nf(ctx.phi_S("-", i, kk), ctx.phi_S("+", h, j))
            return verdict(ctx.rules, lhs, lemma_rhs(ctx, i, kk, h, j), sampling)
        out.append((f"phi-reorder[i={i},k={kk},h={h},j={j}]", reorder))
    return out


# ─────────────────────────────────────────────────────────────
# ζ⁺ζ⁻ 重排
# ─────────────────────────────────────────────────────────────

def _zeta_or_none(sign: str, i: int, j: int) -> Optional[Zeta]:
    return Zeta(sign, i, j) if in_borel(sign, i, j) else None


def reorder_terms(ctx: DecoupleContext, i: int, kk: int, h: int, j: int, reading: str = READING_COLLAPSED,
                  tamper: bool = False) -> List[Tuple[Scalar, List[Factor]]]:
    """
    ζ5⁺(L⁺^h_j)ζ5⁻(L⁻^i_k) 的重排右側，展開成 (係數, 因子串) 清單

    tamper=True 時左側係數改用 \\hat R（負控制組）。
    reading 只影響偶數 N、k = ±1：literal 在括號後多一個 ζ5⁺(L⁺^l_r)。
    """
    left = rows_of(ctx.euclid.rhat if tamper else ctx.cross.rinv)
    right = cols_of(ctx.euclid.rhat)
    gamma = ctx.gamma
    special = not ctx.odd and abs(kk) == 1
    if ctx.odd:
        prefactor = gamma.ratio(kk)
    elif special:
        prefactor = -qpow(-2 + eta(j) * (eta(i) + eta(kk)))
    else:
        prefactor = gamma.ratio(kk) * qpow(eta(j) * (eta(i) - eta(kk)))
    target = -kk if special else kk

    terms: List[Tuple[Scalar, List[Factor]]] = []
    for (l, m), v1 in left.get((i, h), ()):
        for (r, s), v2 in right.get((target, j), ()):
            plus = _zeta_or_none("+", l, r)
            if plus is None:
                continue
            coeff = prefactor * v1 * v2 * gamma.bar_ratio(s)
            if not ctx.odd and abs(s) == 1:
                minus = _zeta_or_none("-", m, -s)
                factors: List[Factor] = [minus, plus, ctx.euclid.ratio(s)]
                coeff = coeff * qpow(2 + eta(s) * (eta(r) - eta(l)))
            else:
                minus = _zeta_or_none("-", m, s)
                factors = [minus, plus]
            if minus is None:
                continue
            if special:
                if reading == READING_LITERAL:
                    factors.append(plus)
                factors.append(ctx.euclid.ratio(kk))
            terms.append((coeff, factors))
    return terms


def reorder_instances(ctx: DecoupleContext, sampling: Sampling, tamper: bool = False) -> List[Instance]:
    """
    兩個 Borel 的 ζ5 影像互換次序

    偶數 N、k = ±1 兩種讀法都計算：恰有一種殘差為零時 PASS 並在 detail 註明讀法。
    """
    out: List[Instance] = []
    idx = ctx.scheme.indices
    for i, kk, h, j in sampling.tuples(idx, 4):
        if not (in_borel("+", h, j) and in_borel("-", i, kk)):
            continue
        key = f"zeta-reorder[i={i},k={kk},h={h},j={j}]"

        def check(i=i, kk=kk, h=h, j=j) -> CheckResult:
            lhs = ctx.evaluate([Zeta("+", h, j), Zeta("-", i, kk)])
            if ctx.odd or abs(kk) != 1:
                rhs = ctx.evaluate_sum(reorder_terms(ctx, i, kk, h, j, tamper=tamper))
                return verdict(ctx.rules, lhs, rhs, sampling)
            residuals = {}
            for reading in (READING_LITERAL, READING_COLLAPSED):
                rhs = ctx.evaluate_sum(reorder_terms(ctx, i, kk, h, j, reading, tamper))
                residuals[reading] = ctx.rules.normal_form(lhs - rhs)
            zero = [name for name, res in residuals.items() if res.is_zero()]
            if len(zero) == 1:
                return CheckResult("", CheckStatus.PASS, detail=f"reading={zero[0]}")
            if len(zero) == 2:
                return CheckResult("", CheckStatus.INCONCLUSIVE, detail="兩種讀法皆成立")
            residual = residuals[READING_COLLAPSED]
            return CheckResult("", classify_residual(residual, ctx.rules), len(residual),
                               detail=f"兩種讀法皆不成立: {residual.text()}")
        out.append((key, check))
    return out


# ─────────────────────────────────────────────────────────────
# *-結構
# ─────────────────────────────────────────────────────────────

def star_structure_instances(preset) -> List[Instance]:
    """預設上每個 *-結構的對合與保持關係檢查"""
    out: List[Instance] = []
    for name in stars_for(preset):
        star = build_star(name, preset)
        out.extend(star.instances())
    return out


def _zeta_mapping(ctx: DecoupleContext) -> Dict[str, NCPoly]:
    """ζ5 只定義在 H 上；Cartan 字母的影像為 1"""
    mapping = {}
    for x in ctx.rules.alphabet:
        spec = ctx.letter_spec(x.name)
        if spec:
            mapping[x.name] = ctx.zeta(*spec)
        elif x.family == Family.CARTAN:
            mapping[x.name] = NCPoly.one()
    return mapping


def real_mode_context(ctx: DecoupleContext) -> DecoupleContext:
    """q 實數模式的 *-檢查用的 γ：預設值換成 real_q_gamma，覆寫檔原樣沿用"""
    if ctx.gamma.label != GAMMA_DEFAULT:
        return ctx
    return DecoupleContext(ctx.cross, real_q_gamma(ctx.scheme.N))


def star_decoupling_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """
    φ± 與 ζ5± 對 *-結構的相容性

    |q|=1：φ^±(α*) 對 [φ^±(α)]*；q 實數：φ^±(α*) 對 [φ^∓(α)]*，ζ5 同理。
    ζ 的比較兩側先左乘不透明根的清除因子。
    """
    out: List[Instance] = []
    cross = ctx.cross
    unit = build_star("frt-noncompact", cross)
    real = build_star("frt-compact", cross)
    rctx = real_mode_context(ctx)
    multiplier = ctx.opaque_multiplier()

    for mode, star, c in (("unit", unit, ctx), ("real", real, rctx)):
        phi_map = phi_mapping(c)
        zeta_map = _zeta_mapping(c)
        for alpha_sign in SIGNS:
            for i, j in _borel_pairs(c, alpha_sign):
                def phi_star(star=star, c=c, alpha_sign=alpha_sign, i=i, j=j, phi_map=phi_map) -> CheckResult:
                    alpha = cross.frt(alpha_sign, i, j)
                    lhs = apply_map(phi_map, star.apply(alpha), c.rules)
                    rhs = star.apply(c.phi(alpha_sign, i, j))
                    return verdict(c.rules, lhs, rhs)

                def zeta_star(star=star, c=c, alpha_sign=alpha_sign, i=i, j=j, zeta_map=zeta_map) -> CheckResult:
                    alpha = cross.frt(alpha_sign, i, j)
                    lhs = apply_map(zeta_map, star.apply(alpha), c.rules)
                    rhs = star.apply(c.zeta(alpha_sign, i, j))
                    return verdict(c.rules, c.nf(multiplier, lhs), c.nf(multiplier, rhs))

                out.append((f"phi-star[{mode},{alpha_sign},{_label(i, j)}]", phi_star))
                out.append((f"zeta-star[{mode},{alpha_sign},{_label(i, j)}]", zeta_star))

        def involution(star=star, c=c, mode=mode) -> CheckResult:
            bad = NCPoly()
            for sign in SIGNS:
                for i, j in _borel_pairs(c, sign):
                    image = c.phi(sign, i, j)
                    bad = bad + c.rules.normal_form(star.apply(star.apply(image)) - image)
            return identity_check("", bad, c.rules)
        out.append((f"phi-star-involution[{mode}]", involution))
    return out


def real_gamma_instances(N: int) -> Tuple[List[Instance], Dict[str, Optional[List[str]]]]:
    """|q|=1 實性條件的 γ 搜尋；找不到解的索引記為 INCONCLUSIVE"""
    found = real_gamma_search(N)
    notes = {str(a): ([format_scalar(x) for x in pair] if pair else None) for a, pair in found.items()}
    out: List[Instance] = []
    for a, pair in found.items():
        def check(pair=pair) -> CheckResult:
            if pair is None:
                return CheckResult("", CheckStatus.INCONCLUSIVE, detail="搜尋範圍內無同時滿足乘積約束的解")
            return CheckResult("", CheckStatus.PASS, detail=" / ".join(format_scalar(x) for x in pair))
        out.append((f"real-gamma[{a}]", check))
    return out, notes


# ─────────────────────────────────────────────────────────────
# ζ8 變體
# ─────────────────────────────────────────────────────────────

def variant_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """ζ8 = ζ5∘S 及 ζ8 的反同態性；兩側先左乘不透明根的清除因子（兩個影像的乘積取兩倍次方）"""
    out: List[Instance] = []
    idx = ctx.scheme.indices
    multiplier = ctx.opaque_multiplier()
    pair_multiplier = ctx.opaque_multiplier(2)
    g = ctx.metric

    def s_factor(sign: str, a: int, b: int) -> Tuple[Scalar, Optional[Zeta]]:
        """ζ5(S L^a_b) = g_{b,-b} g^{-a,a} ζ5(L^{-b}_{-a})"""
        return g.g(b, -b) * g.ginv(-a, a), _zeta_or_none(sign, -b, -a)

    for sign in SIGNS:
        for i, j in _borel_pairs(ctx, sign):
            def single(sign=sign, i=i, j=j) -> CheckResult:
                lhs = ctx.nf(multiplier, ctx.zeta8(sign, i, j))
                rhs = ctx.nf(multiplier, ctx.zeta_S(sign, i, j))
                return verdict(ctx.rules, lhs, rhs, sampling)
            out.append((f"zeta8[{sign},{_label(i, j)}]", single))

        for a, j, b, kk in sampling.tuples(idx, 4):
            if not (in_borel(sign, a, j) and in_borel(sign, b, kk)):
                continue

            def anti(sign=sign, a=a, j=j, b=b, kk=kk) -> CheckResult:
                # ζ8(L^a_j L^b_k) = Σ φ(L^a_h)φ(L^b_l) S L^l_k S L^h_j
                lhs = NCPoly()
                for hh in idx:
                    for ll in idx:
                        s1 = ctx.cross.antipode(sign, ll, kk)
                        s2 = ctx.cross.antipode(sign, hh, j)
                        if not (s1 and s2):
                            continue
                        lhs = lhs + ctx.nf(_phi(ctx, sign, a, hh), _phi(ctx, sign, b, ll), s1, s2)
                c1, z1 = s_factor(sign, b, kk)
                c2, z2 = s_factor(sign, a, j)
                rhs = ctx.evaluate([z1, z2]).scale(c1 * c2) if z1 and z2 else NCPoly()
                return verdict(ctx.rules, ctx.nf(pair_multiplier, lhs), ctx.nf(pair_multiplier, rhs), sampling)
            out.append((f"zeta8-anti[{sign},{_label(a, j, b, kk)}]", anti))
    return out


def zeta7_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """ζ7 = ζ5∘S^(-1)；只列入報告附註，不影響套件判定"""
    out: List[Instance] = []
    multiplier = ctx.opaque_multiplier()
    for sign in SIGNS:
        for i, j in _borel_pairs(ctx, sign):
            def single(sign=sign, i=i, j=j) -> CheckResult:
                lhs = ctx.nf(multiplier, ctx.zeta7(sign, i, j))
                rhs = ctx.nf(multiplier, ctx.zeta_Sinv(sign, i, j))
                return verdict(ctx.rules, lhs, rhs, sampling)
            out.append((f"zeta7[{sign},{_label(i, j)}]", single))
    return out


# ─────────────────────────────────────────────────────────────
# 分解
# ─────────────────────────────────────────────────────────────

def decomposition_words(ctx: DecoupleContext) -> List[Tuple[str, ...]]:
    """p^i L、L⁺L⁻ 與 L⁺L⁻p^i"""
    cross = ctx.cross
    plus = [name for (sign, _, _), name in cross.frt_letters.items() if sign == "+"]
    minus = [name for (sign, _, _), name in cross.frt_letters.items() if sign == "-"]
    coords = ctx.euclid.coords()
    words: List[Tuple[str, ...]] = []
    for p in coords:
        for name in plus + minus:
            words.append((p, name))
    for a in plus:
        for b in minus:
            words.append((a, b))
            for p in coords:
                words.append((a, b, p))
    return words


def decomposition_instances(ctx: DecoupleContext, sampling: Sampling) -> List[Instance]:
    """交叉積的字寫成 ζ5 影像與 A 元素的交錯乘積後，第二層求值須回到原字的正規形"""
    out: List[Instance] = []
    for word in decomposition_words(ctx):
        def check(word=word) -> CheckResult:
            total = NCPoly()
            for factors in ctx.decompose_word(word):
                total = total + ctx.evaluate(factors)
            return verdict(ctx.rules, total, NCPoly.word(word), sampling)
        out.append((f"decomposition[{'·'.join(word)}]", check))
    return out


# ─────────────────────────────────────────────────────────────
# 讀法統計
# ─────────────────────────────────────────────────────────────

def reading_tally(checks) -> Dict[str, int]:
    """各讀法成立的實例數（依 detail 中的 reading=…）"""
    tally = {READING_LITERAL: 0, READING_COLLAPSED: 0}
    for check in checks:
        if check.detail.startswith("reading="):
            name = check.detail.split("=", 1)[1]
            tally[name] = tally.get(name, 0) + 1
    return tally


def reading_consistency(checks) -> CheckResult:
    """所有 k = ±1 實例必須由同一種讀法成立；兩種讀法各有實例成立時為 FAIL"""
    tally = reading_tally(checks)
    used = sorted(name for name, count in tally.items() if count)
    if len(used) > 1:
        return CheckResult("reading-consistency", CheckStatus.FAIL, detail=f"讀法不一致: {tally}")
    return CheckResult("reading-consistency", CheckStatus.PASS,
                       detail=f"一致讀法: {used[0]}" if used else "")


__all__ = [
    "Instance", "READING_COLLAPSED", "READING_LITERAL", "Sampling", "commutant_instances",
    "decomposition_instances", "decomposition_words", "homomorphism_instances", "lemma1_instances",
    "lemma_rhs", "phi_mapping", "reading_consistency", "reading_tally", "real_gamma_instances",
    "real_mode_context", "reorder_instances", "reorder_terms", "star_decoupling_instances",
    "star_structure_instances", "variant_instances", "verdict", "zeta7_instances",
]
