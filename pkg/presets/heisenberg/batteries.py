"""
Heisenberg 驗證套件
φ_α 代入 FRT 關係、穿越關係、ζ 與 x、∂ 的交換、*-相容性與 α 的裁定
"""

from typing import Callable, Dict, List, Optional, Tuple

from core.ncpoly import NCPoly
from core.report import CheckResult, CheckStatus
from core.rewriting import UnmappedLetterError, apply_map
from core.scalar import Scalar
from presets.euclid.algebra import cols_of, rows_of
from presets.euclid.batteries import Instance, Sampling, verdict
from presets.euclid.stars import StarConstructionError, StarStructure

from .algebra import SIGNS, HeisenbergPreset, d_name, in_borel, x_name
from .images import ALPHAS, HeisImages, Image, images_shipped
from .stars import build_heis_star, heis_stars_for


MISSING_DETAIL = "影像需要未加入的根字母"


class MissingImageError(LookupError):
    """影像需要未加入的根字母"""


def _need(image: Image) -> NCPoly:
    if image is None:
        raise MissingImageError(MISSING_DETAIL)
    return image


def _guard(check: Callable[[], CheckResult]) -> Callable[[], CheckResult]:
    """缺影像時判 INCONCLUSIVE"""
    def run() -> CheckResult:
        try:
            return check()
        except (MissingImageError, UnmappedLetterError):
            return CheckResult("", CheckStatus.INCONCLUSIVE, detail=MISSING_DETAIL)
    return run


def _label(*parts) -> str:
    return ",".join(str(x) for x in parts)


def _borel_pairs(preset: HeisenbergPreset, sign: str) -> List[Tuple[int, int]]:
    return [(i, j) for i, j in preset.scheme.pairs if in_borel(preset.scheme, sign, i, j)]


def phi_mapping(preset: HeisenbergPreset, images: HeisImages) -> Dict[str, NCPoly]:
    """L 字母送往 φ 影像（缺的不放入），A 的字母不動"""
    mapping = {name: NCPoly.letter(name) for name in preset.rules.alphabet.names()}
    for (sign, i, j), name in preset.frt_letters().items():
        image = images.phi(sign, i, j)
        if image is not None:
            mapping[name] = image
    return mapping


# ─────────────────────────────────────────────────────────────
# FRT 關係
# ─────────────────────────────────────────────────────────────

def frt_check(preset: HeisenbergPreset, images: HeisImages, s1: str, s2: str,
              a: int, b: int, e: int, f: int, sampling: Optional[Sampling] = None) -> CheckResult:
    """\\hat R^{ab}_{cd} φ(L^{s1 d}_f) φ(L^{s2 c}_e) = φ(L^{s2 b}_c) φ(L^{s1 a}_d) \\hat R^{dc}_{ef}"""
    rows, cols = rows_of(preset.rhat), cols_of(preset.rhat)

    def phi(sign: str, i: int, j: int) -> NCPoly:
        return _need(images.phi(sign, i, j))

    lhs = NCPoly()
    for (c, d), v in rows.get((a, b), ()):
        lhs = lhs + preset.nf(phi(s1, d, f), phi(s2, c, e)).scale(v)
    rhs = NCPoly()
    for (d, c), v in cols.get((e, f), ()):
        rhs = rhs + preset.nf(phi(s2, b, c), phi(s1, a, d)).scale(v)
    return verdict(preset.rules, lhs, rhs, sampling)


def frt_instances(preset: HeisenbergPreset, images: HeisImages, sampling: Sampling) -> List[Instance]:
    """L⁺L⁺、L⁻L⁻、混合關係、對角乘積、對角互逆與零模式；so 另含度量關係與度量反元"""
    idx = preset.scheme.indices
    out: List[Instance] = []
    for a, b, e, f in sampling.tuples(idx, 4):
        for s1, s2 in (("+", "+"), ("-", "-"), ("+", "-")):
            out.append((f"frt[{s1}{s2},{_label(a, b, e, f)}]",
                        _guard(lambda s1=s1, s2=s2, t=(a, b, e, f): frt_check(preset, images, s1, s2, *t, sampling))))

    one = NCPoly.one()
    for sign in SIGNS:
        def diag_product(sign=sign) -> CheckResult:
            factors = [_need(images.phi(sign, i, i)) for i in idx]
            return verdict(preset.rules, preset.nf(*factors), one)
        out.append((f"diag-product[{sign}]", _guard(diag_product)))

        for i in idx:
            for j in idx:
                if in_borel(preset.scheme, sign, i, j):
                    continue
                out.append((f"zero-pattern[{sign},{_label(i, j)}]",
                            lambda sign=sign, i=i, j=j: verdict(preset.rules, images.phi(sign, i, j), NCPoly())))

    for i in idx:
        def diag_inverse(i=i) -> CheckResult:
            plus, minus = _need(images.phi("+", i, i)), _need(images.phi("-", i, i))
            first = verdict(preset.rules, preset.nf(minus, plus), one)
            if first.status != CheckStatus.PASS:
                return first
            return verdict(preset.rules, preset.nf(plus, minus), one)
        out.append((f"diag-inverse[{i}]", _guard(diag_inverse)))

    for sign in SIGNS:
        for i, j in preset.scheme.pairs:
            def left_inverse(sign=sign, i=i, j=j) -> CheckResult:
                total = NCPoly()
                for h in idx:
                    total = total + preset.nf(_need(images.phi_S(sign, i, h)), _need(images.phi(sign, h, j)))
                return verdict(preset.rules, total, one if i == j else NCPoly())
            out.append((f"antipode-left[{sign},{_label(i, j)}]", _guard(left_inverse)))

    if preset.case == "so":
        out.extend(_metric_instances(preset, images))
    return out


def _metric_instances(preset: HeisenbergPreset, images: HeisImages) -> List[Instance]:
    g = preset.metric
    idx = preset.scheme.indices
    out: List[Instance] = []

    def phi(sign: str, i: int, j: int) -> NCPoly:
        return _need(images.phi(sign, i, j))

    for sign in SIGNS:
        for i in idx:
            for h in idx:
                def upper(sign=sign, i=i, h=h) -> CheckResult:
                    lhs = NCPoly()
                    for kk in idx:
                        lhs = lhs + preset.nf(phi(sign, i, -kk), phi(sign, h, kk)).scale(g.ginv(kk, -kk))
                    return verdict(preset.rules, lhs, NCPoly.const(g.ginv(h, i)))

                def lower(sign=sign, i=i, h=h) -> CheckResult:
                    lhs = NCPoly()
                    for kk in idx:
                        lhs = lhs + preset.nf(phi(sign, -kk, i), phi(sign, kk, h)).scale(g.g(kk, -kk))
                    return verdict(preset.rules, lhs, NCPoly.const(g.g(h, i)))

                def antipode(sign=sign, i=i, h=h) -> CheckResult:
                    # φ(SL^i_h) = g_{h,-h} g^{-i,i} φ(L^{-h}_{-i})
                    rhs = images.phi(sign, -h, -i)
                    return verdict(preset.rules, _need(images.phi_S(sign, i, h)),
                                   _need(rhs).scale(g.g(h, -h) * g.ginv(-i, i)))

                out.append((f"metric-upper[{sign},{_label(i, h)}]", _guard(upper)))
                out.append((f"metric-lower[{sign},{_label(i, h)}]", _guard(lower)))
                out.append((f"metric-antipode[{sign},{_label(i, h)}]", _guard(antipode)))
    return out


# ─────────────────────────────────────────────────────────────
# 穿越關係與 ζ
# ─────────────────────────────────────────────────────────────

def crossing_instances(preset: HeisenbergPreset, images: HeisImages) -> List[Instance]:
    """
    A 內的穿越：x^i φ(L^a_b) = Σ φ(L^a_c) ρ^i_j(L^c_b) x^j，
    ∂_i φ(L^a_b) = Σ φ(L^a_c) ρ^h_i(S^(-1)L^c_b) ∂_h
    """
    mapping = phi_mapping(preset, images)
    out: List[Instance] = []
    for sign in SIGNS:
        for a, b in _borel_pairs(preset, sign):
            for i in preset.scheme.indices:
                for gen, letter in (("x", preset.x(i)), ("d", preset.d(i))):
                    def check(sign=sign, a=a, b=b, i=i, gen=gen, letter=letter) -> CheckResult:
                        lhs = preset.nf(letter, _need(images.phi(sign, a, b)))
                        rhs = apply_map(mapping, preset.crossing_rhs(gen, i, sign, a, b), preset.rules)
                        return verdict(preset.rules, lhs, rhs)
                    out.append((f"crossing[{gen},{sign},{_label(a, b, i)}]", _guard(check)))
    return out


def commutant_instances(preset: HeisenbergPreset, images: HeisImages) -> List[Instance]:
    """[ζ(L^±^i_j), x^k] = [ζ(L^±^i_j), ∂_k] = 0，在交叉積規則中判定"""
    rules = preset.cross_rules
    out: List[Instance] = []
    for sign in SIGNS:
        for i, j in _borel_pairs(preset, sign):
            for kk in preset.scheme.indices:
                for name in (x_name(kk), d_name(kk)):
                    def check(sign=sign, i=i, j=j, name=name) -> CheckResult:
                        z = _need(images.zeta(sign, i, j))
                        u = NCPoly.letter(name)
                        return verdict(rules, rules.nf(u, z), rules.nf(z, u))
                    out.append((f"commutant[{sign},i={i},j={j},{name}]", _guard(check)))
    return out


# ─────────────────────────────────────────────────────────────
# *-結構
# ─────────────────────────────────────────────────────────────

def _construction_failure(check_id: str, error: Exception) -> Instance:
    return (check_id, lambda: CheckResult("", CheckStatus.INCONCLUSIVE, detail=str(error)))


def star_structure_instances(preset: HeisenbergPreset) -> List[Instance]:
    """heis-unit（與 so 的 heis-real）在 A 與交叉積上的對合與保持關係"""
    out: List[Instance] = []
    for name in heis_stars_for(preset):
        for cross in (False, True):
            try:
                star = build_heis_star(name, preset, cross=cross)
            except StarConstructionError as e:
                suffix = "-cross" if cross else ""
                out.append(_construction_failure(f"{name}{suffix}:construction", e))
                continue
            out.extend(star.instances())
    return out


def star_compat_tally(preset: HeisenbergPreset, images: HeisImages, plain: StarStructure,
                      cross: StarStructure) -> Tuple[int, int, int]:
    """φ(L*) 對 φ(L)* 的 (為零, 不為零, 缺影像) 次數"""
    mapping = phi_mapping(preset, images)
    passed = failed = missing = 0
    for sign in SIGNS:
        for i, j in _borel_pairs(preset, sign):
            try:
                lhs = apply_map(mapping, cross.apply(preset.frt(sign, i, j)), preset.rules)
                rhs = plain.apply(_need(images.phi(sign, i, j)))
            except (MissingImageError, UnmappedLetterError):
                missing += 1
                continue
            if preset.rules.normal_form(lhs - rhs).is_zero():
                passed += 1
            else:
                failed += 1
    return passed, failed, missing


def _adjudication(tally: Tuple[int, int, int]) -> CheckResult:
    passed, failed, missing = tally
    total = passed + failed + missing
    if failed == 0 and missing == 0:
        return CheckResult("", CheckStatus.PASS, detail=f"{total} 個實例皆成立")
    return CheckResult("", CheckStatus.INCONCLUSIVE,
                       detail=f"{failed}/{total} 個實例不成立，{missing} 個缺影像")


def mixed_tally(preset: HeisenbergPreset, images: HeisImages, sampling: Sampling) -> Tuple[int, int, int]:
    passed = failed = missing = 0
    for a, b, e, f in sampling.tuples(preset.scheme.indices, 4):
        try:
            result = frt_check(preset, images, "+", "-", a, b, e, f)
        except MissingImageError:
            missing += 1
            continue
        if result.status == CheckStatus.PASS:
            passed += 1
        else:
            failed += 1
    return passed, failed, missing


def alpha_mixed_instances(preset: HeisenbergPreset, sampling: Sampling) -> List[Instance]:
    """每個 α 的混合 L⁺L⁻ 關係；全部成立才 PASS，否則 INCONCLUSIVE"""
    out: List[Instance] = []
    for label, alpha in ALPHAS.items():
        def check(alpha: Scalar = alpha) -> CheckResult:
            return _adjudication(mixed_tally(preset, HeisImages(preset, alpha), sampling))
        out.append((f"alpha[{label}]:mixed", check))
    return out


def alpha_star_instances(preset: HeisenbergPreset) -> List[Instance]:
    """每個 α、每種模式的 φ_α 與 * 的相容性"""
    out: List[Instance] = []
    for name in heis_stars_for(preset):
        mode = name.split("-", 1)[1]
        try:
            plain = build_heis_star(name, preset)
            cross = build_heis_star(name, preset, cross=True)
        except StarConstructionError as e:
            for label in ALPHAS:
                out.append(_construction_failure(f"alpha[{label}]:star-{mode}", e))
            continue
        for label, alpha in ALPHAS.items():
            def check(alpha: Scalar = alpha, plain=plain, cross=cross) -> CheckResult:
                images = HeisImages(preset, alpha)
                return _adjudication(star_compat_tally(preset, images, plain, cross))
            out.append((f"alpha[{label}]:star-{mode}", check))
    return out


def admissible_alphas(checks) -> List[str]:
    """alpha[α]:… 全部 PASS 的 α"""
    out = []
    for label in ALPHAS:
        related = [c for c in checks if c.id.startswith(f"alpha[{label}]:")]
        if related and all(c.status == CheckStatus.PASS for c in related):
            out.append(label)
    return out


def not_shipped_instance(preset: HeisenbergPreset) -> Instance:
    return (f"images[{preset.preset_id}]",
            lambda: CheckResult("", CheckStatus.INCONCLUSIVE, detail="沒有提供此情形的 φ 影像"))


def heisenberg_instances(preset: HeisenbergPreset, sampling: Sampling) -> List[Instance]:
    """φ（α = 1）的全部代數檢查與混合關係的 α 裁定"""
    if not images_shipped(preset):
        return [not_shipped_instance(preset)]
    images = HeisImages(preset)
    out = frt_instances(preset, images, sampling)
    out.extend(crossing_instances(preset, images))
    out.extend(commutant_instances(preset, images))
    out.extend(alpha_mixed_instances(preset, sampling))
    return out


def star_instances(preset: HeisenbergPreset) -> List[Instance]:
    out = star_structure_instances(preset)
    if images_shipped(preset):
        out.extend(alpha_star_instances(preset))
    return out


__all__ = [
    "MissingImageError", "admissible_alphas", "alpha_mixed_instances", "alpha_star_instances",
    "commutant_instances", "crossing_instances", "frt_check", "frt_instances", "heisenberg_instances",
    "mixed_tally", "phi_mapping", "star_compat_tally", "star_instances", "star_structure_instances",
]
