"""
改寫系統
規則集、正規形、二次關係導出、局部合流檢查、擬縮放偵測、根與逆元的擴充

規則一律是「首字 → 次數更低的組合」，單項式序由 Alphabet.word_key 決定。
RuleSet 建構完成後視為不可變，normal_form 為純函數（內部快取不影響結果）。
"""

import random
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from sympy.polys.matrices import DomainMatrix

from .ncpoly import EMPTY, Alphabet, Family, Letter, NCPoly, Word, word_from_pairs, word_pairs, word_text
from .report import CheckReport, CheckResult, CheckStatus
from .scalar import (
    DOMAIN, ONE, ZERO, Scalar, conjugate, format_scalar, monomial_parts, spow,
)


ENGINE_VERSION = "1.0.0"
DEFAULT_FUEL = 1_000_000

L_FAMILIES = (Family.LPLUS, Family.LMINUS)


class RuleOrderError(ValueError):
    """規則方向與單項式序不相容"""


class NonTerminationError(RuntimeError):
    """化簡步數超過上限"""

    def __init__(self, word: Word):
        super().__init__(f"疑似不終止: {word_text(word)}")
        self.word = word


class ScalingError(ValueError):
    """不是擬縮放對"""


class RootNotAdjoinableError(ValueError):
    """縮放指數無法開根"""


class UnmappedLetterError(KeyError):
    """映射未定義於某字母"""


class _Budget:
    __slots__ = ("left",)

    def __init__(self, fuel: int):
        self.left = fuel

    def spend(self, word: Word) -> None:
        self.left -= 1
        if self.left < 0:
            raise NonTerminationError(word)


def _accumulate(acc: Dict[Word, Scalar], word: Word, value: Scalar) -> None:
    v = acc.get(word, ZERO) + value
    if v:
        acc[word] = v
    else:
        acc.pop(word, None)


class RuleSet:
    """改寫規則集合（含字母表、燃料上限、對 L 不透明的字母）"""

    def __init__(self, alphabet: Alphabet, rules: Optional[Mapping[Word, NCPoly]] = None,
                 fuel: int = DEFAULT_FUEL, opaque: Iterable[str] = (), meta: Optional[Dict] = None):
        self.alphabet = alphabet
        self.fuel = fuel
        self.opaque: Set[str] = set(opaque)
        self.meta: Dict = dict(meta or {})
        self.rules: Dict[Word, NCPoly] = {}
        self._by_first: Dict[str, Set[int]] = {}
        self._cache: Dict[Word, Dict[Word, Scalar]] = {}
        for lhs, rhs in (rules or {}).items():
            self.add_rule(lhs, rhs)

    # ── 規則維護 ──────────────────────────────────────────────

    def copy(self) -> "RuleSet":
        out = RuleSet(self.alphabet, fuel=self.fuel, opaque=self.opaque, meta=self.meta)
        out.rules = dict(self.rules)
        out._by_first = {x: set(v) for x, v in self._by_first.items()}
        return out

    def with_alphabet(self, alphabet: Alphabet) -> "RuleSet":
        out = self.copy()
        out.alphabet = alphabet
        return out

    def _invalidate(self) -> None:
        self._cache = {}

    def _reindex(self) -> None:
        self._by_first = {}
        for lhs in self.rules:
            self._by_first.setdefault(lhs[0], set()).add(len(lhs))

    def add_rule(self, lhs: Word, rhs: NCPoly, check_order: bool = True) -> None:
        lhs = tuple(lhs)
        if not lhs:
            raise RuleOrderError("規則左邊不可為空字")
        for name in lhs:
            self.alphabet[name]
        if check_order:
            key = self.alphabet.word_key(lhs)
            for w in rhs.terms:
                if self.alphabet.word_key(w) >= key:
                    raise RuleOrderError(
                        f"規則 {word_text(lhs)} → … 右邊含不小於左邊的字 {word_text(w)}"
                    )
        self.rules[lhs] = rhs
        self._by_first.setdefault(lhs[0], set()).add(len(lhs))
        self._invalidate()

    def remove_rule(self, lhs: Word) -> NCPoly:
        rhs = self.rules.pop(tuple(lhs))
        self._reindex()
        self._invalidate()
        return rhs

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, lhs: Word) -> bool:
        return tuple(lhs) in self.rules

    def sorted_rules(self) -> List[Tuple[Word, NCPoly]]:
        return sorted(self.rules.items(), key=lambda kv: self.alphabet.word_key(kv[0]))

    def reducible_letters(self) -> Set[str]:
        """本身就是某條規則左邊的字母"""
        return {lhs[0] for lhs in self.rules if len(lhs) == 1}

    # ── 正規形 ────────────────────────────────────────────────

    def find_redex(self, word: Word, skip_whole: bool = False) -> Optional[Tuple[int, int]]:
        """最左可化簡位置 (起點, 長度)"""
        n = len(word)
        for i, x in enumerate(word):
            for length in sorted(self._by_first.get(x, ())):
                if i + length > n:
                    continue
                if skip_whole and i == 0 and length == n:
                    continue
                if word[i:i + length] in self.rules:
                    return i, length
        return None

    def is_reducible(self, word: Word) -> bool:
        return self.find_redex(word) is not None

    def _nf_word(self, word: Word, budget: _Budget) -> Dict[Word, Scalar]:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        redex = self.find_redex(word)
        if redex is None:
            result = {word: ONE}
        else:
            budget.spend(word)
            i, length = redex
            prefix, suffix = word[:i], word[i + length:]
            result = {}
            for w, c in self.rules[word[i:i + length]].terms.items():
                for w2, c2 in self._nf_word(prefix + w + suffix, budget).items():
                    _accumulate(result, w2, c * c2)
        self._cache[word] = result
        return result

    def normal_form(self, p: NCPoly) -> NCPoly:
        """
        化簡到沒有規則可用為止

        Raises:
            NonTerminationError: 步數超過 fuel
        """
        budget = _Budget(self.fuel)
        acc: Dict[Word, Scalar] = {}
        try:
            for word, c in p.terms.items():
                for w2, c2 in self._nf_word(word, budget).items():
                    _accumulate(acc, w2, c * c2)
        except RecursionError:
            raise NonTerminationError(next(iter(p.terms), EMPTY)) from None
        out = NCPoly()
        out.terms = acc
        return out

    def nf(self, *factors: NCPoly) -> NCPoly:
        """依序相乘並逐步化簡"""
        out = NCPoly.one()
        for f in factors:
            out = self.normal_form(out * f)
        return out

    # ── 內部化簡 ──────────────────────────────────────────────

    def orient(self, relation: NCPoly) -> Optional[Tuple[Word, NCPoly]]:
        """將 relation = 0 定向為「首字 → 其餘」，零關係回傳 None"""
        rel = self.normal_form(relation)
        if rel.is_zero():
            return None
        lead, c = rel.leading(self.alphabet)
        rest = rel - NCPoly.word(lead, c)
        return lead, rest.scale(-ONE / c)

    def inter_reduce(self) -> None:
        """
        讓每條規則左邊不可被其他規則化簡，右邊皆為正規形

        左邊可化簡的規則改寫為關係重新定向，化為零則捨去。
        """
        changed = True
        while changed:
            changed = False
            for lhs, _ in self.sorted_rules():
                if lhs not in self.rules:
                    continue
                if self.find_redex(lhs, skip_whole=True) is None:
                    continue
                rhs = self.remove_rule(lhs)
                oriented = self.orient(NCPoly.word(lhs) - rhs)
                if oriented is not None:
                    self.add_rule(*oriented)
                changed = True
        for lhs, rhs in self.sorted_rules():
            self.rules[lhs] = self.normal_form(rhs)
        self._invalidate()

    # ── 統計與序列化 ──────────────────────────────────────────

    def stats(self) -> Dict:
        families: Dict[str, int] = {}
        for letter in self.alphabet:
            families[letter.family.name] = families.get(letter.family.name, 0) + 1
        lengths: Dict[str, int] = {}
        for lhs in self.rules:
            lengths[str(len(lhs))] = lengths.get(str(len(lhs)), 0) + 1
        return {
            "letters": families,
            "rules": len(self.rules),
            "rules_by_length": dict(sorted(lengths.items())),
            "opaque": sorted(self.opaque),
        }

    def to_dict(self) -> Dict:
        return {
            "preset": self.meta.get("preset", ""),
            "params": self.meta.get("params", {}),
            "alphabet": self.alphabet.to_list(),
            "rules": [
                {"lhs": word_pairs(lhs, self.alphabet), "rhs": rhs.to_list(self.alphabet)}
                for lhs, rhs in self.sorted_rules()
            ],
            "opaque": sorted(self.opaque),
            "notes": self.meta.get("notes", {}),
            "engine_version": ENGINE_VERSION,
        }

    @classmethod
    def from_dict(cls, data: Dict, fuel: int = DEFAULT_FUEL) -> "RuleSet":
        alphabet = Alphabet(Letter.from_dict(x) for x in data["alphabet"])
        out = cls(alphabet, fuel=fuel, opaque=data.get("opaque", ()),
                  meta={"preset": data.get("preset", ""), "params": data.get("params", {}),
                        "notes": data.get("notes", {})})
        for rule in data["rules"]:
            out.add_rule(word_from_pairs(rule["lhs"], alphabet), NCPoly.from_list(rule["rhs"], alphabet),
                         check_order=False)
        return out


def normal_form(p: NCPoly, rules: RuleSet) -> NCPoly:
    return rules.normal_form(p)


# ─────────────────────────────────────────────────────────────
# 二次關係
# ─────────────────────────────────────────────────────────────

def relations_from_matrix(mat, letter_of: Callable[[int], str], reverse: bool = False) -> List[NCPoly]:
    """
    矩陣列空間 → 二次關係

    reverse=False: 每列 (a,b) 給出 Σ M^{ab}_{cd} x^c x^d；
    reverse=True:  每行 (h,k) 給出 Σ M^{ij}_{hk} ∂_j ∂_i（導數的轉置版本）。
    """
    groups: Dict = {}
    for ((a, b), (c, d)), value in mat.entries.items():
        if reverse:
            key, word = (c, d), (letter_of(b), letter_of(a))
        else:
            key, word = (a, b), (letter_of(c), letter_of(d))
        groups.setdefault(key, {})
        _accumulate(groups[key], word, value)
    return [NCPoly(terms) for _, terms in sorted(groups.items()) if terms]


def derive_quadratic_rules(relations: Sequence[NCPoly], alphabet: Alphabet) -> List[Tuple[Word, NCPoly]]:
    """
    以簡化列梯形（欄依單項式序由大到小）把關係空間轉成規則

    每個主元列成為「首字 → −其餘」，規則數即關係空間的秩。
    """
    words = sorted({w for rel in relations for w in rel.terms}, key=alphabet.word_key, reverse=True)
    col = {w: n for n, w in enumerate(words)}
    dod: Dict[int, Dict[int, Scalar]] = {}
    for r, rel in enumerate(relations):
        for w, c in rel.terms.items():
            dod.setdefault(r, {})[col[w]] = c
    if not dod:
        return []
    matrix = DomainMatrix.from_dod(dod, (len(relations), len(words)), DOMAIN)
    reduced, pivots = matrix.rref()
    rows = reduced.to_dok()
    by_row: Dict[int, Dict[int, Scalar]] = {}
    for (r, c), value in rows.items():
        by_row.setdefault(r, {})[c] = value
    out = []
    for r, pivot in enumerate(pivots):
        entries = by_row.get(r, {})
        if min(entries) != pivot:
            raise RuleOrderError(f"主元 {word_text(words[pivot])} 不是該列首字")
        rhs = {words[c]: -v for c, v in entries.items() if c != pivot}
        out.append((words[pivot], NCPoly(rhs)))
    return out


# ─────────────────────────────────────────────────────────────
# 殘差分類與合流
# ─────────────────────────────────────────────────────────────

def l_degree(word: Word, alphabet: Alphabet) -> int:
    return sum(1 for x in word if alphabet[x].family in L_FAMILIES)


def blocked_by_opaque(word: Word, rules: RuleSet) -> bool:
    """不透明字母緊接在 L/Cartan 字母之前（該移動無規則可用）"""
    alphabet = rules.alphabet
    for a, b in zip(word, word[1:]):
        if a in rules.opaque and alphabet[b].family in L_FAMILIES + (Family.CARTAN,):
            return True
    return False


def _decisive(word: Word, alphabet: Alphabet) -> bool:
    """L 次數 ≤ 2 的正規字彼此線性獨立，殘差落在這些字上即可判 FAIL"""
    return l_degree(word, alphabet) <= 2


def classify_residual(residual: NCPoly, rules: RuleSet) -> CheckStatus:
    """
    非零殘差的判定：每個字都可判定且沒有被不透明字母擋住 → FAIL，否則 INCONCLUSIVE
    """
    if residual.is_zero():
        return CheckStatus.PASS
    for word in residual.terms:
        if blocked_by_opaque(word, rules):
            return CheckStatus.INCONCLUSIVE
        if not _decisive(word, rules.alphabet):
            return CheckStatus.INCONCLUSIVE
    return CheckStatus.FAIL


def identity_check(check_id: str, residual: NCPoly, rules: RuleSet) -> CheckResult:
    """把已化簡的 LHS − RHS 轉成一筆判定"""
    status = classify_residual(residual, rules)
    detail = "" if status == CheckStatus.PASS else residual.text()
    return CheckResult(id=check_id, status=status, residual_terms=len(residual), detail=detail)


@dataclass(frozen=True)
class Overlap:
    """臨界對：word 上兩條規則的重疊"""
    word: Word
    first: Word
    second: Word
    offset: int          # second 在 word 中的起點

    @property
    def key(self) -> str:
        return word_text(self.word)


def critical_overlaps(rules: RuleSet) -> List[Overlap]:
    """所有重疊型與包含型臨界對（依字排序）"""
    by_prefix: Dict[Word, List[Word]] = {}
    for lhs in rules.rules:
        for n in range(1, len(lhs) + 1):
            by_prefix.setdefault(lhs[:n], []).append(lhs)
    found: Dict[Tuple[Word, Word, int], Overlap] = {}
    for l1 in rules.rules:
        for ov in range(1, len(l1)):
            for l2 in by_prefix.get(l1[-ov:], ()):
                if len(l2) <= ov:
                    continue
                word = l1 + l2[ov:]
                found[(l1, l2, len(l1) - ov)] = Overlap(word, l1, l2, len(l1) - ov)
        for l2 in rules.rules:
            if l2 == l1 or len(l2) >= len(l1):
                continue
            for i in range(len(l1) - len(l2) + 1):
                if l1[i:i + len(l2)] == l2:
                    found[(l1, l2, i)] = Overlap(l1, l1, l2, i)
    ordered = sorted(found.values(), key=lambda o: (rules.alphabet.word_key(o.word), o.first, o.offset))
    return ordered


def resolve_overlap(overlap: Overlap, rules: RuleSet) -> NCPoly:
    """兩條化簡路徑的正規形之差"""
    w = overlap.word
    l1, l2, i = overlap.first, overlap.second, overlap.offset
    path_a = rules.rules[l1] * NCPoly.word(w[len(l1):])
    path_b = NCPoly.word(w[:i]) * rules.rules[l2] * NCPoly.word(w[i + len(l2):])
    return rules.normal_form(path_a) - rules.normal_form(path_b)


def check_local_confluence(rules: RuleSet, select: Optional[Callable[[Overlap], bool]] = None,
                           sample: Optional[int] = None, seed: int = 0xD5EED,
                           suite: str = "confluence") -> CheckReport:
    """
    逐一檢查臨界對是否可合流

    select 過濾臨界對；sample 給定時以固定種子抽樣。
    """
    preset = rules.meta.get("preset", "")
    report = CheckReport(suite=suite, preset=preset)
    overlaps = critical_overlaps(rules)
    if select is not None:
        overlaps = [o for o in overlaps if select(o)]
    if sample is not None and len(overlaps) > sample:
        rng = random.Random(seed)
        overlaps = sorted(rng.sample(overlaps, sample), key=lambda o: rules.alphabet.word_key(o.word))
    for overlap in overlaps:
        check_id = f"overlap[{overlap.key}@{overlap.offset}]"
        try:
            residual = resolve_overlap(overlap, rules)
        except NonTerminationError as e:
            report.add(CheckResult(check_id, CheckStatus.INCONCLUSIVE, detail=str(e)))
            continue
        report.add(identity_check(check_id, residual, rules))
    report.notes["overlaps"] = len(overlaps)
    return report


# ─────────────────────────────────────────────────────────────
# 擬縮放與擴充
# ─────────────────────────────────────────────────────────────

def derive_scaling(b: NCPoly, u: str, rules: RuleSet) -> Scalar:
    """
    回傳單項式 c 使 NF(b·u) = c·NF(u·b)

    Raises:
        ScalingError: 係數比不是常數或不是 (高斯單位)·s^m
    """
    letter = NCPoly.letter(u)
    left = rules.normal_form(b * letter)
    right = rules.normal_form(letter * b)
    if left.is_zero() or right.is_zero() or set(left.terms) != set(right.terms):
        raise ScalingError(f"不是擬縮放對: {u}")
    ratio = None
    for w, c in right.terms.items():
        r = left.terms[w] / c
        if ratio is None:
            ratio = r
        elif ratio - r:
            raise ScalingError(f"不是擬縮放對: {u}（係數比不一致）")
    if monomial_parts(ratio) is None:
        raise ScalingError(f"不是擬縮放對: {u}（比值非單項式 {format_scalar(ratio)}）")
    return ratio


def root_of_scaling(c: Scalar, k: int, u: str) -> Scalar:
    parts = monomial_parts(c)
    if parts is None:
        raise RootNotAdjoinableError(f"{u}: 縮放不是單項式")
    unit, m = parts
    if unit != (1, 0) or m % k:
        raise RootNotAdjoinableError(f"{u}: 縮放 {format_scalar(c)} 無法開 {k} 次根")
    return spow(m // k)


def install_scaling(rules: RuleSet, r: str, r_inv: str, u: str, d: Scalar) -> None:
    """r u = d u r（及其逆元版本）定向後加入"""
    alphabet = rules.alphabet
    if alphabet.rank(u) > alphabet.rank(r):
        rules.add_rule((u, r), NCPoly.word((r, u), ONE / d))
        rules.add_rule((u, r_inv), NCPoly.word((r_inv, u), d))
    else:
        rules.add_rule((r, u), NCPoly.word((u, r), d))
        rules.add_rule((r_inv, u), NCPoly.word((u, r_inv), ONE / d))


def adjoin_root(b: NCPoly, k: int, rules: RuleSet, name: str, position: int,
                family: Family = Family.AUX, targets: Optional[Iterable[str]] = None) -> Tuple[Letter, RuleSet]:
    """
    加入可逆字母 r，r^k ≡ b

    b 的正規形 c·lead + rest 定向為 lead → (r^k − rest)/c；
    對每個字母 u 由 b u = c_u u b 得到 r u = c_u^(1/k) u r。
    k=1 即為 b 的逆元擴充。

    Raises:
        ScalingError, RootNotAdjoinableError
    """
    nb = rules.normal_form(b)
    if nb.is_zero():
        raise RootNotAdjoinableError("零元素不可開根")
    alphabet = rules.alphabet
    skip = rules.reducible_letters()
    names = [x for x in (targets if targets is not None else alphabet.names()) if x not in skip]
    scalings = {u: root_of_scaling(derive_scaling(nb, u, rules), k, u) for u in names}

    lead, c = nb.leading(alphabet)
    lead_weight = sum(alphabet[x].weight for x in lead)
    weight = lead_weight // k
    if weight < 1:
        raise RuleOrderError(f"{name}: 首字 {word_text(lead)} 權重不足以定向")
    inv_name = f"{name}^-1"
    root = Letter(name, family, position=position, weight=weight, inverse=inv_name)
    inverse = Letter(inv_name, family, position=position + 1, weight=weight, base=name)
    out = rules.with_alphabet(alphabet.extended([root, inverse]))

    rest = nb - NCPoly.word(lead, c)
    out.add_rule(lead, (NCPoly.word((name,) * k) - rest).scale(ONE / c))
    for u, d in scalings.items():
        install_scaling(out, name, inv_name, u, d)
    out.add_rule((name, inv_name), NCPoly.one())
    out.add_rule((inv_name, name), NCPoly.one())
    out.inter_reduce()
    return root, out


def adjoin_scalings(rules: RuleSet, raw: NCPoly, root: Letter, k: int, targets: Iterable[str]) -> RuleSet:
    """
    已有根字母 r 與新字母（例如 L）之間的縮放規則

    任一目標不是擬縮放對時 r 標記為不透明並回傳原規則集。
    """
    try:
        scalings = {u: root_of_scaling(derive_scaling(raw, u, rules), k, u) for u in targets}
    except (ScalingError, RootNotAdjoinableError):
        out = rules.copy()
        out.opaque |= {root.name, root.inverse}
        return out
    out = rules.copy()
    for u, d in scalings.items():
        install_scaling(out, root.name, root.inverse, u, d)
    return out


# ─────────────────────────────────────────────────────────────
# 代入
# ─────────────────────────────────────────────────────────────

def apply_map(mapping: Mapping[str, NCPoly], p: NCPoly, target: RuleSet, anti: bool = False,
              conj_mode: Optional[str] = None) -> NCPoly:
    """
    逐字母代入後在目標規則集中化簡

    anti=True 時反轉字序（反同態）；conj_mode 給定時係數取共軛。

    Raises:
        UnmappedLetterError
    """
    out = NCPoly()
    for word, c in p.terms.items():
        letters = reversed(word) if anti else word
        image = NCPoly.one()
        for x in letters:
            if x not in mapping:
                raise UnmappedLetterError(f"映射未定義於字母 {x}")
            image = target.normal_form(image * mapping[x])
        coeff = conjugate(c, conj_mode) if conj_mode else c
        out = out + image.scale(coeff)
    return target.normal_form(out)


def identity_map(rules: RuleSet) -> Dict[str, NCPoly]:
    return {x: NCPoly.letter(x) for x in rules.alphabet.names()}
