"""
非交換多項式
字母、字、有限支撐的 Scalar 係數線性組合

字在內部是字母名稱的 tuple；可逆字母的逆元是另一個獨立字母，
序列化時再合併成 [letter-id, exponent] 形式。
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .scalar import ONE, ZERO, Scalar, format_scalar, parse_scalar, scalar


Word = Tuple[str, ...]
EMPTY: Word = ()


class Family(IntEnum):
    """字母族，數值即全序中的優先順位"""
    LPLUS = 0
    LMINUS = 1
    CARTAN = 2
    AUX = 3
    COORD = 4
    DERIV = 5


@dataclass(frozen=True)
class Letter:
    """生成元字母"""
    name: str
    family: Family
    index: Tuple[int, ...] = ()
    position: int = 0
    weight: int = 2
    inverse: Optional[str] = None
    base: Optional[str] = None       # 逆字母指回原字母

    @property
    def invertible(self) -> bool:
        return self.inverse is not None

    @property
    def sort_key(self) -> Tuple[int, int]:
        return (int(self.family), self.position)

    def to_dict(self) -> Dict:
        data = {
            "id": self.name,
            "family": self.family.name,
            "index": list(self.index),
            "position": self.position,
            "weight": self.weight,
        }
        if self.inverse:
            data["inverse"] = self.inverse
        if self.base:
            data["base"] = self.base
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "Letter":
        return cls(
            name=data["id"],
            family=Family[data["family"]],
            index=tuple(data.get("index", ())),
            position=int(data.get("position", 0)),
            weight=int(data.get("weight", 2)),
            inverse=data.get("inverse"),
            base=data.get("base"),
        )


class UnknownLetterError(KeyError):
    """字母不在字母表中"""


class Alphabet:
    """字母表與其上的單項式序（先比加權次數，再逐字母比 sort-key）"""

    def __init__(self, letters: Iterable[Letter] = ()):
        self._letters: Dict[str, Letter] = {}
        for letter in letters:
            self._letters[letter.name] = letter
        self._rank: Dict[str, int] = {}
        self._reindex()

    def _reindex(self) -> None:
        ordered = sorted(self._letters.values(), key=lambda l: (l.sort_key, l.name))
        self._rank = {l.name: n for n, l in enumerate(ordered)}

    def extended(self, letters: Iterable[Letter]) -> "Alphabet":
        return Alphabet(list(self._letters.values()) + list(letters))

    def __contains__(self, name: str) -> bool:
        return name in self._letters

    def __getitem__(self, name: str) -> Letter:
        try:
            return self._letters[name]
        except KeyError:
            raise UnknownLetterError(f"未知字母: {name}") from None

    def __iter__(self) -> Iterator[Letter]:
        return iter(sorted(self._letters.values(), key=lambda l: self._rank[l.name]))

    def __len__(self) -> int:
        return len(self._letters)

    def names(self) -> List[str]:
        return [l.name for l in self]

    def rank(self, name: str) -> int:
        return self._rank[name]

    def word_key(self, word: Word) -> Tuple[int, Tuple[int, ...]]:
        letters = self._letters
        rank = self._rank
        return (sum(letters[x].weight for x in word), tuple(rank[x] for x in word))

    def family_of(self, name: str) -> Family:
        return self[name].family

    def inverse_of(self, name: str) -> Optional[str]:
        return self[name].inverse

    def to_list(self) -> List[Dict]:
        return [l.to_dict() for l in self]


# ─────────────────────────────────────────────────────────────
# 字的序列化
# ─────────────────────────────────────────────────────────────

def word_pairs(word: Word, alphabet: Alphabet) -> List[List]:
    """字 → [[letter-id, exponent], ...]，逆字母以負指數表示"""
    out: List[List] = []
    for name in word:
        letter = alphabet[name]
        base, exp = (letter.base, -1) if letter.base else (name, 1)
        if out and out[-1][0] == base and (out[-1][1] > 0) == (exp > 0):
            out[-1][1] += exp
        else:
            out.append([base, exp])
    return out


def word_from_pairs(pairs: List[List], alphabet: Alphabet) -> Word:
    out: List[str] = []
    for base, exp in pairs:
        if exp == 0:
            raise ValueError("指數不可為 0")
        if exp > 0:
            out.extend([base] * exp)
        else:
            inv = alphabet[base].inverse
            if inv is None:
                raise ValueError(f"字母 {base} 不可逆")
            out.extend([inv] * (-exp))
    return tuple(out)


def word_text(word: Word) -> str:
    return "·".join(word) if word else "1"


# ─────────────────────────────────────────────────────────────
# NCPoly
# ─────────────────────────────────────────────────────────────

class NCPoly:
    """字 → Scalar 的有限支撐組合（不存零係數）"""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Word, Scalar]] = None):
        self.terms: Dict[Word, Scalar] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @classmethod
    def word(cls, word: Word, coeff: Scalar = ONE) -> "NCPoly":
        return cls({tuple(word): coeff})

    @classmethod
    def letter(cls, name: str, coeff: Scalar = ONE) -> "NCPoly":
        return cls({(name,): coeff})

    @classmethod
    def const(cls, coeff) -> "NCPoly":
        return cls({EMPTY: scalar(coeff)})

    @classmethod
    def zero(cls) -> "NCPoly":
        return cls()

    @classmethod
    def one(cls) -> "NCPoly":
        return cls({EMPTY: ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, word: Word) -> Scalar:
        return self.terms.get(tuple(word), ZERO)

    def items(self):
        return self.terms.items()

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, ZERO) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        result = NCPoly()
        result.terms = out
        return result

    def __neg__(self) -> "NCPoly":
        result = NCPoly()
        result.terms = {w: -c for w, c in self.terms.items()}
        return result

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, c) -> "NCPoly":
        c = scalar(c)
        if not c:
            return NCPoly()
        result = NCPoly()
        result.terms = {w: c * v for w, v in self.terms.items()}
        return result

    def __mul__(self, other) -> "NCPoly":
        if not isinstance(other, NCPoly):
            return self.scale(other)
        out: Dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                v = out.get(w, ZERO) + c1 * c2
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        result = NCPoly()
        result.terms = out
        return result

    def __rmul__(self, other) -> "NCPoly":
        return self.scale(other)

    def letters(self) -> set:
        return {x for w in self.terms for x in w}

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def sorted_terms(self, alphabet: Alphabet, descending: bool = True) -> List[Tuple[Word, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: alphabet.word_key(kv[0]), reverse=descending)

    def leading(self, alphabet: Alphabet) -> Tuple[Word, Scalar]:
        if not self.terms:
            raise ValueError("零多項式沒有首項")
        return max(self.terms.items(), key=lambda kv: alphabet.word_key(kv[0]))

    def constant(self) -> Scalar:
        return self.terms.get(EMPTY, ZERO)

    def to_list(self, alphabet: Alphabet) -> List[Dict]:
        return [
            {"w": word_pairs(w, alphabet), "v": format_scalar(c)}
            for w, c in self.sorted_terms(alphabet)
        ]

    @classmethod
    def from_list(cls, data: List[Dict], alphabet: Alphabet) -> "NCPoly":
        return cls({word_from_pairs(t["w"], alphabet): parse_scalar(t["v"]) for t in data})

    def text(self, limit: int = 6) -> str:
        parts = [f"({format_scalar(c)})·{word_text(w)}" for w, c in list(self.terms.items())[:limit]]
        if len(self.terms) > limit:
            parts.append(f"…(+{len(self.terms) - limit})")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"NCPoly({self.text()})"


def letter(name: str, coeff: Scalar = ONE) -> NCPoly:
    return NCPoly.letter(name, coeff)


def product(*factors: NCPoly) -> NCPoly:
    out = NCPoly.one()
    for f in factors:
        out = out * f
    return out


def commutator(a: NCPoly, b: NCPoly, x: Scalar = ONE) -> NCPoly:
    """[A,B]_x := AB − x·BA"""
    return a * b - (b * a).scale(x)
