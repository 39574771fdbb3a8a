"""
係數體
Q(i)(s) 上的精確有理函數運算，s = q^(1/2)，係數為高斯有理數

所有代數元素的係數都落在這個體中；零判定一律以標準形比較，不做機率性測試。
"""

import cmath
import random
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.fields import FracElement, field


K, s = field("s", QQ_I)
RING = K.ring
DOMAIN = K.to_domain()

Scalar = FracElement
Number = Union[int, Fraction, "Scalar"]

ZERO = K.zero
ONE = K.one
I = K(QQ_I(0, 1))

UNIT_CIRCLE = "unit_circle"
REAL_Q = "real_q"
CONJUGATION_MODES = (UNIT_CIRCLE, REAL_Q)


class ScalarParseError(ValueError):
    """Scalar 文字解析失敗（附帶錯誤位置）"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message}（位置 {position}）")
        self.position = position


# ─────────────────────────────────────────────────────────────
# 建構
# ─────────────────────────────────────────────────────────────

def scalar(value: Number) -> Scalar:
    """將 int / Fraction / Scalar 轉為 Scalar"""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, Fraction):
        return K(QQ_I(QQ(value.numerator, value.denominator), 0))
    if isinstance(value, int):
        return K(value)
    raise TypeError(f"不支援的係數類型: {type(value)}")


def gaussian(re_part: Union[int, Fraction], im_part: Union[int, Fraction] = 0) -> Scalar:
    """高斯有理數常數 re + i·im"""
    re_q = Fraction(re_part)
    im_q = Fraction(im_part)
    return K(QQ_I(QQ(re_q.numerator, re_q.denominator),
                  QQ(im_q.numerator, im_q.denominator)))


def spow(m: int) -> Scalar:
    """s^m（m 可為負）"""
    return s ** m


def qpow(exponent: Union[int, Fraction]) -> Scalar:
    """q^e，e 必須是半整數"""
    twice = Fraction(exponent) * 2
    if twice.denominator != 1:
        raise ValueError(f"q 的指數必須為半整數: {exponent}")
    return s ** int(twice)


q = qpow(1)
h = s - s ** -1
k = q - q ** -1


def omega(rho: Union[int, Fraction]) -> Scalar:
    """ω = q^ρ + q^(-ρ)"""
    return qpow(rho) + qpow(-Fraction(rho))


def power(a: Scalar, n: int) -> Scalar:
    """a^n，經過 cancel 取得標準形"""
    if n == 0:
        return ONE
    if n < 0:
        if not a:
            raise ZeroDivisionError("零元素不可取負次方")
        return K.new(a.denom ** -n, a.numer ** -n)
    return K.new(a.numer ** n, a.denom ** n)


def is_zero(a: Scalar) -> bool:
    return not a


def equal(a: Scalar, b: Scalar) -> bool:
    """引擎共用的相等判定（差為零）"""
    return not (a - b)


def arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """四則運算（對應 add / sub / mul / div）"""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise ZeroDivisionError("除數為零")
        return a / b
    raise ValueError(f"未知運算: {op}")


# ─────────────────────────────────────────────────────────────
# 共軛
# ─────────────────────────────────────────────────────────────

def _conj_coeff(c):
    return QQ_I(c.x, -c.y)


def _poly_terms(p) -> Dict[int, object]:
    return {monom[0]: coeff for monom, coeff in p.items()}


def _reflect(p, degree: int):
    """Σ c_k s^k → Σ conj(c_k) s^(degree-k)"""
    return RING.from_dict({(degree - e,): _conj_coeff(c) for e, c in _poly_terms(p).items()})


def conjugate(a: Scalar, mode: str) -> Scalar:
    """
    體自同構：unit_circle 為 s ↦ 1/s、i ↦ −i；real_q 只做 i ↦ −i

    兩種模式皆為對合。
    """
    if mode == REAL_Q:
        num = RING.from_dict({m: _conj_coeff(c) for m, c in a.numer.items()})
        den = RING.from_dict({m: _conj_coeff(c) for m, c in a.denom.items()})
        return K.new(num, den)
    if mode == UNIT_CIRCLE:
        if not a:
            return ZERO
        dn = a.numer.degree()
        dd = a.denom.degree()
        value = K.new(_reflect(a.numer, dn), _reflect(a.denom, dd))
        return value * s ** (dd - dn)
    raise ValueError(f"未知共軛模式: {mode}")


# ─────────────────────────────────────────────────────────────
# 單項式偵測
# ─────────────────────────────────────────────────────────────

_UNITS = (
    (1, 0), (-1, 0), (0, 1), (0, -1),
)


def monomial_parts(a: Scalar) -> Optional[Tuple[Tuple[int, int], int]]:
    """
    若 a = u·s^m 且 u ∈ {±1, ±i}，回傳 ((re, im), m)，否則 None
    """
    if not a or len(a.numer) != 1 or len(a.denom) != 1:
        return None
    (en,), cn = next(iter(a.numer.items()))
    (ed,), cd = next(iter(a.denom.items()))
    unit = cn / cd
    key = (unit.x, unit.y)
    for (re_u, im_u) in _UNITS:
        if key == (QQ(re_u), QQ(im_u)):
            return (re_u, im_u), en - ed
    return None


def monomial(unit: Tuple[int, int], m: int) -> Scalar:
    return gaussian(*unit) * s ** m


# ─────────────────────────────────────────────────────────────
# 數值探針
# ─────────────────────────────────────────────────────────────

def _to_complex(c) -> complex:
    return complex(float(c.x), float(c.y))


def evaluate(a: Scalar, z: complex) -> complex:
    """在 s = z 處數值求值"""
    num = sum(_to_complex(c) * z ** e for (e,), c in a.numer.items())
    den = sum(_to_complex(c) * z ** e for (e,), c in a.denom.items())
    return num / den


def probe_points(seed: int, unit_circle: bool, count: int = 3) -> List[complex]:
    """產生固定種子的隨機複數取樣點"""
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        theta = rng.uniform(0.1, 6.1)
        radius = 1.0 if unit_circle else rng.uniform(0.5, 1.8)
        points.append(radius * cmath.exp(1j * theta))
    return points


def numeric_agree(a: Scalar, b: Scalar, points: List[complex], tol: float = 1e-9) -> bool:
    """數值比對 a 與 b（相對誤差）"""
    for z in points:
        va, vb = evaluate(a, z), evaluate(b, z)
        scale = max(1.0, abs(va), abs(vb))
        if abs(va - vb) > tol * scale:
            return False
    return True


# ─────────────────────────────────────────────────────────────
# 文字格式
# ─────────────────────────────────────────────────────────────

def _fmt_rational(value) -> str:
    num, den = int(value.numerator), int(value.denominator)
    return f"{num}" if den == 1 else f"{num}/{den}"


def _fmt_poly(poly) -> str:
    pieces: List[Tuple[bool, str]] = []
    for e in sorted(_poly_terms(poly)):
        c = poly[(e,)]
        for part, imag in ((c.x, False), (c.y, True)):
            if not part:
                continue
            negative = part < 0
            magnitude = -part if negative else part
            factors = []
            if magnitude != 1 or (e == 0 and not imag):
                factors.append(_fmt_rational(magnitude))
            if imag:
                factors.append("I")
            if e == 1:
                factors.append("s")
            elif e > 1:
                factors.append(f"s^{e}")
            pieces.append((negative, "*".join(factors)))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for negative, text in pieces[1:]:
        out += (" - " if negative else " + ") + text
    return out


def format_scalar(a: Scalar) -> str:
    """
    標準文字形式：分母最低次非零係數正規化為 1

    Example:
        format_scalar(q) == "( s^2 ) / ( 1 )"
    """
    if not a:
        return "( 0 ) / ( 1 )"
    den = a.denom
    low = min(_poly_terms(den))
    inv = QQ_I.one / den[(low,)]
    num = a.numer.mul_ground(inv)
    den = den.mul_ground(inv)
    return f"( {_fmt_poly(num)} ) / ( {_fmt_poly(den)} )"


_TOKEN = re.compile(r"\s*(?:(\d+)|(s)|(I)|(\^)|(\*)|(/)|(\+)|(-)|(\()|(\)))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    kinds = ("int", "s", "I", "^", "*", "/", "+", "-", "(", ")")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ScalarParseError(f"無法辨識的字元 {text[pos]!r}", pos)
        for idx, kind in enumerate(kinds):
            if m.group(idx + 1) is not None:
                tokens.append((kind, m.group(idx + 1), m.start(idx + 1)))
                break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """遞迴下降解析器：( poly ) / ( poly )"""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise ScalarParseError(f"預期 {kind!r}，得到 {tok[1] or 'EOF'!r}", tok[2])
        self.i += 1
        return tok

    def scalar(self) -> Scalar:
        self.take("(")
        num = self.poly()
        self.take(")")
        self.take("/")
        self.take("(")
        den = self.poly()
        self.take(")")
        self.take("end")
        if not den:
            raise ScalarParseError("分母為零", self.tokens[-1][2])
        return num / den

    def poly(self) -> Scalar:
        total = ZERO
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take(self.peek()[0])[0] == "-" else 1
        total += sign * self.term()
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take(self.peek()[0])[0] == "-" else 1
            total += sign * self.term()
        return total

    def term(self) -> Scalar:
        value = self.factor()
        while self.peek()[0] == "*":
            self.take("*")
            value = value * self.factor()
        return value

    def factor(self) -> Scalar:
        kind, text, pos = self.peek()
        if kind == "int":
            self.take("int")
            num = int(text)
            if self.peek()[0] == "/" and self.tokens[self.i + 1][0] == "int":
                self.take("/")
                den = int(self.take("int")[1])
                if den == 0:
                    raise ScalarParseError("有理數分母為零", pos)
                return scalar(Fraction(num, den))
            return scalar(num)
        if kind == "I":
            self.take("I")
            return I
        if kind == "s":
            self.take("s")
            if self.peek()[0] == "^":
                self.take("^")
                negative = False
                if self.peek()[0] == "-":
                    self.take("-")
                    negative = True
                exp = int(self.take("int")[1])
                return s ** (-exp if negative else exp)
            return s
        raise ScalarParseError(f"預期係數或 s，得到 {text or 'EOF'!r}", pos)


def parse_scalar(text: str) -> Scalar:
    """解析 format_scalar 的輸出（亦接受負次方）"""
    return _Parser(text).scalar()
