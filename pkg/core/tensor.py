"""
張量資料
辮矩陣 \\hat R、度規、權重、投影算子，以及 FRT 生成元在基本表示下的像

矩陣一律以 ((a,b),(c,d)) 為鍵的稀疏字典存放，線性代數交給 sympy DomainMatrix。
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from .report import CheckReport
from .scalar import (
    DOMAIN, ONE, ZERO, Scalar, format_scalar, k, parse_scalar, q, qpow,
)


Pair = Tuple[int, int]
Entry = Tuple[Pair, Pair]


class SchemeError(ValueError):
    """索引方案不合法"""


@dataclass(frozen=True)
class IndexScheme:
    """sl(N) 或 so(N) 的索引方案"""
    case: str
    N: int

    def __post_init__(self):
        if self.case not in ("sl", "so"):
            raise SchemeError(f"未知的 case: {self.case}")
        if self.case == "sl" and self.N < 2:
            raise SchemeError(f"sl 需要 N ≥ 2，得到 {self.N}")
        if self.case == "so" and self.N < 3:
            raise SchemeError(f"so 需要 N ≥ 3，得到 {self.N}")

    @property
    def n(self) -> int:
        return self.N // 2

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    @property
    def label(self) -> str:
        return f"{self.case}{self.N}"

    @cached_property
    def indices(self) -> Tuple[int, ...]:
        if self.case == "sl":
            return tuple(range(1, self.N + 1))
        neg = list(range(-self.n, 0))
        pos = list(range(1, self.n + 1))
        return tuple(neg + ([0] if self.odd else []) + pos)

    @cached_property
    def weights(self) -> Dict[int, Fraction]:
        """ρ_i（sl 為空）"""
        if self.case == "sl":
            return {}
        shift = Fraction(1, 2) if self.odd else Fraction(1)
        out = {}
        for i in self.indices:
            if i == 0:
                out[i] = Fraction(0)
            else:
                sign = 1 if i > 0 else -1
                out[i] = -sign * (abs(i) - shift)
        return out

    @cached_property
    def pairs(self) -> Tuple[Pair, ...]:
        return tuple((a, b) for a in self.indices for b in self.indices)

    @cached_property
    def pair_pos(self) -> Dict[Pair, int]:
        return {p: n for n, p in enumerate(self.pairs)}

    def to_dict(self) -> Dict:
        return {
            "case": self.case,
            "N": self.N,
            "indices": list(self.indices),
            "weights": {str(i): str(w) for i, w in self.weights.items()},
        }


class Mat4:
    """V⊗V 上的稀疏算子，列 (a,b)、行 (c,d)"""

    def __init__(self, scheme: IndexScheme, entries: Optional[Dict[Entry, Scalar]] = None):
        self.scheme = scheme
        self.entries: Dict[Entry, Scalar] = {}
        for key, value in (entries or {}).items():
            if value:
                self.entries[key] = value

    # ── 基本運算 ──────────────────────────────────────────────

    @classmethod
    def identity(cls, scheme: IndexScheme) -> "Mat4":
        return cls(scheme, {(p, p): ONE for p in scheme.pairs})

    def get(self, row: Pair, col: Pair) -> Scalar:
        return self.entries.get((row, col), ZERO)

    def __add__(self, other: "Mat4") -> "Mat4":
        out = dict(self.entries)
        for key, value in other.entries.items():
            out[key] = out.get(key, ZERO) + value
        return Mat4(self.scheme, out)

    def __sub__(self, other: "Mat4") -> "Mat4":
        return self + other.scale(-ONE)

    def scale(self, c: Scalar) -> "Mat4":
        return Mat4(self.scheme, {key: c * v for key, v in self.entries.items()})

    def __matmul__(self, other: "Mat4") -> "Mat4":
        return Mat4.from_domain(self.scheme, self.to_domain() * other.to_domain())

    def is_zero(self) -> bool:
        return not self.entries

    def equals(self, other: "Mat4") -> bool:
        return (self - other).is_zero()

    def inverse(self) -> "Mat4":
        return Mat4.from_domain(self.scheme, self.to_domain().inv())

    def rank(self) -> int:
        return self.to_domain().rank()

    # ── DomainMatrix 轉換 ─────────────────────────────────────

    def to_domain(self) -> DomainMatrix:
        pos = self.scheme.pair_pos
        dod: Dict[int, Dict[int, Scalar]] = {}
        for (row, col), value in self.entries.items():
            dod.setdefault(pos[row], {})[pos[col]] = value
        size = len(self.scheme.pairs)
        return DomainMatrix.from_dod(dod, (size, size), DOMAIN)

    @classmethod
    def from_domain(cls, scheme: IndexScheme, dm: DomainMatrix) -> "Mat4":
        pairs = scheme.pairs
        entries = {}
        for (r, c), value in dm.to_dok().items():
            entries[(pairs[r], pairs[c])] = value
        return cls(scheme, entries)

    def sorted_items(self) -> List[Tuple[Entry, Scalar]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0])


@dataclass(frozen=True)
class Metric:
    """so(N) 度規 g_{ij} = g^{ij} = q^(-ρ_i) δ_{i,-j}"""
    scheme: IndexScheme
    lower: Dict[Pair, Scalar]
    upper: Dict[Pair, Scalar]

    def g(self, i: int, j: int) -> Scalar:
        return self.lower.get((i, j), ZERO)

    def ginv(self, i: int, j: int) -> Scalar:
        return self.upper.get((i, j), ZERO)


# ─────────────────────────────────────────────────────────────
# 建構
# ─────────────────────────────────────────────────────────────

def build_rhat(scheme: IndexScheme) -> Mat4:
    """
    建構辮矩陣

    sl 回傳正規化後的 \\hat R′ = q^(1/N)\\hat R；so 回傳 \\hat R 本身。
    """
    entries: Dict[Entry, Scalar] = {}

    def add(row: Pair, col: Pair, value: Scalar) -> None:
        entries[(row, col)] = entries.get((row, col), ZERO) + value

    idx = scheme.indices
    if scheme.case == "sl":
        for i in idx:
            add((i, i), (i, i), q)
            for j in idx:
                if i != j:
                    add((i, j), (j, i), ONE)
                if i < j:
                    add((i, j), (i, j), k)
        return Mat4(scheme, entries)

    rho = scheme.weights
    for i in idx:
        if i != 0:
            add((i, i), (i, i), q)
            add((i, -i), (-i, i), q ** -1)
        for j in idx:
            if (i != j and i != -j) or (i == 0 and j == 0):
                add((i, j), (j, i), ONE)
            if i < j:
                add((i, j), (i, j), k)
                add((i, -i), (-j, j), -k * qpow(-rho[i] + rho[j]))
    return Mat4(scheme, entries)


def build_metric(scheme: IndexScheme) -> Metric:
    if scheme.case != "so":
        raise SchemeError("度規只對 so(N) 定義")
    lower = {(i, -i): qpow(-scheme.weights[i]) for i in scheme.indices}
    return Metric(scheme, lower, dict(lower))


def eigenvalues(scheme: IndexScheme) -> List[Tuple[str, Scalar]]:
    """投影算子標籤與對應特徵值"""
    if scheme.case == "sl":
        return [("S", q), ("a", -q ** -1)]
    return [("s", q), ("a", -q ** -1), ("t", qpow(1 - scheme.N))]


def build_projectors(scheme: IndexScheme, rhat: Optional[Mat4] = None) -> List[Tuple[str, Mat4]]:
    """以 Lagrange 插值在已知特徵值上求出正交投影算子"""
    rhat = rhat or build_rhat(scheme)
    eig = eigenvalues(scheme)
    ident = Mat4.identity(scheme)
    out = []
    for label, lam in eig:
        proj = ident
        denom = ONE
        for other_label, mu in eig:
            if other_label == label:
                continue
            if not (lam - mu):
                raise ArithmeticError(f"特徵值重合: {label}/{other_label}")
            proj = proj @ (rhat - ident.scale(mu))
            denom = denom * (lam - mu)
        out.append((label, proj.scale(ONE / denom)))
    return out


def projector(scheme: IndexScheme, label: str, rhat: Optional[Mat4] = None) -> Mat4:
    for lab, mat in build_projectors(scheme, rhat):
        if lab == label:
            return mat
    raise KeyError(label)


# ─────────────────────────────────────────────────────────────
# 基本表示
# ─────────────────────────────────────────────────────────────

Block = Dict[Pair, Scalar]          # (row j, col h) → 值
RepTable = Dict[Pair, Block]        # (i, k) → ρ(L^i_k)


def _slice(mat: Mat4) -> RepTable:
    """ρ^j_h(L^i_k) = M^{ij}_{hk}"""
    table: RepTable = {}
    for ((i, j), (h, kk)), value in mat.entries.items():
        table.setdefault((i, kk), {})[(j, h)] = value
    return table


def _block_inverse(scheme: IndexScheme, blocks: Dict[Pair, Block]) -> Dict[Pair, Block]:
    """blocks[(A,B)] 為 N×N 區塊；回傳區塊反矩陣"""
    idx = scheme.indices
    pos = {i: n for n, i in enumerate(idx)}
    size = len(idx)
    dod: Dict[int, Dict[int, Scalar]] = {}
    for (A, B), block in blocks.items():
        for (r, c), value in block.items():
            dod.setdefault(pos[A] * size + pos[r], {})[pos[B] * size + pos[c]] = value
    dm = DomainMatrix.from_dod(dod, (size * size, size * size), DOMAIN)
    inv = dm.inv()
    out: Dict[Pair, Block] = {}
    for (R, C), value in inv.to_dok().items():
        A, r = idx[R // size], idx[R % size]
        B, c = idx[C // size], idx[C % size]
        out.setdefault((A, B), {})[(r, c)] = value
    return out


@dataclass
class FrtRep:
    """L^±、S L^±、S^(-1) L^± 在基本表示下的矩陣"""
    scheme: IndexScheme
    plus: RepTable
    minus: RepTable
    s_plus: RepTable
    s_minus: RepTable
    sinv_plus: RepTable
    sinv_minus: RepTable

    def table(self, sign: str, kind: str = "") -> RepTable:
        name = {"": "", "S": "s_", "Sinv": "sinv_"}[kind] + ("plus" if sign == "+" else "minus")
        return getattr(self, name)

    def entry(self, sign: str, i: int, kk: int, row: int, col: int, kind: str = "") -> Scalar:
        return self.table(sign, kind).get((i, kk), {}).get((row, col), ZERO)


def rep_frt(scheme: IndexScheme, rhat: Optional[Mat4] = None) -> FrtRep:
    """
    FRT 生成元的基本表示

    S 由 Σ_h ρ(S L^i_h)ρ(L^h_j) = δ^i_j 解出；S^(-1) 由 Σ_h ρ(L^h_j)ρ(S^(-1)L^i_h) = δ^i_j 解出。
    """
    rhat = rhat or build_rhat(scheme)
    plus = _slice(rhat)
    minus = _slice(rhat.inverse())
    out = {}
    for name, table in (("plus", plus), ("minus", minus)):
        # C 區塊 (h, j) = ρ(L^h_j)；B = C^(-1) 區塊 (i, h) = ρ(S L^i_h)
        s_blocks = _block_inverse(scheme, table)
        # D 區塊 (j, h) = ρ(L^h_j)；X = D^(-1) 區塊 (h, i) = ρ(S^(-1) L^i_h)
        transposed = {(b, a): blk for (a, b), blk in table.items()}
        x_blocks = _block_inverse(scheme, transposed)
        out["s_" + name] = s_blocks
        out["sinv_" + name] = {(i, h): blk for (h, i), blk in x_blocks.items()}
    return FrtRep(scheme, plus, minus, out["s_plus"], out["s_minus"],
                  out["sinv_plus"], out["sinv_minus"])


# ─────────────────────────────────────────────────────────────
# 檢查
# ─────────────────────────────────────────────────────────────

def _kron3(mat: Mat4, left: bool) -> DomainMatrix:
    """M⊗I（left=True）或 I⊗M 於 V⊗V⊗V 上"""
    idx = mat.scheme.indices
    pos = {i: n for n, i in enumerate(idx)}
    size = len(idx)

    def at(a: int, b: int, c: int) -> int:
        return (pos[a] * size + pos[b]) * size + pos[c]

    dod: Dict[int, Dict[int, Scalar]] = {}
    for ((a, b), (c, d)), value in mat.entries.items():
        for x in idx:
            if left:
                r, col = at(a, b, x), at(c, d, x)
            else:
                r, col = at(x, a, b), at(x, c, d)
            dod.setdefault(r, {})[col] = value
    n3 = size ** 3
    return DomainMatrix.from_dod(dod, (n3, n3), DOMAIN)


def braid_holds(mat: Mat4) -> bool:
    """(M⊗I)(I⊗M)(M⊗I) = (I⊗M)(M⊗I)(I⊗M)"""
    a = _kron3(mat, left=True)
    b = _kron3(mat, left=False)
    diff = a * b * a - b * a * b
    return not any(v for v in diff.to_dok().values())


def mixed_braid_holds(f: Mat4, rhat: Mat4) -> bool:
    """f_12 \\hat R_23 \\hat R_12 = \\hat R_23 \\hat R_12 f_23，f 為 \\hat R 的多項式"""
    r12 = _kron3(rhat, left=True)
    r23 = _kron3(rhat, left=False)
    diff = _kron3(f, left=True) * r23 * r12 - r23 * r12 * _kron3(f, left=False)
    return not any(v for v in diff.to_dok().values())


def verify_braid(scheme: IndexScheme, rhat: Optional[Mat4] = None, variants: bool = True) -> CheckReport:
    """辮關係（Yang–Baxter）精確檢查，另含 \\hat R^(-1) 與 P_a 的混合版本"""
    rhat = rhat or build_rhat(scheme)
    report = CheckReport(suite="braid", preset=scheme.label)
    report.record(f"braid[{scheme.label}]", braid_holds(rhat))
    if variants:
        report.record(f"braid-inverse[{scheme.label}]", braid_holds(rhat.inverse()))
        report.record(f"braid-Pa[{scheme.label}]", mixed_braid_holds(projector(scheme, "a", rhat), rhat))
    return report


def verify_projectors(scheme: IndexScheme, rhat: Optional[Mat4] = None) -> CheckReport:
    """冪等、正交、完備、譜分解重建 \\hat R、最小多項式、秩"""
    rhat = rhat or build_rhat(scheme)
    report = CheckReport(suite="projectors", preset=scheme.label)
    projs = build_projectors(scheme, rhat)
    ident = Mat4.identity(scheme)
    total = Mat4(scheme)
    rebuilt = Mat4(scheme)
    eig = dict(eigenvalues(scheme))
    for label, p in projs:
        report.record(f"idempotent[{label}]", (p @ p).equals(p))
        total = total + p
        rebuilt = rebuilt + p.scale(eig[label])
        for other, p2 in projs:
            if other > label:
                report.record(f"orthogonal[{label},{other}]", (p @ p2).is_zero())
    report.record("complete", total.equals(ident))
    report.record("decomposition", rebuilt.equals(rhat))
    minimal = ident
    for _, lam in eig.items():
        minimal = minimal @ (rhat - ident.scale(lam))
    report.record("minimal-polynomial", minimal.is_zero())
    report.record("inverse", (rhat @ rhat.inverse()).equals(ident))
    pa = dict(projs)["a"]
    report.record("rank-Pa", pa.rank() == scheme.N * (scheme.N - 1) // 2,
                  detail=f"rank={pa.rank()}")
    return report


# ─────────────────────────────────────────────────────────────
# JSON 文件
# ─────────────────────────────────────────────────────────────

def matrix_document(mat: Mat4, obj: str) -> Dict:
    scheme = mat.scheme
    return {
        "case": scheme.case,
        "N": scheme.N,
        "object": obj,
        "scheme": scheme.to_dict(),
        "entries": [
            {"r": list(r), "c": list(c), "v": format_scalar(v)}
            for (r, c), v in mat.sorted_items()
        ],
    }


def dump_document(doc: Dict) -> str:
    """決定性輸出（固定縮排與鍵順序）"""
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def load_matrix(doc: Dict) -> Mat4:
    scheme = IndexScheme(doc["case"], int(doc["N"]))
    entries = {}
    for e in doc["entries"]:
        r, c = tuple(e["r"]), tuple(e["c"])
        if r not in scheme.pair_pos or c not in scheme.pair_pos:
            raise SchemeError(f"索引超出範圍: {r} {c}")
        entries[(r, c)] = parse_scalar(e["v"])
    return Mat4(scheme, entries)


def metric_document(metric: Metric) -> Dict:
    scheme = metric.scheme
    return {
        "case": scheme.case,
        "N": scheme.N,
        "object": "metric",
        "scheme": scheme.to_dict(),
        "entries": [
            {"r": [i], "c": [j], "v": format_scalar(v)}
            for (i, j), v in sorted(metric.lower.items())
        ],
    }
