"""
歐氏量子空間 / 交叉積驗證引擎
整合規則推導、γ 設定、解耦映射與各驗證套件
"""

from typing import Any, Callable, Dict, List, Optional, Union

from core import BaseVerifyEngine, CheckReport, CheckStatus, IndexScheme, RuleSet
from core.ncpoly import Family, Word
from core.rewriting import Overlap, l_degree
from utils import LogIcons

from .algebra import (
    SIGNS, CrossPreset, EuclidPreset, build_cross, build_euclid, cartan_of, center_instances,
    cross_from_rules, crossing_instances, euclid_from_rules, in_borel, scaling_summary,
)
from .batteries import (
    Instance, Sampling, commutant_instances, decomposition_instances, homomorphism_instances,
    lemma1_instances, reading_consistency, reading_tally, real_gamma_instances, reorder_instances,
    star_decoupling_instances, star_structure_instances, variant_instances, zeta7_instances,
)
from .decouple import DecoupleContext, load_gamma


KIND_EUCLID = "euclid"
KIND_CROSS = "cross"


def is_cross_overlap(word: Word, rules: RuleSet) -> bool:
    """長度 3 且為 A 內的臨界對，或形如 p·p·L、p·L⁻·L⁺"""
    if len(word) != 3:
        return False
    alphabet = rules.alphabet
    if l_degree(word, alphabet) == 0:
        return True
    families = tuple(alphabet[x].family for x in word)
    if families[0] != Family.COORD:
        return False
    if families[1] == Family.COORD:
        return families[2] in (Family.LPLUS, Family.LMINUS)
    return families[1:] == (Family.LMINUS, Family.LPLUS)


class EuclidVerifyEngine(BaseVerifyEngine):
    """euclid:soN 與 cross:soN 預設的驗證引擎"""

    def __init__(self, config, cache, logger, kind: str, N: int):
        super().__init__(config, cache, logger)
        self.kind = kind
        self._scheme = IndexScheme("so", N)
        self.preset: Optional[Union[EuclidPreset, CrossPreset]] = None
        self._ctx: Optional[DecoupleContext] = None

        sampling_cfg = config.sampling or {}
        self.sampling = Sampling(
            exhaustive=N <= int(sampling_cfg.get("exhaustive_max_n", 3)),
            seed=config.seed,
            window=int(sampling_cfg.get("window", 2)),
            extra=int(sampling_cfg.get("extra", 50)),
            probe=bool(sampling_cfg.get("probe", False)),
        )
        self.confluence_limit = sampling_cfg.get("confluence_sample")

    @property
    def preset_id(self) -> str:
        return f"{self.kind}:so{self._scheme.N}"

    @property
    def scheme(self) -> IndexScheme:
        return self._scheme

    @property
    def N(self) -> int:
        return self._scheme.N

    # ─────────────────────────────────────────────────────────────
    # 規則
    # ─────────────────────────────────────────────────────────────

    def rule_params(self) -> Dict[str, Any]:
        return {"preset": self.preset_id, "N": self.N}

    def build_rules(self) -> RuleSet:
        euclid = build_euclid(self.N, self.fuel)
        euclid.rules.meta.setdefault("notes", {})["scalings"] = scaling_summary(euclid)
        self.logger.info(LogIcons.BUILD, f"歐氏量子空間: {euclid.quadratic_rules} 條二次規則，"
                                         f"{len(euclid.roots)} 個根字母")
        if self.kind == KIND_EUCLID:
            self.preset = euclid
            return euclid.rules
        cross = build_cross(self.N, self.fuel, euclid=euclid)
        cross.rules.meta["notes"]["scalings"] = euclid.rules.meta["notes"]["scalings"]
        if cross.rules.opaque:
            self.logger.warning(LogIcons.WARNING, f"對 L 不透明的字母: {sorted(cross.rules.opaque)}")
        self.preset = cross
        return cross.rules

    def restore(self, rules: RuleSet) -> None:
        if self.kind == KIND_EUCLID:
            self.preset = euclid_from_rules(self.N, rules)
        else:
            self.preset = cross_from_rules(self.N, rules)

    def get_preset(self) -> Union[EuclidPreset, CrossPreset]:
        self.get_rules()
        return self.preset

    def context(self) -> DecoupleContext:
        """φ / ζ 影像的共用快取（第一次使用時建立）"""
        if self._ctx is None:
            preset = self.get_preset()
            if not isinstance(preset, CrossPreset):
                raise ValueError(f"{self.preset_id} 沒有 L 生成元，無法建構解耦映射")
            gamma = load_gamma(self.N, self.config.gamma)
            bad = gamma.violations()
            if bad:
                self.logger.warning(LogIcons.WARNING, f"γ 設定違反乘積約束: {', '.join(bad)}")
            self._ctx = DecoupleContext(preset, gamma)
        return self._ctx

    # ─────────────────────────────────────────────────────────────
    # 合流
    # ─────────────────────────────────────────────────────────────

    def confluence_select(self) -> Optional[Callable[[Overlap], bool]]:
        """交叉積只檢查不含 L 的臨界對與 p·p·L、p·L⁻·L⁺ 兩種混合臨界對"""
        if self.kind == KIND_EUCLID:
            return None
        rules = self.get_rules()
        return lambda o: is_cross_overlap(o.word, rules)

    def confluence_sample(self) -> Optional[int]:
        if self.kind == KIND_EUCLID or self.confluence_limit is None:
            return None
        return int(self.confluence_limit)

    # ─────────────────────────────────────────────────────────────
    # 套件
    # ─────────────────────────────────────────────────────────────

    def _battery(self, suite: str, build: Callable[[], List[Instance]]) -> CheckReport:
        instances = build()
        return self.run_instances(suite, instances)

    def _with_gamma(self, report: CheckReport) -> CheckReport:
        report.notes["gamma"] = self.context().gamma.to_dict()
        return report

    def verify_homomorphism(self) -> CheckReport:
        ctx = self.context()
        return self._with_gamma(self._battery("homomorphism", lambda: homomorphism_instances(ctx, self.sampling)))

    def verify_commutant(self) -> CheckReport:
        ctx = self.context()
        return self._battery("commutant", lambda: commutant_instances(ctx, self.sampling))

    def verify_lemma1(self) -> CheckReport:
        ctx = self.context()
        return self._with_gamma(self._battery("lemma1", lambda: lemma1_instances(ctx, self.sampling)))

    def verify_reorder(self) -> CheckReport:
        ctx = self.context()
        report = self._battery("reorder", lambda: reorder_instances(ctx, self.sampling))
        if not ctx.odd:
            tally = reading_tally(report.checks)
            report.notes["readings"] = tally
            self.logger.info(LogIcons.NOTE, f"k = ±1 兩種讀法的成立次數: {tally}")
            report.add(reading_consistency(report.checks))
            report.sort()
        return self._with_gamma(report)

    def verify_star(self) -> CheckReport:
        preset = self.get_preset()
        instances = star_structure_instances(preset)
        if self.kind == KIND_EUCLID:
            return self.run_instances("star", instances)
        ctx = self.context()
        instances.extend(star_decoupling_instances(ctx, self.sampling))
        search, notes = real_gamma_instances(self.N)
        instances.extend(search)
        report = self.run_instances("star", instances)
        report.notes["real_gamma_search"] = notes
        return self._with_gamma(report)

    def verify_variants(self) -> CheckReport:
        ctx = self.context()
        report = self._battery("variants", lambda: variant_instances(ctx, self.sampling))
        optional = self.run_instances("variants", zeta7_instances(ctx, self.sampling))
        report.notes["zeta7"] = {
            "summary": optional.summary,
            "not_passed": {c.id: c.status.value for c in optional.checks if c.status != CheckStatus.PASS},
        }
        self.logger.info(LogIcons.NOTE, f"ζ7 = ζ5∘S^(-1)（不計入判定）: {optional.summary_line()}")
        return report

    def verify_decomposition(self) -> CheckReport:
        ctx = self.context()
        return self._battery("decomposition", lambda: decomposition_instances(ctx, self.sampling))

    def verify_center(self) -> CheckReport:
        preset = self.get_preset()
        if isinstance(preset, CrossPreset):
            instances = center_instances(preset.euclid, preset)
            instances.extend(crossing_instances(preset))
        else:
            instances = center_instances(preset)
        return self.run_instances("center", instances)

    def suites(self) -> Dict[str, Callable[[], CheckReport]]:
        table = self.matrix_suites()
        table["confluence"] = self.verify_confluence
        if self.kind == KIND_CROSS:
            table.update({
                "homomorphism": self.verify_homomorphism,
                "commutant": self.verify_commutant,
                "lemma1": self.verify_lemma1,
                "reorder": self.verify_reorder,
                "variants": self.verify_variants,
                "decomposition": self.verify_decomposition,
            })
        table["star"] = self.verify_star
        table["center"] = self.verify_center
        return table

    # ─────────────────────────────────────────────────────────────
    # 輸出
    # ─────────────────────────────────────────────────────────────

    def image_document(self, what: str) -> Dict[str, Any]:
        ctx = self.context()
        alphabet = ctx.rules.alphabet
        image = ctx.phi if what == "phi-images" else ctx.zeta
        entries = []
        for sign in SIGNS:
            for i, j in ctx.scheme.pairs:
                if not in_borel(sign, i, j):
                    continue
                entries.append({
                    "sign": sign,
                    "i": i,
                    "j": j,
                    "cartan": cartan_of(sign, i, j) is not None and not ctx.odd,
                    "image": image(sign, i, j).to_list(alphabet),
                })
        return {
            "preset": self.preset_id,
            "object": what,
            "gamma": ctx.gamma.to_dict(),
            "images": entries,
        }


__all__ = ["EuclidVerifyEngine", "KIND_CROSS", "KIND_EUCLID", "is_cross_overlap"]
