"""
Heisenberg 代數驗證引擎
heis:slN / heis:soN（ε = ±1）：二次與 ∂x 規則、根字母、φ_α 影像與 *-結構的檢查
"""

from typing import Any, Callable, Dict, Optional

from core import BaseVerifyEngine, CheckReport, IndexScheme, RuleSet
from utils import LogIcons
from utils.config_loader import ConfigError

from presets.euclid.batteries import Sampling

from .algebra import HeisenbergPreset, build_heisenberg, heisenberg_from_rules, parse_heis_id
from .batteries import admissible_alphas, heisenberg_instances, star_instances
from .images import HeisImages, ImagesNotShippedError


class HeisenbergVerifyEngine(BaseVerifyEngine):
    """heis:* 預設的驗證引擎"""

    def __init__(self, config, cache, logger):
        super().__init__(config, cache, logger)
        try:
            case, N, epsilon = parse_heis_id(config.preset, default_epsilon=config.epsilon)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        self._scheme = IndexScheme(case, N)
        self.epsilon = epsilon
        self.preset: Optional[HeisenbergPreset] = None

        sampling_cfg = config.sampling or {}
        self.sampling = Sampling(
            exhaustive=N <= int(sampling_cfg.get("exhaustive_max_n", 3)),
            seed=config.seed,
            window=int(sampling_cfg.get("window", 2)),
            extra=int(sampling_cfg.get("extra", 50)),
            probe=bool(sampling_cfg.get("probe", False)),
        )

    @property
    def preset_id(self) -> str:
        tag = "eps+1" if self.epsilon > 0 else "eps-1"
        return f"heis:{self._scheme.label}:{tag}"

    @property
    def scheme(self) -> IndexScheme:
        return self._scheme

    def rule_params(self) -> Dict[str, Any]:
        return {
            "preset": self.preset_id,
            "case": self._scheme.case,
            "N": self._scheme.N,
            "epsilon": self.epsilon,
        }

    def build_rules(self) -> RuleSet:
        preset = build_heisenberg(self._scheme.case, self._scheme.N, self.epsilon, self.fuel)
        notes = preset.rules.meta["notes"]
        self.logger.info(LogIcons.BUILD, f"Heisenberg 代數: {notes['quadratic_rules']} 條二次規則，"
                                         f"根字母 {[r['kind'] for r in notes['roots']]}")
        for kind, reason in preset.skipped.items():
            self.logger.warning(LogIcons.WARNING, f"略過根 {kind}: {reason}")
        self.preset = preset
        return preset.rules

    def restore(self, rules: RuleSet) -> None:
        self.preset = heisenberg_from_rules(self._scheme.case, self._scheme.N, self.epsilon, rules)

    def get_preset(self) -> HeisenbergPreset:
        self.get_rules()
        return self.preset

    # ─────────────────────────────────────────────────────────────
    # 套件
    # ─────────────────────────────────────────────────────────────

    def _annotate(self, report: CheckReport) -> CheckReport:
        preset = self.get_preset()
        if preset.skipped:
            report.notes["skipped_roots"] = dict(preset.skipped)
        alphas = [c for c in report.checks if c.id.startswith("alpha[")]
        if alphas:
            admissible = admissible_alphas(alphas)
            report.notes["admissible_alpha"] = admissible
            self.logger.info(LogIcons.NOTE, f"可接受的 α: {admissible or '無'}")
        return report

    def verify_heisenberg(self) -> CheckReport:
        preset = self.get_preset()
        return self._annotate(self.run_instances("heisenberg", heisenberg_instances(preset, self.sampling)))

    def verify_star(self) -> CheckReport:
        preset = self.get_preset()
        return self._annotate(self.run_instances("star", star_instances(preset)))

    def suites(self) -> Dict[str, Callable[[], CheckReport]]:
        table = self.matrix_suites()
        table["confluence"] = self.verify_confluence
        table["heisenberg"] = self.verify_heisenberg
        table["star"] = self.verify_star
        return table

    # ─────────────────────────────────────────────────────────────
    # 輸出
    # ─────────────────────────────────────────────────────────────

    def image_document(self, what: str) -> Dict[str, Any]:
        preset = self.get_preset()
        try:
            images = HeisImages(preset)
        except ImagesNotShippedError as e:
            raise ConfigError(str(e)) from e
        alphabet = preset.rules.alphabet if what == "phi-images" else preset.cross_rules.alphabet
        image = images.phi if what == "phi-images" else images.zeta
        entries = []
        for (sign, i, j) in sorted(preset.frt_letters()):
            value = image(sign, i, j)
            entries.append({
                "sign": sign,
                "i": i,
                "j": j,
                "image": value.to_list(alphabet) if value is not None else None,
            })
        return {
            "preset": self.preset_id,
            "object": what,
            "alpha": images.label,
            "skipped_roots": dict(preset.skipped),
            "images": entries,
        }


__all__ = ["HeisenbergVerifyEngine"]
