"""Frozen implied constants and the checks that use them.

Every asymptotic inequality is checked as ``measured ratio <= C`` where C was
fixed once by ``scripts/freeze_constants.py`` over the canonical battery and
shipped in ``data/constants.json`` together with the sweep's provenance.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .multiplicative import MultiplicativeSpec

DEFAULT_PATH = Path(__file__).with_name("data") / "constants.json"

NAMES = (
    "C_TRIV",  # |S_k| <= C e^-k x log x
    "C_DEC",  # |S - (1/log x) sum S_k| <= C x loglog x / log x
    "C_32",  # |S_k| <= C (x L + x), k <= cutoff
    "C_I1",  # I1 <= C e^k / log x
    "C_I2",  # I2 <= C L^2 e^-k log x
    "C_PER",  # |S_k| <= C * Perron majorant
    "C_THM",  # |S| <= C * theorem bound
    "C_SM",  # |S| <= C (x / log x)(L + 1), smooth support
    "C_L1",  # mean value integral <= C * weighted prime sum
    "C_L",  # L <= C log x
    "C_AUX",  # sum_{p in P} log p / (p log(x/p)) <= C log log x
    "C_LOGSUM",  # sum_{n <= x} log(x/n) <= C x
)

# structural inequalities that hold up to rounding, not up to a constant
CS_SLACK = 1e-12
WINDOW_FACTOR = 2.0
WINDOW_SLACK = 1e-9


@dataclass(frozen=True)
class Constants:
    values: dict
    sha256: str
    path: str
    provenance: dict

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def scaled(self, factor: float) -> "Constants":
        return Constants({k: v * factor for k, v in self.values.items()}, self.sha256, self.path, self.provenance)


def load_constants(path: str | Path | None = None) -> Constants:
    path = DEFAULT_PATH if path in (None, "default") else Path(path)
    try:
        raw = Path(path).read_bytes()
        doc = json.loads(raw)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read constants file {path}: {exc}") from exc
    values = doc.get("constants", doc)
    missing = [n for n in NAMES if n not in values]
    if missing:
        raise ConfigError(f"constants file {path} lacks {missing}")
    try:
        values = {n: float(values[n]) for n in NAMES}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"constants file {path} has a non-numeric entry") from exc
    return Constants(values, hashlib.sha256(raw).hexdigest(), str(path), doc.get("provenance", {}))


def report_violations(report, C: Constants) -> list[str]:
    """Every frozen-constant or structural inequality a HalaszReport breaks."""
    tag = f"{MultiplicativeSpec.from_dict(report.spec).name} x={report.x:g}"
    out = []
    if report.theorem_ratio > C["C_THM"]:
        out.append(f"{tag}: theorem_ratio {report.theorem_ratio:.6g} > C_THM {C['C_THM']:.6g}")
    nd = report.decomposition.normalized_defect
    if nd > C["C_DEC"]:
        out.append(f"{tag}: normalized_defect {nd:.6g} > C_DEC {C['C_DEC']:.6g}")
    if report.L > C["C_L"] * math.log(report.x):
        out.append(f"{tag}: L/log x {report.L / math.log(report.x):.6g} > C_L {C['C_L']:.6g}")
    chain = math.sqrt(C["C_I1"] * C["C_I2"])
    for b in report.blocks:
        btag = f"{tag} k={b.k}"
        if b.trivial_ratio > C["C_TRIV"]:
            out.append(f"{btag}: trivial_ratio {b.trivial_ratio:.6g} > C_TRIV {C['C_TRIV']:.6g}")
        if b.perron_ratio > C["C_PER"]:
            out.append(f"{btag}: perron_ratio {b.perron_ratio:.6g} > C_PER {C['C_PER']:.6g}")
        if b.cs_integral > math.sqrt(b.I1 * b.I2) * (1 + CS_SLACK):
            out.append(f"{btag}: Cauchy-Schwarz fails on the grid")
        if b.I2 > WINDOW_FACTOR * b.I2_windowed * (1 + WINDOW_SLACK):
            out.append(f"{btag}: windowed I2 majorant fails by more than a factor {WINDOW_FACTOR:g}")
        if b.k > report.cutoff_k:
            continue
        if b.I1_ratio > C["C_I1"]:
            out.append(f"{btag}: I1_ratio {b.I1_ratio:.6g} > C_I1 {C['C_I1']:.6g}")
        if b.I2_ratio > C["C_I2"]:
            out.append(f"{btag}: I2_ratio {b.I2_ratio:.6g} > C_I2 {C['C_I2']:.6g}")
        if b.eq32_ratio > C["C_32"]:
            out.append(f"{btag}: eq32_ratio {b.eq32_ratio:.6g} > C_32 {C['C_32']:.6g}")
        if b.chain_ratio > chain:
            out.append(f"{btag}: chain_ratio {b.chain_ratio:.6g} > sqrt(C_I1 C_I2) {chain:.6g}")
    return out


def freeze(measured: float, margin: float) -> float:
    """measured * margin rounded up to two significant figures."""
    if measured <= 0:
        return 0.0
    v = measured * margin
    e = math.floor(math.log10(v)) - 1
    return round(math.ceil(v / 10**e - 1e-9) * 10**e, max(0, -e))
