"""Product distribution matching over ASK bit levels.

A PDM demultiplexes data bits into one binary matcher per amplitude bit
level (level 2 first) and recombines the shaped bit columns into
amplitudes through the NBBC amplitude mapper, so the amplitude
distribution is the product of the per-level bit distributions. Levels
may also be UNIFORM: the level passes n raw data bits through unchanged.

Extended PDM serves several parallel channels with different
constellation sizes from one matcher stack: level j runs one binary
matcher of output length n_j = (number of channels with m >= j) * n and
splits its output channel-major. Because level 2 is the most significant
amplitude bit on every channel, a smaller constellation sees the same
Gaussian-like shape as the matching group of neighbouring points of a
larger one.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import matcher as ccdm
from .constellation import Labeling, amplitude_labels_vec, amplitudes_from_labels_vec
from .matcher import CcdmConfig, DecodeError

# marker for an unshaped level: n raw data bits pass through unchanged
UNIFORM = None


def _check_levels(levels, js_expected, n_for_level):
    if sorted(levels) != list(js_expected):
        raise ValueError("levels must cover j = %d..%d" % (js_expected[0], js_expected[-1]))
    for j, cfg in levels.items():
        if cfg is UNIFORM:
            continue
        if not isinstance(cfg, CcdmConfig) or cfg.composition.q != 2:
            raise ValueError("level %d must be a binary CcdmConfig or UNIFORM" % j)
        if cfg.n != n_for_level(j):
            raise ValueError(
                "level %d matcher outputs %d symbols, expected %d" % (j, cfg.n, n_for_level(j))
            )


@dataclass
class PdmConfig:
    """Per-bit-level matcher stack for a single 2^m-ASK channel."""

    m: int
    n: int
    levels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 2 or self.n < 1:
            raise ValueError("need m >= 2 and n >= 1")
        _check_levels(self.levels, range(2, self.m + 1), lambda j: self.n)

    def k_level(self, j: int) -> int:
        cfg = self.levels[j]
        return self.n if cfg is UNIFORM else cfg.k

    @property
    def k(self) -> int:
        return sum(self.k_level(j) for j in sorted(self.levels))

    def level_p0(self, j: int) -> float:
        cfg = self.levels[j]
        return 0.5 if cfg is UNIFORM else cfg.composition.counts[0] / cfg.n


def _match_level(cfg, data_bits, n):
    if cfg is UNIFORM:
        return data_bits.astype(np.uint8)
    return ccdm.match(cfg, data_bits)


def _dematch_level(j, cfg, column):
    if cfg is UNIFORM:
        return column.astype(np.uint8)
    try:
        return ccdm.dematch(cfg, column)
    except DecodeError as err:
        raise DecodeError("level %d: %s" % (j, err), level=j) from err


def pdm_match(cfg: PdmConfig, data) -> np.ndarray:
    """Map k data bits to n amplitudes; levels consume data in ascending j."""
    data = np.asarray(data, dtype=np.uint8)
    if data.shape != (cfg.k,):
        raise ValueError("expected %d data bits, got shape %r" % (cfg.k, data.shape))
    columns = np.empty((cfg.n, cfg.m - 1), dtype=np.uint8)
    pos = 0
    for j in range(2, cfg.m + 1):
        kj = cfg.k_level(j)
        columns[:, j - 2] = _match_level(cfg.levels[j], data[pos : pos + kj], cfg.n)
        pos += kj
    return amplitudes_from_labels_vec(Labeling("nbbc", cfg.m), columns)


def pdm_dematch(cfg: PdmConfig, amplitudes) -> np.ndarray:
    """Invert :func:`pdm_match`; DecodeError names the offending level."""
    amplitudes = np.asarray(amplitudes)
    if amplitudes.shape != (cfg.n,):
        raise ValueError("expected %d amplitudes, got shape %r" % (cfg.n, amplitudes.shape))
    columns = amplitude_labels_vec(Labeling("nbbc", cfg.m), amplitudes)
    parts = [
        _dematch_level(j, cfg.levels[j], columns[:, j - 2]) for j in range(2, cfg.m + 1)
    ]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


def pdm_rate_loss(cfg: PdmConfig) -> float:
    """Sum of per-level rate losses, bits per amplitude; UNIFORM levels add 0."""
    return sum(
        ccdm.rate_loss(c) for c in cfg.levels.values() if c is not UNIFORM
    )


@dataclass
class ExtendedPdmPlan:
    """Shared matcher stack across L parallel channels of sizes 2^m_l."""

    channel_bits: tuple
    n: int
    levels: dict = field(default_factory=dict)

    def __post_init__(self):
        self.channel_bits = tuple(int(m) for m in self.channel_bits)
        if not self.channel_bits or any(m < 2 for m in self.channel_bits):
            raise ValueError("every channel needs m >= 2")
        if self.n < 1:
            raise ValueError("need n >= 1")
        _check_levels(self.levels, range(2, max(self.channel_bits) + 1), self.n_level)

    @property
    def num_channels(self) -> int:
        return len(self.channel_bits)

    def participants(self, j: int) -> list:
        """Channels using bit level j, in ascending channel order."""
        return [l for l, m in enumerate(self.channel_bits) if m >= j]

    def n_level(self, j: int) -> int:
        return len(self.participants(j)) * self.n

    def k_level(self, j: int) -> int:
        cfg = self.levels[j]
        return self.n_level(j) if cfg is UNIFORM else cfg.k

    @property
    def k(self) -> int:
        return sum(self.k_level(j) for j in sorted(self.levels))

    def level_p0(self, j: int) -> float:
        cfg = self.levels[j]
        return 0.5 if cfg is UNIFORM else cfg.composition.counts[0] / cfg.n


def extended_pdm_match(plan: ExtendedPdmPlan, data) -> list:
    """Map k data bits to one amplitude sequence of length n per channel."""
    data = np.asarray(data, dtype=np.uint8)
    if data.shape != (plan.k,):
        raise ValueError("expected %d data bits, got shape %r" % (plan.k, data.shape))
    max_m = max(plan.channel_bits)
    # per-channel bit columns, filled level by level
    columns = {
        l: np.empty((plan.n, m - 1), dtype=np.uint8) for l, m in enumerate(plan.channel_bits)
    }
    pos = 0
    for j in range(2, max_m + 1):
        kj = plan.k_level(j)
        bits = _match_level(plan.levels[j], data[pos : pos + kj], plan.n_level(j))
        pos += kj
        for block, l in enumerate(plan.participants(j)):
            columns[l][:, j - 2] = bits[block * plan.n : (block + 1) * plan.n]
    return [
        amplitudes_from_labels_vec(Labeling("nbbc", m), columns[l])
        for l, m in enumerate(plan.channel_bits)
    ]


def extended_pdm_dematch(plan: ExtendedPdmPlan, sequences) -> np.ndarray:
    """Invert :func:`extended_pdm_match`."""
    if len(sequences) != plan.num_channels:
        raise ValueError("expected %d amplitude sequences" % plan.num_channels)
    columns = {}
    for l, m in enumerate(plan.channel_bits):
        seq = np.asarray(sequences[l])
        if seq.shape != (plan.n,):
            raise ValueError("channel %d: expected %d amplitudes" % (l, plan.n))
        columns[l] = amplitude_labels_vec(Labeling("nbbc", m), seq)
    parts = []
    for j in range(2, max(plan.channel_bits) + 1):
        stacked = np.concatenate([columns[l][:, j - 2] for l in plan.participants(j)])
        parts.append(_dematch_level(j, plan.levels[j], stacked))
    return np.concatenate(parts)


def extended_pdm_rate_loss(plan: ExtendedPdmPlan) -> float:
    """Rate loss in bits per channel use, averaged over the L channels."""
    total = sum(
        ccdm.rate_loss(c) * c.n for c in plan.levels.values() if c is not UNIFORM
    )
    return total / (plan.num_channels * plan.n)


def _levels_to_json(levels, n_level, k_level):
    out = []
    for j in sorted(levels):
        cfg = levels[j]
        counts = None if cfg is UNIFORM else list(cfg.composition.counts)
        out.append({"j": j, "n_j": n_level(j), "counts": counts, "k_j": k_level(j)})
    return out


def plan_to_json(plan) -> dict:
    """Serialize a PdmConfig or ExtendedPdmPlan to the plan document schema."""
    if isinstance(plan, PdmConfig):
        return {
            "channels": [{"m": plan.m, "n": plan.n}],
            "levels": _levels_to_json(plan.levels, lambda j: plan.n, plan.k_level),
        }
    return {
        "channels": [{"m": m, "n": plan.n} for m in plan.channel_bits],
        "levels": _levels_to_json(plan.levels, plan.n_level, plan.k_level),
    }


def plan_from_json(doc: dict):
    """Parse a plan document; single-channel documents give a PdmConfig."""
    _reject_unknown(doc, {"channels", "levels"}, "plan")
    channels = doc["channels"]
    if not channels:
        raise ValueError("plan needs at least one channel")
    ns = set()
    ms = []
    for ch in channels:
        _reject_unknown(ch, {"m", "n"}, "channel")
        ms.append(int(ch["m"]))
        ns.add(int(ch["n"]))
    if len(ns) != 1:
        raise ValueError("all channels must share the same n")
    n = ns.pop()
    levels = {}
    declared = {}
    for entry in doc["levels"]:
        _reject_unknown(entry, {"j", "n_j", "counts", "k_j"}, "level")
        j = int(entry["j"])
        counts = entry["counts"]
        levels[j] = UNIFORM if counts is None else CcdmConfig.from_counts(counts)
        declared[j] = (int(entry["n_j"]), int(entry["k_j"]))
    if len(ms) == 1:
        plan = PdmConfig(ms[0], n, levels)
        n_level = lambda j: n
    else:
        plan = ExtendedPdmPlan(tuple(ms), n, levels)
        n_level = plan.n_level
    for j, (n_j, k_j) in declared.items():
        if n_j != n_level(j) or k_j != plan.k_level(j):
            raise ValueError("level %d: declared n_j/k_j disagree with the plan" % j)
    return plan


def _reject_unknown(doc, allowed, what):
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError("unknown %s fields: %s" % (what, ", ".join(sorted(unknown))))


def dump_plan(plan, fp) -> None:
    json.dump(plan_to_json(plan), fp, indent=2)


def load_plan(fp):
    return plan_from_json(json.load(fp))
