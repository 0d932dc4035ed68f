"""Run configuration: JSON schema, validation, defaults, manifests.

Configs are plain JSON with four blocks (network, spectrum, experiment,
output, numerics).  Unknown keys are rejected and every physical quantity
carries its unit in the key name, because a silent cm/nm mix-up is the
most likely way to get a wrong-but-plausible answer out of this package.
Site indices are 1-based in config files (matching how the guides are
labelled on the device sketch) and converted to the 0-based indices the
Python API uses.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Tuple

from .decoherence import SPECTRUM_SHAPES, Spectrum
from .lattice import DETUNING_LAWS, DispersionModel, NetworkSpec, SinkSpec


class ConfigError(ValueError):
    """Configuration problem; carries the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    z_cm: float = 15.0
    z_step_cm: float = 0.1
    wavelength_min_nm: float = 745.0
    wavelength_max_nm: float = 840.0
    wavelength_step_nm: float = 0.5
    bandwidth_max_nm: float = 95.0
    bandwidth_step_nm: float = 5.0
    gamma_max_per_cm: float = 0.02
    gamma_step_per_cm: float = 0.001


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs"


@dataclass(frozen=True)
class NumericsConfig:
    ensemble_nodes: int = 41
    lindblad_step_tolerance: float = 1e-9
    dark_overlap_threshold: float = 1e-12
    no_return_threshold: float = 1e-3
    sensitivity_fraction: float = 0.1


@dataclass(frozen=True)
class RunConfig:
    network: NetworkSpec
    spectrum: Spectrum
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)


def default_config_dict() -> Dict:
    """Full default configuration: the four-guide design network.

    Chain coupling and site-4 detuning of 1.0 cm^-1, trap and sink
    couplings of 1.5 and 1.75 cm^-1, matched at 792.5 nm.  The dispersion
    slopes are placeholders (no measured values exist); the sink length is
    sized so nothing reflects off the chain end within 15 cm anywhere in
    the sweep window.
    """
    return {
        "network": {
            "n_sites": 4,
            "input_site": 1,
            "target_site": 3,
            "site_detunings": [{"site": 4, "delta_beta_per_cm": 1.0}],
            "couplings": [
                {"site_a": 1, "site_b": 2, "coupling_per_cm": 1.0},
                {"site_a": 2, "site_b": 3, "coupling_per_cm": 1.0},
                {"site_a": 3, "site_b": 4, "coupling_per_cm": 1.0},
            ],
            "dispersion": {
                "lambda0_nm": 792.5,
                "beta0_per_cm": 0.0,
                "detuning_law": "inverse-lambda",
                "detuning0_per_cm": 1.0,
                "coupling_slope_per_nm": 0.01,
                "slopes_are_placeholders": True,
            },
            "sink": {
                "n_sink": 90,
                "c_trap_per_cm": 1.5,
                "c_sink_per_cm": 1.75,
            },
        },
        "spectrum": {
            "shape": "tophat",
            "center_nm": 792.5,
            "fwhm_nm": 95.0,
        },
        "experiment": {
            "z_cm": 15.0,
            "z_step_cm": 0.1,
            "wavelength_min_nm": 745.0,
            "wavelength_max_nm": 840.0,
            "wavelength_step_nm": 0.5,
            "bandwidth_max_nm": 95.0,
            "bandwidth_step_nm": 5.0,
            "gamma_max_per_cm": 0.02,
            "gamma_step_per_cm": 0.001,
        },
        "output": {"directory": "runs"},
        "numerics": {
            "ensemble_nodes": 41,
            "lindblad_step_tolerance": 1e-9,
            "dark_overlap_threshold": 1e-12,
            "no_return_threshold": 1e-3,
            "sensitivity_fraction": 0.1,
        },
    }


def bundled_network_path() -> Path:
    """Path of the packaged default configuration file."""
    return Path(resources.files("enaqt").joinpath("data/paper_network.json"))


# ---------------------------------------------------------------------------
# validation helpers

_REQUIRED = object()


def _require_dict(value, path: str) -> Dict:
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(block: Dict, allowed, path: str):
    unknown = set(block) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")


def _get(block: Dict, key: str, path: str, kind, default=_REQUIRED):
    if key not in block:
        if default is _REQUIRED:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    value = block[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}.{key}", f"expected a string, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}.{key}", f"expected a boolean, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}.{key}", f"expected a list, got {value!r}")
        return value
    raise TypeError(f"unsupported kind {kind}")


def _positive(value: float, path: str) -> float:
    if value <= 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return value


def _site_index(value: int, n_sites: int, path: str) -> int:
    if not 1 <= value <= n_sites:
        raise ConfigError(path, f"site index must be in 1..{n_sites}, got {value}")
    return value - 1


def _parse_network(block: Dict, path: str = "network") -> NetworkSpec:
    block = _require_dict(block, path)
    _check_keys(block, {"n_sites", "input_site", "target_site", "site_detunings",
                        "couplings", "dispersion", "sink"}, path)
    n_sites = _get(block, "n_sites", path, int)
    if n_sites < 1:
        raise ConfigError(f"{path}.n_sites", f"must be >= 1, got {n_sites}")

    detunings: List[Tuple[int, float]] = []
    for k, item in enumerate(_get(block, "site_detunings", path, list, default=[])):
        ipath = f"{path}.site_detunings[{k}]"
        item = _require_dict(item, ipath)
        _check_keys(item, {"site", "delta_beta_per_cm"}, ipath)
        site = _site_index(_get(item, "site", ipath, int), n_sites, f"{ipath}.site")
        detunings.append((site, _get(item, "delta_beta_per_cm", ipath, float)))

    couplings: List[Tuple[int, int, float]] = []
    for k, item in enumerate(_get(block, "couplings", path, list, default=[])):
        ipath = f"{path}.couplings[{k}]"
        item = _require_dict(item, ipath)
        _check_keys(item, {"site_a", "site_b", "coupling_per_cm"}, ipath)
        a = _site_index(_get(item, "site_a", ipath, int), n_sites, f"{ipath}.site_a")
        b = _site_index(_get(item, "site_b", ipath, int), n_sites, f"{ipath}.site_b")
        c = _get(item, "coupling_per_cm", ipath, float)
        _positive(c, f"{ipath}.coupling_per_cm")
        couplings.append((a, b, c))

    dpath = f"{path}.dispersion"
    dblock = _require_dict(block.get("dispersion", {}), dpath)
    _check_keys(dblock, {"lambda0_nm", "beta0_per_cm", "detuning_law",
                         "detuning0_per_cm", "coupling_slope_per_nm",
                         "slopes_are_placeholders"}, dpath)
    law = _get(dblock, "detuning_law", dpath, str, default="inverse-lambda")
    if law not in DETUNING_LAWS:
        raise ConfigError(f"{dpath}.detuning_law",
                          f"must be one of {list(DETUNING_LAWS)}, got {law!r}")
    dispersion = DispersionModel(
        lambda0_nm=_positive(_get(dblock, "lambda0_nm", dpath, float, default=792.5),
                             f"{dpath}.lambda0_nm"),
        beta0_per_cm=_get(dblock, "beta0_per_cm", dpath, float, default=0.0),
        detuning0_per_cm=_get(dblock, "detuning0_per_cm", dpath, float, default=1.0),
        detuning_law=law,
        coupling_slope_per_nm=_get(dblock, "coupling_slope_per_nm", dpath, float,
                                   default=0.01),
    )

    sink = None
    if block.get("sink") is not None:
        spath = f"{path}.sink"
        sblock = _require_dict(block["sink"], spath)
        _check_keys(sblock, {"n_sink", "c_trap_per_cm", "c_sink_per_cm"}, spath)
        n_sink = _get(sblock, "n_sink", spath, int, default=90)
        if n_sink < 1:
            raise ConfigError(f"{spath}.n_sink", f"must be >= 1, got {n_sink}")
        sink = SinkSpec(
            n_sink=n_sink,
            c_trap_per_cm=_positive(_get(sblock, "c_trap_per_cm", spath, float,
                                         default=1.5), f"{spath}.c_trap_per_cm"),
            c_sink_per_cm=_positive(_get(sblock, "c_sink_per_cm", spath, float,
                                         default=1.75), f"{spath}.c_sink_per_cm"),
        )

    try:
        return NetworkSpec(
            n_sites=n_sites,
            site_detunings=tuple(detunings),
            couplings=tuple(couplings),
            dispersion=dispersion,
            sink=sink,
            input_site=_site_index(_get(block, "input_site", path, int, default=1),
                                   n_sites, f"{path}.input_site"),
            target_site=_site_index(_get(block, "target_site", path, int, default=1),
                                    n_sites, f"{path}.target_site"),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_spectrum(block: Dict, path: str = "spectrum") -> Spectrum:
    block = _require_dict(block, path)
    _check_keys(block, {"shape", "center_nm", "fwhm_nm", "lines"}, path)
    shape = _get(block, "shape", path, str)
    if shape not in SPECTRUM_SHAPES:
        raise ConfigError(f"{path}.shape",
                          f"must be one of {list(SPECTRUM_SHAPES)}, got {shape!r}")
    lines = []
    for k, item in enumerate(_get(block, "lines", path, list, default=[])):
        ipath = f"{path}.lines[{k}]"
        item = _require_dict(item, ipath)
        _check_keys(item, {"wavelength_nm", "weight"}, ipath)
        lines.append((_positive(_get(item, "wavelength_nm", ipath, float),
                                f"{ipath}.wavelength_nm"),
                      _get(item, "weight", ipath, float)))
    try:
        if shape == "discrete":
            return Spectrum.discrete(lines)
        return Spectrum(
            shape=shape,
            center_nm=_get(block, "center_nm", path, float),
            fwhm_nm=_get(block, "fwhm_nm", path, float, default=0.0),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_simple(block: Dict, cls, path: str):
    block = _require_dict(block, path)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    _check_keys(block, fields, path)
    kwargs = {}
    for name, f in fields.items():
        kind = int if f.type == "int" else float
        kwargs[name] = (_get(block, name, path, str if f.type == "str" else kind,
                             default=f.default)
                        if f.default is not dataclasses.MISSING
                        else _get(block, name, path, kind))
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def config_from_dict(raw: Dict) -> RunConfig:
    """Validate a parsed JSON document and fill defaults."""
    raw = _require_dict(raw, "config")
    _check_keys(raw, {"network", "spectrum", "experiment", "output", "numerics"},
                "config")
    if "network" not in raw:
        raise ConfigError("config.network", "missing required key")
    defaults = default_config_dict()
    spectrum_block = raw.get("spectrum", defaults["spectrum"])
    return RunConfig(
        network=_parse_network(raw["network"]),
        spectrum=_parse_spectrum(spectrum_block),
        experiment=_parse_simple(raw.get("experiment", {}), ExperimentConfig,
                                 "experiment"),
        output=_parse_simple(raw.get("output", {}), OutputConfig, "output"),
        numerics=_parse_simple(raw.get("numerics", {}), NumericsConfig, "numerics"),
    )


def parse_config(path) -> RunConfig:
    """Load and validate a JSON config file.

    An empty file is treated as an empty document, so the error names the
    first missing required key instead of a JSON parse failure.
    """
    p = Path(path)
    if not p.exists():
        raise ConfigError(str(p), "config file does not exist")
    text = p.read_text()
    if not text.strip():
        return config_from_dict({})
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(p), f"not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def config_sha256(raw: Dict) -> str:
    return hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
