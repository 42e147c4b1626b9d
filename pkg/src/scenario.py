"""
Scenario files: what a verification run is fed with.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from src import coefficients as cf
from src.errors import ScenarioError
from src.painleve import AlphaParams

SUITE_IDS = ("ring", "qdet", "toda", "p4", "backlund", "toda2p4", "lax", "ham", "bilinear")

INITIAL_KEYS = ("f0", "f1", "f2", "kappa1", "kappa1_prime", "kappa_m1", "kappa_m1_prime")


@dataclass
class Scenario:
    """One verification run: coefficient mode, ring size, parameters and suites."""

    name: str = "scenario"
    mode: str = "exact"
    dim: int = 2
    order: int = 10
    seed: int = 0
    alphas: List[Any] = field(default_factory=lambda: ["1/3", "1/4", "5/12"])
    a_param: Any = 1
    nmax: int = 5
    mmax: int = 4
    tolerance: float = 1e-9
    entry_range: int = 3
    lotka_volterra: bool = False
    beta2: Optional[Any] = None
    with_intermediate: bool = False
    qdet_samples: int = 200
    initial: Dict[str, Any] = field(default_factory=dict)
    suites: List[str] = field(default_factory=lambda: ["all"])

    def __post_init__(self):
        """Validate and normalize."""
        if self.mode not in cf.MODES:
            raise ScenarioError(f"mode must be one of {list(cf.MODES)}, got {self.mode!r}", "mode")
        for name, low in (("dim", 1), ("order", 4), ("nmax", 2), ("mmax", 2), ("entry_range", 1), ("qdet_samples", 1)):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < low:
                raise ScenarioError(f"{name} must be an integer >= {low}, got {value!r}", name)
        if not isinstance(self.seed, int):
            raise ScenarioError(f"seed must be an integer, got {self.seed!r}", "seed")
        if self.mode == "float" and not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise ScenarioError("tolerance must be positive in float mode", "tolerance")

        alphas = self.alpha_params
        if alphas.total not in (0, 1):
            raise ScenarioError(f"alphas must sum to 1 (or 0 for Lotka-Volterra), got {alphas.total}", "alphas")
        self.lotka_volterra = alphas.total == 0
        self.alphas = [str(a) for a in alphas.as_tuple()]

        for key, label in (("a_param", "a_param"), ("beta2", "beta2")):
            value = getattr(self, key)
            if value is None:
                continue
            try:
                setattr(self, key, str(Fraction(value)))
            except (TypeError, ValueError) as e:
                raise ScenarioError(f"cannot parse {value!r} as a rational: {e}", label)

        if not isinstance(self.initial, dict):
            raise ScenarioError("initial must be an object of matrices", "initial")
        for key, value in self.initial.items():
            if key not in INITIAL_KEYS:
                raise ScenarioError(f"unknown initial value {key!r}; expected one of {list(INITIAL_KEYS)}", "initial")
            try:
                cf.as_matrix(value, self.dim, True)
            except (TypeError, ValueError, ZeroDivisionError) as e:
                raise ScenarioError(f"initial.{key}: {e}", "initial")

        if isinstance(self.suites, str):
            self.suites = [self.suites]
        unknown = [s for s in self.suites if s != "all" and s not in SUITE_IDS]
        if unknown:
            raise ScenarioError(f"unknown suites {unknown}; expected {list(SUITE_IDS)} or 'all'", "suites")

    @property
    def alpha_params(self) -> AlphaParams:
        if not isinstance(self.alphas, (list, tuple)) or len(self.alphas) != 3:
            raise ScenarioError(f"alphas must be a list of three numbers, got {self.alphas!r}", "alphas")
        try:
            return AlphaParams.of(self.alphas)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise ScenarioError(f"cannot parse alphas: {e}", "alphas")

    @property
    def a_value(self) -> Fraction:
        return Fraction(self.a_param)

    @property
    def beta2_value(self) -> Optional[Fraction]:
        return None if self.beta2 is None else Fraction(self.beta2)

    def initial_matrix(self, key: str, exact: bool) -> Optional[np.ndarray]:
        if key not in self.initial:
            return None
        return cf.as_matrix(self.initial[key], self.dim, exact)

    def selected_suites(self, requested: Optional[str] = None) -> List[str]:
        chosen = [requested] if requested else self.suites
        if "all" in chosen:
            return list(SUITE_IDS)
        return [s for s in SUITE_IDS if s in chosen]

    def ring_context(self, base: Optional[cf.RingContext] = None) -> cf.RingContext:
        base = base or cf.RingContext()
        return cf.RingContext(
            mode=self.mode,
            tol=float(self.tolerance),
            condition_bound=base.condition_bound,
            gap_threshold=base.gap_threshold,
            entry_range=self.entry_range,
        )

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _line_of(text: str, key: str) -> Optional[int]:
    for number, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return number
    return None


def parse_scenario_text(text: str, defaults: Optional[Dict[str, Any]] = None) -> Scenario:
    """Parse a JSON scenario; errors name the field and line.

    `defaults` fill fields the file leaves out (the engine settings for mode,
    tolerance and entry_range).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"malformed JSON: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise ScenarioError("a scenario must be a JSON object", line=1)
    known = {f.name for f in fields(Scenario)}
    for key in data:
        if key not in known:
            raise ScenarioError(f"unknown field {key!r}", key, _line_of(text, key))
    values = dict(defaults or {})
    values.update(data)
    try:
        return Scenario(**values)
    except ScenarioError as e:
        if e.line is None and e.field:
            raise ScenarioError(str(e).split(" (field")[0], e.field, _line_of(text, e.field)) from e
        raise


def parse_scenario(path: str, defaults: Optional[Dict[str, Any]] = None) -> Scenario:
    if not os.path.exists(path):
        raise ScenarioError(f"scenario file not found: {path}", "path")
    with open(path, "r") as f:
        text = f.read()
    scenario = parse_scenario_text(text, defaults)
    if scenario.name == "scenario":
        scenario.name = os.path.splitext(os.path.basename(path))[0]
    return scenario


PRESETS: Dict[str, Dict[str, Any]] = {
    "smoke": {
        "name": "smoke",
        "dim": 1,
        "order": 6,
        "seed": 1,
        "nmax": 3,
        "mmax": 3,
        "qdet_samples": 30,
        "suites": ["ring", "qdet", "p4"],
    },
    "exact-d1": {"name": "exact-d1", "dim": 1, "order": 10, "seed": 7, "suites": ["all"]},
    "exact-d2": {"name": "exact-d2", "dim": 2, "order": 12, "seed": 42, "suites": ["all"]},
    "float-d3": {
        "name": "float-d3",
        "mode": "float",
        "dim": 3,
        "order": 10,
        "seed": 3,
        "tolerance": 1e-8,
        "suites": ["all"],
    },
}


class ScenarioManager:
    """Loads, saves and hands out scenarios."""

    def __init__(
        self, presets: Optional[Dict[str, Dict[str, Any]]] = None, defaults: Optional[Dict[str, Any]] = None
    ):
        """Initialize scenario manager; `defaults` sit under every scenario it builds."""
        self.presets = dict(PRESETS if presets is None else presets)
        self.defaults = dict(defaults or {})

    def load(self, path: str) -> Scenario:
        """Load a scenario from file."""
        return parse_scenario(path, self.defaults)

    def save(self, scenario: Scenario, path: str) -> None:
        """Save a scenario to file."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            json.dump(asdict(scenario), f, indent=2)

    def get_preset(self, preset_name: str, **overrides: Any) -> Scenario:
        """Build a preset scenario, optionally overriding fields."""
        if preset_name not in self.presets:
            raise ScenarioError(f"unknown preset {preset_name!r}; choose from {self.list_presets()}", "preset")
        values = dict(self.defaults)
        values.update(self.presets[preset_name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Scenario(**values)

    def list_presets(self) -> List[str]:
        """List available presets."""
        return list(self.presets.keys())
