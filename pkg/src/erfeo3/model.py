"""Model parameters of the two-sublattice Er/Fe spin system.

The Hamiltonian has three parts: an Fe3+ part (isotropic exchange,
Dzyaloshinskii-Moriya exchange along b, single-ion anisotropies), an Er3+
part (Zeeman term with anisotropic g-factors and nearest-neighbor Er-Er
exchange), and an Er-Fe coupling with an isotropic constant J and four
antisymmetric-exchange vectors D^{s,s'} (s, s' = A, B sublattices).

All energies are in meV, fields in tesla, temperatures in kelvin.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

FE_SPIN = 2.5          # Fe3+ spin magnitude S
FE_NEIGHBORS = 6       # Fe-Fe nearest-neighbor count z
ER_NEIGHBORS_FULL = 6  # Er-Er nearest-neighbor count at dilution x = 1


@dataclass(frozen=True)
class FeParams:
    """Fe3+ subsystem parameters (meV; g-factors dimensionless).

    ``A_y`` only matters for the symmetry analysis of the generalized
    couplings; it never enters the Hamiltonian used for numbers.
    """

    J_Fe: float
    D_Fe_y: float
    A_x: float
    A_z: float
    A_xz: float = 0.0
    A_y: float = 0.0
    g_Fe: tuple[float, float, float] = (2.0, 2.0, 0.6)
    S: float = FE_SPIN
    z: int = FE_NEIGHBORS

    def __post_init__(self):
        if self.S != FE_SPIN or self.z != FE_NEIGHBORS:
            raise ConfigError("the two-sublattice Fe model is fixed at S = 5/2, z = 6")
        if self.J_Fe <= 0:
            raise ConfigError("J_Fe must be positive (antiferromagnetic Fe order)")


@dataclass(frozen=True)
class ErParams:
    """Er3+ subsystem parameters: anisotropic g-tensor diagonal and Er-Er exchange (meV)."""

    g_Er: tuple[float, float, float]
    J_Er: float

    def __post_init__(self):
        if min(self.g_Er) <= 0:
            raise ConfigError("all Er g-factor components must be positive")


@dataclass(frozen=True)
class ErFeCouplings:
    """Er-Fe exchange constants (meV).

    ``J``, ``D_x``, ``D_y`` are the physical set.  The primed/generalized
    constants extend the four D^{s,s'} vectors and the 2x2 J matrix to the
    most general form compatible with the low-temperature symmetry; nonzero
    ``J_prime``, ``D_y_prime`` or ``D_z`` turn the low-temperature
    transition into a crossover, so they are accepted but warned about.
    """

    J: float
    D_x: float
    D_y: float
    J_prime: float = 0.0
    D_x_prime: float = 0.0
    D_y_prime: float = 0.0
    D_z: float = 0.0
    D_z_prime: float = 0.0

    def __post_init__(self):
        if self.J_prime != 0.0 or self.D_y_prime != 0.0 or self.D_z != 0.0:
            warnings.warn(
                "nonzero J_prime/D_y_prime/D_z break the second-order character "
                "of the low-temperature transition",
                UserWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class Environment:
    """External conditions: temperature (K), DC field (T), Er dilution x."""

    T: float = 4.0
    B_ext: tuple[float, float, float] = (0.0, 0.0, 0.0)
    x: float = 1.0

    def __post_init__(self):
        if self.T < 0:
            raise ConfigError("temperature must be >= 0")
        if not 0.0 <= self.x <= 1.0:
            raise ConfigError("dilution x must lie in [0, 1]")

    @property
    def z_Er(self) -> float:
        """Effective Er-Er neighbor count 6x."""
        return ER_NEIGHBORS_FULL * self.x


@dataclass(frozen=True)
class ModelConfig:
    fe: FeParams
    er: ErParams
    xc: ErFeCouplings
    env: Environment

    def with_env(self, **kw) -> "ModelConfig":
        """Copy with environment fields replaced (T=..., B_ext=..., x=...)."""
        return replace(self, env=replace(self.env, **kw))


def default_config() -> ModelConfig:
    """Parameter set fitted to ErFeO3 terahertz spectra and magnetization data."""
    return ModelConfig(
        fe=FeParams(J_Fe=4.96, D_Fe_y=-0.107, A_x=0.0073, A_z=0.0150, A_xz=0.0),
        er=ErParams(g_Er=(6.0, 3.4, 9.6), J_Er=0.037),
        xc=ErFeCouplings(J=0.60, D_x=0.034, D_y=0.003),
        env=Environment(T=4.0, B_ext=(0.0, 0.0, 0.0), x=1.0),
    )


# ---------------------------------------------------------------------------
# Er-Fe coupling tensors
# ---------------------------------------------------------------------------

def build_coupling_vectors(xc: ErFeCouplings) -> dict[str, np.ndarray]:
    """Four antisymmetric-exchange vectors D^{s,s'} from the scalar constants.

    With the generalized (primed) set zero this reduces to the minimal
    sign pattern D^{AA} = (D_x, D_y, 0), D^{AB} = (-D_x, -D_y, 0),
    D^{BA} = (-D_x, D_y, 0), D^{BB} = (D_x, -D_y, 0).
    """
    dx, dy, dz = xc.D_x, xc.D_y, xc.D_z
    dxp, dyp, dzp = xc.D_x_prime, xc.D_y_prime, xc.D_z_prime
    return {
        "AA": np.array([dx + dxp, dy + dyp, dz + dzp]),
        "AB": np.array([-dx + dxp, -dy + dyp, -dz + dzp]),
        "BA": np.array([-dx + dxp, dy - dyp, dz - dzp]),
        "BB": np.array([dx + dxp, -dy - dyp, -dz - dzp]),
    }


def build_j_matrix(xc: ErFeCouplings) -> dict[str, float]:
    """Isotropic Er-Fe exchange per sublattice pair: J_AA = J_BB = J + J',
    J_AB = J_BA = J - J'."""
    return {
        "AA": xc.J + xc.J_prime,
        "AB": xc.J - xc.J_prime,
        "BA": xc.J - xc.J_prime,
        "BB": xc.J + xc.J_prime,
    }


@dataclass(frozen=True)
class SymmetryReport:
    satisfied: bool
    violated_relations: tuple[str, ...]


def validate_gamma12_symmetry(
    j_matrix: dict[str, float],
    d_vectors: dict[str, np.ndarray],
    tol: float = 1e-12,
) -> SymmetryReport:
    """Check the fourteen relations that make the two sublattices equivalent
    in the low-temperature phase.

    The relations come in two sets of seven.  Writing X_{+-,s} for the
    half-sum/half-difference of X^{A,s} and X^{B,s} over the Er index, the
    first set demands::

        J[+,A] = J[+,B]        J[-,A] = -J[-,B]
        D[-,A]x = -D[-,B]x     D[+,A]y = -D[+,B]y    D[-,A]y = D[-,B]y
        D[+,A]z = -D[+,B]z     D[-,A]z = D[-,B]z

    and the second set is the same pattern with the roles of the Er and Fe
    indices exchanged (combinations over the Fe index).
    """
    J = {k: float(v) for k, v in j_matrix.items()}
    D = {k: np.asarray(v, dtype=float) for k, v in d_vectors.items()}
    scale = max(
        1.0,
        *(abs(v) for v in J.values()),
        *(float(np.max(np.abs(v))) for v in D.values()),
    )
    violated: list[str] = []

    def check(name: str, lhs: float, rhs: float):
        if abs(lhs - rhs) > tol * scale:
            violated.append(name)

    # Combination over the Er (first) index, relations between Fe columns A/B.
    Jp = {s: 0.5 * (J["A" + s] + J["B" + s]) for s in "AB"}
    Jm = {s: 0.5 * (J["A" + s] - J["B" + s]) for s in "AB"}
    Dp = {s: 0.5 * (D["A" + s] + D["B" + s]) for s in "AB"}
    Dm = {s: 0.5 * (D["A" + s] - D["B" + s]) for s in "AB"}
    check("J[+,A] = J[+,B]", Jp["A"], Jp["B"])
    check("J[-,A] = -J[-,B]", Jm["A"], -Jm["B"])
    check("D[-,A]x = -D[-,B]x", Dm["A"][0], -Dm["B"][0])
    check("D[+,A]y = -D[+,B]y", Dp["A"][1], -Dp["B"][1])
    check("D[-,A]y = D[-,B]y", Dm["A"][1], Dm["B"][1])
    check("D[+,A]z = -D[+,B]z", Dp["A"][2], -Dp["B"][2])
    check("D[-,A]z = D[-,B]z", Dm["A"][2], Dm["B"][2])

    # Combination over the Fe (second) index, relations between Er rows A/B.
    Jp = {s: 0.5 * (J[s + "A"] + J[s + "B"]) for s in "AB"}
    Jm = {s: 0.5 * (J[s + "A"] - J[s + "B"]) for s in "AB"}
    Dp = {s: 0.5 * (D[s + "A"] + D[s + "B"]) for s in "AB"}
    Dm = {s: 0.5 * (D[s + "A"] - D[s + "B"]) for s in "AB"}
    check("J[A,+] = J[B,+]", Jp["A"], Jp["B"])
    check("J[A,-] = -J[B,-]", Jm["A"], -Jm["B"])
    check("D[A,-]x = -D[B,-]x", Dm["A"][0], -Dm["B"][0])
    check("D[A,+]y = -D[B,+]y", Dp["A"][1], -Dp["B"][1])
    check("D[A,-]y = D[B,-]y", Dm["A"][1], Dm["B"][1])
    check("D[A,+]z = -D[B,+]z", Dp["A"][2], -Dp["B"][2])
    check("D[A,-]z = D[B,-]z", Dm["A"][2], Dm["B"][2])

    return SymmetryReport(satisfied=not violated, violated_relations=tuple(violated))


# ---------------------------------------------------------------------------
# TOML config file I/O and dotted-key overrides
# ---------------------------------------------------------------------------

_SECTIONS = {
    "fe": (FeParams, ("J_Fe", "D_Fe_y", "A_x", "A_z", "A_xz", "A_y", "g_Fe", "S", "z")),
    "er": (ErParams, ("g_Er", "J_Er")),
    "exchange": (
        ErFeCouplings,
        ("J", "D_x", "D_y", "J_prime", "D_x_prime", "D_y_prime", "D_z", "D_z_prime"),
    ),
    "environment": (Environment, ("T", "B_ext", "x")),
}
_VECTOR_FIELDS = {"g_Fe", "g_Er", "B_ext"}
_INT_FIELDS = {"z"}


def _coerce(key: str, value):
    if key in _VECTOR_FIELDS:
        seq = value
        if not isinstance(seq, Sequence) or len(seq) != 3:
            raise ConfigError(f"{key} must be a 3-vector")
        return tuple(float(v) for v in seq)
    if key in _INT_FIELDS:
        return int(value)
    return float(value)


def config_from_dict(data: dict) -> ModelConfig:
    """Build a ModelConfig from nested dicts (TOML layout), defaults filled in."""
    base = default_config()
    parts = {"fe": base.fe, "er": base.er, "exchange": base.xc, "environment": base.env}
    for section, content in data.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section {section!r}")
        cls, fields = _SECTIONS[section]
        kw = {}
        for key, value in content.items():
            if key not in fields:
                raise ConfigError(f"unknown key {section}.{key}")
            kw[key] = _coerce(key, value)
        parts[section] = replace(parts[section], **kw)
    return ModelConfig(fe=parts["fe"], er=parts["er"], xc=parts["exchange"], env=parts["environment"])


def load_config(path) -> ModelConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed TOML config: {exc}") from None
    return config_from_dict(data)


def _toml_value(v) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(repr(float(c)) for c in v) + "]"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))  # repr round-trips doubles bit-exactly


def dump_config(cfg: ModelConfig) -> str:
    """Serialize to TOML text; floats use repr so parsing restores them bit-exactly."""
    objs = {"fe": cfg.fe, "er": cfg.er, "exchange": cfg.xc, "environment": cfg.env}
    lines = []
    for section, obj in objs.items():
        lines.append(f"[{section}]")
        for key in _SECTIONS[section][1]:
            lines.append(f"{key} = {_toml_value(getattr(obj, key))}")
        lines.append("")
    return "\n".join(lines)


def apply_overrides(cfg: ModelConfig, overrides: dict[str, str]) -> ModelConfig:
    """Apply dotted-key overrides like {'environment.T': '10'} on top of a config.

    Values are parsed as floats, or as comma-separated triples for the
    3-vector fields.  Unknown keys are rejected.
    """
    data: dict[str, dict] = {}
    for dotted, raw in overrides.items():
        try:
            section, key = dotted.split(".", 1)
        except ValueError:
            raise ConfigError(f"override key {dotted!r} must look like section.field") from None
        if section not in _SECTIONS or key not in _SECTIONS[section][1]:
            raise ConfigError(f"unknown override key {dotted!r}")
        if key in _VECTOR_FIELDS:
            parts = [p for p in str(raw).replace("(", "").replace(")", "").split(",") if p.strip()]
            if len(parts) != 3:
                raise ConfigError(f"{dotted} needs three comma-separated values")
            value = tuple(float(p) for p in parts)
        else:
            value = float(raw)
        data.setdefault(section, {})[key] = value

    objs = {"fe": cfg.fe, "er": cfg.er, "exchange": cfg.xc, "environment": cfg.env}
    for section, content in data.items():
        objs[section] = replace(objs[section], **{k: _coerce(k, v) for k, v in content.items()})
    return ModelConfig(fe=objs["fe"], er=objs["er"], xc=objs["exchange"], env=objs["environment"])
