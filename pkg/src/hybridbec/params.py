"""Physical parameter record, unit conventions, and magnetic-field maps.

Internally every solver works in natural units hbar = M = omega_a = 1,
with lengths in atomic oscillator units sqrt(hbar/(M*omega_a)).  The
couplings follow lambda_a = 4*pi*hbar^2*a_a/M and
lambda_m = 4*pi*hbar^2*a_m/(2M); the hbar^2 factor is restored where the
compact a/M form would be dimensionally short.

The applied magnetic field enters only through two derived quantities:
the effective scattering length a_eff(B) = a0*(1 + Delta/(B0 - B)) and
the atom-pair <-> molecule conversion amplitude
alpha(B) = sqrt(lambda_a * Delta^2 / (2*|B - B0|)) (proportionality taken
as equality, prefactor 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, replace

from .errors import ConfigError, ResonanceSingularityError

#: |B - B0| below SINGULARITY_FLOOR * Delta raises ResonanceSingularityError.
SINGULARITY_FLOOR = 1e-9


@dataclass(frozen=True)
class FeshbachResonance:
    """Resonance parameters: off-resonant length a0, resonant field b0,
    width delta, applied field b.  Fields in mT, a0 in any length unit."""

    a0: float
    b0: float
    delta: float
    b: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigError(f"resonance width must be positive, got {self.delta}")


@dataclass(frozen=True)
class PhysicalParams:
    """All coupling constants, trap frequencies, particle numbers and the
    temperature, in one immutable record.

    omega_a, omega_m  trap angular frequencies (energy/hbar)
    lambda_a          atom-atom coupling 4*pi*hbar^2*a_a/M
    lambda_m          molecule-molecule coupling 4*pi*hbar^2*a_m/(2M)
    lambda_am         atom-molecule density coupling
    alpha             atom-pair <-> molecule conversion amplitude
    epsilon           molecular detuning (energy)
    n_a, n_m          condensate atom / molecule numbers
    temperature       k_B * T as an energy
    mass, hbar        atomic mass and action quantum (1 in natural units)
    resonance         optional field-dependence parameters

    All derived quantities are pure functions of the record; equal records
    give bit-identical derived values.
    """

    omega_a: float
    omega_m: float
    lambda_a: float = 0.0
    lambda_m: float = 0.0
    lambda_am: float = 0.0
    alpha: float = 0.0
    epsilon: float = 0.0
    n_a: float = 0.0
    n_m: float = 0.0
    temperature: float = 0.0
    mass: float = 1.0
    hbar: float = 1.0
    resonance: FeshbachResonance | None = None

    def __post_init__(self):
        if self.omega_a <= 0 or self.omega_m <= 0:
            raise ConfigError(
                f"trap frequencies must be positive, got omega_a={self.omega_a}, "
                f"omega_m={self.omega_m}"
            )
        if self.mass <= 0 or self.hbar <= 0:
            raise ConfigError(f"mass and hbar must be positive, got {self.mass}, {self.hbar}")
        if self.n_a < 0 or self.n_m < 0:
            raise ConfigError(f"particle numbers must be >= 0, got {self.n_a}, {self.n_m}")
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")

    @property
    def molecule_mass(self) -> float:
        return 2.0 * self.mass

    @property
    def beta(self) -> float:
        """Inverse temperature 1/(k_B T); +inf at T = 0."""
        return math.inf if self.temperature == 0.0 else 1.0 / self.temperature

    @property
    def oscillator_length(self) -> float:
        return math.sqrt(self.hbar / (self.mass * self.omega_a))

    # -- serialization -------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalParams":
        """Build from a JSON-style dict.  Unknown keys are a hard error."""
        if not isinstance(data, dict):
            raise ConfigError(f"params must be an object, got {type(data).__name__}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown params keys: {sorted(unknown)}")
        kwargs = dict(data)
        res = kwargs.pop("resonance", None)
        if res is not None:
            if not isinstance(res, dict):
                raise ConfigError("resonance must be an object")
            res_known = set(FeshbachResonance.__dataclass_fields__)
            res_unknown = set(res) - res_known
            if res_unknown:
                raise ConfigError(f"unknown resonance keys: {sorted(res_unknown)}")
            missing = res_known - set(res)
            if missing:
                raise ConfigError(f"resonance missing keys: {sorted(missing)}")
            kwargs["resonance"] = FeshbachResonance(**res)
        for name in ("omega_a", "omega_m"):
            if name not in kwargs:
                raise ConfigError(f"params missing required key '{name}'")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["resonance"] is None:
            del d["resonance"]
        return d


def _field_offset(params: PhysicalParams) -> float:
    res = params.resonance
    if res is None:
        raise ConfigError("params.resonance is required for field-dependent quantities")
    off = res.b - res.b0
    if abs(off) < SINGULARITY_FLOOR * res.delta:
        raise ResonanceSingularityError(
            f"|B - B0| = {abs(off):.3e} is below the singularity floor "
            f"{SINGULARITY_FLOOR * res.delta:.3e}; the resonance point is excluded"
        )
    return off


def effective_scattering_length(params: PhysicalParams) -> float:
    """a_eff = a0 * (1 + Delta/(B0 - B)); may be negative (attraction)."""
    off = _field_offset(params)
    res = params.resonance
    return res.a0 * (1.0 + res.delta / (-off))


def conversion_amplitude(params: PhysicalParams) -> float:
    """alpha(B) = sqrt(lambda_a * Delta^2 / (2*|B - B0|)).

    Monotonically increasing toward the resonant field, -> 0 far from it.
    """
    off = _field_offset(params)
    res = params.resonance
    return math.sqrt(params.lambda_a * res.delta**2 / (2.0 * abs(off)))


@dataclass(frozen=True)
class UnitScales:
    """Conversion factors from a given unit system to natural units.

    energy: hbar*omega_a, length: sqrt(hbar/(M*omega_a)); frequency,
    coupling and conversion-amplitude scales follow from those.
    """

    energy: float
    length: float
    frequency: float
    mass: float
    hbar: float

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "UnitScales":
        energy = params.hbar * params.omega_a
        length = params.oscillator_length
        return cls(
            energy=energy,
            length=length,
            frequency=params.omega_a,
            mass=params.mass,
            hbar=params.hbar,
        )

    @property
    def coupling(self) -> float:
        """Scale of lambda-type couplings (energy * volume)."""
        return self.energy * self.length**3

    @property
    def conversion(self) -> float:
        """Scale of the conversion amplitude (energy * volume^(1/2))."""
        return self.energy * self.length**1.5


def natural_units(params: PhysicalParams) -> PhysicalParams:
    """Rescale the record so hbar = M = omega_a = 1.

    Dimensionless ratios (omega_m/omega_a, particle numbers, B fields)
    are untouched.  Idempotent; `from_natural` with the original scales
    inverts it to round-off.
    """
    s = UnitScales.from_params(params)
    res = params.resonance
    if res is not None:
        res = replace(res, a0=res.a0 / s.length)
    return PhysicalParams(
        omega_a=1.0,
        omega_m=params.omega_m / s.frequency,
        lambda_a=params.lambda_a / s.coupling,
        lambda_m=params.lambda_m / s.coupling,
        lambda_am=params.lambda_am / s.coupling,
        alpha=params.alpha / s.conversion,
        epsilon=params.epsilon / s.energy,
        n_a=params.n_a,
        n_m=params.n_m,
        temperature=params.temperature / s.energy,
        mass=1.0,
        hbar=1.0,
        resonance=res,
    )


def from_natural(params: PhysicalParams, scales: UnitScales) -> PhysicalParams:
    """Inverse of `natural_units` for a record expressed in the units
    described by `scales`."""
    res = params.resonance
    if res is not None:
        res = replace(res, a0=res.a0 * scales.length)
    return PhysicalParams(
        omega_a=params.omega_a * scales.frequency,
        omega_m=params.omega_m * scales.frequency,
        lambda_a=params.lambda_a * scales.coupling,
        lambda_m=params.lambda_m * scales.coupling,
        lambda_am=params.lambda_am * scales.coupling,
        alpha=params.alpha * scales.conversion,
        epsilon=params.epsilon * scales.energy,
        n_a=params.n_a,
        n_m=params.n_m,
        temperature=params.temperature * scales.energy,
        mass=params.mass * scales.mass,
        hbar=params.hbar * scales.hbar,
        resonance=res,
    )


def chemical_equilibrium_gap(mu_a: float, mu_m: float) -> float:
    """Diagnostic mu_m - 2*mu_a; zero in chemical equilibrium.

    Reported, never imposed: the coupled condensate equations are solved
    with independent normalizations.
    """
    return mu_m - 2.0 * mu_a
