"""Parameter tiers for the closed-cell calcium model.

Three tiers are used throughout:

* ``dimensional``    -- lab units (concentrations in uM, times in s),
* ``dimensionless``  -- after referencing concentrations to Q_c and times to T,
* ``scaled``         -- after absorbing the four numerically small quantities
  (tau_max, K_h, V_s, K) into hatted O(1) parameters and a single small
  parameter ``eps``.

The same symbol names recur across tiers with different numerical values, so
every parameter set carries its tier explicitly and mixing tiers is a hard
error.  Default values for each tier ship as plain-text files under
``calcilab/data`` and are kept as the literal published decimals.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

__all__ = [
    "CONVENTIONS",
    "DimensionalParams",
    "DimensionlessParams",
    "ScaledParams",
    "DerivedConstants",
    "ParamsError",
    "a_serca",
    "derived_constants",
    "default_dimensional",
    "default_dimensionless",
    "default_scaled",
    "fingerprint",
    "hat_scale",
    "load_params",
    "nondimensionalize",
    "redimensionalize",
    "save_params",
    "unhat",
]

# A_SERCA appears in the slow-regime formulas under two incompatible
# conventions (see DerivedConstants); every formula-level routine takes one of
# these flags.  "printed" reproduces the published numbers, "derived" is the
# value consistent with direct substitution into the governing equations.
CONVENTIONS = ("printed", "derived")


class ParamsError(ValueError):
    """Invalid, inconsistent or mistseparate-tier parameter input."""


def _require_positive(obj) -> None:
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
            raise ParamsError(f"{type(obj).__name__}.{f.name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class DimensionalParams:
    """Lab-unit parameters (concentrations uM, rates 1/s)."""

    k_beta: float
    K_c: float
    K_h: float
    K_p: float
    K_tau: float
    K_s: float
    k_IPR: float
    tau_max: float
    c_t: float
    p: float
    V_s: float
    K: float
    gamma: float

    tier = "dimensional"

    def __post_init__(self):
        _require_positive(self)
        if self.gamma <= 1:
            raise ParamsError(f"gamma must exceed 1 (cytosol/ER volume ratio), got {self.gamma}")


@dataclass(frozen=True)
class DimensionlessParams:
    """Parameters after referencing c to Q_c and t to T = 1/(gamma*k_IPR)."""

    k_beta: float
    K_c: float
    K_h: float
    K_p: float
    K_tau: float
    K_s: float
    k_IPR: float
    tau_max: float
    c_t: float
    p: float
    V_s: float
    K: float
    gamma: float
    Q_c: float
    T: float

    tier = "dimensionless"

    def __post_init__(self):
        _require_positive(self)
        if self.gamma <= 1:
            raise ParamsError(f"gamma must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class ScaledParams:
    """O(1) parameters of the scaled system plus the small parameter eps.

    eps equals K_tau**2 of the dimensionless tier; the hatted fields absorb
    tau_max, K_h, V_s and K at their natural orders in K_tau.
    """

    k_beta: float
    K_c: float
    K_s: float
    K_p: float
    k_IPR: float
    p: float
    c_t: float
    gamma: float
    hat_tau_max: float
    hat_K_h: float
    hat_V_s: float
    hat_K: float
    eps: float

    tier = "scaled"

    def __post_init__(self):
        _require_positive(self)
        if self.gamma <= 1:
            raise ParamsError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def delta(self) -> float:
        """sqrt(eps); the regime-two rescaling factor."""
        return math.sqrt(self.eps)

    def with_eps(self, eps: float) -> "ScaledParams":
        return replace(self, eps=eps)


@dataclass(frozen=True)
class DerivedConstants:
    """Lumped prefactors of the slow-regime (rescaled) dynamics.

    ``A_SERCA`` is the published value K*gamma^2*V_s/K_s^2.  Substituting the
    scaled SERCA terms into the rescaled calcium equation instead yields
    V_s/K_s^2 for the same structural slot, stored as ``A_SERCA_alt``; the
    two differ by the factor K*gamma^2 ~ 0.23 and the published slow-regime
    numbers mix them.  Callers choose via a convention flag ("printed" ->
    A_SERCA, "derived" -> A_SERCA_alt).
    """

    A_IPR: float
    A_SERCA: float
    A_SERCA_alt: float

    def pick(self, convention: str) -> float:
        if convention == "printed":
            return self.A_SERCA
        if convention == "derived":
            return self.A_SERCA_alt
        raise ParamsError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def derived_constants(sp: ScaledParams) -> DerivedConstants:
    A_ipr = sp.k_IPR * sp.p**2 / (sp.k_beta * sp.K_c**4 * sp.K_p**2)
    A_serca = sp.hat_K * sp.gamma**2 * sp.hat_V_s / sp.K_s**2
    A_alt = sp.hat_V_s / sp.K_s**2
    return DerivedConstants(A_IPR=A_ipr, A_SERCA=A_serca, A_SERCA_alt=A_alt)


def a_serca(sp: ScaledParams, convention: str) -> float:
    """The A_SERCA value under the requested convention."""
    return derived_constants(sp).pick(convention)


# ---------------------------------------------------------------------------
# tier conversions


def nondimensionalize(dp: DimensionalParams, Q_c: float | None = None,
                      T: float | None = None) -> DimensionlessParams:
    """Reference concentrations to Q_c (default c_t) and times to T (default
    1/(gamma*k_IPR), the IPR timescale)."""
    qc = dp.c_t if Q_c is None else Q_c
    t_ref = 1.0 / (dp.gamma * dp.k_IPR) if T is None else T
    return DimensionlessParams(
        k_beta=dp.k_beta,
        K_c=dp.K_c / qc,
        K_h=dp.K_h / qc,
        K_p=dp.K_p / qc,
        K_tau=dp.K_tau / qc,
        K_s=dp.K_s / qc,
        k_IPR=t_ref * dp.k_IPR,
        tau_max=dp.tau_max / t_ref,
        c_t=dp.c_t / qc,
        p=dp.p / qc,
        V_s=(t_ref / qc) * dp.V_s,
        K=dp.K,
        gamma=dp.gamma,
        Q_c=qc,
        T=t_ref,
    )


def redimensionalize(tp: DimensionlessParams) -> DimensionalParams:
    return DimensionalParams(
        k_beta=tp.k_beta,
        K_c=tp.K_c * tp.Q_c,
        K_h=tp.K_h * tp.Q_c,
        K_p=tp.K_p * tp.Q_c,
        K_tau=tp.K_tau * tp.Q_c,
        K_s=tp.K_s * tp.Q_c,
        k_IPR=tp.k_IPR / tp.T,
        tau_max=tp.tau_max * tp.T,
        c_t=tp.c_t * tp.Q_c,
        p=tp.p * tp.Q_c,
        V_s=tp.V_s * tp.Q_c / tp.T,
        K=tp.K,
        gamma=tp.gamma,
    )


def hat_scale(tp: DimensionlessParams) -> ScaledParams:
    """Absorb the small dimensionless parameters into O(1) hatted ones.

    Uses sqrt(eps) := K_tau, i.e. eps = K_tau**2.
    """
    ktau = tp.K_tau
    return ScaledParams(
        k_beta=tp.k_beta,
        K_c=tp.K_c,
        K_s=tp.K_s,
        K_p=tp.K_p,
        k_IPR=tp.k_IPR,
        p=tp.p,
        c_t=tp.c_t,
        gamma=tp.gamma,
        hat_tau_max=ktau**4 * tp.tau_max,
        hat_K_h=tp.K_h / ktau,
        hat_V_s=tp.V_s / ktau**2,
        hat_K=tp.K / ktau**2,
        eps=ktau**2,
    )


def unhat(sp: ScaledParams, Q_c: float = 2.0, T: float = 1.0 / 55.0) -> DimensionlessParams:
    """Inverse of :func:`hat_scale`.

    The reference scales are not stored in the scaled tier, so they must be
    supplied (defaults match the shipped dimensionless tier).
    """
    ktau = math.sqrt(sp.eps)
    return DimensionlessParams(
        k_beta=sp.k_beta,
        K_c=sp.K_c,
        K_h=sp.hat_K_h * ktau,
        K_p=sp.K_p,
        K_tau=ktau,
        K_s=sp.K_s,
        k_IPR=sp.k_IPR,
        tau_max=sp.hat_tau_max / ktau**4,
        c_t=sp.c_t,
        p=sp.p,
        V_s=sp.hat_V_s * ktau**2,
        K=sp.hat_K * ktau**2,
        gamma=sp.gamma,
        Q_c=Q_c,
        T=T,
    )


# ---------------------------------------------------------------------------
# file format: flat "key = value" lines, '#' comments, mandatory tier key

_TIER_TYPES = {
    "dimensional": DimensionalParams,
    "dimensionless": DimensionlessParams,
    "scaled": ScaledParams,
}


def load_params(path):
    """Parse a parameter file; returns the tier-appropriate dataclass.

    Unknown keys, missing keys, bad values and tier mismatches are all hard
    errors carrying the offending line number.
    """
    path = Path(path)
    if not path.exists():
        raise ParamsError(f"parameter file not found: {path}")
    return parse_params(path.read_text(encoding="utf-8"), source=str(path))


def parse_params(text: str, source: str = "<string>"):
    values: dict[str, float] = {}
    tier = None
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamsError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in values or (key == "tier" and tier is not None):
            raise ParamsError(f"{source}:{lineno}: duplicate key {key!r}")
        if key == "tier":
            if val not in _TIER_TYPES:
                raise ParamsError(
                    f"{source}:{lineno}: tier must be one of {sorted(_TIER_TYPES)}, got {val!r}")
            tier = val
            continue
        try:
            values[key] = float(val)
        except ValueError:
            raise ParamsError(f"{source}:{lineno}: invalid numeric value {val!r} for {key!r}") from None
        lines[key] = lineno
    if tier is None:
        raise ParamsError(f"{source}: missing mandatory 'tier = ...' key")
    cls = _TIER_TYPES[tier]
    known = {f.name for f in fields(cls)}
    for key in values:
        if key not in known:
            raise ParamsError(
                f"{source}:{lines[key]}: key {key!r} does not belong to tier {tier!r}")
    missing = sorted(known - values.keys())
    if missing:
        raise ParamsError(f"{source}: tier {tier!r} is missing keys {missing}")
    try:
        return cls(**values)
    except ParamsError as exc:
        raise ParamsError(f"{source}: {exc}") from None


def save_params(params, path) -> None:
    lines = [f"tier = {params.tier}"]
    for f in fields(params):
        lines.append(f"{f.name} = {getattr(params, f.name)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_default(name: str):
    text = resources.files("calcilab.data").joinpath(name).read_text(encoding="utf-8")
    return parse_params(text, source=f"calcilab/data/{name}")


def default_dimensional() -> DimensionalParams:
    return _load_default("params_dimensional.txt")


def default_dimensionless() -> DimensionlessParams:
    return _load_default("params_dimensionless.txt")


def default_scaled() -> ScaledParams:
    return _load_default("params_scaled.txt")


def fingerprint(params) -> str:
    """Stable short hash of the resolved tier values, for result traceability."""
    payload = params.tier + "".join(
        f"|{f.name}={getattr(params, f.name)!r}" for f in fields(params))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
