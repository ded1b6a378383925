"""Parameter bundles for the two environment families, with validation.

A bundle is accepted only if every defining inequality holds; ``validate_*``
returns a list of violations (empty means valid), each carrying both evaluated
sides so failures are self-explanatory.  All strict inequalities are enforced
with a small hybrid absolute/relative margin ``eps`` so that boundary cases
cannot slip through floating-point rounding.

Several tail conditions are "for all k ≥ k0"; they are checked at k0 together
with a growth certificate that makes them monotone in k (the certificate
itself is one of the validated inequalities), so the single evaluation at k0
covers the whole tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

__all__ = [
    "SimpleParams",
    "FullParams",
    "DerivedScales",
    "Violation",
    "validate_simple",
    "validate_full",
    "validate",
    "ensure_valid",
    "scales",
    "params_to_text",
    "params_from_text",
    "load_params",
    "save_params",
    "preset",
    "preset_names",
    "EPS_FEAS",
]

EPS_FEAS = 1e-9


@dataclass(frozen=True)
class SimpleParams:
    """Parameters of the simple (8-neighbor, diagonal-highway) model.

    theta: per-class anchor density base; class-k diagonal highway anchors
        appear independently at each site with probability (theta/2)**k.
    eta:   per-class speed profile; a diagonal bond of top class k costs
        sqrt(2)*(1 + eta**k), a highway-free diagonal costs 3, HV bonds cost 1.
    C:     scale constant entering the success-event thresholds C/r_k.
    k0:    base class from which the tail conditions are certified.
    class_cutoff: default largest sampled class (sampling truncation).
    """

    theta: float
    eta: float
    C: float
    k0: int
    class_cutoff: int = 40

    model = "simple"


@dataclass(frozen=True)
class FullParams:
    """Parameters of the full (4-neighbor, zigzag + HV highway) model.

    The primitive knobs are the exponents c_theta (theta = 2**-c_theta) and
    c_thetatilde (thetatilde = 2**-c_thetatilde), the slack delta, the speed
    profiles eta (zigzag) and etatilde (HV), the corridor scale mu, the
    threshold constants C > 2c > 0, the crossing-budget constant c1, and the
    certified base class k0.  Everything else (theta, thetatilde, zeta, b) is
    derived.
    """

    c_theta: float
    c_thetatilde: float
    delta: float
    eta: float
    etatilde: float
    mu: float
    C: float
    c: float
    k0: int
    c1: float = 1.0
    class_cutoff: int = 8

    model = "full"

    @property
    def theta(self) -> float:
        return 2.0 ** (-self.c_theta)

    @property
    def thetatilde(self) -> float:
        return 2.0 ** (-self.c_thetatilde)

    @property
    def zeta(self) -> float:
        return self.delta / (self.c_thetatilde - self.delta)

    @property
    def eta_exponent(self) -> float:
        """Lower-bound exponent for eta: eta > theta**eta_exponent."""
        den = 1.0 - self.c_theta * (self.c_thetatilde - 4.0 * self.delta)
        return self.c_theta * self.c_thetatilde / den

    @property
    def b(self) -> float:
        """Offset in q_k = c_theta*k + b = log2(2C/r_k)."""
        return math.log2(2.0 * self.C * (1.0 - self.theta))


@dataclass(frozen=True)
class DerivedScales:
    """Closed-form tail-density scales of a validated bundle."""

    theta: float
    thetatilde: float | None
    c_theta: float | None
    b: float | None

    def r(self, k: int) -> float:
        """Tail density r_k = theta**k / (1 - theta)."""
        return self.theta**k / (1.0 - self.theta)

    def rtilde(self, k: int) -> float:
        """HV tail density rtilde_k = thetatilde**k / (1 - thetatilde)."""
        if self.thetatilde is None:
            raise ValueError("rtilde is defined only for the full model")
        return self.thetatilde**k / (1.0 - self.thetatilde)

    def q(self, k: int) -> float:
        """Class threshold q_k = c_theta*k + b for spanning HV highways."""
        if self.c_theta is None or self.b is None:
            raise ValueError("q is defined only for the full model")
        return self.c_theta * k + self.b


@dataclass(frozen=True)
class Violation:
    """One failed constraint with both sides evaluated."""

    name: str
    lhs: float
    op: str
    rhs: float

    def __str__(self) -> str:
        return f"{self.name}: {self.lhs!r} {self.op} {self.rhs!r} is FALSE"


def _ev(thunk) -> float:
    """Evaluate a numeric thunk; malformed results collapse to nan.

    Pathological inputs can make intermediate expressions overflow, divide by
    zero, or go complex (negative base to a fractional power); validation must
    stay total and report such terms as violations rather than raise.
    """
    try:
        value = thunk()
    except (OverflowError, ZeroDivisionError, ValueError):
        return math.nan
    if isinstance(value, complex):
        return math.nan
    return float(value)


class _Checker:
    def __init__(self, eps: float):
        self.eps = eps
        self.violations: list[Violation] = []

    def _margin(self, a: float, b: float) -> float:
        # Relative margin: comparisons must hold with slack proportional to
        # the operand scale (tail quantities legitimately reach 1e-20).
        return self.eps * max(abs(a), abs(b))

    def lt(self, name: str, a, b) -> bool:
        """Strict a < b with margin; callables are evaluated guardedly."""
        a = _ev(a) if callable(a) else a
        b = _ev(b) if callable(b) else b
        ok = math.isfinite(a) and math.isfinite(b) and a < b - self._margin(a, b)
        if not ok:
            self.violations.append(Violation(name, a, "<", b))
        return ok

    def le(self, name: str, a, b) -> bool:
        a = _ev(a) if callable(a) else a
        b = _ev(b) if callable(b) else b
        ok = math.isfinite(a) and math.isfinite(b) and a <= b
        if not ok:
            self.violations.append(Violation(name, a, "<=", b))
        return ok


def validate_simple(p: SimpleParams, eps: float = EPS_FEAS) -> list[Violation]:
    """All defining inequalities of the simple model; empty list = valid."""
    ck = _Checker(eps)
    ck.lt("theta > 1/2", 0.5, p.theta)
    ck.lt("theta < 1", p.theta, 1.0)
    ck.lt("C > 0", 0.0, p.C)
    ck.le("k0 >= 1", 1.0, float(p.k0))
    ck.le("class_cutoff >= k0 is not required; cutoff >= 1", 1.0, float(p.class_cutoff))
    if not (0.0 < p.theta < 1.0):
        return ck.violations
    ck.lt("eta > 1/(2 theta)", lambda: 1.0 / (2.0 * p.theta), p.eta)
    ck.lt("eta < 1", p.eta, 1.0)
    k0 = p.k0
    ck.lt("eta**k0 < 1/32", lambda: p.eta**k0, 1.0 / 32.0)
    r_k0 = _ev(lambda: p.theta**k0 / (1.0 - p.theta))
    ck.le("r_k0 <= 1/2", r_k0, 0.5)
    ck.lt(
        "speed-gap tail condition at k0",
        lambda: 4.0 * p.C / r_k0,
        lambda: 0.1 * (2.0**k0) * (p.eta ** (k0 - 1) - p.eta**k0),
    )
    # Growth certificate making the tail condition monotone in k >= k0.
    ck.lt("growth certificate 2*eta*theta > 1", 1.0, 2.0 * p.eta * p.theta)
    return ck.violations


def validate_full(p: FullParams, eps: float = EPS_FEAS) -> list[Violation]:
    """All defining inequalities of the full model; empty list = valid."""
    ck = _Checker(eps)
    ck.lt("c_theta > 0.4", 0.4, p.c_theta)
    ck.lt("c_theta < 0.5", p.c_theta, 0.5)
    ck.lt("c_thetatilde > 0", 0.0, p.c_thetatilde)
    ck.lt("c_thetatilde < 1", p.c_thetatilde, 1.0)
    ck.lt("delta > 0", 0.0, p.delta)
    if not ck.lt("delta < c_thetatilde (zeta defined)", p.delta, p.c_thetatilde):
        return ck.violations
    theta = _ev(lambda: p.theta)
    thetatilde = _ev(lambda: p.thetatilde)
    ck.lt("eta > theta**E", lambda: theta**p.eta_exponent, p.eta)
    ck.lt("eta < 7/8", p.eta, 7.0 / 8.0)
    ck.lt("eta < theta**(2/3)", p.eta, lambda: theta ** (2.0 / 3.0))
    ck.lt("etatilde > 0", 0.0, p.etatilde)
    ck.lt("etatilde < 1/(2 theta)", p.etatilde, lambda: 1.0 / (2.0 * theta))
    ck.lt("etatilde < eta/2", p.etatilde, p.eta / 2.0)
    expo = 1.0 - p.c_theta * (p.c_thetatilde - 4.0 * p.delta)
    ck.lt("mu > theta", theta, p.mu)
    ck.lt("mu < thetatilde**c_theta", p.mu, lambda: thetatilde**p.c_theta)
    ck.lt("mu < eta", p.mu, p.eta)
    ck.lt(
        "mu < (theta*eta)**(1-c_theta*(c_thetatilde-4*delta)) * theta**(-4*c_theta*delta)",
        p.mu,
        lambda: (theta * p.eta) ** expo * theta ** (-4.0 * p.c_theta * p.delta),
    )
    ck.lt("2*eta*theta > 2*theta**2", lambda: 2.0 * theta**2, lambda: 2.0 * p.eta * theta)
    ck.lt("2*theta**2 > 1", 1.0, lambda: 2.0 * theta**2)
    ck.lt("C > 0", 0.0, p.C)
    ck.lt("c > 0", 0.0, p.c)
    ck.lt("c < C/2", p.c, p.C / 2.0)
    ck.lt("c1 > 0", 0.0, p.c1)
    ck.le("k0 >= 1", 1.0, float(p.k0))
    k0 = p.k0
    r_k0 = _ev(lambda: theta**k0 / (1.0 - theta))
    ck.lt(
        "speed-gap tail condition at k0 (with +0.2)",
        lambda: 4.0 * p.C / r_k0 + 0.2,
        lambda: 0.1 * (2.0**k0) * (p.eta ** (k0 - 1) - p.eta**k0),
    )
    ck.lt("(2*etatilde)**k0 < eta**k0", lambda: (2.0 * p.etatilde) ** k0, lambda: p.eta**k0)
    ck.lt("eta**k0 < 1/16", lambda: p.eta**k0, 1.0 / 16.0)
    # Direct assertions used downstream by the path-counting analysis.
    ck.lt("eta/mu > 1", 1.0, lambda: p.eta / p.mu)
    ck.lt("eta**3/theta**2 < 1", lambda: p.eta**3 / theta**2, 1.0)
    return ck.violations


def validate(p: SimpleParams | FullParams, eps: float = EPS_FEAS) -> list[Violation]:
    if isinstance(p, SimpleParams):
        return validate_simple(p, eps)
    if isinstance(p, FullParams):
        return validate_full(p, eps)
    raise TypeError(f"not a parameter bundle: {type(p)!r}")


def ensure_valid(p: SimpleParams | FullParams, eps: float = EPS_FEAS):
    """Return ``p`` unchanged, or raise ValueError listing every violation."""
    violations = validate(p, eps)
    if violations:
        raise ValueError("invalid parameters:\n" + "\n".join(str(v) for v in violations))
    return p


def scales(p: SimpleParams | FullParams) -> DerivedScales:
    """Closed-form r_k / rtilde_k / q_k evaluators for a bundle."""
    if isinstance(p, SimpleParams):
        return DerivedScales(theta=p.theta, thetatilde=None, c_theta=None, b=None)
    return DerivedScales(theta=p.theta, thetatilde=p.thetatilde, c_theta=p.c_theta, b=p.b)


# ---------------------------------------------------------------------------
# Plain-text serialization: "key = value" lines, '#' comments, full precision.
# ---------------------------------------------------------------------------

_INT_FIELDS = {"k0", "class_cutoff"}


def params_to_text(p: SimpleParams | FullParams) -> str:
    lines = [f"model = {p.model}"]
    for f in fields(p):
        value = getattr(p, f.name)
        text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def params_from_text(text: str) -> SimpleParams | FullParams:
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (want 'key = value'): {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    model = entries.pop("model", None)
    if model == "simple":
        cls = SimpleParams
    elif model == "full":
        cls = FullParams
    else:
        raise ValueError(f"config must set model = simple|full, got {model!r}")
    known = {f.name for f in fields(cls)}
    unknown = set(entries) - known
    if unknown:
        raise ValueError(f"unknown config keys for {model} model: {sorted(unknown)}")
    kwargs = {}
    for key, value in entries.items():
        kwargs[key] = int(value) if key in _INT_FIELDS else float(value)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValueError(f"incomplete config: {exc}") from exc


def save_params(p: SimpleParams | FullParams, path: str | Path) -> None:
    Path(path).write_text(params_to_text(p), encoding="utf-8")


def load_params(path: str | Path) -> SimpleParams | FullParams:
    return params_from_text(Path(path).read_text(encoding="utf-8"))


def preset_names() -> list[str]:
    files = resources.files("fastlanes").joinpath("presets")
    return sorted(f.name[: -len(".cfg")] for f in files.iterdir() if f.name.endswith(".cfg"))


def preset(name: str) -> SimpleParams | FullParams:
    """Load a bundled named preset (see ``preset_names``)."""
    ref = resources.files("fastlanes").joinpath("presets").joinpath(f"{name}.cfg")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no preset named {name!r}; available: {preset_names()}") from None
    return ensure_valid(params_from_text(text))


def with_overrides(p: SimpleParams | FullParams, **overrides):
    """Return a copy of ``p`` with the given fields replaced."""
    return replace(p, **overrides)
