"""Integer bookkeeping for closed oriented 4-manifolds and the obstruction rules
that constrain which of them can carry Einstein metrics or compact shrinking
solitons.

``tau`` always means the signature b+ - b-.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import reduce

from .errors import InconsistencyError, UnknownNameError, UnsupportedError


@dataclass(frozen=True)
class FourManifoldClass:
    chi: int
    tau: int
    b1: int = 0
    spin: bool = False
    simply_connected: bool = True
    label: str = ""

    def __post_init__(self):
        if self.b1 < 0:
            raise InconsistencyError("b1 must be nonnegative")
        if self.simply_connected:
            b2 = self.chi - 2
            if self.b1 != 0 or b2 < 0 or (b2 + self.tau) % 2:
                raise InconsistencyError(
                    f"{self.label or 'class'}: simply connected needs b1 = 0, b2 = chi - 2 >= 0 and b2 + tau even"
                )

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "chi": self.chi,
            "tau": self.tau,
            "b1": self.b1,
            "spin": self.spin,
            "simply_connected": self.simply_connected,
        }


CATALOG = {
    "S4": FourManifoldClass(2, 0, 0, True, True, "S4"),
    "CP2": FourManifoldClass(3, 1, 0, False, True, "CP2"),
    "CP2bar": FourManifoldClass(3, -1, 0, False, True, "CP2bar"),
    "S2xS2": FourManifoldClass(4, 0, 0, True, True, "S2xS2"),
    "K3": FourManifoldClass(24, -16, 0, True, True, "K3"),
    "T4": FourManifoldClass(0, 0, 4, True, False, "T4"),
}

STRUCTURES = (
    "einstein",
    "shrinking_soliton",
    "kahler_shrinking_soliton",
    "symplectic_shrinking_soliton",
)


def block(name: str) -> FourManifoldClass:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownNameError(f"unknown block {name!r}; known: {', '.join(CATALOG)}") from None


def connected_sum(a: FourManifoldClass, b: FourManifoldClass) -> FourManifoldClass:
    label = f"{a.label} # {b.label}" if a.label and b.label else (a.label or b.label)
    return FourManifoldClass(
        chi=a.chi + b.chi - 2,
        tau=a.tau + b.tau,
        b1=a.b1 + b.b1,
        spin=a.spin and b.spin,
        simply_connected=a.simply_connected and b.simply_connected,
        label=label,
    )


def multiple(c: FourManifoldClass, k: int) -> FourManifoldClass:
    """Connected sum of k copies (k = 0 gives S4)."""
    if k < 0:
        raise ValueError("multiplier must be nonnegative")
    if k == 0:
        return CATALOG["S4"]
    out = reduce(connected_sum, [c] * k)
    return replace(out, label=c.label if k == 1 else f"{k}*{c.label}")


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?([A-Za-z0-9]+)\s*$")


def parse_sum(expr: str) -> FourManifoldClass:
    """Parse ``"CP2 + 3*CP2bar"`` into a class."""
    terms = expr.split("+")
    parts = []
    for term in terms:
        m = _TERM.match(term)
        if not m:
            raise UnknownNameError(f"cannot parse connected-sum term {term!r}")
        k = int(m.group(1)) if m.group(1) else 1
        parts.append(multiple(block(m.group(2)), k))
    out = reduce(connected_sum, parts)
    return replace(out, label=" + ".join(t.strip() for t in terms))


def cp2_blowup(k: int) -> FourManifoldClass:
    """CP2 # k*CP2bar."""
    c = connected_sum(CATALOG["CP2"], multiple(CATALOG["CP2bar"], k)) if k else CATALOG["CP2"]
    return replace(c, label=f"CP2 + {k}*CP2bar" if k else "CP2")


def betti_split(c: FourManifoldClass) -> tuple[int, int, int]:
    """``(b2, b+, b-)`` with b2 = chi - 2 + 2 b1 (Poincare duality, connected)."""
    b2 = c.chi - 2 + 2 * c.b1
    if b2 < 0 or (b2 + c.tau) % 2 or abs(c.tau) > b2:
        raise InconsistencyError(f"{c.label or c}: b2 = {b2}, tau = {c.tau} give no valid (b+, b-)")
    return b2, (b2 + c.tau) // 2, (b2 - c.tau) // 2


def _sign_verdict(v: int, strict: bool = False) -> str:
    if v > 0:
        return "pass"
    if v == 0:
        return "fail" if strict else "boundary"
    return "fail"


def ht_predicate(c: FourManifoldClass) -> dict:
    plus = 2 * c.chi + 3 * abs(c.tau)
    minus = 2 * c.chi - 3 * abs(c.tau)
    return {
        "2chi+3|tau|": {"value": plus, "verdict": _sign_verdict(plus)},
        "2chi-3|tau|": {"value": minus, "verdict": _sign_verdict(minus)},
    }


def _same_invariants(a: FourManifoldClass, b: FourManifoldClass) -> bool:
    return (a.chi, a.tau, a.spin, a.simply_connected, a.b1) == (b.chi, b.tau, b.spin, b.simply_connected, b.b1)


# Del Pezzo surfaces, with the compact Kahler shrinker each one carries.
def _del_pezzo_catalog():
    out = []
    for k in range(9):
        if k == 1:
            kind = "Koiso-Cao soliton (non-Einstein)"
        elif k == 2:
            kind = "Wang-Zhu soliton (non-Einstein)"
        else:
            kind = "Kahler-Einstein (Tian)"
        out.append((cp2_blowup(k), kind))
    out.append((CATALOG["S2xS2"], "Kahler-Einstein (Tian)"))
    return out


DEL_PEZZO = _del_pezzo_catalog()


def kahler_classification(c: FourManifoldClass) -> tuple[str, str] | None:
    """``(del Pezzo label, shrinker kind)`` if ``c`` matches a del Pezzo surface."""
    for surface, kind in DEL_PEZZO:
        if _same_invariants(c, surface):
            return surface.label, kind
    return None


@dataclass(frozen=True)
class Rule:
    rule: str
    verdict: str  # pass / fail / open
    citation: str
    detail: str = ""

    def as_dict(self) -> dict:
        return {"rule": self.rule, "verdict": self.verdict, "citation": self.citation, "detail": self.detail}


@dataclass(frozen=True)
class ObstructionReport:
    manifold: FourManifoldClass
    structure: str
    rules: tuple[Rule, ...]
    classification: str | None

    @property
    def obstructed(self) -> bool:
        return any(r.verdict == "fail" for r in self.rules)

    def as_dict(self) -> dict:
        return {
            "manifold": self.manifold.as_dict(),
            "structure": self.structure,
            "verdict": "obstructed" if self.obstructed else "allowed",
            "rules": [r.as_dict() for r in self.rules],
            "classification": self.classification,
        }


def _pf(ok: bool) -> str:
    return "pass" if ok else "fail"


def obstruction_report(c: FourManifoldClass, structure: str) -> ObstructionReport:
    """Evaluate every rule that applies to ``structure`` on ``c``."""
    if structure not in STRUCTURES:
        raise UnknownNameError(f"unknown structure {structure!r}; known: {', '.join(STRUCTURES)}")
    rules: list[Rule] = []
    ht = ht_predicate(c)
    ht_ok = ht["2chi-3|tau|"]["value"] >= 0
    ht_detail = f"2chi-3|tau| = {ht['2chi-3|tau|']['value']}"
    classification = None

    if structure == "einstein":
        rules.append(Rule("hitchin_thorpe", _pf(ht_ok), "Hitchin-Thorpe: compact Einstein 4-manifolds", ht_detail))
    else:
        rules.append(
            Rule(
                "b1_vanishes",
                _pf(c.b1 == 0),
                "Lott / Wylie: compact shrinkers have finite fundamental group",
                f"b1 = {c.b1}",
            )
        )
        if c.spin:
            rules.append(
                Rule(
                    "spin_signature_zero",
                    _pf(c.tau == 0),
                    "Lichnerowicz with Chen's R > 0: spin shrinkers have tau = 0",
                    f"spin, tau = {c.tau}",
                )
            )
        if structure == "shrinking_soliton":
            rules.append(
                Rule(
                    "hitchin_thorpe",
                    "pass" if ht_ok else "open",
                    "Hitchin-Thorpe for compact shrinkers is an open question (Cao)",
                    ht_detail,
                )
            )

    if structure == "kahler_shrinking_soliton":
        value = 2 * c.chi + 3 * c.tau
        rules.append(
            Rule(
                "strict_2chi_plus_3tau",
                _pf(value > 0),
                "Derdzinski 24|W+|^2 = R^2 on Kahler surfaces",
                f"2chi+3tau = {value}",
            )
        )
        match = kahler_classification(c)
        rules.append(
            Rule(
                "del_pezzo",
                _pf(match is not None),
                "del Pezzo classification: CP2 # k*CP2bar (0 <= k <= 8) or S2xS2",
                match[0] if match else "no matching del Pezzo surface",
            )
        )
        if match:
            classification = match[1]

    if structure in ("kahler_shrinking_soliton", "symplectic_shrinking_soliton"):
        try:
            _, bplus, _ = betti_split(c)
            rules.append(
                Rule(
                    "b_plus_at_most_one",
                    _pf(bplus <= 1),
                    "Taubes: symplectic with b+ > 1 admits no positive scalar curvature",
                    f"b+ = {bplus}",
                )
            )
        except InconsistencyError as exc:
            rules.append(Rule("b_plus_at_most_one", "fail", "invariants inconsistent", str(exc)))

    return ObstructionReport(c, structure, tuple(rules), classification)


def freedman_equivalent(a: FourManifoldClass, b: FourManifoldClass) -> bool:
    """Oriented homeomorphism test for simply connected classes: equal (chi, tau) plus matching spin type."""
    if not (a.simply_connected and b.simply_connected):
        raise UnsupportedError("Freedman's criterion applies only to simply connected manifolds")
    return a.chi == b.chi and a.tau == b.tau and a.spin == b.spin


def _check_catalog():
    # Rokhlin: closed smooth spin 4-manifolds have tau divisible by 16.
    for name, c in CATALOG.items():
        if c.spin and c.tau % 16:
            raise InconsistencyError(f"catalog block {name} is spin with tau = {c.tau}")


_check_catalog()
