"""Triangular branch systems for the catalogued three-state models.

Inverting the survival-parameter map for a catalogued model amounts to
solving a polynomial system in the rates k1..k5 and the symmetric inputs
L1..L3, S1..S2.  For each model that system has been decomposed into a
disjoint list of simple triangular systems: every input vector satisfies
the equations and inequations of exactly one of them, and within that
system the rate equations can be solved one leader at a time (each is
linear or quadratic in its leader).

The systems ship as plain-text data files with pinned checksums.  This
module loads them, decides which system an input lies on, and enumerates
the numeric solutions of the matched system.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import NoBranchMatches, ZeroPivot

VAR_NAMES = ("k1", "k2", "k3", "k4", "k5", "L1", "L2", "L3", "S1", "S2")
RATE_VARS = VAR_NAMES[:5]
MOMENT_VARS = VAR_NAMES[5:]

DEFAULT_TOL = 1e-9
DEFAULT_FREE_GRID = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class Relation:
    """One polynomial relation, either expr = 0 ('EQ') or expr != 0 ('NEQ').

    Terms are stored as integer coefficient and exponent rows over the
    fixed variable order k1..k5, L1..L3, S1..S2.
    """

    kind: str
    leader: str
    coeffs: np.ndarray
    expons: np.ndarray

    @property
    def moment_only(self) -> bool:
        return not self.expons[:, :5].any()

    def evaluate(self, values: np.ndarray) -> tuple[float, float]:
        """Return (value, scale) at a full assignment of the 10 variables.

        The scale is the sum of absolute term magnitudes, used to make
        the zero test relative.
        """
        base = np.where(self.expons > 0, values[None, :], 1.0)
        terms = self.coeffs * np.prod(base ** self.expons, axis=1)
        return float(terms.sum()), float(np.abs(terms).sum())

    def leader_poly(self, values: np.ndarray) -> np.ndarray:
        """Coefficients [c0, c1, c2] of the relation as a polynomial in
        its leader, with all other variables bound to ``values``."""
        idx = VAR_NAMES.index(self.leader)
        degs = self.expons[:, idx]
        coeffs = np.zeros(int(degs.max()) + 1)
        masked = self.expons.copy()
        masked[:, idx] = 0
        base = np.where(masked > 0, values[None, :], 1.0)
        terms = self.coeffs * np.prod(base ** masked, axis=1)
        for d in range(coeffs.size):
            coeffs[d] = terms[degs == d].sum()
        return coeffs


@dataclass(frozen=True)
class SimpleSystem:
    model: str
    index: int
    relations: tuple[Relation, ...]

    def moment_relations(self) -> list[Relation]:
        return [r for r in self.relations if r.moment_only]

    def rate_equations(self, ranking: tuple[str, ...]) -> list[Relation]:
        """Equations with a rate leader, lowest-ranked leader first."""
        eqs = [r for r in self.relations
               if r.kind == "EQ" and r.leader in RATE_VARS]
        return sorted(eqs, key=lambda r: -ranking.index(r.leader))

    def free_rates(self) -> list[str]:
        led = {r.leader for r in self.relations if r.kind == "EQ"}
        return [v for v in RATE_VARS if v not in led]


@dataclass(frozen=True)
class ModelSystems:
    model: str
    ranking: tuple[str, ...]
    systems: tuple[SimpleSystem, ...]


def _parse_relation(line: str) -> Relation:
    kind, leader, terms = line.split(";")
    rows = [[int(x) for x in t.split()] for t in terms.split("|")]
    arr = np.array(rows, dtype=np.int64)
    return Relation(kind=kind, leader=leader,
                    coeffs=arr[:, 0].astype(float), expons=arr[:, 1:])


def load_systems(model_tag: str) -> ModelSystems:
    """Load and checksum-verify the triangular systems for one model."""
    pkg = resources.files("phasekit") / "data"
    fname = f"{model_tag}.systems"
    payload = (pkg / fname).read_text()
    expected = json.loads((pkg / "checksums.json").read_text())[fname]
    actual = hashlib.sha256(payload.encode()).hexdigest()
    if actual != expected:
        raise RuntimeError(f"checksum mismatch for {fname}")

    lines = payload.strip().splitlines()
    assert lines[0] == f"MODEL {model_tag}"
    ranking = tuple(lines[1].split()[1:])
    assert tuple(lines[2].split()[1:]) == VAR_NAMES

    systems = []
    current: list[Relation] = []
    index = 0
    for line in lines[3:]:
        if line.startswith("SYSTEM"):
            if current:
                systems.append(SimpleSystem(model_tag, index, tuple(current)))
            index = int(line.split()[1])
            current = []
        else:
            current.append(_parse_relation(line))
    systems.append(SimpleSystem(model_tag, index, tuple(current)))
    return ModelSystems(model_tag, ranking, tuple(systems))


def _relation_holds(rel: Relation, values: np.ndarray, tol: float) -> bool:
    val, scale = rel.evaluate(values)
    band = tol * (1.0 + scale)
    if rel.kind == "EQ":
        return abs(val) <= band
    return abs(val) > band


def match_systems(model_systems: ModelSystems, moments,
                  tol: float = DEFAULT_TOL) -> list[SimpleSystem]:
    """Return the systems whose moment-only relations accept the input.

    ``moments`` is the vector (L1, L2, L3, S1, S2).  By construction of
    the decomposition exactly one system should match.
    """
    values = np.zeros(10)
    values[5:] = np.asarray(moments, dtype=float)
    matched = []
    for sys_ in model_systems.systems:
        if all(_relation_holds(r, values, tol)
               for r in sys_.moment_relations()):
            matched.append(sys_)
    return matched


def match_diagnostics(model_systems: ModelSystems, moments,
                      tol: float = DEFAULT_TOL) -> dict:
    """Worst relation violation per system, for no-match error reports."""
    values = np.zeros(10)
    values[5:] = np.asarray(moments, dtype=float)
    out = {}
    for sys_ in model_systems.systems:
        worst = 0.0
        for rel in sys_.moment_relations():
            val, scale = rel.evaluate(values)
            band = tol * (1.0 + scale)
            miss = abs(val) - band if rel.kind == "EQ" else band - abs(val)
            worst = max(worst, miss)
        out[sys_.index] = worst
    return out


@dataclass(frozen=True)
class BranchSolution:
    """One numeric rate assignment from a simple system."""

    system_index: int
    rates: dict[str, float]
    free_values: dict[str, float]
    branch: tuple[int, ...]

    def rate_vector(self) -> np.ndarray:
        return np.array([self.rates[v] for v in RATE_VARS])


def _solve_leader(rel: Relation, values: np.ndarray,
                  tol: float) -> list[float]:
    poly = rel.leader_poly(values)
    scale = max(1.0, float(np.abs(poly).sum()))
    if poly.size == 3 and abs(poly[2]) > tol * scale:
        disc = poly[1] ** 2 - 4.0 * poly[2] * poly[0]
        if disc < 0.0:
            if disc > -tol * scale ** 2:
                disc = 0.0
            else:
                return []
        root = np.sqrt(disc)
        return [(-poly[1] + root) / (2.0 * poly[2]),
                (-poly[1] - root) / (2.0 * poly[2])]
    if abs(poly[1]) <= tol * scale:
        if abs(poly[0]) <= tol * scale:
            # relation degenerates to 0 = 0; leader is unconstrained here
            return [np.nan]
        raise ZeroPivot(f"vanishing pivot for {rel.leader}")
    return [-poly[0] / poly[1]]


def solve_system(model_systems: ModelSystems, system: SimpleSystem, moments,
                 tol: float = DEFAULT_TOL,
                 free_grid=DEFAULT_FREE_GRID) -> list[BranchSolution]:
    """Enumerate the numeric rate solutions of one simple system.

    Rate equations are solved in ascending leader rank, branching at
    quadratic leaders.  Rates without an equation are free; each value
    in ``free_grid`` is tried for them and solutions violating any
    inequation are discarded.  Equations whose pivot vanishes leave
    their leader free as well (it is then filled from the grid).
    """
    moments = np.asarray(moments, dtype=float)
    free = system.free_rates()
    eqs = system.rate_equations(model_systems.ranking)
    solutions = []

    for free_vals in itertools.product(free_grid, repeat=len(free)):
        base = np.zeros(10)
        base[5:] = moments
        for name, val in zip(free, free_vals):
            base[VAR_NAMES.index(name)] = val

        partials: list[tuple[np.ndarray, tuple[int, ...]]] = [(base, ())]
        for rel in eqs:
            nxt = []
            for values, branch in partials:
                roots = _solve_leader(rel, values, tol)
                for j, root in enumerate(roots):
                    values2 = values.copy()
                    if np.isnan(root):
                        # unconstrained leader, sample it like a free rate
                        for g in free_grid:
                            v3 = values.copy()
                            v3[VAR_NAMES.index(rel.leader)] = g
                            nxt.append((v3, branch + (j,)))
                        continue
                    values2[VAR_NAMES.index(rel.leader)] = root
                    nxt.append((values2, branch + (j,)))
            partials = nxt

        for values, branch in partials:
            if all(_relation_holds(r, values, tol) for r in system.relations):
                rates = {v: float(values[VAR_NAMES.index(v)])
                         for v in RATE_VARS}
                fv = dict(zip(free, (float(x) for x in free_vals)))
                solutions.append(BranchSolution(system.index, rates, fv,
                                                branch))

    # deduplicate assignments reached through several grid choices
    unique: list[BranchSolution] = []
    for sol in solutions:
        vec = sol.rate_vector()
        if not any(np.allclose(vec, u.rate_vector(), rtol=1e-12, atol=1e-12)
                   for u in unique):
            unique.append(sol)
    return unique


def solve_for_moments(model_systems: ModelSystems, moments,
                      tol: float = DEFAULT_TOL,
                      free_grid=DEFAULT_FREE_GRID) -> list[BranchSolution]:
    """Match the input to its simple system and solve it.

    Raises NoBranchMatches if no system accepts the input, which for a
    consistent decomposition only happens for inputs outside the image
    of the forward map or for tolerance failures.
    """
    matched = match_systems(model_systems, moments, tol)
    if not matched:
        raise NoBranchMatches(
            f"no simple system of {model_systems.model} accepts the input",
            diagnostics={
                "model": model_systems.model,
                "moments": list(map(float, moments)),
                "worst_violation_per_system":
                    match_diagnostics(model_systems, moments, tol),
            })
    out = []
    for sys_ in matched:
        out.extend(solve_system(model_systems, sys_, moments, tol, free_grid))
    return out
