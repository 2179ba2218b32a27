"""Variant-model analysis: state markers, model mappings, discrimination.

Different catalogued models can generate identical phase-type survival
curves.  This module computes per-state markers (lifetimes T_i and
steady-state occupancies p_i) that can, or provably cannot, tell such
variants apart, the explicit bijections between the M9, M8 and M4
parameterizations, and a Monte Carlo experiment measuring how often the
markers discriminate between variants fitted to random survival data.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import direct, inverse, models
from .direct import PhaseTypeParams, SymmetricMoments
from .errors import (DomainViolation, GenericBranchMiss, M3HypersurfaceMiss,
                     NegativeDiscriminant, NoBranchMatches,
                     SingularSteadyState, ZeroPivot)


@dataclass(frozen=True)
class Markers:
    """Per-state lifetimes and steady-state occupancies."""

    T: tuple[float, ...]
    p: tuple[float, ...]


def markers(model: models.ModelId, rates) -> Markers:
    """Lifetimes from the no-exit generator diagonal and occupancies
    from its one-dimensional null space (normalized to sum 1)."""
    gen = models.build_generator(model, np.asarray(rates, dtype=float))
    q_red = models.reduced_no_exit(gen)
    diag = np.diag(q_red)
    if np.any(diag >= 0.0):
        raise SingularSteadyState("a state has no outgoing rate")
    T = tuple(float(-1.0 / d) for d in diag)

    u, s, vt = np.linalg.svd(q_red)
    tol = max(q_red.shape) * np.abs(s[0]) * np.finfo(float).eps
    null_dim = int(np.sum(s <= tol * 1e3 + 1e-300))
    if null_dim != 1:
        raise SingularSteadyState(
            f"steady-state null space has dimension {null_dim}")
    p = vt[-1]
    p = p / p.sum()
    if np.any(p <= 0.0):
        raise SingularSteadyState("steady state has nonpositive components")
    return Markers(T=T, p=tuple(float(x) for x in p))


def _exact_markers(tag: str, k):
    """Closed-form markers for the three-state catalog models.

    Returns (T1, T2, T3, p1, p2, p3); used as an oracle against the
    null-space solver and as the fast path in the experiment loop.
    """
    k1, k2, k3, k4, k5 = k
    if tag in ("M2", "M4"):
        T = (1.0 / (k1 + k2), 1.0 / k3, 1.0 / k4)
        if tag == "M2":
            tot = k3 * k4 + k1 * k4 + k2 * k3
            p = (k3 * k4 / tot, k1 * k4 / tot, k2 * k3 / tot)
        else:
            tot = k1 * k3 + k2 * k3 + k1 * k4 + k3 * k4
            p = (k3 * k4 / tot, k1 * k4 / tot, (k1 + k2) * k3 / tot)
    elif tag == "M8":
        T = (1.0 / k1, 1.0 / k2, 1.0 / (k3 + k4))
        tot = k1 * k2 + k2 * k3 + k1 * k3 + k1 * k4
        p = (k2 * k3 / tot, k1 * (k3 + k4) / tot, k1 * k2 / tot)
    elif tag == "M9":
        T = (1.0 / k1, 1.0 / k2, 1.0 / (k3 + k4))
        tot = k1 * k2 + k2 * k3 + k1 * k4
        p = (k2 * k3 / tot, k1 * k4 / tot, k1 * k2 / tot)
    else:
        raise ValueError(f"no closed-form markers for {tag}")
    return T + p


def sigma_m9(rates) -> np.ndarray:
    """Relabeling of the two non-observed M9 states: swaps k1<->k2 and
    k3<->k4.  An involution that leaves the survival function unchanged."""
    k1, k2, k3, k4, k5 = np.asarray(rates, dtype=float)
    return np.array([k2, k1, k4, k3, k5])


def map_m9_to_m8(rates) -> np.ndarray:
    """Bijection from M9 rates (with k2 > k1 > 0) to M8 rates producing
    the identical phase-type distribution."""
    k1, k2, k3, k4, k5 = np.asarray(rates, dtype=float)
    if not (k2 > k1 > 0.0):
        raise DomainViolation(f"map to M8 requires k2 > k1 > 0, "
                              f"got k1={k1}, k2={k2}")
    return np.array([k1, k2, k3 * (k2 - k1) / k2,
                     (k1 * k3 + k2 * k4) / k2, k5])


def map_m8_to_m9(rates) -> np.ndarray:
    """Inverse of map_m9_to_m8."""
    k1, k2, k3, k4, k5 = np.asarray(rates, dtype=float)
    if not (k2 > k1 > 0.0):
        raise DomainViolation(f"inverse map requires k2 > k1 > 0, "
                              f"got k1={k1}, k2={k2}")
    k3_src = k3 * k2 / (k2 - k1)
    k4_src = (k4 * k2 - k1 * k3_src) / k2
    return np.array([k1, k2, k3_src, k4_src, k5])


def map_m9_to_m4(rates) -> np.ndarray:
    """Bijection from M9 rates (with k1 > k2 > 0) to M4 rates producing
    the identical phase-type distribution."""
    k1, k2, k3, k4, k5 = np.asarray(rates, dtype=float)
    if not (k1 > k2 > 0.0):
        raise DomainViolation(f"map to M4 requires k1 > k2 > 0, "
                              f"got k1={k1}, k2={k2}")
    tot = k3 + k4
    return np.array([(k1 - k2) * k4 / tot, (k1 * k3 + k2 * k4) / tot,
                     k2, tot, k5])


def map_m4_to_m9(rates) -> np.ndarray:
    """Inverse of map_m9_to_m4."""
    k1, k2, k3, k4, k5 = np.asarray(rates, dtype=float)
    k1_src = k1 + k2
    if not (k1_src > k3 > 0.0) or k1 <= 0.0:
        raise DomainViolation("image lies outside the range of the M9->M4 "
                              "map")
    k4_src = k1 * k4 / (k1_src - k3)
    return np.array([k1_src, k3, k4 - k4_src, k4_src, k5])


@dataclass
class VariantInstance:
    solution: inverse.InverseSolution
    markers: Markers | None
    valid: bool


@dataclass
class VariantReport:
    """All catalog-model explanations of one phase-type input."""

    instances: list[VariantInstance]
    deltas: dict[str, float]
    constraint_spreads: dict[str, float]
    diagnostics: dict[str, str]

    @property
    def n_valid(self) -> int:
        return sum(1 for i in self.instances if i.valid)


_FALLBACK_ERRORS = (GenericBranchMiss, NegativeDiscriminant,
                    M3HypersurfaceMiss, ZeroPivot)


def enumerate_variants(p: PhaseTypeParams,
                       include_models=models.SOLVABLE_N3) -> VariantReport:
    """Invert the input under every requested model and attach markers.

    Valid instances (real, strictly positive rates) get markers and
    enter the delta and shared-invariant computations; invalid ones are
    kept for inspection.
    """
    m = inverse.symmetric_inputs(p)
    instances: list[VariantInstance] = []
    diagnostics: dict[str, str] = {}
    for model in include_models:
        try:
            sols = inverse.invert_generic(model, m)
        except _FALLBACK_ERRORS as exc:
            try:
                sols = inverse.invert_thomas(model, m)
            except (NoBranchMatches, *_FALLBACK_ERRORS) as exc2:
                diagnostics[str(model)] = f"{exc}; {exc2}"
                continue
        for sol in sols:
            valid = sol.all_positive
            mk = markers(model, sol.rates) if valid else None
            instances.append(VariantInstance(sol, mk, valid))

    valid = [i for i in instances if i.valid]
    deltas = {}
    spreads = {}
    if valid:
        p_arr = np.array([i.markers.p for i in valid])
        t_arr = np.array([i.markers.T for i in valid])
        logt = np.log10(t_arr)
        for j in range(3):
            deltas[f"p{j + 1}"] = float(np.ptp(p_arr[:, j]))
            deltas[f"log10_T{j + 1}"] = float(np.ptp(logt[:, j]))
        k5s = np.array([i.solution.rates[4] for i in valid])
        for name, col in (("k5", k5s), ("T3", t_arr[:, 2]),
                          ("p3", p_arr[:, 2])):
            spreads[name] = float(np.ptp(col) / max(np.abs(col).max(), 1e-300))
    return VariantReport(instances=instances, deltas=deltas,
                         constraint_spreads=spreads, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Discrimination experiment


@dataclass(frozen=True)
class ExperimentConfig:
    n_samples: int = 100_000
    seed: int = 7
    exponent_range: tuple[float, float] = (-4.0, 0.0)
    tol_sep: float = 1e-6
    zero_delta_tol: float = 1e-9
    models: tuple[str, ...] = ("M2", "M4", "M8", "M9")
    n_bins: int = 50
    log_delta_max: float = 4.0


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    n_retained: int
    zero_fraction_p: float
    zero_fraction_t1: float
    zero_fraction_t2: float
    histograms: dict[str, dict[str, list[float]]] = field(default_factory=dict)

    @property
    def retained_fraction(self) -> float:
        return self.n_retained / self.config.n_samples


def _fast_invert(tag: str, L1, L2, L3, S1, S2):
    """Closed-form generic inversion without object overhead.

    Returns a list of 5-tuples; empty when the branch is complex or a
    pivot vanishes.  Only the generic stratum is covered, which is all
    that random moment draws land on.
    """
    try:
        k5 = -S1
        G = L1 * S1 * S2 - L2 * S1 ** 2 + L3 * S1 - S2 ** 2
        if tag == "M2":
            den1 = S1 ** 3 - S1 * S2
            k4 = (S1 ** 2 - S2) / S1
            k2 = G / den1
            k3 = (S1 ** 2 - S2) * L3 / G
            num = (L1 ** 2 * S1 ** 3 * S2 + L2 ** 2 * S1 ** 3
                   + S1 * S2 ** 3 + L3 ** 2 * S1
                   + (-2.0 * S1 ** 2 * S2 ** 2
                      + (-S1 ** 4 - S1 ** 2 * S2) * L2
                      + (S1 ** 3 + S1 * S2) * L3) * L1
                   + (S1 ** 3 * S2 - 2.0 * L3 * S1 ** 2 + S1 * S2 ** 2) * L2
                   + (S1 ** 4 - 3.0 * S1 ** 2 * S2) * L3)
            den = (-S1 ** 2 * S2 ** 2 + S2 ** 3
                   + (S1 ** 3 * S2 - S1 * S2 ** 2) * L1
                   + (-S1 ** 4 + S1 ** 2 * S2) * L2
                   + (S1 ** 3 - S1 * S2) * L3)
            return [(-num / den, k2, k3, k4, k5)]

        disc = (L1 * S1) ** 2 - 2.0 * L1 * S1 * S2 - 4.0 * L3 * S1 + S2 ** 2
        if disc < 0.0:
            return []
        root = math.sqrt(disc)
        quads = [-(L1 * S1 - S2 + root) / (2.0 * S1),
                 -(L1 * S1 - S2 - root) / (2.0 * S1)]
        out = []
        if tag == "M4":
            k4 = (S1 ** 2 - S2) / S1
            k2 = G / (S1 ** 3 - S1 * S2)
            for k3 in quads:
                k1 = (-L1 * S1 ** 2 + L2 * S1 + S1 * S2
                      - (S1 ** 2 - S2) * k3 - L3) / (S1 ** 2 - S2)
                out.append((k1, k2, k3, k4, k5))
        elif tag == "M8":
            for k2 in quads:
                k4 = G / (k2 * S1 ** 2)
                k3 = -(-S1 ** 3 * k2 + L1 * S1 * S2 - L2 * S1 ** 2
                       + S1 * S2 * k2 + L3 * S1 - S2 ** 2) / (k2 * S1 ** 2)
                k1 = L3 / (S1 * k2)
                out.append((k1, k2, k3, k4, k5))
        elif tag == "M9":
            for k2 in quads:
                pivot = 2.0 * k2 * S1 + L1 * S1 - S2
                k4 = (L1 * S1 ** 2 + S1 ** 2 * k2 - L2 * S1 - S1 * S2
                      - S2 * k2 + L3) / pivot
                k1 = -(k2 * S1 + L1 * S1 - S2) / S1
                k3 = -(-S1 ** 3 * k2 + L1 * S1 * S2 - L2 * S1 ** 2
                       + S1 * S2 * k2 + L3 * S1 - S2 ** 2) / (S1 * pivot)
                out.append((k1, k2, k3, k4, k5))
        else:
            raise ValueError(tag)
        return out
    except ZeroDivisionError:
        return []


def _sample_deltas(cfg: ExperimentConfig, index: int):
    """Process one Monte Carlo sample; returns None if not retained,
    else the tuple (delta_p1, delta_log10_T1, delta_log10_T2)."""
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=(cfg.seed, index)))
    lo, hi = cfg.exponent_range
    a1 = rng.uniform()
    a2 = rng.uniform()
    a3 = 1.0 - a1 - a2
    while True:
        lam = -10.0 ** rng.uniform(lo, hi, size=3)
        sep = np.min(np.abs(np.subtract.outer(lam, lam))
                     [~np.eye(3, dtype=bool)])
        if sep > cfg.tol_sep * np.max(np.abs(lam)):
            break
    l1, l2, l3 = lam
    L1 = l1 + l2 + l3
    L2 = l1 * l2 + l1 * l3 + l2 * l3
    L3 = l1 * l2 * l3
    S1 = a1 * l1 + a2 * l2 + a3 * l3
    S2 = a1 * l1 ** 2 + a2 * l2 ** 2 + a3 * l3 ** 2

    p1s, t1s, t2s = [], [], []
    for tag in cfg.models:
        for k in _fast_invert(tag, L1, L2, L3, S1, S2):
            if not all(math.isfinite(x) and x > 0.0 for x in k):
                continue
            mk = _exact_markers(tag, k)
            p1s.append(mk[3])
            t1s.append(math.log10(mk[0]))
            t2s.append(math.log10(mk[1]))
    if not p1s:
        return None
    return (max(p1s) - min(p1s), max(t1s) - min(t1s), max(t2s) - min(t2s))


def _run_chunk(args):
    cfg, start, stop = args
    n_ret = 0
    zero = [0, 0, 0]
    hp = np.zeros(cfg.n_bins, dtype=np.int64)
    ht1 = np.zeros(cfg.n_bins, dtype=np.int64)
    ht2 = np.zeros(cfg.n_bins, dtype=np.int64)
    p_edges = np.linspace(0.0, 1.0, cfg.n_bins + 1)
    t_edges = np.linspace(0.0, cfg.log_delta_max, cfg.n_bins + 1)
    for i in range(start, stop):
        res = _sample_deltas(cfg, i)
        if res is None:
            continue
        n_ret += 1
        dp, dt1, dt2 = res
        for j, d in enumerate((dp, dt1, dt2)):
            if d <= cfg.zero_delta_tol:
                zero[j] += 1
        hp[min(np.searchsorted(p_edges, dp, side="right") - 1,
               cfg.n_bins - 1)] += 1
        ht1[min(np.searchsorted(t_edges, dt1, side="right") - 1,
                cfg.n_bins - 1)] += 1
        ht2[min(np.searchsorted(t_edges, dt2, side="right") - 1,
                cfg.n_bins - 1)] += 1
    return n_ret, zero, hp, ht1, ht2


def discrimination_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Monte Carlo discrimination study over random survival parameters.

    Each sample draws amplitudes A1, A2 uniform on [0,1] (A3 completes
    the sum to 1) and three decay rates log-uniform over four decades,
    inverts every requested model, retains the sample if any model has
    an all-positive real solution, and records the spreads of p_1 and
    log10 T_1, log10 T_2 across all valid variants.  Deterministic for
    a fixed seed; PHASEKIT_THREADS > 1 runs chunks in parallel with an
    ordered reduction.
    """
    n_workers = int(os.environ.get("PHASEKIT_THREADS", "1"))
    n = cfg.n_samples
    n_chunks = max(n_workers * 4, 1)
    bounds = np.linspace(0, n, n_chunks + 1, dtype=int)
    jobs = [(cfg, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]

    n_ret = sum(p[0] for p in parts)
    zero = np.sum([p[1] for p in parts], axis=0)
    hp = np.sum([p[2] for p in parts], axis=0)
    ht1 = np.sum([p[3] for p in parts], axis=0)
    ht2 = np.sum([p[4] for p in parts], axis=0)

    p_edges = np.linspace(0.0, 1.0, cfg.n_bins + 1)
    t_edges = np.linspace(0.0, cfg.log_delta_max, cfg.n_bins + 1)
    denom = max(n_ret, 1)
    return ExperimentReport(
        config=cfg,
        n_retained=n_ret,
        zero_fraction_p=zero[0] / denom,
        zero_fraction_t1=zero[1] / denom,
        zero_fraction_t2=zero[2] / denom,
        histograms={
            "delta_p1": {"edges": p_edges.tolist(),
                         "counts": hp.tolist()},
            "delta_log10_T1": {"edges": t_edges.tolist(),
                               "counts": ht1.tolist()},
            "delta_log10_T2": {"edges": t_edges.tolist(),
                               "counts": ht2.tolist()},
        },
    )
