"""Recovery of transition rates from multi-exponential survival parameters.

Three solver paths are provided:

* ``invert_generic``: closed-form solutions of the generic triangular
  branch for each catalogued three-state model (unique for M2, two
  quadratic branches for M4/M8/M9, a one-parameter family for M3).
* ``invert_thomas``: full branch search over the encoded triangular
  decompositions, covering every degenerate stratum.
* ``invert_unbranched``: numeric recursion for reversible chains
  1 <-> 2 <-> ... <-> N -> N+1 of any length.

Every returned solution carries a forward round-trip residual; that
residual, not the solver algebra, is the acceptance oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from mpmath import mp

from . import direct, models, simple_systems
from .direct import PhaseTypeParams, SymmetricMoments
from .errors import (GenericBranchMiss, M3HypersurfaceMiss,
                     NegativeDiscriminant, ZeroPivot)

DEFAULT_TOL = 1e-9
DEFAULT_K3_GRID = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class InverseSolution:
    """One rate assignment recovered from survival parameters."""

    model: models.ModelId
    rates: np.ndarray
    branch: str
    residual: float
    free_params: tuple[tuple[str, float], ...] = ()

    @property
    def all_positive(self) -> bool:
        return bool(np.all(self.rates > 0.0))

    def as_dict(self) -> dict:
        return {
            "model": str(self.model),
            "rates": [float(x) for x in self.rates],
            "branch": self.branch,
            "residual": float(self.residual),
            "free_params": {n: float(v) for n, v in self.free_params},
            "all_positive": self.all_positive,
        }


def symmetric_inputs(p: PhaseTypeParams) -> SymmetricMoments:
    """Symmetric moments (L_k, S_k) of decay parameters, the solver input."""
    return direct.moments(p)


def roundtrip_residual(model: models.ModelId, rates: np.ndarray,
                       target: SymmetricMoments) -> float:
    """Max relative deviation of the forward moments from the target."""
    gen = models.build_generator(model, np.asarray(rates, dtype=float))
    got = direct.moments_from_generator(gen).as_vector()
    want = target.as_vector()
    denom = np.maximum(np.abs(want), 1.0)
    return float(np.max(np.abs(got - want) / denom))


def _moment_scale(m: SymmetricMoments) -> float:
    return 1.0 + float(np.max(np.abs(m.as_vector())))


def _polish(model, rates, m: SymmetricMoments, iters: int = 4) -> np.ndarray:
    """Newton-refine a rate vector against the target moments.

    Closed-form branch values lose digits when the rates span several
    decades; a few damped Newton steps on the forward map restore them.
    Returns the input unchanged whenever refinement does not help.
    """
    target = m.as_vector()
    denom = np.maximum(np.abs(target), 1.0)
    rates = np.asarray(rates, dtype=float)

    def residual_vec(k):
        gen = models.build_generator(model, k)
        return direct.moments_from_generator(gen).as_vector() - target

    best = rates
    best_err = float(np.max(np.abs(residual_vec(rates)) / denom))
    current = rates
    n_rates = rates.size
    n_moments = target.size
    for _ in range(iters):
        r = residual_vec(current)
        jac = np.empty((n_moments, n_rates))
        for j in range(n_rates):
            h = 1e-7 * max(abs(current[j]), 1e-9)
            bumped = current.copy()
            bumped[j] += h
            jac[:, j] = (residual_vec(bumped) - r) / h
        try:
            if n_moments == n_rates:
                step = np.linalg.solve(jac, -r)
            else:
                step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            break
        current = current + step
        err = float(np.max(np.abs(residual_vec(current)) / denom))
        if not np.isfinite(err):
            break
        if err < best_err:
            best, best_err = current, err
        if err < 1e-14:
            break
    return best


def _make_solution(model, rates, branch, m, free=(), polish=True):
    rates = np.asarray(rates, dtype=float)
    if polish and not free:
        rates = _polish(model, rates, m)
    return InverseSolution(model=model, rates=rates, branch=branch,
                           residual=roundtrip_residual(model, rates, m),
                           free_params=tuple(free))


def _discriminant(L1, L3, S1, S2):
    return (L1 * S1) ** 2 - 2.0 * L1 * S1 * S2 - 4.0 * L3 * S1 + S2 ** 2


def _disc_terms(L1, L3, S1, S2):
    return ((L1 * S1) ** 2 + 2.0 * abs(L1 * S1 * S2)
            + 4.0 * abs(L3 * S1) + S2 ** 2)


def _quadratic_roots(L1, L3, S1, S2, tol):
    disc = _discriminant(L1, L3, S1, S2)
    band = tol * (1.0 + _disc_terms(L1, L3, S1, S2))
    if abs(disc) <= band:
        raise GenericBranchMiss("discriminant inside the degenerate band")
    if disc < 0.0:
        raise NegativeDiscriminant(
            f"discriminant {disc:.3e} < 0; complex quadratic branch")
    root = np.sqrt(disc)
    return [-(L1 * S1 - S2 + root) / (2.0 * S1),
            -(L1 * S1 - S2 - root) / (2.0 * S1)]


def _require_nonzero(band, **named):
    for name, value in named.items():
        if abs(value) <= band:
            raise GenericBranchMiss(
                f"generic branch requires {name} != 0, got {value:.3e}")


def _require_relative(tol, **named):
    """Nonzero checks scaled by each polynomial's own term magnitudes.

    ``named`` maps a label to (value, sum of absolute term values), which
    keeps the test meaningful when the moments span many decades.
    """
    for name, (value, terms) in named.items():
        if abs(value) <= tol * (1.0 + terms):
            raise GenericBranchMiss(
                f"generic branch requires {name} != 0, got {value:.3e}")


def invert_generic(model: models.ModelId, m: SymmetricMoments,
                   tol: float = DEFAULT_TOL,
                   k3_grid=DEFAULT_K3_GRID,
                   hypersurface_tol: float | None = None) -> list[InverseSolution]:
    """Closed-form solutions of the generic branch for one catalog model.

    Raises GenericBranchMiss when an inequation of the generic branch
    fails (callers should then fall back to invert_thomas), and
    NegativeDiscriminant when the quadratic branch turns complex.
    ``hypersurface_tol`` loosens only the solvability-hypersurface test
    of the family model, measured against its polynomial's term sizes,
    for inputs estimated from finite data.
    """
    L1, L2, L3 = m.L
    S1, S2 = m.S
    band = tol * _moment_scale(m)
    G = L1 * S1 * S2 - L2 * S1 ** 2 + L3 * S1 - S2 ** 2
    k5 = -S1

    G_terms = (abs(L1 * S1 * S2) + abs(L2) * S1 ** 2
               + abs(L3 * S1) + S2 ** 2)

    if model == models.M2:
        _require_relative(
            tol,
            G=(G, G_terms),
            S1_cubed_term=(S1 ** 3 - S1 * S2,
                           abs(S1) ** 3 + abs(S1 * S2)),
            S2=(S2, S1 ** 2 + abs(L2)),
        )
        k4 = (S1 ** 2 - S2) / S1
        k2 = G / (S1 ** 3 - S1 * S2)
        k3 = (S1 ** 2 - S2) * L3 / G
        num = (L1 ** 2 * S1 ** 3 * S2 + L2 ** 2 * S1 ** 3 + S1 * S2 ** 3
               + L3 ** 2 * S1
               + (-2.0 * S1 ** 2 * S2 ** 2
                  + (-S1 ** 4 - S1 ** 2 * S2) * L2
                  + (S1 ** 3 + S1 * S2) * L3) * L1
               + (S1 ** 3 * S2 - 2.0 * L3 * S1 ** 2 + S1 * S2 ** 2) * L2
               + (S1 ** 4 - 3.0 * S1 ** 2 * S2) * L3)
        den = (-S1 ** 2 * S2 ** 2 + S2 ** 3
               + (S1 ** 3 * S2 - S1 * S2 ** 2) * L1
               + (-S1 ** 4 + S1 ** 2 * S2) * L2
               + (S1 ** 3 - S1 * S2) * L3)
        den_terms = (S1 ** 2 * S2 ** 2 + abs(S2) ** 3
                     + abs(S1 ** 3 * S2 * L1) + abs(S1 * S2 ** 2 * L1)
                     + S1 ** 4 * abs(L2) + S1 ** 2 * abs(S2 * L2)
                     + abs(S1 ** 3 * L3) + abs(S1 * S2 * L3))
        if abs(den) <= tol * (1.0 + den_terms):
            raise GenericBranchMiss("vanishing pivot in the k1 formula")
        k1 = -num / den
        return [_make_solution(model, (k1, k2, k3, k4, k5), "generic", m)]

    if model == models.M3:
        hs_band = band
        if hypersurface_tol is not None:
            terms = (abs(L1 * S1 * S2) + abs(L2 * S1 ** 2)
                     + abs(L3 * S1) + S2 ** 2)
            hs_band = hypersurface_tol * (1.0 + terms)
        if abs(G) > hs_band:
            raise M3HypersurfaceMiss(
                f"family condition |{G:.3e}| > {hs_band:.3e}; moments are "
                "off the solvability hypersurface")
        _require_relative(tol, S1=(S1, abs(L1)),
                          S2=(S2, S1 ** 2 + abs(L2)))
        k4 = (S1 ** 2 - S2) / S1
        out = []
        for k3 in k3_grid:
            k2 = L3 / (k3 * S1)
            k1 = -(k3 ** 2 * S1 * S2 + L3 * S2
                   + (L2 * S1 ** 2 - L3 * S1) * k3) / (k3 * S1 * S2)
            out.append(_make_solution(model, (k1, k2, k3, k4, k5),
                                      "family", m, free=(("k3", k3),)))
        return out

    if model == models.M4:
        _require_relative(
            tol,
            L3=(L3, abs(L1 * L2)),
            S1_cubed_term=(S1 ** 3 - S1 * S2,
                           abs(S1) ** 3 + abs(S1 * S2)),
            S2=(S2, S1 ** 2 + abs(L2)),
            S1_sq_term=(S1 ** 2 - S2, S1 ** 2 + abs(S2)),
        )
        k4 = (S1 ** 2 - S2) / S1
        k2 = G / (S1 ** 3 - S1 * S2)
        out = []
        for j, k3 in enumerate(_quadratic_roots(L1, L3, S1, S2, tol)):
            k1 = (-L1 * S1 ** 2 + L2 * S1 + S1 * S2
                  - (S1 ** 2 - S2) * k3 - L3) / (S1 ** 2 - S2)
            out.append(_make_solution(model, (k1, k2, k3, k4, k5),
                                      f"generic/root{j}", m))
        return out

    if model == models.M8:
        _require_relative(tol, L3=(L3, abs(L1 * L2)), S1=(S1, abs(L1)))
        out = []
        for j, k2 in enumerate(_quadratic_roots(L1, L3, S1, S2, tol)):
            k4 = G / (k2 * S1 ** 2)
            k3 = -(-S1 ** 3 * k2 + L1 * S1 * S2 - L2 * S1 ** 2
                   + S1 * S2 * k2 + L3 * S1 - S2 ** 2) / (k2 * S1 ** 2)
            k1 = L3 / (S1 * k2)
            out.append(_make_solution(model, (k1, k2, k3, k4, k5),
                                      f"generic/root{j}", m))
        return out

    if model == models.M9:
        _require_relative(tol, L3=(L3, abs(L1 * L2)), S1=(S1, abs(L1)))
        out = []
        for j, k2 in enumerate(_quadratic_roots(L1, L3, S1, S2, tol)):
            pivot = 2.0 * k2 * S1 + L1 * S1 - S2
            pivot_terms = 2.0 * abs(k2 * S1) + abs(L1 * S1) + abs(S2)
            if abs(pivot) <= tol * (1.0 + pivot_terms):
                raise GenericBranchMiss("vanishing pivot in the k4 formula")
            k4 = (L1 * S1 ** 2 + S1 ** 2 * k2 - L2 * S1 - S1 * S2
                  - S2 * k2 + L3) / pivot
            k1 = -(k2 * S1 + L1 * S1 - S2) / S1
            k3 = -(-S1 ** 3 * k2 + L1 * S1 * S2 - L2 * S1 ** 2
                   + S1 * S2 * k2 + L3 * S1 - S2 ** 2) / (S1 * pivot)
            out.append(_make_solution(model, (k1, k2, k3, k4, k5),
                                      f"generic/root{j}", m))
        return out

    raise ValueError(f"no generic inverse formulas for model {model}")


_SYSTEM_CACHE: dict[str, simple_systems.ModelSystems] = {}


def _systems_for(model: models.ModelId) -> simple_systems.ModelSystems:
    if model.tag not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[model.tag] = simple_systems.load_systems(model.tag)
    return _SYSTEM_CACHE[model.tag]


def invert_thomas(model: models.ModelId, m: SymmetricMoments,
                  tol: float = DEFAULT_TOL,
                  free_grid=DEFAULT_K3_GRID) -> list[InverseSolution]:
    """Full branch search over the encoded triangular decomposition.

    Handles every stratum, including the degenerate ones the generic
    formulas reject.  Raises NoBranchMatches when no stratum accepts
    the input within tolerance.
    """
    ms = _systems_for(model)
    branch_sols = simple_systems.solve_for_moments(ms, m.as_vector(),
                                                   tol=tol,
                                                   free_grid=free_grid)
    out = []
    for bs in branch_sols:
        label = f"S{bs.system_index}/" + "".join(map(str, bs.branch))
        out.append(_make_solution(model, bs.rate_vector(), label, m,
                                  free=tuple(sorted(bs.free_values.items()))))
    return out


def _lanczos_tridiagonal(lam: np.ndarray,
                         weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi matrix with spectrum ``lam`` and first-coordinate spectral
    weights ``weights``.

    Lanczos on diag(lam) started from sqrt(weights), with full
    reorthogonalization.  Weights smaller than the square of machine
    epsilon still carry rate information, so the iteration works with
    mpmath numbers and must run inside an ``mp.workdps`` block.
    Returns (diagonal, off-diagonal) as mpmath lists.
    """
    n = lam.size
    lam_mp = [mp.mpf(float(x)) for x in lam]
    q = [mp.sqrt(mp.mpf(float(x))) for x in weights]
    norm = mp.sqrt(mp.fsum(x * x for x in q))
    basis = [[x / norm for x in q]]
    alpha = [mp.mpf(0)] * n
    beta = [mp.mpf(0)] * (n - 1)
    for m in range(n):
        v = [lam_mp[j] * basis[m][j] for j in range(n)]
        alpha[m] = mp.fsum(basis[m][j] * v[j] for j in range(n))
        if m == n - 1:
            break
        # two orthogonalization passes; one leaves rounding residue
        for _ in range(2):
            for vec in basis:
                proj = mp.fsum(vec[j] * v[j] for j in range(n))
                v = [v[j] - proj * vec[j] for j in range(n)]
        norm = mp.sqrt(mp.fsum(x * x for x in v))
        if norm <= mp.mpf(10) ** -50 * max(abs(x) for x in lam_mp):
            raise ZeroPivot(f"spectral data degenerates at Lanczos step {m}")
        beta[m] = norm
        basis.append([x / norm for x in v])
    return alpha, beta


def invert_unbranched(N: int, p: PhaseTypeParams) -> InverseSolution:
    """Recover chain rates (k_1^+..k_{N-1}^+, k_1^-..k_{N-1}^-, k_N).

    The reduced rate matrix of an unbranched chain is similar to a
    symmetric tridiagonal matrix, and the density weights
    w_i = -A_i lambda_i / k_N are the squared last eigenvector
    components of that matrix.  Reconstructing the tridiagonal from
    (lambda, w) is the classical Jacobi inverse eigenvalue problem,
    solved here by reorthogonalized Lanczos; the rates then unwind from
    the tridiagonal entries one position at a time.
    """
    lam = np.asarray(p.lam, dtype=float)
    A = np.asarray(p.A, dtype=float)
    if lam.size != N:
        raise ValueError(f"expected {N} components, got {lam.size}")

    k_exit = float(-np.sum(A * lam))
    if N == 1:
        model = models.unbranched_chain(1)
        m = symmetric_inputs(p)
        return _make_solution(model, [k_exit], "chain", m)

    scale = float(np.max(np.abs(lam)))
    if abs(k_exit) <= 1e-12 * scale:
        raise ZeroPivot("exit rate k_N evaluates to zero")
    weights = -A * lam / k_exit
    if np.any(weights <= 0.0):
        raise ZeroPivot("nonpositive spectral weight in the chain data")

    with mp.workdps(60):
        alpha, beta = _lanczos_tridiagonal(lam, weights)
        # Lanczos anchors the weights at coordinate 1; the chain carries
        # the exit at state N, so flip the tridiagonal end for end.
        diag = alpha[::-1]
        off = beta[::-1]

        # diag[n] = -(k^+_{n+1} + k^-_n) for n < N-1 (k^-_0 = 0),
        # off[n]^2 = k^+_{n+1} k^-_{n+1}; peel forward from state 1.
        k_plus = np.zeros(N - 1)
        k_minus = np.zeros(N - 1)
        carry = mp.mpf(0)
        for n in range(N - 1):
            kp = -diag[n] - carry
            if kp <= mp.mpf(1e-14) * scale:
                raise ZeroPivot(f"vanishing forward rate at position {n + 1}")
            km = off[n] ** 2 / kp
            k_plus[n] = float(kp)
            k_minus[n] = float(km)
            carry = km

    model = models.unbranched_chain(N)
    rates = np.concatenate([k_plus, k_minus, [k_exit]])
    m = symmetric_inputs(p)
    return _make_solution(model, rates, "chain", m, polish=False)
