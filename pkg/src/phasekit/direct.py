"""Direct problem: spectra, survival parameters, and symmetric moments.

The survival function of the first hitting time of the observed state is a
signed mixture of exponentials S(t) = sum_i A_i exp(lambda_i t).  This
module computes (lambda, A) from a generator and the permutation-invariant
reparameterization (L, S) used as input by the inverse solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from mpmath import mp

from .errors import DegenerateSpectrum, IllConditioned
from .models import Generator, validate

#: Relative eigenvalue separation below which the spectrum is treated as
#: degenerate, and relative imaginary-part threshold for realness.
TOL_SEP = 1e-8
TOL_IM = 1e-10


@dataclass(frozen=True)
class PhaseTypeParams:
    """Eigenvalues (sorted descending, all < 0) and amplitudes, sum(A) = 1."""

    lam: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        if self.lam.shape != self.A.shape or self.lam.ndim != 1:
            raise ValueError("lambda and A must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return len(self.lam)

    def sorted(self) -> "PhaseTypeParams":
        order = np.argsort(self.lam)[::-1]
        return PhaseTypeParams(self.lam[order], self.A[order])


@dataclass(frozen=True)
class SymmetricMoments:
    """Vieta values L_1..L_N and power sums S_k = sum_i A_i lambda_i^k."""

    L: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", np.asarray(self.L, dtype=float))
        object.__setattr__(self, "S", np.asarray(self.S, dtype=float))

    @property
    def n(self) -> int:
        return len(self.L)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.L, self.S])

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.as_vector()), initial=1.0))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    is_real_distinct: bool
    eigenvectors: np.ndarray


def spectrum(gen: Generator) -> Spectrum:
    """All eigenvalues of Qtilde with eigenvectors normalized at state s.

    Raises DegenerateSpectrum when two eigenvalues are closer than the
    separation threshold.  A complex (but separated) spectrum is reported
    via ``is_real_distinct = False`` rather than as an error.
    """
    vals, vecs = np.linalg.eig(gen.Qtilde)
    scale = float(np.max(np.abs(vals), initial=1.0))
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= TOL_SEP * scale:
                raise DegenerateSpectrum(
                    f"eigenvalues {vals[i]} and {vals[j]} are not separated",
                    pair=(vals[i], vals[j]))
    is_real = bool(np.all(np.abs(vals.imag) <= TOL_IM * scale))
    s = gen.return_state - 1
    cols = []
    for i in range(len(vals)):
        u = vecs[:, i]
        if abs(u[s]) > 1e-300:
            u = u / u[s]
        cols.append(u)
    vecs = np.array(cols).T
    if is_real:
        vals = vals.real
        vecs = vecs.real
    return Spectrum(vals, is_real, vecs)


def _minor_det(mat: np.ndarray, row: int, col: int) -> float:
    sub = np.delete(np.delete(mat, row, axis=0), col, axis=1)
    if sub.size == 0:
        return 1.0
    return float(np.linalg.det(sub))


def _tridiagonal_params(gen: Generator) -> PhaseTypeParams | None:
    """(lambda, A) through the symmetrized tridiagonal eigenproblem.

    When the reduced matrix is an unbranched chain (tridiagonal with
    strictly positive couplings) it is similar to a symmetric
    tridiagonal matrix, whose eigenvectors carry far better relative
    accuracy for tiny components than a dense nonsymmetric solve.
    Returns None when the structure does not apply.
    """
    n = gen.N
    if n < 2:
        return None
    mat = gen.Qtilde.T
    mask = np.ones((n, n), dtype=bool)
    for off in (-1, 0, 1):
        mask &= ~np.eye(n, k=off, dtype=bool)
    if np.any(mat[mask] != 0.0):
        return None
    upper = np.diag(mat, 1)
    lower = np.diag(mat, -1)
    if np.any(upper <= 0.0) or np.any(lower <= 0.0):
        return None

    a = np.diag(mat).copy()
    lam, vecs = scipy.linalg.eigh_tridiagonal(a, np.sqrt(upper * lower))
    scale = float(np.max(np.abs(lam), initial=1.0))
    if np.min(np.diff(lam)) <= TOL_SEP * scale:
        raise DegenerateSpectrum("chain eigenvalues are not separated")
    peaks = [int(np.argmax(np.abs(vecs[:, i]))) for i in range(n)]
    lam, amps = _chain_params_extended(a, upper, lower, gen.exit_rate,
                                       lam, peaks)
    return PhaseTypeParams(lam, amps).sorted()


def _chain_params_extended(a: np.ndarray, upper: np.ndarray,
                           lower: np.ndarray, k_exit: float,
                           lam0: np.ndarray,
                           peaks: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Refine chain eigenvalues and amplitudes in extended precision.

    The chain matrix is similar to the symmetric tridiagonal with
    couplings sqrt(upper * lower); the coupling products are formed in
    extended precision so the similarity stays exact to working
    accuracy, which is what keeps amplitudes far below machine epsilon
    meaningful.  Each eigenvalue is polished by Newton on the Sturm
    characteristic recurrence, the eigenvector is rebuilt by a two-sided
    three-term recurrence joined at its peak component (both halves then
    run in their growing, stable direction), and the amplitude follows
    from the absorption-density identity A_i = -k_exit w_i / lambda_i
    with w_i the squared normalized last component.  Results are rounded
    back to float64.
    """
    n = a.size
    with mp.workdps(60):
        am = [mp.mpf(float(x)) for x in a]
        bm = [mp.sqrt(mp.mpf(float(u)) * mp.mpf(float(l)))
              for u, l in zip(upper, lower)]
        k_mp = mp.mpf(float(k_exit))
        lam_out = np.empty(n)
        amp_out = np.empty(n)
        for i in range(n):
            lam = mp.mpf(float(lam0[i]))
            for _ in range(60):
                p_prev, p = mp.mpf(1), lam - am[0]
                dp_prev, dp = mp.mpf(0), mp.mpf(1)
                for m in range(1, n):
                    p_new = (lam - am[m]) * p - bm[m - 1] ** 2 * p_prev
                    dp_new = (p + (lam - am[m]) * dp
                              - bm[m - 1] ** 2 * dp_prev)
                    p_prev, p = p, p_new
                    dp_prev, dp = dp, dp_new
                if dp == 0:
                    break
                step = p / dp
                lam -= step
                if abs(step) <= abs(lam) * mp.mpf(10) ** -55:
                    break
            peak = peaks[i]
            v = [mp.mpf(0)] * n
            v[n - 1] = mp.mpf(1)
            if n > 1:
                v[n - 2] = (lam - am[n - 1]) / bm[n - 2]
            for m in range(n - 2, peak, -1):
                v[m - 1] = ((lam - am[m]) * v[m]
                            - bm[m] * v[m + 1]) / bm[m - 1]
            if peak > 0:
                fwd = [mp.mpf(0)] * (peak + 1)
                fwd[0] = mp.mpf(1)
                if peak >= 1:
                    fwd[1] = (lam - am[0]) / bm[0]
                for m in range(1, peak):
                    fwd[m + 1] = ((lam - am[m]) * fwd[m]
                                  - bm[m - 1] * fwd[m - 1]) / bm[m]
                ratio = v[peak] / fwd[peak]
                for m in range(peak):
                    v[m] = fwd[m] * ratio
            weight = v[-1] ** 2 / mp.fsum(x * x for x in v)
            lam_out[i] = float(lam)
            amp_out[i] = float(-k_mp * weight / lam)
    return lam_out, amp_out


def phase_type_params(gen: Generator) -> PhaseTypeParams:
    """Survival parameters (lambda, A) for a validated generator.

    Unbranched-chain generators go through a symmetrized tridiagonal
    eigenproblem.  Otherwise amplitudes come from the minor-determinant
    closed form
    A_i = -k_exit D_N(lambda_i) / (lambda_i prod_{j != i}(lambda_i - lambda_j))
    and are cross-checked against the linear solve of the initial-condition
    system for the mixture constants.
    """
    report = validate(gen)
    if not report.s_equals_N:
        raise ValueError("phase-type parameters require return state N")
    tri = _tridiagonal_params(gen)
    if tri is not None:
        return tri
    spec = spectrum(gen)
    if not spec.is_real_distinct:
        raise DegenerateSpectrum("spectrum is not real; no (lambda, A) form")
    lam = spec.eigenvalues
    n = gen.N
    k_exit = gen.exit_rate

    # Closed-form amplitudes via the (N, N) minor of lambda*I - Qtilde.
    amps = np.empty(n)
    for i in range(n):
        dn = _minor_det(lam[i] * np.eye(n) - gen.Qtilde, n - 1, n - 1)
        denom = lam[i] * np.prod([lam[i] - lam[j] for j in range(n) if j != i])
        amps[i] = -k_exit * dn / denom

    # Cross-check: solve U C = e_s for the mixture constants.
    U = spec.eigenvectors
    cond = np.linalg.cond(U)
    if cond > 1e12:
        raise IllConditioned(f"eigenvector system condition {cond:.3g}")
    rhs = np.zeros(n)
    rhs[gen.return_state - 1] = 1.0
    C = np.linalg.solve(U, rhs)
    amps_b = -k_exit * C * U[n - 1, :] / lam
    ref = float(np.max(np.abs(amps), initial=1.0))
    if np.max(np.abs(amps - amps_b)) > 1e-8 * max(1.0, ref):
        raise IllConditioned(
            "amplitude paths disagree: "
            f"{amps} (minor formula) vs {amps_b} (linear solve)")
    return PhaseTypeParams(lam, amps).sorted()


def survival(p: PhaseTypeParams, t):
    """S(t) = sum_i A_i exp(lambda_i t) for t >= 0 (vectorized in t)."""
    t = np.asarray(t, dtype=float)
    return np.exp(np.multiply.outer(t, p.lam)) @ p.A


def density(p: PhaseTypeParams, t):
    """f(t) = -S'(t) = -sum_i A_i lambda_i exp(lambda_i t)."""
    t = np.asarray(t, dtype=float)
    return -np.exp(np.multiply.outer(t, p.lam)) @ (p.A * p.lam)


def mean_time(p: PhaseTypeParams) -> float:
    """Mean of the phase-type distribution, -sum_i A_i / lambda_i."""
    return float(-np.sum(p.A / p.lam))


def elementary_symmetric(lam) -> np.ndarray:
    """e_1..e_N of lam by the stable one-variable-at-a-time recursion."""
    lam = np.asarray(lam, dtype=float)
    e = np.zeros(len(lam) + 1)
    e[0] = 1.0
    for x in lam:
        # update from high degree down so each variable enters once
        for k in range(len(lam), 0, -1):
            e[k] = e[k] + x * e[k - 1]
    return e[1:]


def homogeneous_symmetric(lam, m: int) -> float:
    """Complete homogeneous symmetric polynomial h_m(lam); h_0 = 1."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    lam = np.asarray(lam, dtype=float)
    h = np.zeros(m + 1)
    h[0] = 1.0
    for x in lam:
        for k in range(1, m + 1):
            h[k] = h[k] + x * h[k - 1]
    return float(h[m])


def moments(p: PhaseTypeParams) -> SymmetricMoments:
    """Symmetric moments (L, S) of the survival parameters."""
    L = elementary_symmetric(p.lam)
    n = p.n
    S = np.array([float(np.sum(p.A * p.lam ** k)) for k in range(1, n)])
    return SymmetricMoments(L, S)


def _charpoly_esp(mat: np.ndarray) -> np.ndarray:
    """e_1..e_n of the eigenvalues of mat via Faddeev-LeVerrier traces."""
    n = mat.shape[0]
    if n == 0:
        return np.zeros(0)
    power = np.eye(n)
    traces = []
    for _ in range(n):
        power = power @ mat
        traces.append(np.trace(power))
    e = np.zeros(n + 1)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc += (-1.0) ** (i - 1) * e[k - i] * traces[i - 1]
        e[k] = acc / k
    return e[1:]


def moments_from_generator(gen: Generator) -> SymmetricMoments:
    """Symmetric moments straight from the rate matrix, no eigensolve.

    L_k are elementary symmetric functions of the Qtilde spectrum read off
    its characteristic polynomial; S_k follow from the power-sum identities
    with the coefficients of the (N, N) minor determinant.  This path is
    exact up to rounding and serves as the forward oracle for inversion
    residuals.
    """
    n = gen.N
    k_exit = gen.exit_rate
    L = _charpoly_esp(gen.Qtilde)
    # det(lambda I - B) = lambda^{n-1} + c_{n-2} lambda^{n-2} + ... + c_0
    # with B the leading principal (n-1)-block of Qtilde.
    eB = _charpoly_esp(gen.Qtilde[:n - 1, :n - 1])
    c = np.zeros(n)  # c[j] multiplies lambda^j; c[n-1] = 1
    c[n - 1] = 1.0
    for j in range(n - 1):
        c[n - 2 - j] = (-1.0) ** (j + 1) * eB[j] if j < len(eB) else 0.0
    # h_m from e_m: h_m = sum_{i>=1} (-1)^(i+1) e_i h_{m-i}
    h = np.zeros(n)
    h[0] = 1.0
    for m in range(1, n):
        h[m] = sum((-1.0) ** (i + 1) * L[i - 1] * h[m - i]
                   for i in range(1, m + 1))
    S = np.zeros(n - 1)
    for k in range(1, n):
        acc = 0.0
        for j in range(0, k):
            # term h_{k-1-j} * c_{n-1-j}
            acc += h[k - 1 - j] * c[n - 1 - j]
        S[k - 1] = -k_exit * acc
    return SymmetricMoments(L, S)
