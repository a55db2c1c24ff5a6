"""End-to-end clustering: wave simulation, per-node DMD, sign encoding.

Every node independently embeds its own time series, extracts frequencies
and per-mode coefficients, and the orchestrator reconciles the per-node
results into global modes keyed by recovered Laplacian eigenvalue.  Sign
bits of the aligned coefficients of modes 2..k+1 (the lambda = 0 mode has
constant sign and carries no split) are packed into cluster numbers.  The
classical route reads the same bits directly off a dense eigendecomposition
and serves as the oracle the wave route is compared against.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .analog import AnalogConfig, analog_mvm_strategy
from .dmd import DmdResult, build_hankel, dmd
from .dynamics import BACKENDS, random_u0, simulate
from .errors import NumericalError, ValidationError
from .graph import Graph, build_operators, classical_spectrum, check_wave_speed

logger = logging.getLogger(__name__)

#: Coefficients smaller than this are sign-ambiguous; they encode as
#: positive and are flagged.
ZERO_COEFF = 1e-9

#: Two eigenvalue estimates within this distance are the same mode.
SLOT_TOL = 1e-4

#: Relative band for picking the sign pivot of a coefficient column.
#: Block-symmetric graphs put the maximum magnitude in two blocks at
#: once, and a bare argmax would orient the labels by rounding noise.
PIVOT_BAND = 1e-3

MVM_STRATEGIES = ("direct", "analog")


@dataclass(frozen=True)
class ClusterConfig:
    """Pipeline parameters.

    k sign bits resolve up to 2^k clusters; t_max defaults to 4 n_nodes,
    which makes the per-node Hankel blocks square of side 2 n_nodes, the
    shape that recovers the full spectrum exactly.  The analog MVM
    strategy applies to the discrete backend only.
    """

    k: int = 1
    c: float = 1.0
    t_max: int | None = None
    backend: str = "discrete"
    mvm: str = "direct"
    seed: int = 0
    svd_tol: float = 1e-8
    analog_epsilon: float = 1e-8

    def __post_init__(self) -> None:
        check_wave_speed(self.c)
        if self.k < 1:
            raise ValidationError(f"k must be at least 1, got {self.k}")
        if self.backend not in BACKENDS:
            raise ValidationError(
                f"unknown backend {self.backend!r}, expected one of {BACKENDS}"
            )
        if self.mvm not in MVM_STRATEGIES:
            raise ValidationError(
                f"unknown mvm strategy {self.mvm!r}, expected one of {MVM_STRATEGIES}"
            )
        if self.mvm == "analog" and self.backend != "discrete":
            raise ValidationError("the analog MVM strategy applies only to the discrete backend")
        if self.t_max is not None and self.t_max < 2 * self.k + 2:
            raise ValidationError(
                f"t_max={self.t_max} too short for k={self.k} (needs >= {2 * self.k + 2})"
            )
        if self.svd_tol <= 0.0:
            raise ValidationError(f"svd_tol must be > 0, got {self.svd_tol}")
        if self.analog_epsilon <= 0.0:
            raise ValidationError(
                f"analog_epsilon must be > 0, got {self.analog_epsilon}"
            )


@dataclass(frozen=True)
class ClusterAssignment:
    """Node to cluster-number mapping plus the evidence behind it.

    cluster_number[i] = sum_j sign_bits[i, j] 2^(j-1); coefficients holds
    the aligned real values the bits were read from, near_zero marks
    entries below the sign-ambiguity threshold (forced positive), and
    lambdas the k+1 leading eigenvalue estimates (constant mode first).
    """

    cluster_number: np.ndarray
    sign_bits: np.ndarray
    coefficients: np.ndarray
    method: str
    lambdas: np.ndarray
    near_zero: np.ndarray


def _merge_conjugate_modes(res: DmdResult) -> list[tuple[float, float]]:
    """Collapse each conjugate eigenvalue pair of one node's DMD into a
    single (lambda, real coefficient) entry, sorted by lambda.

    Eigenvalues off the unit circle by more than 1e-2 are dropped: they
    arise when two Laplacian eigenvalues sit closer than the frequency
    resolution of the recorded window, so the fit replaces the unresolved
    beat with a decaying/growing reciprocal pair.  Those estimates carry
    no usable sign information, and the affected eigenvalues live in
    crowded parts of the spectrum, far from the leading modes the sign
    bits come from.
    """
    mu = res.mu
    lam = res.lambda_recovered
    coeff = res.coefficients
    drift = np.abs(np.abs(mu) - 1.0)
    resolved = drift <= 1e-2
    if not resolved.all():
        strongest = float(np.abs(coeff).max())
        dropped = np.abs(coeff[~resolved])
        if strongest > 0.0 and dropped.max() > 0.1 * strongest:
            logger.warning(
                "dropping an unresolved mode with large coefficient %.3e "
                "(max %.3e); results may miss structure",
                float(dropped.max()),
                strongest,
            )
        logger.debug(
            "dropped %d of %d modes as unresolved", int((~resolved).sum()), mu.size
        )
    out: list[tuple[float, float]] = []
    used = ~resolved
    for i in range(mu.size):
        if used[i]:
            continue
        used[i] = True
        if abs(mu[i].imag) <= 1e-9:
            out.append((float(lam[i]), float(coeff[i].real)))
            continue
        partner = None
        best = 1e-6
        for j in range(i + 1, mu.size):
            if not used[j] and abs(mu[j] - np.conj(mu[i])) < best:
                best = abs(mu[j] - np.conj(mu[i]))
                partner = j
        if partner is None:
            logger.debug("lone complex mode mu=%s", mu[i])
            out.append((float(lam[i]), float(coeff[i].real)))
        else:
            used[partner] = True
            merged = coeff[i] + coeff[partner]
            if abs(merged.imag) > 1e-6 * max(1.0, abs(merged)):
                logger.debug("merged coefficient has imaginary residue %s", merged)
            out.append(
                (float(0.5 * (lam[i] + lam[partner])), float(merged.real))
            )
    out.sort(key=lambda pair: pair[0])
    return out


@dataclass
class _Slot:
    lam_sum: float
    count: int
    coeff: np.ndarray

    @property
    def lam(self) -> float:
        return self.lam_sum / self.count


def _collect_slots(g: Graph, cfg: ClusterConfig, u0: np.ndarray | None):
    """Simulate once, DMD every node, and reconcile modes across nodes.

    Returns every reconciled slot sorted by eigenvalue estimate, each
    carrying the number of nodes that reported it.  Callers that read
    cross-node sign bits must restrict to majority support first (see
    _majority_slots); the spectrum report keeps all slots, since a mode
    localized on a few nodes is still a faithful recovery.
    """
    ops = build_operators(g, cfg.c)
    n = g.n_nodes
    t_max = 4 * n if cfg.t_max is None else cfg.t_max
    if t_max < 2 * cfg.k + 2:
        raise ValidationError(
            f"t_max={t_max} too short for k={cfg.k} (needs >= {2 * cfg.k + 2})"
        )
    if u0 is None:
        u0 = random_u0(n, cfg.seed)
    mvm = None
    if cfg.mvm == "analog":
        mvm = analog_mvm_strategy(AnalogConfig(epsilon=cfg.analog_epsilon))
    traj = simulate(ops, u0, t_max, backend=cfg.backend, mvm=mvm, seed=cfg.seed)
    width = t_max // 2
    slots: list[_Slot] = []
    for node in range(n):
        pair = build_hankel(traj.samples[node], width, width, origin=node)
        res = dmd(
            pair,
            truncation_tol=cfg.svd_tol,
            c=cfg.c,
            backend=cfg.backend,
            seed=cfg.seed + node,
        )
        for lam, coeff in _merge_conjugate_modes(res):
            home = None
            for slot in slots:
                if abs(slot.lam - lam) < SLOT_TOL:
                    home = slot
                    break
            if home is None:
                home = _Slot(lam_sum=0.0, count=0, coeff=np.zeros(n))
                slots.append(home)
            home.lam_sum += lam
            home.count += 1
            home.coeff[node] += coeff
    slots.sort(key=lambda s: s.lam)
    return slots, ops, traj


def _majority_slots(slots: list[_Slot], n: int) -> list[_Slot]:
    """Keep the slots at least half the nodes report.

    Minority slots are either fit artifacts (the analog settle error can
    split a strong mode into per-node satellite estimates that land just
    outside SLOT_TOL) or modes too localized to carry sign information
    across the graph, and sorting by eigenvalue would otherwise let them
    displace the real leading modes the bits are read from.  A real
    delocalized mode survives nodes that sit on its zero crossings,
    since every other node still reports it.
    """
    return [s for s in slots if s.count >= (n + 1) // 2]


def _bits_from_columns(
    columns: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Align signs per mode and read the bits.

    Each column is flipped so its pivot entry is positive, making bits
    comparable across methods.  The pivot is the smallest index whose
    magnitude reaches PIVOT_BAND of the column maximum, so the structural
    cross-block magnitude ties of symmetric graphs orient identically no
    matter which backend or MVM strategy produced the column.  Entries
    below ZERO_COEFF are sign-ambiguous, encode as 1, and are flagged.
    """
    aligned = columns.copy()
    n, k = aligned.shape
    for j in range(k):
        mags = np.abs(aligned[:, j])
        pivot = int(np.flatnonzero(mags >= (1.0 - PIVOT_BAND) * mags.max())[0])
        if aligned[pivot, j] < 0.0:
            aligned[:, j] = -aligned[:, j]
    near_zero = np.abs(aligned) < ZERO_COEFF
    bits = ((aligned > 0.0) | near_zero).astype(int)
    if near_zero.any():
        logger.warning(
            "%d coefficient(s) below %g treated as positive",
            int(near_zero.sum()),
            ZERO_COEFF,
        )
    numbers = bits @ (1 << np.arange(k))
    return numbers.astype(int), bits, aligned, near_zero


def wave_dmd_cluster(
    g: Graph, cfg: ClusterConfig, u0: np.ndarray | None = None
) -> ClusterAssignment:
    """Cluster by signs of the wave/DMD mode coefficients.

    One simulation from a seeded random u(0) (or the supplied u0) feeds a
    DMD per node; modes 2..k+1 by ascending recovered eigenvalue supply
    the sign bits.  Raises when the resolvable spectrum has fewer than
    k+1 modes.
    """
    n = g.n_nodes
    if cfg.k > n - 1:
        raise ValidationError(f"k={cfg.k} too large for {n} nodes (max {n - 1})")
    slots, _ops, _traj = _collect_slots(g, cfg, u0)
    slots = _majority_slots(slots, n)
    if len(slots) < cfg.k + 1:
        raise NumericalError(
            f"DMD resolved only {len(slots)} modes, need k+1={cfg.k + 1}; "
            "the graph's resolvable spectrum is too small for this k"
        )
    if slots[0].lam > 1e-3:
        logger.warning(
            "smallest recovered eigenvalue %.3e is not near 0", slots[0].lam
        )
    columns = np.column_stack([s.coeff for s in slots[1 : cfg.k + 1]])
    numbers, bits, aligned, near_zero = _bits_from_columns(columns)
    return ClusterAssignment(
        cluster_number=numbers,
        sign_bits=bits,
        coefficients=aligned,
        method="wave_dmd",
        lambdas=np.array([s.lam for s in slots[: cfg.k + 1]]),
        near_zero=near_zero,
    )


def recovered_spectrum(
    g: Graph, cfg: ClusterConfig, u0: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """All recovered eigenvalue estimates next to the oracle spectrum.

    Returns (estimates ascending, oracle eigenvalues ascending).  Modes
    localized on a few nodes that the clustering path would reject are
    included.  A slot still needs two reporting nodes: no connected
    graph has a single-node eigenvector, so count-1 slots are pure fit
    scatter.  On spectra too crowded for the recording window to
    resolve, the estimates degrade into low-precision samples of the
    crowded band; a longer t_max sharpens them.
    """
    slots, ops, _traj = _collect_slots(g, cfg, u0)
    oracle, _vecs = classical_spectrum(ops, ops.n_nodes)
    return np.array([s.lam for s in slots if s.count >= 2]), oracle


def classical_cluster(g: Graph, k: int) -> ClusterAssignment:
    """Oracle assignment from a dense eigendecomposition of l_sym.

    Sign bits come from eigenvectors 2..k+1 under the same alignment rule
    as the wave route.
    """
    n = g.n_nodes
    if not (1 <= k <= n - 1):
        raise ValidationError(f"k must be in [1, {n - 1}], got {k}")
    ops = build_operators(g, 1.0)
    vals, vecs = classical_spectrum(ops, k + 1)
    numbers, bits, aligned, near_zero = _bits_from_columns(vecs[:, 1 : k + 1])
    return ClusterAssignment(
        cluster_number=numbers,
        sign_bits=bits,
        coefficients=aligned,
        method="classical_oracle",
        lambdas=vals[: k + 1].copy(),
        near_zero=near_zero,
    )


def _labels(assignment) -> np.ndarray:
    if isinstance(assignment, ClusterAssignment):
        return np.asarray(assignment.cluster_number, dtype=int)
    return np.asarray(assignment, dtype=int)


def agreement(a, b) -> float:
    """Fraction of nodes on which two assignments agree, maximized over
    bijective relabelings of the cluster ids.

    Exhaustive search for up to 8 distinct labels, Hungarian assignment
    beyond that.  Accepts ClusterAssignment values or plain label arrays.
    """
    la = _labels(a)
    lb = _labels(b)
    if la.shape != lb.shape:
        raise ValidationError(
            f"assignments differ in size: {la.shape} vs {lb.shape}"
        )
    ua, inv_a = np.unique(la, return_inverse=True)
    ub, inv_b = np.unique(lb, return_inverse=True)
    size = max(ua.size, ub.size)
    counts = np.zeros((size, size), dtype=int)
    np.add.at(counts, (inv_a, inv_b), 1)
    if size <= 8:
        best = max(
            sum(counts[perm[j], j] for j in range(size))
            for perm in itertools.permutations(range(size))
        )
    else:
        rows, cols = scipy.optimize.linear_sum_assignment(-counts)
        best = int(counts[rows, cols].sum())
    return float(best) / float(la.size)


def spectral_gap_k(eigenvalues, k_max: int) -> int:
    """Suggested cluster count: position of the largest gap between
    consecutive ascending eigenvalues, searched over g = 1..k_max.

    Ties resolve to the smallest g.  Advisory only; the pipeline never
    picks k on its own.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size < 3:
        raise ValidationError(f"need at least 3 eigenvalues, got {lam.size}")
    if k_max < 1:
        raise ValidationError(f"k_max must be at least 1, got {k_max}")
    upper = min(int(k_max), lam.size - 1)
    gaps = lam[1 : upper + 1] - lam[:upper]
    return int(np.argmax(gaps)) + 1


def result_document(
    g: Graph, cfg: ClusterConfig, assignment: ClusterAssignment, vs_classical: float
) -> dict:
    """The serializable cluster report."""
    return {
        "n": g.n_nodes,
        "k": cfg.k,
        "seed": cfg.seed,
        "backend": cfg.backend,
        "assignments": [int(x) for x in assignment.cluster_number],
        "agreement_vs_classical": float(vs_classical),
        "lambda": [float(x) for x in assignment.lambdas],
    }
