"""Generalized Mach-Zehnder switch devices.

A device is specified by a list of cyclic factor orders [n1, ..., nr].  The
passive interferometer is the Kronecker product of single-factor discrete
Fourier transforms, and each of the N = n1*...*nr settings is a vector of
phase-shifter angles whose diagonal, conjugated by the passive, realizes one
mode permutation from the corresponding abelian group.  Setting k routes
input port 0 to output port k.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    canonical_angle,
    cyclic_perm,
    dft_matrix,
    is_complex_hadamard,
    kron_all,
    matrix_to_mapping,
    perm_matrix,
    phases_to_diag,
)

__all__ = [
    "GmziDevice",
    "Stage",
    "StageDecomposition",
    "MuxLemmaReport",
    "classify_gmzi_types",
    "canonical_spec",
    "specs_isomorphic",
    "build_gmzi",
    "setting_vector",
    "setting_index",
    "setting_angles",
    "setting_matrix",
    "setting_permutation",
    "routing_table",
    "parallel_gmzi_settings_count",
    "decompose_stages",
    "active_setting_angles",
    "phase_swing",
    "check_mux_lemma",
    "search_orthogonal_phase_sets",
    "ternary_six_mode_mux_settings",
    "switchable_pairwise_coupler",
    "half_range_mzi",
    "half_range_active_phases",
    "HALF_RANGE_OFFSET",
    "enlarged_gmzi_factorization",
    "device_to_json",
    "device_from_json",
    "hadamard_2",
    "coupler_hc",
]


# ---------------------------------------------------------------------------
# classification of device types

def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _partitions(n: int):
    """Integer partitions of n as non-increasing tuples."""
    if n == 0:
        yield ()
        return
    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest
    yield from rec(n, n)


def classify_gmzi_types(n_modes: int) -> list[tuple[int, ...]]:
    """All device types on n_modes, one per abelian group of that order.

    Each type is a tuple of prime-power cyclic factor orders, sorted
    descending.  The list is sorted lexicographically descending, so the
    single-cycle (discrete-Fourier) type comes first and the all-prime
    (for powers of two: Hadamard) type last.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if n_modes == 1:
        return [(1,)]
    per_prime: list[list[tuple[int, ...]]] = []
    for p, e in sorted(_factorize(n_modes).items()):
        per_prime.append([tuple(p ** part for part in parts) for parts in _partitions(e)])
    specs = set()
    for combo in itertools.product(*per_prime):
        factors = tuple(sorted((f for group in combo for f in group), reverse=True))
        specs.add(factors)
    return sorted(specs, reverse=True)


def canonical_spec(factors) -> tuple[int, ...]:
    """Prime-power canonical form of a factor list (isomorphism invariant)."""
    out: list[int] = []
    for n in factors:
        if n < 1:
            raise ValueError("factors must be >= 1")
        if n == 1:
            continue
        for p, e in _factorize(n).items():
            out.append(p ** e)
    if not out:
        return (1,)
    return tuple(sorted(out, reverse=True))


def specs_isomorphic(a, b) -> bool:
    """True iff two factor lists generate isomorphic permutation groups."""
    return canonical_spec(a) == canonical_spec(b)


# ---------------------------------------------------------------------------
# device construction

@dataclass(frozen=True)
class GmziDevice:
    """An N-mode switch device with N settings.

    Attributes:
        factors: cyclic factor orders (n1, ..., nr).
        n_modes: product of the factors.
        offsets: fixed additive phase offsets per shifter, or None.
        setting_phases: free global phase per setting (radians), default zeros.
    """

    factors: tuple[int, ...]
    n_modes: int
    offsets: np.ndarray | None = None
    setting_phases: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.setting_phases is None:
            object.__setattr__(self, "setting_phases", np.zeros(self.n_modes))

    @property
    def n_settings(self) -> int:
        return self.n_modes

    def passive(self) -> np.ndarray:
        return kron_all(dft_matrix(n) for n in self.factors)


def build_gmzi(factors, offsets=None) -> GmziDevice:
    """Build a device from cyclic factor orders [n1, ..., nr].

    offsets, if given, is a length-N vector of fixed phase-shifter offsets;
    they change the physically applied settings (see active_setting_angles)
    but not the implemented permutations, up to per-setting global phases.
    """
    factors = tuple(int(n) for n in factors)
    if not factors or any(n < 1 for n in factors):
        raise ValueError("factors must be a non-empty list of integers >= 1")
    n_modes = math.prod(factors)
    if offsets is not None:
        offsets = np.asarray(offsets, dtype=float)
        if offsets.shape != (n_modes,):
            raise ValueError("offsets must have one entry per mode")
    return GmziDevice(factors=factors, n_modes=n_modes, offsets=offsets)


def _radices(factors: tuple[int, ...]) -> list[int]:
    # row-major place values: first digit is most significant
    out = []
    acc = 1
    for n in reversed(factors):
        out.append(acc)
        acc *= n
    return list(reversed(out))


def setting_vector(dev: GmziDevice, index: int) -> tuple[int, ...]:
    """Mixed-radix digit vector (k1, ..., kr) of a setting index (row-major)."""
    if not 0 <= index < dev.n_settings:
        raise ValueError("setting index out of range")
    digits = []
    for n, place in zip(dev.factors, _radices(dev.factors)):
        digits.append((index // place) % n)
    return tuple(digits)


def setting_index(dev: GmziDevice, vector) -> int:
    vector = tuple(int(v) for v in vector)
    if len(vector) != len(dev.factors):
        raise ValueError("digit vector length mismatch")
    idx = 0
    for v, n, place in zip(vector, dev.factors, _radices(dev.factors)):
        if not 0 <= v < n:
            raise ValueError("digit out of range")
        idx += v * place
    return idx


def _as_vector(dev: GmziDevice, k) -> tuple[int, ...]:
    if isinstance(k, (int, np.integer)):
        return setting_vector(dev, int(k))
    return tuple(int(v) for v in k)


def setting_angles(dev: GmziDevice, k) -> np.ndarray:
    """Target phase-shifter angles of setting k, canonical branch (-2pi, 0].

    Mode t with digits (t1, ..., tr) gets angle -2pi * sum_l k_l t_l / n_l.
    """
    kvec = _as_vector(dev, k)
    angles = np.zeros(dev.n_modes)
    for t in range(dev.n_modes):
        tvec = setting_vector(dev, t)
        frac = sum(kl * tl / nl for kl, tl, nl in zip(kvec, tvec, dev.factors))
        angles[t] = -2.0 * np.pi * frac
    return canonical_angle(angles)


def all_setting_angles(dev: GmziDevice) -> np.ndarray:
    """(N_settings x N_modes) matrix of target angles."""
    return np.stack([setting_angles(dev, k) for k in range(dev.n_settings)])


def setting_matrix(dev: GmziDevice, k) -> np.ndarray:
    """Transfer matrix of setting k: passive * diag(phases) * passive^dagger.

    Equals the group permutation exactly when the stored per-setting global
    phase is zero.
    """
    kvec = _as_vector(dev, k)
    idx = setting_index(dev, kvec)
    w = dev.passive()
    phases = setting_angles(dev, kvec) + dev.setting_phases[idx]
    return w @ phases_to_diag(phases) @ w.conj().T


def setting_permutation(dev: GmziDevice, k) -> np.ndarray:
    """Mapping array of setting k: digit-wise cyclic shifts t_l -> t_l + k_l."""
    kvec = _as_vector(dev, k)
    mapping = np.zeros(dev.n_modes, dtype=int)
    for t in range(dev.n_modes):
        tvec = setting_vector(dev, t)
        out = tuple((tl + kl) % nl for tl, kl, nl in zip(tvec, kvec, dev.factors))
        mapping[t] = setting_index(dev, out)
    return mapping


def setting_permutation_matrix(dev: GmziDevice, k) -> np.ndarray:
    return kron_all(cyclic_perm(n, kl) for n, kl in zip(dev.factors, _as_vector(dev, k)))


def routing_table(dev: GmziDevice) -> np.ndarray:
    """(setting, input) -> output table; rows are the group permutations.

    For any device this is a Latin square: each input reaches each output
    under exactly one setting.
    """
    return np.stack([setting_permutation(dev, k) for k in range(dev.n_settings)])


def parallel_gmzi_settings_count(partition) -> int:
    """Joint setting count of independent devices on disjoint mode blocks.

    Each block of size b contributes b settings, so a partition
    [b1, ..., br] of the modes allows b1*...*br joint configurations.
    """
    sizes = [int(b) for b in partition]
    if not sizes or any(b < 1 for b in sizes):
        raise ValueError("block sizes must be >= 1")
    return math.prod(sizes)


# ---------------------------------------------------------------------------
# stage decomposition of the passive

@dataclass(frozen=True)
class Stage:
    """One layer of identical local interference blocks between crossings.

    The stage matrix is P(post) @ (I ⊗ block) @ P(pre), with pre/post stored
    as mapping arrays.  pre gathers each block's modes to be contiguous,
    post scatters them back, so the bracketed factors of the full passive
    commute.
    """

    block_size: int
    n_blocks: int
    pre: np.ndarray
    post: np.ndarray

    def block(self) -> np.ndarray:
        return dft_matrix(self.block_size)

    def matrix(self) -> np.ndarray:
        local = kron_all([np.eye(self.n_blocks)] + [self.block()])
        return perm_matrix(self.post) @ local @ perm_matrix(self.pre)

    def crossings(self) -> int:
        """Wire crossings = permutation inversions; identity counts zero."""
        return _inversions(self.pre) + _inversions(self.post)


def _inversions(mapping: np.ndarray) -> int:
    m = list(mapping)
    return sum(1 for i in range(len(m)) for j in range(i + 1, len(m)) if m[i] > m[j])


@dataclass(frozen=True)
class StageDecomposition:
    stages: tuple[Stage, ...]

    def matrix(self) -> np.ndarray:
        out = None
        for st in self.stages:
            out = st.matrix() if out is None else st.matrix() @ out
        return out

    def total_crossings(self) -> int:
        return sum(st.crossings() for st in self.stages)

    def depth(self) -> int:
        return len(self.stages)


def decompose_stages(dev: GmziDevice) -> StageDecomposition:
    """Factor the passive into per-factor local block layers with crossings.

    Stage l applies one dft block of size n_l to every group of modes sharing
    all other digits.  The product of all stage matrices reproduces the
    passive exactly (stages commute, applied first factor first).
    """
    factors = dev.factors
    n = dev.n_modes
    stages = []
    for l, nl in enumerate(factors):
        a = math.prod(factors[:l]) if l > 0 else 1
        b = math.prod(factors[l + 1:]) if l + 1 < len(factors) else 1
        # gather (i, s, j) -> (i, j, s): local digit moved to the fast index
        pre = np.zeros(n, dtype=int)
        for i in range(a):
            for s in range(nl):
                for j in range(b):
                    pre[i * nl * b + s * b + j] = i * b * nl + j * nl + s
        post = np.zeros(n, dtype=int)
        post[pre] = np.arange(n)
        stages.append(Stage(block_size=nl, n_blocks=n // nl, pre=pre, post=post))
    return StageDecomposition(stages=tuple(stages))


# ---------------------------------------------------------------------------
# phase-shifter swing

def active_setting_angles(dev: GmziDevice, restrict_to=None) -> np.ndarray:
    """Physically applied angles per setting, offsets subtracted.

    The free global phase of each setting is fixed by shifting the setting's
    angle vector so its largest element is zero; all angles stay on the
    canonical branch (-2pi, 0].
    """
    indices = range(dev.n_settings) if restrict_to is None else list(restrict_to)
    rows = []
    for k in indices:
        raw = setting_angles(dev, k)
        if dev.offsets is not None:
            raw = canonical_angle(raw - dev.offsets)
        rows.append(raw - raw.max())
    return np.stack(rows)


def phase_swing(dev: GmziDevice, restrict_to=None) -> float:
    """Largest per-shifter angle range over the (possibly restricted) settings."""
    angles = active_setting_angles(dev, restrict_to=restrict_to)
    return float(np.max(angles.max(axis=0) - angles.min(axis=0)))


# ---------------------------------------------------------------------------
# orthonormality conditions on valid switch devices

@dataclass(frozen=True)
class MuxLemmaReport:
    hadamard_ok: bool
    orthonormal_ok: bool
    max_modulus_deviation: float
    max_gram_deviation: float

    @property
    def ok(self) -> bool:
        return self.hadamard_ok and self.orthonormal_ok


def check_mux_lemma(passive, setting_angle_rows=None, tol: float = 1e-9) -> MuxLemmaReport:
    """Necessary conditions for a passive + settings pair to switch N modes.

    The passive must be a complex Hadamard (all entries of modulus
    1/sqrt(N)) and the normalized setting phase vectors must be orthonormal.
    Accepts a GmziDevice, or an explicit passive matrix with a
    (N_settings x N) matrix of angles.
    """
    if isinstance(passive, GmziDevice):
        dev = passive
        v = dev.passive()
        rows = all_setting_angles(dev)
    else:
        v = np.asarray(passive, dtype=complex)
        if setting_angle_rows is None:
            raise ValueError("explicit passive requires setting angles")
        rows = np.asarray(setting_angle_rows, dtype=float)
    n = v.shape[0]
    mod_dev = float(np.max(np.abs(np.abs(v) - 1.0 / np.sqrt(n))))
    hadamard_ok = is_complex_hadamard(v, tol=tol)
    vectors = np.exp(1j * rows) / np.sqrt(n)
    gram = vectors @ vectors.conj().T
    gram_dev = float(np.max(np.abs(gram - np.eye(rows.shape[0]))))
    return MuxLemmaReport(
        hadamard_ok=hadamard_ok,
        orthonormal_ok=gram_dev <= tol,
        max_modulus_deviation=mod_dev,
        max_gram_deviation=gram_dev,
    )


# ---------------------------------------------------------------------------
# exhaustive search for orthogonal phase-vector sets

def search_orthogonal_phase_sets(
    n_modes: int,
    alphabet,
    target_size: int,
    tol: float = 1e-9,
    max_sets: int | None = None,
) -> list[list[np.ndarray]]:
    """Maximal sets of pairwise-orthogonal phase vectors over a finite alphabet.

    Enumerates all |alphabet|^n_modes vectors with per-mode angles drawn from
    the alphabet, builds the orthogonality graph (|<u, v>| <= tol * n), and
    returns every maximal clique of size >= target_size as a list of angle
    arrays.  Ordering is deterministic: cliques sorted by size (descending)
    then lexicographically by vector indices, vectors in lexicographic
    alphabet order.

    Raises ValueError if |alphabet|^n_modes exceeds 1e8.
    """
    alphabet = [float(a) for a in alphabet]
    m = len(alphabet) ** n_modes
    if m > 10 ** 8:
        raise ValueError("alphabet^n_modes exceeds the supported search bound")
    if m > 200_000:
        raise ValueError("search size too large to materialize the orthogonality graph")
    combos = list(itertools.product(range(len(alphabet)), repeat=n_modes))
    vecs = np.exp(1j * np.array([[alphabet[i] for i in c] for c in combos]))
    # orthogonality graph in row blocks to bound memory
    adj: list[set[int]] = [set() for _ in range(m)]
    block = max(1, 2_000_000 // max(1, m))
    threshold = tol * n_modes
    for start in range(0, m, block):
        stop = min(m, start + block)
        gram = vecs[start:stop] @ vecs.conj().T
        hits = np.argwhere(np.abs(gram) <= threshold)
        for r, c in hits:
            u = start + int(r)
            v = int(c)
            if u != v:
                adj[u].add(v)
    results: list[tuple[int, ...]] = []

    def expand(r: list[int], p: set[int], x: set[int]):
        if max_sets is not None and len(results) >= max_sets:
            return
        if not p and not x:
            if len(r) >= target_size:
                results.append(tuple(r))
            return
        if len(r) + len(p) < target_size:
            return
        pivot = max(sorted(p | x), key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand([], set(range(m)), set())
    results.sort(key=lambda c: (-len(c), c))
    out = []
    for clique in results:
        out.append([np.array([alphabet[i] for i in combos[v]]) for v in clique])
    return out


# ---------------------------------------------------------------------------
# switchable pairwise coupling and half-range selection

def switchable_pairwise_coupler(dev: GmziDevice, input_port: int, out_a: int, out_b: int, phi: float):
    """Continuous family interpolating two settings of a Hadamard-type device.

    Returns (angles, matrix) where the matrix equals
    exp(-i phi/2) * (cos(phi/2) U_a + i sin(phi/2) U_b), with U_a routing
    input_port -> out_a and U_b routing input_port -> out_b.  At phi = 0 this
    is U_a, at phi = pi it is U_b up to a global phase, and in between it
    splits the input across the two output ports.  Shifter angles stay in
    {0, -phi, -pi, -pi - phi} modulo 2pi.
    """
    if any(f != 2 for f in dev.factors):
        raise ValueError("switchable coupling requires a Hadamard-type device")
    for port in (input_port, out_a, out_b):
        if not 0 <= port < dev.n_modes:
            raise ValueError("port out of range")
    k_a = input_port ^ out_a
    k_b = input_port ^ out_b
    d_a = np.exp(1j * setting_angles(dev, k_a))
    d_b = np.exp(1j * setting_angles(dev, k_b))
    mix = np.exp(-0.5j * phi) * (np.cos(phi / 2) * d_a + 1j * np.sin(phi / 2) * d_b)
    if np.max(np.abs(np.abs(mix) - 1.0)) > 1e-9:
        raise ValueError("mixed setting is not a pure phase vector")
    angles = canonical_angle(np.angle(mix))
    w = dev.passive()
    matrix = w @ phases_to_diag(angles) @ w.conj().T
    return angles, matrix


def ternary_six_mode_mux_settings() -> np.ndarray:
    """Six-setting phase table for a 6-to-1 mux over angles {0, -2pi/3, -4pi/3}.

    The rows are pairwise-orthogonal phase vectors (so the mux lemma admits a
    valid device using them as settings), and the first four rows use only
    {0, -2pi/3}: restricting to them gives a 4-to-1 mux with swing 2pi/3.
    This set is not reachable from any cyclic-factor construction on six
    modes, whose settings need at least six distinct values.
    """
    a = -2.0 * np.pi / 3.0
    b = -4.0 * np.pi / 3.0
    return np.array(
        [
            [0, 0, 0, a, a, a],
            [0, a, a, 0, a, 0],
            [a, 0, a, a, 0, 0],
            [a, a, 0, 0, 0, a],
            [0, a, b, a, 0, b],
            [a, 0, b, 0, a, b],
        ]
    )


def hadamard_2() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def coupler_hc() -> np.ndarray:
    """Symmetric 2-mode coupler (1, -i; -i, 1)/sqrt(2)."""
    return np.array([[1, -1j], [-1j, 1]], dtype=complex) / np.sqrt(2)


HALF_RANGE_OFFSET = (-7.0 * np.pi / 4.0, 0.0)


def half_range_active_phases(select: bool) -> np.ndarray:
    """Push-pull active angles for the half-range selector; swing pi/4."""
    return np.array([0.0, -np.pi / 4] if select else [-np.pi / 4, 0.0])


def half_range_mzi(select: bool, variant: str = "hc") -> np.ndarray:
    """Two-mode selector whose active phase depth is only pi/4.

    variant "hc": identity (select=False) or the dagger of the symmetric
    coupler (select=True).  variant "h": Z or the real 2-mode splitter, with
    fixed diagonal phase dressing at input and output.  Built push-pull: the
    fixed offset (-7pi/4, 0) plus active angles (-pi/4, 0) or (0, -pi/4).
    """
    active = half_range_active_phases(select)
    total = np.asarray(HALF_RANGE_OFFSET) + active
    h = hadamard_2()
    core = h @ phases_to_diag(total) @ h
    if variant == "hc":
        return core
    if variant == "h":
        s_dag = np.diag([1.0, -1j])
        return s_dag @ core @ s_dag
    raise ValueError("variant must be 'hc' or 'h'")


# ---------------------------------------------------------------------------
# product-form factorization for two independently settable stages

def enlarged_gmzi_factorization(n1: int, n2: int, k1: int, k2: int):
    """Split the permutation of setting (k1, k2) on [n1, n2] into two stages.

    Returns (combined, stage_1, stage_2) with combined = stage_1 @ stage_2
    exactly; stage_1 = C^{k1} ⊗ I and stage_2 = I ⊗ C^{k2}.  The stages can
    be driven independently, giving n1 * n2 jointly addressable settings.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("factor orders must be >= 1")
    c1 = cyclic_perm(n1, k1 % n1)
    c2 = cyclic_perm(n2, k2 % n2)
    stage_1 = np.kron(c1, np.eye(n2))
    stage_2 = np.kron(np.eye(n1), c2)
    combined = np.kron(c1, c2)
    return combined, stage_1, stage_2


# ---------------------------------------------------------------------------
# serialization

def device_to_json(dev: GmziDevice) -> str:
    """Serialize a device; angles in radians at 15 significant digits."""
    def fmt(x):
        return float(f"{float(x):.15g}")
    payload = {
        "spec": list(dev.factors),
        "N": dev.n_modes,
        "offsets": None if dev.offsets is None else [fmt(x) for x in dev.offsets],
        "settings": [[fmt(a) for a in setting_angles(dev, k)] for k in range(dev.n_settings)],
    }
    return json.dumps(payload, sort_keys=True, indent=2)


def device_from_json(text: str) -> GmziDevice:
    payload = json.loads(text)
    dev = build_gmzi(
        payload["spec"],
        offsets=None if payload.get("offsets") is None else np.array(payload["offsets"]),
    )
    if dev.n_modes != payload["N"]:
        raise ValueError("inconsistent serialized device: N != product of factors")
    stored = np.array(payload["settings"], dtype=float)
    rebuilt = all_setting_angles(dev)
    if stored.shape != rebuilt.shape or np.max(np.abs(stored - rebuilt)) > 1e-9:
        raise ValueError("inconsistent serialized device: settings do not match spec")
    return dev
