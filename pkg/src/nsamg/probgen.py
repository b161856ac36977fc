"""Deterministic test-instance generation.

Families cover an exactly known 3x3 reference triple, upwind
convection-diffusion in 1-d/2-d, random triples whose iteration matrix
is weighted-normal by construction, deliberately non-normal random
triples, an HPD 1-d Laplacian, and triples loaded from Matrix Market
files.  Generation is bit-reproducible for a fixed seed.

The 1-d convection-diffusion stencil (diffusion weight ``eps``, mesh
width ``h = 1/(n+1)``, first-order upwind convection, scaled by ``h^2``)
has the row pattern ``(-eps - h, 2 eps + h, -eps)``; the 2-d operator on
an ``m x m`` grid uses the five-point analogue with center
``4 eps + 2 h``, west/south ``-eps - h`` and east/north ``-eps``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.linalg

from .errors import InvalidSize, InvalidSpec, ZeroDiagonal
from .kernel import as_matrix

FAMILIES = (
    "paper_example",
    "convection_diffusion_1d",
    "convection_diffusion_2d",
    "random_b_normal",
    "random_nonnormal",
    "hpd_laplacian",
    "custom_file",
)

SMOOTHER_KINDS = ("richardson", "jacobi", "gauss_seidel", "custom")

COARSENING_STRATEGIES = ("aggregation", "every_other", "random_orthonormal")


@dataclass(frozen=True)
class ProblemSpec:
    """Deterministic description of a test triple ``(A, B, Minv)``."""

    family: str
    n: int = 3
    seed: int = 0
    epsilon: float = 0.1
    radius: float = 0.95
    multiplicity: int = 1
    omega: float = 0.7
    b_kind: str = "identity"
    a_path: str | None = None
    b_path: str | None = None
    minv_path: str | None = None

    def validate(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}")
        if self.family == "paper_example":
            if self.n != 3:
                raise InvalidSpec("the reference example is 3x3")
        elif self.family == "custom_file":
            if not self.a_path:
                raise InvalidSpec("custom_file needs a_path")
        elif self.n < 2:
            raise InvalidSpec("n must be at least 2")
        if self.family == "convection_diffusion_2d":
            m = math.isqrt(self.n)
            if m * m != self.n:
                raise InvalidSpec("2-d problems need a square n")
        if self.multiplicity < 1:
            raise InvalidSpec("multiplicity must be positive")
        if self.radius <= 0:
            raise InvalidSpec("radius must be positive")


@dataclass(frozen=True)
class BNormalRecipe:
    """Ingredients of a weighted-normal iteration matrix.

    ``W`` holds eigenvectors, ``values`` the eigenvalues (equal values
    adjacent), and ``D`` the HPD block-diagonal matrix whose blocks match
    the eigenvalue multiplicities; ``B = (W D W^H)^{-1}`` then makes
    ``W diag(values) W^{-1}`` weighted-normal.
    """

    W: np.ndarray
    values: np.ndarray
    D: np.ndarray
    block_sizes: tuple[int, ...]

    def iteration_matrix(self):
        return self.W @ np.diag(self.values) @ np.linalg.inv(self.W)

    def weight(self):
        Binv = self.W @ self.D @ self.W.conj().T
        B = np.linalg.inv(Binv)
        return 0.5 * (B + B.conj().T)


def _well_conditioned(rng, n, mix=0.3):
    """Random nonsingular matrix with condition number below ~2."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    G /= np.linalg.norm(G, 2)
    return np.eye(n) + mix * G


def random_hpd(n, rng, spread=(0.5, 2.0)):
    """Random HPD matrix with eigenvalues uniform in ``spread``."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(G)
    w = rng.uniform(spread[0], spread[1], size=n)
    H = (Q * w) @ Q.conj().T
    return 0.5 * (H + H.conj().T)


def _disk_values(rng, count, radius, rim):
    theta = rng.uniform(0.0, 2.0 * np.pi, size=count)
    if rim:
        r = np.full(count, radius)
    else:
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=count))
    return 1.0 + r * np.exp(1j * theta)


def b_normal_recipe(n, seed, radius=0.95, multiplicity=1, rim=False):
    """Draw a :class:`BNormalRecipe` with eigenvalues in the disk of the
    given radius around 1 (on its rim when ``rim`` is set)."""
    rng = np.random.default_rng(seed)
    groups = max(1, -(-n // multiplicity))
    for _ in range(64):
        distinct = _disk_values(rng, groups, radius, rim)
        gaps = np.abs(distinct[:, None] - distinct[None, :])
        np.fill_diagonal(gaps, np.inf)
        if np.min(gaps) > 1e-3:
            break
    values = np.repeat(distinct, multiplicity)[:n]
    sizes = tuple(
        int(np.sum(np.abs(values - v) < 1e-12)) for v in distinct if v in values
    )
    Q, _ = np.linalg.qr(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    )
    W = Q @ _well_conditioned(rng, n)
    blocks = []
    for size in sizes:
        if size == 1:
            blocks.append(np.array([[rng.uniform(0.5, 2.0)]], dtype=complex))
        else:
            blocks.append(random_hpd(size, rng))
    D = scipy.linalg.block_diag(*blocks)
    return BNormalRecipe(W=W, values=values, D=D, block_sizes=sizes)


def convection_diffusion_1d(n, epsilon):
    """Upwind 1-d convection-diffusion matrix, row pattern
    ``(-eps - h, 2 eps + h, -eps)`` with ``h = 1/(n+1)``."""
    h = 1.0 / (n + 1)
    A = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    A[idx, idx] = 2.0 * epsilon + h
    A[idx[1:], idx[:-1]] = -epsilon - h
    A[idx[:-1], idx[1:]] = -epsilon
    return A


def convection_diffusion_2d(n, epsilon):
    """Five-point upwind operator on the m x m grid with n = m^2."""
    m = math.isqrt(n)
    h = 1.0 / (m + 1)
    A = np.zeros((n, n), dtype=complex)
    for j in range(m):
        for i in range(m):
            row = j * m + i
            A[row, row] = 4.0 * epsilon + 2.0 * h
            if i > 0:
                A[row, row - 1] = -epsilon - h
            if i < m - 1:
                A[row, row + 1] = -epsilon
            if j > 0:
                A[row, row - m] = -epsilon - h
            if j < m - 1:
                A[row, row + m] = -epsilon
    return A


def laplacian_1d(n):
    """Unscaled 1-d Laplacian ``tridiag(-1, 2, -1)``."""
    A = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    A[idx, idx] = 2.0
    A[idx[1:], idx[:-1]] = -1.0
    A[idx[:-1], idx[1:]] = -1.0
    return A


def _weight_for(spec: ProblemSpec, n, rng):
    if spec.b_kind == "identity":
        return np.eye(n, dtype=complex)
    if spec.b_kind == "random_hpd":
        return random_hpd(n, rng)
    raise InvalidSpec(f"unknown b_kind {spec.b_kind!r}")


def generate(spec: ProblemSpec):
    """Produce the triple ``(A, B, Minv)`` described by ``spec``."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    if spec.family == "paper_example":
        A = np.diag(np.array([0.25, 0.5, 0.75], dtype=complex))
        B = np.eye(3, dtype=complex)
        return A, B, np.eye(3, dtype=complex)
    if spec.family == "convection_diffusion_1d":
        A = convection_diffusion_1d(spec.n, spec.epsilon)
        B = _weight_for(spec, spec.n, rng)
        return A, B, make_smoother(A, "jacobi", omega=spec.omega)
    if spec.family == "convection_diffusion_2d":
        A = convection_diffusion_2d(spec.n, spec.epsilon)
        B = _weight_for(spec, spec.n, rng)
        return A, B, make_smoother(A, "jacobi", omega=spec.omega)
    if spec.family == "hpd_laplacian":
        A = laplacian_1d(spec.n)
        return A, A.copy(), make_smoother(A, "gauss_seidel")
    if spec.family == "random_b_normal":
        recipe = b_normal_recipe(
            spec.n, spec.seed, radius=spec.radius, multiplicity=spec.multiplicity
        )
        ma = recipe.iteration_matrix()
        B = recipe.weight()
        minv = _well_conditioned(rng, spec.n)
        A = np.linalg.solve(minv, ma)
        return A, B, minv
    if spec.family == "random_nonnormal":
        return _generate_nonnormal(spec, rng)
    if spec.family == "custom_file":
        A = load_matrix(spec.a_path)
        n = A.shape[0]
        B = load_matrix(spec.b_path) if spec.b_path else np.eye(n, dtype=complex)
        minv = (
            load_matrix(spec.minv_path)
            if spec.minv_path
            else np.eye(n, dtype=complex)
        )
        return A, B, minv
    raise InvalidSpec(f"unhandled family {spec.family!r}")


def _generate_nonnormal(spec: ProblemSpec, rng):
    """Triple whose iteration matrix is deliberately not weighted-normal
    while ``||I - M^{-1}A||_B`` equals ``spec.radius`` exactly."""
    from .bspace import BSpace

    n = spec.n
    B = random_hpd(n, rng)
    space = BSpace(B)
    for _ in range(32):
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T *= spec.radius / space.op_norm(T)
        ma = np.eye(n) - T
        report = space.classify(ma)
        if report.commutator_residual > 1e-6:
            break
    minv = _well_conditioned(rng, n)
    A = np.linalg.solve(minv, ma)
    return A, B, minv


def make_smoother(A, kind, omega=None, matrix=None):
    """Build the smoother inverse ``M^{-1}`` for a splitting of ``A``.

    ``richardson``: ``omega * I``; ``jacobi``: ``omega * diag(A)^{-1}``;
    ``gauss_seidel``: inverse of the lower triangle (scaled by ``omega``
    when given); ``custom`` passes ``matrix`` through.

    :raises ZeroDiagonal: when a splitting needs a nonzero diagonal and
        ``A`` lacks one.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    if kind == "richardson":
        return (1.0 if omega is None else omega) * np.eye(n, dtype=complex)
    if kind == "jacobi":
        d = np.diag(A).copy()
        if np.min(np.abs(d)) <= 1e-14 * max(1.0, np.max(np.abs(d))):
            raise ZeroDiagonal("jacobi needs a nonzero diagonal")
        w = 1.0 if omega is None else omega
        return np.diag(w / d)
    if kind == "gauss_seidel":
        d = np.diag(A)
        if np.min(np.abs(d)) <= 1e-14 * max(1.0, np.max(np.abs(d))):
            raise ZeroDiagonal("gauss_seidel needs a nonzero diagonal")
        lower = np.tril(A)
        minv = scipy.linalg.solve_triangular(
            lower, np.eye(n, dtype=complex), lower=True
        )
        return (1.0 if omega is None else omega) * minv
    if kind == "custom":
        if matrix is None:
            raise InvalidSpec("custom smoother needs a matrix")
        return as_matrix(matrix, "matrix")
    raise InvalidSpec(f"unknown smoother kind {kind!r}")


@dataclass(frozen=True)
class SmootherSpec:
    """Smoother selection for hierarchy builders.

    With ``auto`` set, the weight is rescaled per level to satisfy the
    level smoothing assumption in the level's weighted norm.
    """

    kind: str = "richardson"
    omega: float | None = None
    auto: bool = True


@dataclass(frozen=True)
class CoarseningSpec:
    """Level sizes and strategy for hierarchy construction.

    ``basis_change`` selects the coarse basis: ``identity`` keeps the
    exact one-sided completion (making the next level Hermitian when the
    current weight matches), ``random`` mixes in a well-conditioned
    random change of basis so coarse matrices stay nonsymmetric.
    """

    strategy: str = "random_orthonormal"
    sizes: tuple[int, ...] = ()
    seed: int = 0
    basis_change: str = "random"


def make_coarsening(n, n_c, strategy, seed=0, extend_from=None):
    """Restriction operator ``R`` of shape ``(n, n_c)``.

    When ``extend_from`` is given, its columns are kept in place and new
    random columns are appended, so the old range is nested inside the
    new one.

    :raises InvalidSize: when ``n_c`` is out of range for the strategy.
    """
    if not 1 <= n_c < n:
        raise InvalidSize(f"need 1 <= n_c < n, got n_c={n_c}, n={n}")
    rng = np.random.default_rng(seed)
    if extend_from is not None:
        base = as_matrix(extend_from, "extend_from")
        if base.shape[0] != n or base.shape[1] >= n_c:
            raise InvalidSize("extension must add at least one column")
        extra = rng.standard_normal((n, n_c - base.shape[1])) + 1j * (
            rng.standard_normal((n, n_c - base.shape[1]))
        )
        R = np.hstack([base, extra])
    elif strategy == "every_other":
        idx = np.arange(0, n, 2)[:n_c]
        if idx.size < n_c:
            raise InvalidSize(f"every_other supports at most {(n + 1) // 2} columns")
        R = np.eye(n, dtype=complex)[:, idx]
    elif strategy == "aggregation":
        R = np.zeros((n, n_c), dtype=complex)
        for j, group in enumerate(np.array_split(np.arange(n), n_c)):
            R[group, j] = 1.0
    elif strategy == "random_orthonormal":
        G = rng.standard_normal((n, n_c)) + 1j * rng.standard_normal((n, n_c))
        R, _ = np.linalg.qr(G)
    else:
        raise InvalidSpec(f"unknown coarsening strategy {strategy!r}")
    sing = np.linalg.svd(R, compute_uv=False)
    if sing[-1] <= 1e-10 * sing[0]:
        raise InvalidSize("generated restriction lost column rank")
    return R


@dataclass(frozen=True)
class CounterexampleFixture:
    """The exactly known 3x3 reference instance.

    Carries both transfer pairs, the expected squared norms of the
    two-grid error operators, the diagonal of the symmetrized smoother
    ``hat_minv_b``, and the expected complements ``I - Pi`` of the two
    coarse-grid corrections.
    """

    A: np.ndarray
    B: np.ndarray
    Minv: np.ndarray
    P: np.ndarray
    R: np.ndarray
    P_big: np.ndarray
    R_big: np.ndarray
    norm_sq_small: float
    norm_sq_big: float
    hat_diag: np.ndarray
    complement_small: np.ndarray
    complement_big: np.ndarray


def paper_counterexample():
    """Fixture where enlarging the coarse space increases the norm."""
    A = np.diag(np.array([0.25, 0.5, 0.75], dtype=complex))
    B = np.eye(3, dtype=complex)
    Minv = np.eye(3, dtype=complex)
    P = np.array([[1.0], [1.0], [0.0]], dtype=complex)
    P_big = np.array([[1.0, 2.0], [1.0, 1.0], [0.0, 0.0]], dtype=complex)
    R_big = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], dtype=complex)
    complement_small = np.array(
        [
            [2.0 / 3.0, -2.0 / 3.0, 0.0],
            [-1.0 / 3.0, 1.0 / 3.0, 0.0],
            [0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )
    complement_big = np.array(
        [
            [0.0, 0.0, 3.0],
            [0.0, 0.0, -1.5],
            [0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )
    return CounterexampleFixture(
        A=A,
        B=B,
        Minv=Minv,
        P=P,
        R=P.copy(),
        P_big=P_big,
        R_big=R_big,
        norm_sq_small=65.0 / 288.0,
        norm_sq_big=91.0 / 256.0,
        hat_diag=np.array([7.0 / 16.0, 0.75, 15.0 / 16.0]),
        complement_small=complement_small,
        complement_big=complement_big,
    )


def save_matrix(path, M):
    """Write a dense matrix in Matrix Market array format."""
    scipy.io.mmwrite(str(path), np.asarray(M))


def load_matrix(path):
    """Read a Matrix Market file (array or coordinate) as a dense array."""
    M = scipy.io.mmread(str(path))
    if hasattr(M, "toarray"):
        M = M.toarray()
    return np.asarray(M, dtype=complex)
