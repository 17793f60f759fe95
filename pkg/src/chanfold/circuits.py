"""Parametrized circuit topologies: parsing, evaluation and parameter audits.

A topology acts on the composite space C (x) B, environment first. The input
system A is embedded into the first ``d_A`` basis states, a sequence of fixed
and rotation gates is applied, and C is traced out. Gates address an ordered
factorization ``factors`` of ``d_C * d_B`` whose leading factors make up C.
"""

from dataclasses import dataclass

import numpy as np

from .channels import Isometry, stinespring_to_choi
from .errors import InputError
from .geometry import manifold_dim
from .io import decode_matrix
from .linalg import DEFAULT_REL_TOL, numerical_rank, realvec

GATE_TOL = 1e-10


@dataclass(frozen=True)
class Gate:
    kind: str
    matrix: np.ndarray
    targets: tuple
    param: int = None
    # eigendecomposition of the generator, cached for rotations
    _eig: tuple = None

    def unitary(self, theta=None):
        if self.kind == "fixed":
            return self.matrix
        evals, evecs = self._eig
        return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


@dataclass(frozen=True)
class CircuitTopology:
    d_A: int
    d_B: int
    d_C: int
    p: int
    gates: tuple
    factors: tuple
    init: str = "pad"

    @property
    def dim(self):
        return self.d_C * self.d_B


@dataclass(frozen=True)
class AuditReport:
    passes_param_bound: bool
    required_params: int
    passes_env_bound: bool
    required_env: int
    estimated_generated_dim: int
    target_dim: int
    sample_count: int
    p: int
    jacobian_tol: float
    ranks: tuple

    def to_dict(self):
        d = dict(self.__dict__)
        d["ranks"] = list(self.ranks)
        return d


def required_params(d_A, d_B):
    return 2 * d_A * d_A * (d_B - 1)


def _int_field(doc, key):
    if key not in doc:
        raise InputError(f"missing field {key!r}", code="missing_field", path=f"$.{key}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InputError(f"{key} must be a positive integer", code="bad_dimension", path=f"$.{key}")
    return value


def _matrix_field(g, key, path):
    if key not in g:
        raise InputError(f"gate needs {key!r}", code="missing_field", path=f"{path}.{key}")
    try:
        return decode_matrix(g[key])
    except InputError as exc:
        raise InputError(exc.message, code="bad_matrix", path=f"{path}.{key}") from None


def parse_topology(doc):
    """Validate a topology document (already JSON-decoded) into a CircuitTopology."""
    if not isinstance(doc, dict):
        raise InputError("topology must be a JSON object", code="malformed", path="$")
    d_A, d_B, d_C = (_int_field(doc, k) for k in ("d_A", "d_B", "d_C"))
    if d_B * d_C < d_A:
        raise InputError(
            f"d_B*d_C = {d_B * d_C} is smaller than d_A = {d_A}", code="dims_too_small", path="$"
        )
    init = doc.get("init", "pad")
    if init != "pad":
        raise InputError(f"unknown init {init!r}", code="bad_init", path="$.init")

    factors = doc.get("factors", [d_C, d_B])
    if (
        not isinstance(factors, list)
        or not factors
        or any(isinstance(f, bool) or not isinstance(f, int) or f < 1 for f in factors)
    ):
        raise InputError("factors must be a list of positive integers", code="bad_factors", path="$.factors")
    if int(np.prod(factors)) != d_C * d_B:
        raise InputError(
            f"factors multiply to {int(np.prod(factors))}, expected d_C*d_B = {d_C * d_B}",
            code="bad_factors", path="$.factors",
        )
    prefix = np.cumprod([1] + list(factors))
    if d_C not in prefix:
        raise InputError("no leading run of factors multiplies to d_C", code="bad_factors", path="$.factors")

    raw_gates = doc.get("gates")
    if not isinstance(raw_gates, list):
        raise InputError("gates must be a list", code="malformed", path="$.gates")
    gates, used = [], set()
    for k, g in enumerate(raw_gates):
        path = f"$.gates[{k}]"
        if not isinstance(g, dict):
            raise InputError("gate must be an object", code="malformed", path=path)
        targets = g.get("targets", list(range(len(factors))))
        if (
            not isinstance(targets, list)
            or not targets
            or len(set(targets)) != len(targets)
            or any(isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < len(factors) for i in targets)
        ):
            raise InputError("targets must be distinct factor indices", code="bad_targets", path=f"{path}.targets")
        size = int(np.prod([factors[i] for i in targets]))
        kind = g.get("kind")
        if kind == "fixed":
            U = _matrix_field(g, "matrix", path)
            if U.shape != (size, size):
                raise InputError(f"gate matrix must be {size}x{size}", code="bad_shape", path=f"{path}.matrix")
            if np.linalg.norm(U.conj().T @ U - np.eye(size)) > GATE_TOL:
                raise InputError("fixed gate is not unitary", code="not_unitary", path=f"{path}.matrix")
            gates.append(Gate("fixed", U, tuple(targets)))
        elif kind == "rotation":
            G = _matrix_field(g, "generator", path)
            if G.shape != (size, size):
                raise InputError(f"generator must be {size}x{size}", code="bad_shape", path=f"{path}.generator")
            if np.linalg.norm(G - G.conj().T) > GATE_TOL:
                raise InputError("generator is not Hermitian", code="not_hermitian", path=f"{path}.generator")
            param = g.get("param")
            if isinstance(param, bool) or not isinstance(param, int) or param < 0:
                raise InputError("rotation needs a non-negative integer param", code="bad_param", path=f"{path}.param")
            used.add(param)
            eig = np.linalg.eigh((G + G.conj().T) / 2)
            gates.append(Gate("rotation", G, tuple(targets), param, eig))
        else:
            raise InputError(f"unknown gate kind {kind!r}", code="bad_kind", path=f"{path}.kind")

    p = max(used) + 1 if used else 0
    missing = sorted(set(range(p)) - used)
    if missing:
        raise InputError(f"unreferenced parameter {missing[0]}", code="unreferenced_parameter", path="$.gates")
    return CircuitTopology(d_A, d_B, d_C, p, tuple(gates), tuple(factors), init)


def embed(U, targets, factors):
    """Full operator of ``U`` acting on the listed factors (in that order)."""
    n = len(factors)
    dim = int(np.prod(factors))
    rest = [i for i in range(n) if i not in targets]
    order = list(targets) + rest
    tdims = [factors[i] for i in targets]
    rdims = [factors[i] for i in rest]
    full = np.kron(U, np.eye(int(np.prod(rdims)) if rdims else 1))
    # full acts on the permuted order; conjugate back to the natural order
    full = full.reshape(tdims + rdims + tdims + rdims)
    inv = np.argsort(order)
    full = full.transpose(list(inv) + [n + i for i in inv])
    return full.reshape(dim, dim)


def initial_isometry(Z):
    V0 = np.zeros((Z.dim, Z.d_A), dtype=complex)
    V0[: Z.d_A, : Z.d_A] = np.eye(Z.d_A)
    return V0


def evaluate_topology(Z, theta=()):
    """Isometry h(theta) = U_n ... U_1 V0 as a (d_C*d_B) x d_A matrix."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != Z.p:
        raise InputError(f"theta has {theta.size} entries, topology has p={Z.p}")
    V = initial_isometry(Z)
    for g in Z.gates:
        U = g.unitary(theta[g.param] if g.kind == "rotation" else None)
        V = embed(U, g.targets, Z.factors) @ V
    return V


def channel_map(Z, theta):
    """F(theta): Choi state of the generated channel."""
    V = Isometry(Z.d_A, Z.d_B, Z.d_C, evaluate_topology(Z, theta))
    return stinespring_to_choi(V).matrix


def fd_jacobian(Z, theta, fd_step=1e-5):
    """Central-difference Jacobian of realvec(F) at theta, shape (2 d_A^2 d_B^2, p)."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    n = 2 * (Z.d_A * Z.d_B) ** 2
    J = np.zeros((n, Z.p))
    for k in range(Z.p):
        e = np.zeros(Z.p)
        e[k] = fd_step
        J[:, k] = realvec(channel_map(Z, theta + e) - channel_map(Z, theta - e)) / (2 * fd_step)
    return J


def jacobian_tol(rel_tol, fd_step):
    """Rank threshold above the truncation and roundoff floor of central differences."""
    return max(rel_tol, 100 * fd_step ** 2 + 100 * np.finfo(float).eps / fd_step)


def generated_dim_estimate(Z, theta, fd_step=1e-5, rel_tol=DEFAULT_REL_TOL):
    if Z.p == 0:
        return 0
    J = fd_jacobian(Z, theta, fd_step)
    # Choi states have unit trace, so unit-scale generators give O(1) columns
    return numerical_rank(J, jacobian_tol(rel_tol, fd_step), scale=1.0).rank


def audit_topology(Z, n_points=8, fd_step=1e-5, rel_tol=DEFAULT_REL_TOL, seed=0):
    rng = np.random.default_rng(seed)
    ranks = [
        generated_dim_estimate(Z, rng.uniform(0, 2 * np.pi, Z.p), fd_step, rel_tol)
        for _ in range(n_points)
    ]
    r = min(Z.d_C, Z.d_A * Z.d_B)
    need = required_params(Z.d_A, Z.d_B)
    return AuditReport(
        passes_param_bound=Z.p >= need,
        required_params=need,
        passes_env_bound=Z.d_C >= Z.d_A,
        required_env=Z.d_A,
        estimated_generated_dim=max(ranks, default=0),
        target_dim=manifold_dim(Z.d_A, Z.d_B, r),
        sample_count=n_points,
        p=Z.p,
        jacobian_tol=float(jacobian_tol(rel_tol, fd_step)),
        ranks=tuple(ranks),
    )
