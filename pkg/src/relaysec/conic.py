"""Language-agnostic conic-program IR and a solver adapter.

Covers exactly the cone mix needed here: real PSD blocks (complex Hermitian
matrices enter through the standard real embedding), nonnegative/free
scalars, linear equalities/inequalities, and second-order cone constraints.
Programs are built against integer variable handles, then lowered to
Clarabel's sparse standard form by solve(). The IR isolates the solver
choice; nothing outside this module touches the backend.

Embedding convention: T(X) = [[Re X, -Im X], [Im X, Re X]], which doubles
every eigenvalue's multiplicity and satisfies <T(A), T(X)> = 2 Re<A, X>.
Coefficient matrices built with embed_coeff() therefore carry a factor 1/2
so that modeled trace terms equal the complex traces they stand for.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

try:
    import clarabel
except ImportError as e:  # pragma: no cover
    raise ImportError("the conic backend requires the clarabel package") from e

_SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# Hermitian <-> real embedding

def embed_hermitian(X: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n embedding T(X) of a complex Hermitian X."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    if X.shape != (n, n):
        raise ValueError("X must be square")
    scale = max(np.abs(X).max(initial=0.0), 1.0)
    if np.abs(X - X.conj().T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("X is not Hermitian within 1e-12")
    A, B = X.real, X.imag
    return np.block([[A, -B], [B, A]])


def extract_hermitian(Y: np.ndarray) -> np.ndarray:
    """Inverse of embed_hermitian; averages the two redundant copies.

    For Y = T(X) the round trip is exact. For a general symmetric Y (e.g. a
    solver iterate that broke the embedding symmetry) this returns the unique
    Hermitian X whose embedding is the symmetry-projection of Y; every
    embedded-coefficient functional takes the same value on both.
    """
    Y = np.asarray(Y, dtype=float)
    m = Y.shape[0]
    if m % 2 != 0 or Y.shape != (m, m):
        raise ValueError("Y must be square with even order")
    n = m // 2
    A = (Y[:n, :n] + Y[n:, n:]) / 2.0
    B = (Y[n:, :n] - Y[:n, n:]) / 2.0
    X = A + 1j * B
    return 0.5 * (X + X.conj().T)


def embed_coeff(A: np.ndarray) -> np.ndarray:
    """Coefficient matrix so that <embed_coeff(A), T(X)> = Re trace(A^H X)."""
    return 0.5 * embed_hermitian(A)


# ---------------------------------------------------------------------------
# svec packing, matching the backend's triangle layout: upper triangle in
# column-major order (same sequence as lower triangle row-major), with
# off-diagonal entries scaled by sqrt(2) so <svec(A), svec(B)> = <A, B>.
# NB: layouts agree across conventions up to order 2; only order >= 3
# distinguishes them, so any convention check must use a 3x3 block.

def svec_dim(order: int) -> int:
    return order * (order + 1) // 2


def _tri_indices(order: int):
    return np.tril_indices(order)


def svec(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    ii, jj = _tri_indices(M.shape[0])
    out = M[ii, jj].copy()
    out[ii != jj] *= _SQRT2
    return out


def smat(v: np.ndarray, order: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    ii, jj = _tri_indices(order)
    vals = v.copy()
    vals[ii != jj] /= _SQRT2
    M = np.zeros((order, order))
    M[ii, jj] = vals
    M[jj, ii] = vals
    return M


# ---------------------------------------------------------------------------
# Program IR

class LinTerm:
    """Linear functional over program variables plus a constant offset.

    PSD coefficients are held in svec form internally; add_psd converts a
    symmetric matrix, add_psd_svec accepts a prepacked vector (hot paths that
    rebuild one program per bisection step precompute these).
    """

    __slots__ = ("psd", "sc", "const")

    def __init__(self):
        self.psd = {}   # psd handle -> svec coefficient vector
        self.sc = {}    # scalar handle -> coefficient
        self.const = 0.0

    def add_psd(self, handle: int, M: np.ndarray) -> "LinTerm":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("PSD coefficient must be a square matrix")
        if np.abs(M - M.T).max(initial=0.0) > 1e-10 * max(np.abs(M).max(initial=0.0), 1.0):
            raise ValueError("PSD coefficient matrix must be symmetric")
        return self.add_psd_svec(handle, svec(0.5 * (M + M.T)))

    def add_psd_svec(self, handle: int, v: np.ndarray) -> "LinTerm":
        v = np.asarray(v, dtype=float)
        if handle in self.psd:
            self.psd[handle] = self.psd[handle] + v
        else:
            self.psd[handle] = v
        return self

    def add_scalar(self, handle: int, c: float) -> "LinTerm":
        self.sc[handle] = self.sc.get(handle, 0.0) + float(c)
        return self

    def add_const(self, c: float) -> "LinTerm":
        self.const += float(c)
        return self


@dataclass
class _Constraint:
    kind: str                      # "eq" | "le" | "soc"
    term: LinTerm | None = None    # eq/le: term (cmp) rhs
    rhs: float = 0.0
    soc_vec: list = field(default_factory=list)  # soc: ||vec|| <= bound
    soc_bound: LinTerm | None = None


class ConeProgram:
    """Maximization program over PSD blocks and scalars."""

    def __init__(self):
        self.psd_orders: list[int] = []
        self.scalar_nonneg: list[bool] = []
        self.objective: LinTerm = LinTerm()
        self.constraints: list[_Constraint] = []

    # -- variable declaration
    def psd_block(self, order: int) -> int:
        if order < 1:
            raise ValueError("PSD block order must be >= 1")
        self.psd_orders.append(int(order))
        return len(self.psd_orders) - 1

    def scalar(self, nonneg: bool = True) -> int:
        self.scalar_nonneg.append(bool(nonneg))
        return len(self.scalar_nonneg) - 1

    # -- objective / constraints
    def maximize(self, term: LinTerm):
        self._check_term(term)
        self.objective = term

    def add_eq(self, term: LinTerm, rhs: float) -> int:
        self._check_term(term)
        self.constraints.append(_Constraint("eq", term=term, rhs=float(rhs)))
        return len(self.constraints) - 1

    def add_le(self, term: LinTerm, rhs: float) -> int:
        self._check_term(term)
        self.constraints.append(_Constraint("le", term=term, rhs=float(rhs)))
        return len(self.constraints) - 1

    def add_soc(self, vec_terms: list, bound_term: LinTerm) -> int:
        for t in vec_terms:
            self._check_term(t)
        self._check_term(bound_term)
        self.constraints.append(_Constraint("soc", soc_vec=list(vec_terms), soc_bound=bound_term))
        return len(self.constraints) - 1

    def _check_term(self, term: LinTerm):
        for h, v in term.psd.items():
            if not 0 <= h < len(self.psd_orders):
                raise ValueError("undeclared PSD block referenced")
            if v.shape != (svec_dim(self.psd_orders[h]),):
                raise ValueError("coefficient does not match PSD block order")
        for h in term.sc:
            if not 0 <= h < len(self.scalar_nonneg):
                raise ValueError("undeclared scalar referenced")

    # -- layout helpers
    def _offsets(self):
        offs = []
        pos = 0
        for n in self.psd_orders:
            offs.append(pos)
            pos += svec_dim(n)
        scalar_base = pos
        return offs, scalar_base, scalar_base + len(self.scalar_nonneg)

    def _term_row(self, term: LinTerm, offs, scalar_base, nv) -> np.ndarray:
        row = np.zeros(nv)
        for h, v in term.psd.items():
            row[offs[h]:offs[h] + v.size] += v
        for h, c in term.sc.items():
            row[scalar_base + h] += c
        return row


class SolverFailure(RuntimeError):
    """A conic solve ended without an optimality certificate."""


@dataclass
class ConeSolution:
    status: str                 # "optimal" | "infeasible" | "numerical-failure"
    objective: float
    psd_values: list            # real symmetric matrix per PSD block
    scalar_values: np.ndarray
    duals: list                 # per-constraint dual values (z of the lowering)
    rel_gap: float
    solver_status: str = ""
    iterations: int = 0


def solve(program: ConeProgram, tol: float = 1e-8) -> ConeSolution:
    """Solve the program with the Clarabel backend.

    status="optimal" guarantees relative duality gap <= tol and feasibility
    residuals at solver tolerance; anything the backend could not certify is
    surfaced as "infeasible" or "numerical-failure", never a silent answer.
    """
    offs, scalar_base, nv = program._offsets()

    obj_row = program._term_row(program.objective, offs, scalar_base, nv)
    q = -obj_row  # maximize -> minimize
    P = sp.csc_matrix((nv, nv))

    eq_rows, eq_rhs = [], []
    ineq_rows, ineq_rhs = [], []
    soc_blocks = []  # list of (rows, rhs) with first row the bound

    for con in program.constraints:
        if con.kind == "eq":
            eq_rows.append(program._term_row(con.term, offs, scalar_base, nv))
            eq_rhs.append(con.rhs - con.term.const)
        elif con.kind == "le":
            ineq_rows.append(program._term_row(con.term, offs, scalar_base, nv))
            ineq_rhs.append(con.rhs - con.term.const)
        else:
            rows = [program._term_row(con.soc_bound, offs, scalar_base, nv)]
            rhs = [con.soc_bound.const]
            for t in con.soc_vec:
                rows.append(program._term_row(t, offs, scalar_base, nv))
                rhs.append(t.const)
            soc_blocks.append((np.vstack(rows), np.asarray(rhs)))

    # scalar sign rows (x_j >= 0  <=>  -x_j <= 0)
    for j, nonneg in enumerate(program.scalar_nonneg):
        if nonneg:
            row = np.zeros(nv)
            row[scalar_base + j] = -1.0
            ineq_rows.append(row)
            ineq_rhs.append(0.0)

    blocks, rhs_parts, cones = [], [], []
    if eq_rows:
        blocks.append(sp.csc_matrix(np.vstack(eq_rows)))
        rhs_parts.append(np.asarray(eq_rhs))
        cones.append(clarabel.ZeroConeT(len(eq_rows)))
    if ineq_rows:
        blocks.append(sp.csc_matrix(np.vstack(ineq_rows)))
        rhs_parts.append(np.asarray(ineq_rhs))
        cones.append(clarabel.NonnegativeConeT(len(ineq_rows)))
    for rows, rhs in soc_blocks:
        blocks.append(sp.csc_matrix(-rows))
        rhs_parts.append(rhs)
        cones.append(clarabel.SecondOrderConeT(rows.shape[0]))
    for h, n in enumerate(program.psd_orders):
        d = svec_dim(n)
        ident = sp.identity(d, format="csc")
        pad_left = sp.csc_matrix((d, offs[h]))
        pad_right = sp.csc_matrix((d, nv - offs[h] - d))
        blocks.append(sp.hstack([pad_left, -ident, pad_right], format="csc"))
        rhs_parts.append(np.zeros(d))
        cones.append(clarabel.PSDTriangleConeT(n))

    A = sp.vstack(blocks, format="csc")
    b = np.concatenate(rhs_parts) if rhs_parts else np.zeros(0)

    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol
    settings.tol_feas = tol
    sol = clarabel.DefaultSolver(P, q, A, b, cones, settings).solve()

    status_map = {
        "Solved": "optimal",
        "AlmostSolved": "optimal",
        "PrimalInfeasible": "infeasible",
        "AlmostPrimalInfeasible": "infeasible",
    }
    raw = str(sol.status)
    status = status_map.get(raw, "numerical-failure")

    x = np.asarray(sol.x)
    obj = float(obj_row @ x) + program.objective.const
    dual_obj = -float(sol.obj_val_dual) + program.objective.const
    rel_gap = abs(obj - dual_obj) / (1.0 + abs(obj))
    if status == "optimal" and raw == "AlmostSolved" and rel_gap > max(1e-5, 100 * tol):
        status = "numerical-failure"

    psd_values = [smat(x[offs[h]:offs[h] + svec_dim(n)], n)
                  for h, n in enumerate(program.psd_orders)]
    scalar_values = x[scalar_base:nv].copy()

    # slice duals back out per constraint, in declaration order
    z = np.asarray(sol.z)
    duals = []
    eq_pos, ineq_pos, soc_pos = 0, len(eq_rows), 0
    soc_base = len(eq_rows) + len(ineq_rows)
    soc_starts = np.cumsum([0] + [rows.shape[0] for rows, _ in soc_blocks])
    for con in program.constraints:
        if con.kind == "eq":
            duals.append(float(z[eq_pos]) if z.size else 0.0)
            eq_pos += 1
        elif con.kind == "le":
            duals.append(float(z[ineq_pos]) if z.size else 0.0)
            ineq_pos += 1
        else:
            lo = soc_base + soc_starts[soc_pos]
            hi = soc_base + soc_starts[soc_pos + 1]
            duals.append(z[lo:hi].copy() if z.size else np.zeros(hi - lo))
            soc_pos += 1

    return ConeSolution(status=status, objective=obj, psd_values=psd_values,
                        scalar_values=scalar_values, duals=duals, rel_gap=rel_gap,
                        solver_status=raw, iterations=int(sol.iterations))


def dump(program: ConeProgram, fh):
    """Plain-text sparse dump for cross-checking against other solvers.

    Format, one line per nonzero coefficient:
      var psd <handle> <order>            -- declarations
      var scalar <handle> <nonneg:0|1>
      obj psd <handle> <i> <j> <value>    -- objective entries
      obj scalar <handle> <value>
      con <idx> <eq|le> rhs <value>
      con <idx> <eq|le> psd <handle> <i> <j> <value>
      con <idx> <eq|le> scalar <handle> <value>
      con <idx> soc <row> {bound|vec} ... -- SOC rows use the same entry forms
    """
    def term_lines(prefix, term):
        for h, v in term.psd.items():
            M = smat(v, program.psd_orders[h])
            M[np.abs(M) < 1e-300] = 0.0
            for i, j in zip(*np.nonzero(M)):
                fh.write(f"{prefix} psd {h} {i} {j} {float(M[i, j])!r}\n")
        for h, c in term.sc.items():
            if c != 0.0:
                fh.write(f"{prefix} scalar {h} {float(c)!r}\n")
        if term.const != 0.0:
            fh.write(f"{prefix} const {float(term.const)!r}\n")

    for h, n in enumerate(program.psd_orders):
        fh.write(f"var psd {h} {n}\n")
    for h, nn in enumerate(program.scalar_nonneg):
        fh.write(f"var scalar {h} {int(nn)}\n")
    term_lines("obj", program.objective)
    for idx, con in enumerate(program.constraints):
        if con.kind in ("eq", "le"):
            fh.write(f"con {idx} {con.kind} rhs {float(con.rhs)!r}\n")
            term_lines(f"con {idx} {con.kind}", con.term)
        else:
            term_lines(f"con {idx} soc 0 bound", con.soc_bound)
            for r, t in enumerate(con.soc_vec, start=1):
                term_lines(f"con {idx} soc {r} vec", t)
