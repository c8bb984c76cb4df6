"""Spectral radii of boundary-restricted fractional differentiation matrices.

The model problem is ``D u = lambda u`` with homogeneous Dirichlet data.
For ``alpha > 1`` both boundary values vanish, so the matrix is the
interior block of the operator matrix.  For ``alpha <= 1`` a one-sided
operator only needs the condition at its own lower limit, so only that
row and column are dropped; two-sided operators still use the interior.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .grids import Grid, jgl_grid
from .jacobi import JacobiParams
from .matrices import Kind, OperatorSpec, operator_matrix, riesz_constant

DEFAULT_N_LIST = (8, 16, 24, 32, 48, 64, 96, 128)
DEFAULT_ALPHAS = (1.1, 1.3, 1.5, 1.7, 1.9)
DEFAULT_AB_PAIRS = ((0.0, 0.0), (-0.5, -0.5), (-0.5, 0.5))
CSV_COLUMNS = ("variant", "alpha", "a", "b", "N", "rho", "ratio")


class EigenError(RuntimeError):
    """The dense eigenvalue iteration failed to converge."""


class Variant(str, enum.Enum):
    CL = "CL"
    CR = "CR"
    RLL = "RLL"
    RLR = "RLR"
    RC = "RC"
    RZ = "RZ"

    @property
    def kind(self) -> Kind:
        return _KINDS[self]


_KINDS = {
    Variant.CL: Kind.CAPUTO_L,
    Variant.CR: Kind.CAPUTO_R,
    Variant.RLL: Kind.RL_L,
    Variant.RLR: Kind.RL_R,
    Variant.RC: Kind.RIESZ_CAPUTO,
    Variant.RZ: Kind.RIESZ,
}


@dataclass(frozen=True, eq=False)
class ModelMatrix:
    variant: Variant
    alpha: float
    params: JacobiParams
    N: int
    entries: np.ndarray
    index: np.ndarray  # grid indices kept, for both rows and columns


@dataclass(frozen=True)
class RadiusRecord:
    variant: str
    alpha: float
    a: float
    b: float
    N: int
    rho: float
    ratio: float
    error: str | None = None

    def row(self) -> list:
        return [self.variant, self.alpha, self.a, self.b, self.N, self.rho, self.ratio]


def kept_indices(variant: Variant, alpha: float, N: int) -> np.ndarray:
    """Grid indices that survive the homogeneous boundary conditions."""
    variant = Variant(variant)
    if alpha <= 1 and variant in (Variant.CL, Variant.RLL):
        return np.arange(1, N + 1)
    if alpha <= 1 and variant in (Variant.CR, Variant.RLR):
        return np.arange(0, N)
    return np.arange(1, N)


def model_matrix(variant: Variant | str, grid: Grid, alpha: float) -> ModelMatrix:
    variant = Variant(variant)
    if not 0 < alpha <= 2:
        raise ValueError(f"model problem needs 0 < alpha <= 2, got {alpha}")
    if variant in (Variant.RC, Variant.RZ):
        riesz_constant(alpha)
    idx = kept_indices(variant, alpha, grid.N)
    D = operator_matrix(grid, OperatorSpec(variant.kind, alpha)).entries
    return ModelMatrix(variant, alpha, grid.params, grid.N, D[np.ix_(idx, idx)], idx)


def spectral_radius(m: ModelMatrix | np.ndarray) -> float:
    """Largest eigenvalue modulus of a dense real matrix."""
    A = m.entries if isinstance(m, ModelMatrix) else np.asarray(m, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenError(str(exc)) from exc
    return float(np.max(np.abs(lam)))


def _cell(variant: Variant, alpha: float, ab: tuple, N: int) -> RadiusRecord:
    a, b = ab
    try:
        grid = jgl_grid(JacobiParams(a, b), N)
        rho = spectral_radius(model_matrix(variant, grid, alpha))
        return RadiusRecord(variant.value, alpha, a, b, N, rho, rho / N ** (2 * alpha))
    except (EigenError, ValueError, ArithmeticError) as exc:
        return RadiusRecord(variant.value, alpha, a, b, N, math.nan, math.nan, str(exc))


def worker_count() -> int:
    env = os.environ.get("FRACSPEC_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("FRACSPEC_THREADS must be a positive integer")
        return n
    return min(8, os.cpu_count() or 1)


def radius_sweep(
    variants: Iterable = tuple(Variant),
    alphas: Iterable[float] = DEFAULT_ALPHAS,
    params_list: Iterable[tuple] = DEFAULT_AB_PAIRS,
    N_list: Iterable[int] = DEFAULT_N_LIST,
    threads: int | None = None,
) -> list[RadiusRecord]:
    """Spectral radius for every cell of the cross product.

    Failed cells are kept with NaN values and an error message.
    """
    cells = [
        (Variant(v), float(al), (float(a), float(b)), int(N))
        for v, al, (a, b), N in product(variants, alphas, params_list, N_list)
    ]
    if not cells:
        return []
    threads = threads or worker_count()
    if threads == 1:
        return [_cell(*c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: _cell(*c), cells))


def ratio_series(records: Sequence[RadiusRecord]) -> dict[tuple, list[tuple[int, float]]]:
    """Group records by (variant, alpha, a, b) into N-sorted (N, ratio) series."""
    out: dict[tuple, list[tuple[int, float]]] = {}
    for r in records:
        out.setdefault((r.variant, r.alpha, r.a, r.b), []).append((r.N, r.ratio))
    return {k: sorted(v) for k, v in out.items()}


def boundedness(series: Sequence[tuple[int, float]]) -> tuple[float, float]:
    """``(max / median, last-two spread)`` of a ratio series."""
    ratios = np.array([r for _, r in series])
    spread = max(ratios[-2:]) / min(ratios[-2:]) if len(ratios) >= 2 else 1.0
    return float(ratios.max() / np.median(ratios)), float(spread)


def records_to_csv(records: Sequence[RadiusRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r.row()])
    return buf.getvalue()


def record_dict(r: RadiusRecord) -> dict:
    return asdict(r)
