"""
Linear mixed model with crossed random intercepts, fitted by profiled REML

Variance ratios theta_g = sigma2_g / sigma2 are searched on a log scale with
Nelder-Mead. Each evaluation factors the sparse system Lambda Z'Z Lambda + I
and profiles out the fixed effects and the residual variance.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sps
from scipy import linalg, optimize, stats
from scipy.sparse.linalg import splu

from config.settings import (
    REML_BOUNDARY_ZERO,
    REML_FTOL,
    REML_MAX_EVALUATIONS,
    REML_THETA_FLOOR,
    REML_XTOL,
)
from models.bootstrap import EffectDistribution
from models.fit import (
    DesignSystem,
    FixedEffect,
    GroupingBlock,
    ModelFit,
    RandomIntercept,
    RankedLevel,
    VarianceComponent,
)
from models.observation import BlockerPosition, PlayObservation, RusherPosition
from models.tracking import Down
from utils.errors import ConvergenceError, DesignError, ModelFitError

logger = logging.getLogger(__name__)

# Column order of the coefficient table; reference levels are down 1, DE and T
FIXED_EFFECT_COLUMNS = [
    "Intercept",
    "Number of blockers",
    "Yards to go",
    "Current yardline",
    "I{2nd down}",
    "I{3rd down}",
    "I{4th down}",
    "I{2pt conversion}",
    "I{R:DT}",
    "I{R:interior}",
    "I{R:NT}",
    "I{R:OLB}",
    "I{R:secondary}",
    "I{B:C}",
    "I{B:G}",
    "I{B:other}",
]

_DOWN_COLUMNS = {
    Down.SECOND: "I{2nd down}",
    Down.THIRD: "I{3rd down}",
    Down.FOURTH: "I{4th down}",
    Down.TWO_POINT: "I{2pt conversion}",
}
_RUSHER_COLUMNS = {
    RusherPosition.DT: "I{R:DT}",
    RusherPosition.INTERIOR_LB: "I{R:interior}",
    RusherPosition.NT: "I{R:NT}",
    RusherPosition.OLB: "I{R:OLB}",
    RusherPosition.SECONDARY: "I{R:secondary}",
}
_BLOCKER_COLUMNS = {
    BlockerPosition.C: "I{B:C}",
    BlockerPosition.G: "I{B:G}",
    BlockerPosition.OTHER: "I{B:other}",
}

GROUPINGS = ["rusher", "blocker", "defense", "offense"]

# Two-sided 95% normal quantile
Z_95 = 1.959964

# Starting log-theta values shared by every grouping
_STARTS = (0.0, math.log(0.1), math.log(0.01))
_LOG_THETA_CEILING = math.log(1e8)


def _check_rank(X: np.ndarray, column_names: List[str]) -> None:
    n, p = X.shape
    empty = [column_names[j] for j in range(p) if not np.any(X[:, j] != 0)]
    if empty:
        raise DesignError(f"design has empty columns: {', '.join(empty)}", empty)
    if n <= p:
        raise DesignError(f"{n} observations cannot support {p} fixed effects")
    R, piv = linalg.qr(X, mode="r", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag[0] * max(n, p) * np.finfo(float).eps
    rank = int(np.sum(diag > tol))
    if rank < p:
        aliased = [column_names[j] for j in piv[rank:]]
        raise DesignError(f"design is rank deficient ({rank} < {p}); aliased columns: {', '.join(aliased)}", aliased)


def _sort_levels(values: Iterable) -> List[str]:
    distinct = set(values)
    if all(isinstance(v, (int, np.integer)) for v in distinct):
        return [str(v) for v in sorted(distinct)]
    return sorted(str(v) for v in distinct)


def design_from_arrays(
    y: Sequence[float],
    X: np.ndarray,
    column_names: List[str],
    groups: Dict[str, Sequence],
    row_keys: Optional[List[tuple]] = None,
) -> DesignSystem:
    """
    Build a DesignSystem from raw arrays

    Args:
        y: Response vector
        X: Fixed-effect design, one row per observation
        column_names: Names of the columns of X
        groups: Grouping name -> per-row level labels, in block order
        row_keys: Optional identifiers of the rows

    Raises:
        DesignError: On empty or aliased fixed-effect columns
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n = y.shape[0]
    if X.ndim != 2 or X.shape[0] != n or X.shape[1] != len(column_names):
        raise DesignError(f"design shape {X.shape} does not match {n} rows and {len(column_names)} names")
    _check_rank(X, column_names)

    blocks: List[GroupingBlock] = []
    indicator_parts = []
    rows = np.arange(n)
    for name, labels in groups.items():
        labels = list(labels)
        if len(labels) != n:
            raise DesignError(f"grouping {name} has {len(labels)} labels for {n} rows")
        levels = _sort_levels(labels)
        index = {level: i for i, level in enumerate(levels)}
        codes = np.array([index[str(v)] for v in labels], dtype=np.int64)
        blocks.append(GroupingBlock(name=name, levels=levels, codes=codes))
        indicator_parts.append(sps.csc_matrix(
            (np.ones(n), (rows, codes)), shape=(n, len(levels)),
        ))
    Z = sps.hstack(indicator_parts, format="csc") if indicator_parts else sps.csc_matrix((n, 0))

    return DesignSystem(
        y=y, X=X, column_names=list(column_names), groupings=blocks, Z=Z,
        row_keys=row_keys or [],
    )


_COLUMN_INDEX = {name: j for j, name in enumerate(FIXED_EFFECT_COLUMNS)}


def covariate_row(
    n_blockers: int,
    yards_to_go: int,
    yardline: int,
    down: Down,
    rusher_pos: RusherPosition,
    blocker_pos: BlockerPosition,
) -> np.ndarray:
    """One row of the fixed-effect design in coefficient-table order"""
    x = np.zeros(len(FIXED_EFFECT_COLUMNS))
    x[0] = 1.0
    x[_COLUMN_INDEX["Number of blockers"]] = n_blockers
    x[_COLUMN_INDEX["Yards to go"]] = yards_to_go
    x[_COLUMN_INDEX["Current yardline"]] = yardline
    for table, key in ((_DOWN_COLUMNS, down), (_RUSHER_COLUMNS, rusher_pos), (_BLOCKER_COLUMNS, blocker_pos)):
        if key in table:
            x[_COLUMN_INDEX[table[key]]] = 1.0
    return x


def assemble_design(observations: Iterable[PlayObservation]) -> DesignSystem:
    """
    Fixed-effect design and rusher/blocker/defense/offense groupings for observations

    Rows are ordered by (game_id, play_id, rusher_id, replicate tag), so the
    result does not depend on input order.

    Raises:
        DesignError: If a factor level is empty or columns are aliased
    """
    ordered = sorted(observations, key=lambda o: o.sort_key)
    if not ordered:
        raise DesignError("no observations to model")
    X = np.vstack([
        covariate_row(o.n_blockers, o.yards_to_go, o.yardline, o.down, o.rusher_pos, o.blocker_pos)
        for o in ordered
    ])

    return design_from_arrays(
        y=[o.response for o in ordered],
        X=X,
        column_names=FIXED_EFFECT_COLUMNS,
        groups={
            "rusher": [o.rusher_id for o in ordered],
            "blocker": [o.blocker_id for o in ordered],
            "defense": [o.defense_team for o in ordered],
            "offense": [o.offense_team for o in ordered],
        },
        row_keys=[o.sort_key for o in ordered],
    )


class _ProfiledReml:
    """Cross-products of one design, reused across deviance evaluations"""

    def __init__(self, design: DesignSystem, scale: float = 1.0):
        self.design = design
        self.y = design.y / scale
        self.X = design.X
        self.Z = design.Z.tocsr()
        self.n, self.p = design.n_obs, design.n_fixed
        self.ZtZ = (design.Z.T @ design.Z).tocsc()
        self.ZtX = np.asarray(design.Z.T @ self.X)
        self.Zty = np.asarray(design.Z.T @ self.y).ravel()
        self.XtX = self.X.T @ self.X
        self.Xty = self.X.T @ self.y
        self.block_sizes = [b.n_levels for b in design.groupings]
        self.q = int(sum(self.block_sizes))

    def lambdas(self, theta: np.ndarray) -> np.ndarray:
        return np.repeat(np.sqrt(theta), self.block_sizes)

    def solve(self, theta: np.ndarray) -> dict:
        """Profiled quantities at variance ratios theta"""
        lam = self.lambdas(theta)
        Lam = sps.diags(lam)
        A = (Lam @ self.ZtZ @ Lam + sps.identity(self.q)).tocsc()
        lu = splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                  options={"SymmetricMode": True})
        logdet_A = float(np.sum(np.log(np.abs(lu.U.diagonal()))))

        CX = lam[:, None] * self.ZtX
        cu = lam * self.Zty
        AiCX = lu.solve(CX) if self.p else np.zeros((self.q, 0))
        Aicu = lu.solve(cu)
        XtVX = self.XtX - CX.T @ AiCX
        XtVX = (XtVX + XtVX.T) / 2
        chol = linalg.cho_factor(XtVX)
        beta = linalg.cho_solve(chol, self.Xty - CX.T @ Aicu)
        u = Aicu - AiCX @ beta
        b = lam * u
        resid = self.y - self.X @ beta - self.Z @ b
        r2 = float(resid @ resid + u @ u)
        logdet_X = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
        dof = self.n - self.p
        deviance = logdet_A + logdet_X + dof * (1.0 + math.log(2.0 * math.pi * r2 / dof))
        return {"beta": beta, "b": b, "r2": r2, "chol": chol, "deviance": deviance}

    def deviance(self, theta: np.ndarray) -> float:
        try:
            return self.solve(theta)["deviance"]
        except (linalg.LinAlgError, RuntimeError, ValueError):
            return math.inf


def profiled_reml_deviance(design: DesignSystem, log_theta: Sequence[float]) -> float:
    """
    REML deviance with fixed effects and residual variance profiled out

    Args:
        design: Design system
        log_theta: Log variance ratio per grouping (-inf for a zero component)

    Returns:
        -2 times the restricted log-likelihood
    """
    theta = np.exp(np.asarray(log_theta, dtype=float))
    return _ProfiledReml(design).solve(theta)["deviance"]


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    k = x0.shape[0]
    return np.vstack([x0] + [x0 + step * np.eye(k)[i] for i in range(k)])


def fit_reml(
    design: DesignSystem,
    starts: Optional[Sequence[Sequence[float]]] = None,
    max_evaluations: int = REML_MAX_EVALUATIONS,
    xtol: float = REML_XTOL,
    ftol: float = REML_FTOL,
    theta_floor: float = REML_THETA_FLOOR,
    boundary_zero: float = REML_BOUNDARY_ZERO,
) -> ModelFit:
    """
    Fit the model by profiled REML

    Args:
        design: Design system
        starts: Log-theta starting points; defaults to three shared starts
        max_evaluations: Deviance evaluations allowed across all starts
        xtol: Simplex size tolerance on log-theta
        ftol: Deviance change tolerance
        theta_floor: Lower bound on theta during the search
        boundary_zero: Ratios below this are reported as exact zeros

    Returns:
        ModelFit on the scale of the response

    Raises:
        ConvergenceError: If the evaluation budget runs out before convergence
    """
    k = len(design.groupings)
    sd = float(np.std(design.y))
    scale = sd if sd > 0 else 1.0
    problem = _ProfiledReml(design, scale)
    log_floor = math.log(theta_floor)

    trace: List[dict] = []
    evaluations = 0

    if k == 0:
        theta = np.zeros(0)
        log_theta = np.zeros(0)
        converged = True
    else:
        bounds = [(log_floor, _LOG_THETA_CEILING)] * k
        if starts is None:
            starts = [np.full(k, s) for s in _STARTS]

        def objective(x: np.ndarray) -> float:
            return problem.deviance(np.exp(x))

        best = None
        for start in starts:
            remaining = max_evaluations - evaluations
            if remaining <= 0:
                break
            x0 = np.clip(np.asarray(start, dtype=float), log_floor, _LOG_THETA_CEILING)
            res = optimize.minimize(
                objective, x0, method="Nelder-Mead", bounds=bounds,
                options={"xatol": xtol, "fatol": ftol, "maxfev": remaining,
                         "initial_simplex": _initial_simplex(x0, 1.0)},
            )
            evaluations += int(res.nfev)
            trace.append({"start": x0.tolist(), "x": res.x.tolist(), "deviance": float(res.fun),
                          "nfev": int(res.nfev), "success": bool(res.success), "message": str(res.message)})
            if best is None or res.fun < best.fun:
                best = res

        remaining = max_evaluations - evaluations
        if best is None or remaining <= 0:
            raise ConvergenceError(f"REML search exhausted {max_evaluations} evaluations", trace)

        polish = optimize.minimize(
            objective, best.x, method="Nelder-Mead", bounds=bounds,
            options={"xatol": xtol * 1e-2, "fatol": ftol * 1e-2, "maxfev": remaining,
                     "initial_simplex": _initial_simplex(best.x, 0.1)},
        )
        evaluations += int(polish.nfev)
        trace.append({"start": best.x.tolist(), "x": polish.x.tolist(), "deviance": float(polish.fun),
                      "nfev": int(polish.nfev), "success": bool(polish.success),
                      "message": str(polish.message), "polish": True})
        final = polish if polish.fun <= best.fun else best
        converged = bool(polish.success)
        if not converged:
            raise ConvergenceError(f"REML search did not converge within {max_evaluations} evaluations", trace)
        if not math.isfinite(final.fun):
            raise ModelFitError("REML deviance is not finite at any explored point")

        log_theta = np.asarray(final.x, dtype=float)
        theta = np.exp(log_theta)
        theta[theta < boundary_zero] = 0.0

    solution = problem.solve(theta)
    fit = _assemble_fit(design, problem, solution, theta, log_theta, scale, evaluations, converged)
    logger.info("REML fit: %d obs, deviance %.4f, %d evaluations, theta %s",
                fit.n_obs, fit.reml_deviance, evaluations, np.round(theta, 6).tolist())
    return fit


def _assemble_fit(design, problem, solution, theta, log_theta, scale, evaluations, converged) -> ModelFit:
    n, p = design.n_obs, design.n_fixed
    dof = n - p
    sigma2_std = solution["r2"] / dof
    sigma2 = sigma2_std * scale ** 2

    cov = sigma2 * linalg.cho_solve(solution["chol"], np.eye(p))
    beta = solution["beta"] * scale
    fixed = []
    for j, name in enumerate(design.column_names):
        se = math.sqrt(max(cov[j, j], 0.0))
        t = beta[j] / se if se > 0 else math.inf
        fixed.append(FixedEffect(
            name=name,
            estimate=float(beta[j]),
            se=se,
            t_statistic=float(t),
            p_value=float(2.0 * stats.norm.sf(abs(t))),
            ci_low=float(beta[j] - Z_95 * se),
            ci_high=float(beta[j] + Z_95 * se),
        ))

    components = []
    intercepts: Dict[str, List[RandomIntercept]] = {}
    b = solution["b"] * scale
    for block, sl, th in zip(design.groupings, design.block_slices(), theta):
        components.append(VarianceComponent(
            grouping=block.name,
            variance=float(th * sigma2),
            theta=float(th),
            boundary=bool(th == 0.0),
            n_levels=block.n_levels,
        ))
        counts = block.counts()
        intercepts[block.name] = [
            RandomIntercept(grouping=block.name, level=level, estimate=float(est), n_obs=int(c))
            for level, est, c in zip(block.levels, b[sl], counts)
        ]

    # Deviance of the original response differs from the scaled one by a constant
    deviance = solution["deviance"] + dof * 2.0 * math.log(scale)
    fit = ModelFit(
        fixed_effects=fixed,
        sigma2=sigma2,
        variance_components=components,
        random_intercepts=intercepts,
        icc={},
        reml_deviance=deviance,
        converged=converged,
        n_obs=n,
        n_evaluations=evaluations,
        log_theta=[float(v) for v in log_theta],
    )
    fit.icc = icc(fit)
    return fit


def icc(fit: ModelFit) -> Dict[str, float]:
    """Each grouping's share of total variance, plus the residual share"""
    total = fit.sigma2 + sum(vc.variance for vc in fit.variance_components)
    if total <= 0:
        shares = {vc.grouping: 0.0 for vc in fit.variance_components}
        shares["residual"] = 1.0
        return shares
    shares = {vc.grouping: vc.variance / total for vc in fit.variance_components}
    shares["residual"] = fit.sigma2 / total
    return shares


def rank_random_intercepts(
    fit: ModelFit,
    grouping: str,
    positions: Optional[Dict[str, str]] = None,
    position_filter: Optional[Iterable[str]] = None,
    top_k: Optional[int] = None,
    distributions: Optional[Iterable[EffectDistribution]] = None,
) -> List[RankedLevel]:
    """
    Rank the levels of one grouping by predicted intercept

    Args:
        fit: Fitted model
        grouping: Grouping to rank, e.g. "rusher"
        positions: level -> position label joined onto each row
        position_filter: Keep only levels whose position is listed
        top_k: Keep the first k rows
        distributions: Bootstrap distributions; when given, rank by their median

    Returns:
        RankedLevel rows, best first
    """
    positions = positions or {}
    allowed = set(position_filter) if position_filter is not None else None
    summaries = {d.level_id: d for d in distributions or [] if d.grouping == grouping}

    rows = []
    for ri in fit.random_intercepts.get(grouping, []):
        position = positions.get(ri.level)
        if allowed is not None and position not in allowed:
            continue
        dist = summaries.get(ri.level)
        rows.append(RankedLevel(
            rank=0,
            grouping=grouping,
            level=ri.level,
            estimate=ri.estimate,
            position=position,
            n_obs=ri.n_obs,
            median=dist.median if dist else None,
            lower=dist.lower if dist else None,
            upper=dist.upper if dist else None,
        ))

    def sort_value(row: RankedLevel) -> float:
        if summaries:
            return row.median if row.median is not None else -math.inf
        return row.estimate

    rows.sort(key=lambda r: (-sort_value(r), r.level))
    if top_k is not None:
        rows = rows[:top_k]
    for i, row in enumerate(rows, start=1):
        row.rank = i
    return rows


__all__ = [
    "FIXED_EFFECT_COLUMNS",
    "GROUPINGS",
    "covariate_row",
    "design_from_arrays",
    "assemble_design",
    "profiled_reml_deviance",
    "fit_reml",
    "icc",
    "rank_random_intercepts",
]
