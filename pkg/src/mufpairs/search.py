"""Numerical search for mutually unbiased frame pairs.

The objective is the squared Frobenius residual of the product
decomposition with uniform weights. Parameters are the raw coordinates of
the ``2 * d**2`` vectors (or of two fiducials for the covariant ansatz),
normalized on evaluation, so phases and norms are flat directions that the
limited-memory quasi-Newton iteration simply ignores.
"""

import logging
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .frames import Frame, MufPair
from .weyl import context, labels, orbit_vectors

log = logging.getLogger(__name__)

FOUND = "found"
NOT_FOUND = "not_found"
ANSATZES = ("general", "covariant", "sic")
# scale of the seeded perturbation used to leave a saddle during continuation
JITTER = 1e-6


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    d: int
    t: float
    ansatz: str = "general"
    restarts: int = 1
    master_seed: int = 0
    max_iterations: int = 2000
    success_tolerance: float = 1e-12
    stationarity_tolerance: float = 1e-10
    # extra iterations spent driving a successful run towards machine precision
    polish_iterations: int = 200
    polish_tolerance: float = 1e-28
    memory: int = 10
    stop_on_success: bool = True

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("searches need d >= 2")
        lo, hi = -1.0 / (self.d**2 - 1), 1.0 / (self.d + 1)
        if not lo - 1e-12 <= self.t <= hi + 1e-12:
            raise ValueError(f"t={self.t} is outside the separable range [{lo}, {hi}]")
        if self.ansatz not in ANSATZES:
            raise ValueError(f"ansatz must be one of {ANSATZES}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")

    @property
    def n_vectors(self):
        return {"general": 2 * self.d**2, "covariant": 2, "sic": 1}[self.ansatz]

    @property
    def n_params(self):
        return 2 * self.d * self.n_vectors


@dataclass(eq=False)
class SearchResult:
    best_pair: MufPair
    best_loss: float
    status: str
    restart_index: int
    iterations: int
    seed_used: int
    params: np.ndarray = field(repr=False)
    loss_trace: list = field(default_factory=list, repr=False)
    reason: str = ""
    fiducials: tuple = field(default=None, repr=False)

    @property
    def found(self):
        return self.status == FOUND

    @property
    def t(self):
        return self.best_pair.t

    def as_dict(self):
        return {
            "status": self.status,
            "best_loss": self.best_loss,
            "residual": float(np.sqrt(self.best_loss)),
            "t": self.t,
            "restart_index": self.restart_index,
            "iterations": self.iterations,
            "seed_used": self.seed_used,
            "reason": self.reason,
        }


def loss_and_gradient(params, cfg):
    """Objective value and gradient with respect to the raw parameters."""
    params = np.ascontiguousarray(params, dtype=float)
    if params.shape != (cfg.n_params,):
        raise ValueError(f"expected {cfg.n_params} parameters, got shape {params.shape}")
    if cfg.ansatz == "covariant":
        return kernels.covariant_loss_grad(params, cfg.d, cfg.t)
    if cfg.ansatz == "sic":
        # one fiducial used for both frames
        loss, g = kernels.covariant_loss_grad(np.concatenate([params, params]), cfg.d, cfg.t)
        return loss, g[: params.size] + g[params.size :]
    return kernels.general_loss_grad(params, cfg.d, cfg.t)


def _unit_rows(params, count, d):
    V = np.ascontiguousarray(params, dtype=float).view(complex).reshape(count, d)
    return V / np.linalg.norm(V, axis=1)[:, None]


def encode_vectors(vectors):
    return np.ascontiguousarray(np.asarray(vectors, dtype=complex)).view(float).ravel().copy()


def encode_pair(pair):
    """Flat parameter vector for the general ansatz."""
    return encode_vectors(np.concatenate([pair.x.vectors, pair.y.vectors]))


def decode_pair(params, cfg):
    """The uniformly weighted pair described by ``params`` (orbit expansion for the covariant ansatz)."""
    d = cfg.d
    U = _unit_rows(params, cfg.n_vectors, d)
    if cfg.ansatz in ("covariant", "sic"):
        ctx = context(d)
        return MufPair(Frame(orbit_vectors(ctx, U[0])), Frame(orbit_vectors(ctx, U[-1])), cfg.t)
    n = d * d
    return MufPair(Frame(U[:n]), Frame(U[n:]), cfg.t)


def random_start(rng, cfg):
    """Independent standard normal real and imaginary parts for every coordinate."""
    return rng.standard_normal(cfg.n_params)


def _two_loop(g, S, Y):
    q = g.copy()
    alphas = []
    for s, y in zip(reversed(S), reversed(Y)):
        a = (s @ q) / (y @ s)
        alphas.append(a)
        q -= a * y
    if S:
        q *= (S[-1] @ Y[-1]) / (Y[-1] @ Y[-1])
    else:
        q /= max(np.linalg.norm(g), 1.0)
    for (s, y), a in zip(zip(S, Y), reversed(alphas)):
        b = (y @ q) / (y @ s)
        q += s * (a - b)
    return -q


def local_optimize(start, cfg, restart_index=0, seed_used=None):
    """Limited-memory BFGS with Armijo backtracking from ``start``.

    Stops when the gradient norm drops below the stationarity tolerance,
    when the iteration budget is spent, or when the line search cannot make
    progress. Once the loss passes ``success_tolerance`` the stationarity
    test is dropped and the run continues for at most ``polish_iterations``
    further steps, until the loss is below ``polish_tolerance`` or the line
    search stalls at rounding level. ``loss_trace`` holds the loss after every
    accepted step and never increases.
    """
    x = np.array(start, dtype=float)
    fx, g = loss_and_gradient(x, cfg)
    S, Y = deque(maxlen=cfg.memory), deque(maxlen=cfg.memory)
    trace = []
    polish_left = None
    reason = "max_iterations"
    it = 0
    while True:
        if fx >= cfg.success_tolerance and np.linalg.norm(g) < cfg.stationarity_tolerance:
            reason = "stationary"
            break
        if fx < cfg.success_tolerance:
            if polish_left is None:
                polish_left = cfg.polish_iterations
            if polish_left <= 0 or fx < cfg.polish_tolerance:
                reason = "converged"
                break
            polish_left -= 1
        if it >= cfg.max_iterations:
            break
        p = _two_loop(g, S, Y)
        slope = g @ p
        if slope >= 0:
            S.clear()
            Y.clear()
            p = -g
            slope = -(g @ g)
        step = 1.0
        for _ in range(60):
            x_new = x + step * p
            f_new, g_new = loss_and_gradient(x_new, cfg)
            if f_new <= fx + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            reason = "converged" if fx < cfg.success_tolerance else "line_search_failed"
            break
        s, yv = x_new - x, g_new - g
        sy = s @ yv
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(yv):
            S.append(s)
            Y.append(yv)
        x, fx, g = x_new, f_new, g_new
        trace.append(float(fx))
        it += 1
    status = FOUND if fx < cfg.success_tolerance else NOT_FOUND
    pair = decode_pair(x, cfg)
    fiducials = None
    if cfg.ansatz == "covariant":
        fiducials = tuple(_unit_rows(x, 2, cfg.d))
    elif cfg.ansatz == "sic":
        u = _unit_rows(x, 1, cfg.d)[0]
        fiducials = (u, u)
    return SearchResult(
        best_pair=pair,
        best_loss=float(fx),
        status=status,
        restart_index=restart_index,
        iterations=it,
        seed_used=seed_used,
        params=x,
        loss_trace=trace,
        reason=reason,
        fiducials=fiducials,
    )


def restart_seed(master_seed, index):
    return int(master_seed) ^ int(index)


def _run_restart(cfg, index):
    seed = restart_seed(cfg.master_seed, index)
    rng = np.random.default_rng(seed)
    return local_optimize(random_start(rng, cfg), cfg, restart_index=index, seed_used=seed)


def worker_count():
    """Pool size: ``MUF_THREADS`` if set, else the CPU count."""
    env = os.environ.get("MUF_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("MUF_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _better(a, b):
    return (a.best_loss, a.restart_index) < (b.best_loss, b.restart_index)


def multistart_search(cfg, workers=None):
    """Run seeded restarts and return the lowest-loss result.

    Restart ``k`` starts from ``default_rng(master_seed ^ k)``. Results are
    consumed in index order; with ``stop_on_success`` the search ends at the
    first successful restart and later ones are discarded, so the outcome
    does not depend on the number of workers.
    """
    workers = worker_count() if workers is None else workers
    best = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending = deque()
        next_index = 0
        while pending or next_index < cfg.restarts:
            while next_index < cfg.restarts and len(pending) < workers:
                pending.append(pool.submit(_run_restart, cfg, next_index))
                next_index += 1
            res = pending.popleft().result()
            log.debug("restart %d: loss %.3e (%s)", res.restart_index, res.best_loss, res.reason)
            if best is None or _better(res, best):
                best = res
            if cfg.stop_on_success and res.found:
                for fut in pending:
                    fut.cancel()
                break
    return best


def covariant_residual(x, y, t):
    """e_a = <x|W_a^dag|x><y|W_a|y> - t for every label a != (0, 0), row-major.

    The orbit-pair decomposition residual satisfies
    ``||residual||_F**2 = sum_a |e_a|**2 / d**2``.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    ops = context(x.shape[0]).ops[1:]
    p = np.einsum("a,kab,b->k", x.conj(), ops, x).conj()
    q = np.einsum("a,kab,b->k", y.conj(), ops, y)
    return p * q - t


def refine_sic(result, cfg=None):
    """Polish a covariant solution at t = 1/(d+1) with a single shared fiducial.

    With separate fiducials the overlaps <x_i|y_i> sit at their maximum and
    the residual only controls the SIC relations to its square root; tying
    x = y removes that degeneracy. Returns the better of the two results.
    """
    d = result.best_pair.d
    base = SearchConfig(d, 1.0 / (d + 1), "sic") if cfg is None else replace(cfg, ansatz="sic")
    x, y = result.fiducials
    # align the phase of y to x before averaging
    overlap = np.vdot(y, x)
    guess = x + y * (overlap / abs(overlap) if abs(overlap) > 0 else 1.0)
    refined = local_optimize(encode_vectors(guess[None, :]), base,
                             restart_index=result.restart_index, seed_used=result.seed_used)
    return refined if refined.best_loss <= result.best_loss or refined.found else result


def covariant_labels(d):
    return labels(d)[1:]


def covariant_search(cfg, workers=None):
    """Multistart over fiducial pairs; the result carries the expanded orbit pair."""
    if cfg.ansatz != "covariant":
        raise PreconditionError("covariant_search needs ansatz='covariant'")
    return multistart_search(cfg, workers)


def continuation_sweep(d, t_start, t_end, steps, cfg, start=None, min_step=1e-6):
    """Follow a solution branch from ``t_start`` to ``t_end``.

    ``start`` is a found :class:`SearchResult` (or its parameter vector) at
    ``t_start``. Each step reuses the last accepted solution as the initial
    point of a local solve at the next parameter. If that solve stalls at a
    stationary point it is retried once from a seeded perturbation of size
    ``JITTER``. A failed solve halves the step, and a step below ``min_step`` ends the sweep early with the
    partial branch. Returns one result per accepted parameter value,
    starting point included.
    """
    if start is None:
        raise PreconditionError(f"no solution supplied at t_start={t_start}")
    base = replace(cfg, d=d, t=t_start, restarts=1)
    if isinstance(start, SearchResult):
        if not start.found:
            raise PreconditionError("the starting result is not a solution")
        params = start.params
    else:
        params = np.asarray(start, dtype=float)
    first = local_optimize(params, base)
    if not first.found:
        raise PreconditionError(f"start does not solve t={t_start} (loss {first.best_loss:.3e})")
    branch = [first]
    nominal = (t_end - t_start) / steps
    h = nominal
    t = t_start
    params = first.params
    while (t_end - t) * np.sign(nominal) > 1e-15:
        t_next = t + h
        if (t_end - t_next) * np.sign(nominal) < 0:
            t_next = t_end
        step_cfg = replace(base, t=t_next)
        res = local_optimize(params, step_cfg)
        if not res.found and res.reason == "stationary":
            # the previous point is a saddle of the shifted loss (as at the
            # SIC endpoint, where x_i = y_i is forced); nudge it off
            rng = np.random.default_rng(restart_seed(cfg.master_seed, len(branch)))
            res = local_optimize(params + JITTER * rng.standard_normal(params.size), step_cfg)
        if res.found:
            branch.append(res)
            t, params = t_next, res.params
            h = nominal if abs(2 * h) > abs(nominal) else 2 * h
            continue
        h /= 2
        log.info("corrector failed at t=%.6g, halving step to %.3g", t_next, h)
        if abs(h) < min_step:
            log.warning("step underflow at t=%.6g; sweep aborted", t)
            break
    return branch
