"""
Internal branch-and-bound for weighted set cover.

Incumbent: greedy cost-per-new-element with redundancy removal, rerun at every node on the
Lagrangian reduced costs.  Bounds: dual ascent at the root, then Lagrangian subgradient iterations
on the uncovered residual, warm started from the parent multipliers.  Dominated sets are dropped
at the root and reduced-cost fixing shrinks every node.  Branching picks the free set whose
averaged Lagrangian primal value is closest to 0.5 and explores the 1-branch first, depth first,
jumping back to the best open bound every few hundred nodes.
"""

import logging
import math
import time

import numpy as np

from .problem import CoverProblem, CoverSolution, CoverStatus

logger = logging.getLogger(__name__)

FREE, OUT, IN = -1, 0, 1

ROOT_ITERATIONS = 300
NODE_ITERATIONS = 30
MAX_NODE_ITERATIONS = 240
RESTART_EVERY = 250
DOMINANCE_BLOCK = 256

class _Search(object):

    def __init__(self, problem: CoverProblem, time_limit: float, gap_limit: float) -> None:
        self.problem = problem
        self.ids = problem.set_ids()
        try:
            order = sorted(range(len(self.ids)), key=lambda j: self.ids[j])
        except TypeError:
            order = list(range(len(self.ids)))
        self.rank = np.empty(len(self.ids), dtype=int)
        self.rank[order] = np.arange(len(self.ids))
        self.A = problem.incidence(self.ids) > 0
        self.Af = self.A.astype(float)
        self.w = np.array([problem.weights[sid] for sid in self.ids], dtype=float)
        self.bus = np.array([sid in problem.bus_sets for sid in self.ids], dtype=bool)
        self.limit = problem.fleet_limit
        self.integral = bool(np.all(np.abs(self.w - np.round(self.w)) < 1e-9))
        self.time_limit = time_limit
        self.gap_limit = gap_limit
        self.started = time.monotonic()

        self.best = math.inf
        self.best_mask = None
        self.history = []
        self.nodes = 0
        self.gap_pruned = math.inf
        self.node_iterations = NODE_ITERATIONS

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def tol(self) -> float:
        if not math.isfinite(self.best):
            return 0.0
        return 1e-9 * max(1.0, abs(self.best))

    def offer(self, mask) -> None:
        value = float(self.w[mask].sum())
        if not math.isfinite(self.best) or value < self.best - self.tol():
            self.best = value
            self.best_mask = mask.copy()
            self.history.append({"nodes": self.nodes, "time": round(self.elapsed(), 6), "objective": value})
            logger.debug(f"New incumbent {value:.4f} at node {self.nodes}")

    def round_bound(self, bound: float) -> float:
        if self.integral and math.isfinite(bound):
            return float(math.ceil(bound - 1e-6))
        return bound

    def prunable(self, bound: float) -> bool:
        if not math.isfinite(self.best):
            return False
        if self.gap_limit > 0:
            return bound >= self.best * (1.0 - self.gap_limit) - self.tol()
        return bound >= self.best - self.tol()

    def prune(self, bound: float) -> bool:
        """prunable, remembering bounds cut off only by the gap limit."""
        if not self.prunable(bound):
            return False
        if bound < self.best - self.tol():
            self.gap_pruned = min(self.gap_pruned, bound)
        return True

    def drop_dominated(self, status) -> int:
        """
        Fix out every free set contained in another available set of no greater weight (and no
        more buses under a fleet limit).  Ties go to the larger set, then the lower id.
        """
        avail = np.flatnonzero(status != OUT)
        free = np.flatnonzero(status == FREE)
        if avail.size < 2 or free.size == 0:
            return 0
        size = self.Af.sum(axis=0)
        fleet = self.limit is not None
        # strict order key; smaller dominates
        key = np.lexsort((self.rank[avail], self.bus[avail] if fleet else np.zeros(avail.size), -size[avail],
                          self.w[avail]))
        position = np.empty(avail.size, dtype=int)
        position[key] = np.arange(avail.size)
        where = {int(j): k for k, j in enumerate(avail)}

        dropped = []
        for start in range(0, free.size, DOMINANCE_BLOCK):
            block = free[start:start + DOMINANCE_BLOCK]
            inter = self.Af[:, block].T @ self.Af[:, avail]
            contains = np.abs(inter - size[block][:, None]) < 0.5
            cheaper = self.w[avail][None, :] <= self.w[block][:, None] + 1e-12
            before = position[None, :] < np.array([position[where[int(j)]] for j in block])[:, None]
            dominated = contains & cheaper & before
            if fleet:
                dominated &= ~self.bus[avail][None, :] | self.bus[block][:, None]
            dropped.extend(int(j) for j in block[dominated.any(axis=1)])
        if dropped:
            status[dropped] = OUT
            logger.debug(f"Dropped {len(dropped)} dominated sets")
        return len(dropped)

    def propagate(self, status) -> bool:
        """Unit propagation and fleet saturation.  Returns False when the node is infeasible."""
        while True:
            changed = False
            chosen = status == IN
            if self.limit is not None:
                used = int((chosen & self.bus).sum())
                if used > self.limit:
                    return False
                if used == self.limit:
                    saturate = (status == FREE) & self.bus
                    if saturate.any():
                        status[saturate] = OUT
            free = status == FREE
            uncovered = ~self.A[:, chosen].any(axis=1)
            if not uncovered.any():
                return True
            sub = self.A[np.ix_(uncovered, free)]
            counts = sub.sum(axis=1)
            if (counts == 0).any():
                return False
            free_idx = np.flatnonzero(free)
            useless = free_idx[~sub.any(axis=0)]
            if useless.size:
                status[useless] = OUT
            forced = np.flatnonzero(counts == 1)
            if forced.size:
                for row in forced:
                    status[free_idx[np.flatnonzero(sub[row])[0]]] = IN
                changed = True
            if not changed:
                return True

    def greedy(self, status, costs=None):
        """
        Greedy completion of the fixed-in sets; None if the fleet limit blocks it.
        costs replaces the weights when ranking candidates (Lagrangian reduced costs).
        """
        price = self.w if costs is None else costs
        chosen = status == IN
        uncovered = ~self.A[:, chosen].any(axis=1)
        used = int((chosen & self.bus).sum())
        while uncovered.any():
            avail = (status == FREE) & ~chosen
            if self.limit is not None and used >= self.limit:
                avail &= ~self.bus
            gain = self.Af[uncovered].sum(axis=0)
            gain[~avail] = 0
            if gain.max() <= 0:
                return None
            cand = np.flatnonzero(gain > 0)
            ratio = price[cand] / gain[cand]
            j = cand[np.lexsort((self.rank[cand], self.w[cand], -gain[cand], ratio))[0]]
            chosen[j] = True
            used += int(self.bus[j])
            uncovered &= ~self.A[:, j]
        # redundancy removal, most expensive first
        removable = np.flatnonzero(chosen & (status != IN))
        for j in removable[np.lexsort((-self.rank[removable], -self.w[removable]))]:
            chosen[j] = False
            if not self.A[:, chosen].any(axis=1).all():
                chosen[j] = True
        return chosen

    def lagrangian(self, status, iterations: int, start=None):
        """
        Lower bound on the best completion of a node.  Any non-negative multiplier vector gives a
        valid bound.

        :param start: multipliers over all elements to warm start from, dual ascent when None
        :return: (rounded bound, raw bound, free set indices, averaged primal of the free sets,
                  residual coverage of the free sets, best multipliers over all elements,
                  reduced costs of the free sets at those multipliers)
        """
        chosen = status == IN
        fixed_cost = float(self.w[chosen].sum())
        uncovered = ~self.A[:, chosen].any(axis=1)
        free_idx = np.flatnonzero(status == FREE)
        A = self.Af[np.ix_(uncovered, free_idx)]
        w = self.w[free_idx]

        if start is None:
            # dual ascent; rarely covered elements first
            u = np.zeros(A.shape[0])
            slack = w.copy()
            for i in np.argsort(A.sum(axis=1), kind="stable"):
                cols = A[i] > 0
                raise_by = slack[cols].min()
                u[i] += raise_by
                slack -= raise_by * A[i]
            lam = 2.0
        else:
            u = start[uncovered].copy()
            lam = 1.0

        rc = w - A.T @ u
        best = float(u.sum() + rc[rc < 0].sum())
        best_u = u.copy()
        xbar = np.zeros(len(free_idx))

        target = self.best - fixed_cost if math.isfinite(self.best) else float(w.sum())
        stall = 0
        for it in range(iterations):
            rc = w - A.T @ u
            x = rc < 0
            value = float(u.sum() + rc[x].sum())
            xbar += (x.astype(float) - xbar) / (it + 1)
            if value > best + 1e-12:
                best, best_u, stall = value, u.copy(), 0
            else:
                stall += 1
                if stall >= 5:
                    lam, stall = lam / 2.0, 0
            g = 1.0 - A @ x.astype(float)
            norm = float(g @ g)
            if norm == 0 or lam < 1e-4:
                break
            if self.prunable(self.round_bound(fixed_cost + best)):
                break
            step = lam * max(target - value, 1e-6 * max(1.0, abs(target))) / norm
            u = np.maximum(0.0, u + step * g)

        multipliers = np.zeros(self.A.shape[0])
        multipliers[uncovered] = best_u
        raw = fixed_cost + best
        return (self.round_bound(raw), raw, free_idx, xbar, A.sum(axis=0), multipliers,
                w - A.T @ best_u)

    def fix_by_reduced_cost(self, status, raw: float, free_idx, rc) -> int:
        """
        Forcing a set in raises the bound by its positive reduced cost, forcing it out by the
        magnitude of a negative one.  Fix every set whose forced branch is already prunable.
        """
        if not math.isfinite(self.best) or free_idx.size == 0:
            return 0
        fixed = 0
        for j, r in zip(free_idx, rc):
            if abs(r) < 1e-12:
                continue
            if self.prune(self.round_bound(raw + abs(r))):
                status[j] = OUT if r > 0 else IN
                fixed += 1
        return fixed

    def branch_var(self, free_idx, xbar, coverage) -> int:
        weight = self.w[free_idx]
        with np.errstate(divide="ignore"):
            density = np.where(weight > 0, coverage / np.where(weight > 0, weight, 1.0), np.inf)
        score = np.abs(xbar - 0.5)
        pick = np.lexsort((self.rank[free_idx], -density, np.round(score, 12)))[0]
        return int(free_idx[pick])

    def adapt_iterations(self, bound: float, parent_bound: float) -> None:
        """More subgradient steps while children stop raising the bound, fewer once they do."""
        if bound <= parent_bound + self.tol():
            self.node_iterations = min(2 * self.node_iterations, MAX_NODE_ITERATIONS)
        else:
            self.node_iterations = max(self.node_iterations // 2, NODE_ITERATIONS)

    def run(self, root_status):
        status = root_status.copy()
        if not self.propagate(status):
            return None
        mask = self.greedy(status)
        if mask is not None:
            self.offer(mask)
        self.drop_dominated(status)
        if not self.propagate(status):
            return None

        stack = [(status, -math.inf, None)]
        completed = True
        while stack:
            if self.elapsed() > self.time_limit:
                completed = False
                logger.warning(f"Cover search hit the {self.time_limit}s time limit after {self.nodes} nodes")
                break
            if self.nodes and self.nodes % RESTART_EVERY == 0 and len(stack) > 1:
                pos = min(range(len(stack)), key=lambda k: stack[k][1])
                stack.append(stack.pop(pos))
            status, parent_bound, start = stack.pop()
            self.nodes += 1
            if self.prune(parent_bound):
                continue
            if not self.propagate(status):
                continue
            chosen = status == IN
            if self.A[:, chosen].any(axis=1).all():
                self.offer(chosen)
                continue
            root = self.nodes == 1
            iterations = ROOT_ITERATIONS if root else self.node_iterations
            bound, raw, free_idx, xbar, coverage, u, rc = self.lagrangian(status, iterations, start)
            if not root and math.isfinite(parent_bound):
                self.adapt_iterations(bound, parent_bound)
            bound = max(bound, parent_bound)
            if root:
                logger.info(f"Root bound {bound:.4f}, greedy incumbent {self.best:.4f}")
            if self.prune(bound):
                continue
            for costs in (None, self._priced(free_idx, rc)):
                mask = self.greedy(status, costs)
                if mask is not None:
                    self.offer(mask)
            if self.prune(bound):
                continue
            if self.fix_by_reduced_cost(status, raw, free_idx, rc):
                # re-evaluate the smaller node
                stack.append((status, bound, u))
                continue
            j = self.branch_var(free_idx, xbar, coverage)
            zero, one = status.copy(), status.copy()
            zero[j], one[j] = OUT, IN
            stack.append((zero, bound, u))
            stack.append((one, bound, u))

        open_bound = min((b for _, b, _ in stack), default=math.inf)
        return min(self.best, open_bound, self.gap_pruned), completed

    def _priced(self, free_idx, rc):
        costs = self.w.copy()
        costs[free_idx] = np.maximum(rc, 0.0)
        return costs

def _status_array(search: _Search, fixed_in, fixed_out) -> np.ndarray:
    status = np.full(len(search.ids), FREE, dtype=np.int8)
    pos = {sid: j for j, sid in enumerate(search.ids)}
    for sid in fixed_out:
        status[pos[sid]] = OUT
    for sid in fixed_in:
        status[pos[sid]] = IN
    return status

def greedy_cover(problem: CoverProblem):
    """Greedy weighted cover with redundancy removal, or None when no feasible cover exists."""
    search = _Search(problem, math.inf, 0.0)
    status = _status_array(search, (), ())
    if not search.propagate(status):
        return None
    mask = search.greedy(status)
    return None if mask is None else tuple(sid for sid, keep in zip(search.ids, mask) if keep)

def solve_cover(problem: CoverProblem, time_limit: float = 3600.0, gap_limit: float = 0.0,
                fixed_in=(), fixed_out=()) -> CoverSolution:
    """
    Solve the weighted set cover to optimality, or to the requested relative gap.

    :param problem: cover instance
    :param time_limit: wall clock seconds before returning the incumbent
    :param gap_limit: relative optimality gap accepted, 0 for proven optimality
    :param fixed_in: set ids forced into the cover
    :param fixed_out: set ids excluded from the cover
    :return: CoverSolution; status infeasible names uncovered elements
    """
    fixed_in, fixed_out = tuple(fixed_in), tuple(fixed_out)
    if set(fixed_in) & set(fixed_out):
        raise ValueError("A set cannot be both fixed in and fixed out.")
    if not 0 <= gap_limit < 1:
        raise ValueError(f"gap_limit must be in [0, 1), got {gap_limit}")

    excluded = set(fixed_out)
    reachable = set()
    for sid, members in problem.sets.items():
        if sid not in excluded:
            reachable |= members
    uncovered = tuple(e for e in problem.elements if e not in reachable)
    if uncovered:
        logger.error(f"{len(uncovered)} elements are in no available set")
        return CoverSolution(chosen=(), objective=math.inf, status=CoverStatus.INFEASIBLE,
                             gap=math.inf, bound=math.inf, uncovered=uncovered)

    search = _Search(problem, time_limit, gap_limit)
    result = search.run(_status_array(search, fixed_in, fixed_out))
    if result is None or search.best_mask is None:
        logger.warning("No cover satisfies the fixings and fleet limit")
        return CoverSolution(chosen=(), objective=math.inf, status=CoverStatus.INFEASIBLE,
                             gap=math.inf, bound=math.inf, nodes=search.nodes)

    bound, completed = result
    bound = min(search.round_bound(bound), search.best)
    chosen = tuple(sid for sid, keep in zip(search.ids, search.best_mask) if keep)
    objective = search.best
    gap = 0.0 if objective == 0 else max(0.0, (objective - bound) / abs(objective))
    if completed and gap <= 1e-9:
        status = CoverStatus.OPTIMAL
        gap = 0.0
    else:
        status = CoverStatus.FEASIBLE_GAP
    solution = CoverSolution(chosen=chosen, objective=objective, status=status, gap=gap, bound=bound,
                             history=search.history, nodes=search.nodes)
    logger.info(f"{solution} in {search.elapsed():.3f}s")
    return solution
