"""Spin spaces, feasibility, stationary weights and per-site conditionals.

A configuration is an ``np.int8`` array of spins ``1..q`` indexed by vertex.
Weights are handled in log space throughout (``-inf`` marks infeasible), so
large couplings do not overflow.  Built-in systems:

* ``ising``        -- spins {1,2} mapped to {-1,+1}, coupling ``beta``, field ``h``
* ``hardcore``     -- independent sets, spin 2 = occupied, activity ``lam``
* ``coloring``     -- proper q-colorings, uniform
* ``cycle_block``  -- on a cycle, spin-1 sites form one contiguous block
* ``product_coin`` -- free binary spins, uniform product measure
* ``custom``       -- user-supplied weight oracle
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph

DEFAULT_ENUM_CAP = 2_000_000
_NODE_BUDGET = 20_000_000


class SystemError_(ValueError):
    pass


class EmptySystemError(SystemError_):
    """No feasible configuration exists."""


class StateSpaceTooLarge(SystemError_):
    """Enumeration would exceed the requested cap."""


@dataclass(frozen=True)
class SpinSpace:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise SystemError_(f"spin space needs size >= 1, got {self.size}")

    @property
    def spins(self):
        return range(1, self.size + 1)


def as_config(values):
    arr = np.asarray(values, dtype=np.int8)
    if arr.ndim != 1:
        raise SystemError_("configurations are one-dimensional")
    return arr


class SpinSystem:
    """Base class; subclasses fill in weights and (optionally) local rules."""

    kind = "abstract"
    markov_field = False

    def __init__(self, graph: Graph, q: int):
        self.graph = graph
        self.space = SpinSpace(q)
        self.q = q

    # -- weights ------------------------------------------------------------

    def log_weight(self, spins) -> float:
        raise NotImplementedError

    def is_feasible(self, spins) -> bool:
        return self.log_weight(spins) != -math.inf

    def check_config(self, spins):
        spins = as_config(spins)
        if spins.size != self.graph.n:
            raise SystemError_(
                f"configuration length {spins.size} != vertex count {self.graph.n}")
        if spins.min() < 1 or spins.max() > self.q:
            raise SystemError_("spin out of range")
        return spins

    # -- conditionals ---------------------------------------------------------

    def conditional_at(self, spins, v):
        """Distribution of the spin at v given the rest of the configuration.

        Defined as the ratio of global weights over the q substitutions at v;
        for Markov-field systems the local overrides agree with this exactly.
        """
        work = np.array(spins, dtype=np.int8)
        logs = np.empty(self.q)
        for s in range(1, self.q + 1):
            work[v] = s
            logs[s - 1] = self.log_weight(work)
        top = logs.max()
        if top == -math.inf:
            raise SystemError_(f"no feasible spin at site {v}")
        probs = np.exp(logs - top)
        return probs / probs.sum()

    def feasible_spins_at(self, spins, v):
        work = np.array(spins, dtype=np.int8)
        out = []
        for s in range(1, self.q + 1):
            work[v] = s
            if self.is_feasible(work):
                out.append(s)
        return out

    def frozen_sites(self, spins):
        """Sites whose current spin is the only feasible value."""
        spins = self.check_config(spins)
        if not self.is_feasible(spins):
            raise SystemError_("frozen_sites needs a feasible configuration")
        return frozenset(
            v for v in range(self.graph.n)
            if len(self.feasible_spins_at(spins, v)) == 1
        )

    # -- enumeration ----------------------------------------------------------

    def _prefix_ok(self, spins, upto):
        """May a partial assignment of sites 0..upto still be feasible?

        Sound but not necessarily complete pruning; the leaf test decides.
        """
        return True

    def enumerate_feasible(self, cap=DEFAULT_ENUM_CAP):
        """All feasible configurations in lexicographic order.

        Raises StateSpaceTooLarge instead of truncating when the state space
        (or, for systems without usable pruning, the search tree) exceeds
        its budget.
        """
        n = self.graph.n
        spins = np.ones(n, dtype=np.int8)
        out = []
        nodes = 0

        def rec(i):
            nonlocal nodes
            if i == n:
                if self.is_feasible(spins):
                    if len(out) >= cap:
                        raise StateSpaceTooLarge(
                            f"more than cap={cap} feasible configurations")
                    out.append(spins.copy())
                return
            for s in range(1, self.q + 1):
                spins[i] = s
                nodes += 1
                if nodes > _NODE_BUDGET:
                    raise StateSpaceTooLarge(
                        "enumeration search tree exceeds node budget")
                if self._prefix_ok(spins, i):
                    rec(i + 1)
            spins[i] = 1

        rec(0)
        return out

    def base_feasible(self):
        """Lexicographically first feasible configuration (greedy, lowest spin first)."""
        n = self.graph.n
        spins = np.ones(n, dtype=np.int8)
        nodes = 0

        def rec(i):
            nonlocal nodes
            if i == n:
                return self.is_feasible(spins)
            for s in range(1, self.q + 1):
                spins[i] = s
                nodes += 1
                if nodes > _NODE_BUDGET:
                    raise StateSpaceTooLarge("feasibility search exceeds node budget")
                if self._prefix_ok(spins, i) and rec(i + 1):
                    return True
            spins[i] = 1
            return False

        if not rec(0):
            raise EmptySystemError(f"{self.kind}: no feasible configuration")
        return spins


class IsingSystem(SpinSystem):
    """Two-spin system with pair coupling beta and external field.

    Spins 1,2 encode -1,+1.  ``field`` may be a scalar or a per-site array
    (per-site fields absorb fixed-boundary effects).
    """

    kind = "ising"
    markov_field = True

    def __init__(self, graph, beta, field=0.0):
        super().__init__(graph, 2)
        self.beta = float(beta)
        self.field = np.broadcast_to(np.asarray(field, dtype=float), (graph.n,)).copy()

    def _pm(self, spins):
        return spins.astype(np.float64) * 2.0 - 3.0

    def log_weight(self, spins):
        spins = self.check_config(spins)
        pm = self._pm(spins)
        g = self.graph
        # each undirected edge appears twice among directed entries
        pair = 0.5 * float(np.dot(pm[g.edge_rows()], pm[g.indices])) if g.indices.size else 0.0
        return self.beta * (pair + float(self.field @ pm))

    def conditional_at(self, spins, v):
        nb = self.graph.neighbors(v)
        s_nb = float(np.sum(spins[nb] * 2.0 - 3.0)) if nb.size else 0.0
        x = 2.0 * self.beta * (s_nb + self.field[v])
        p_plus = 1.0 / (1.0 + math.exp(-x))
        return np.array([1.0 - p_plus, p_plus])

    def feasible_spins_at(self, spins, v):
        return [1, 2]

    def frozen_sites(self, spins):
        return frozenset()


class HardCoreSystem(SpinSystem):
    """Independent sets weighted by activity^occupied; spin 2 = occupied."""

    kind = "hardcore"
    markov_field = True

    def __init__(self, graph, lam):
        if lam <= 0:
            raise SystemError_(f"activity must be positive, got {lam}")
        super().__init__(graph, 2)
        self.lam = float(lam)
        self.log_lam = math.log(self.lam)

    def log_weight(self, spins):
        spins = self.check_config(spins)
        occ = spins == 2
        g = self.graph
        if occ.any() and g.indices.size and np.any(occ[g.indices] & occ[g.edge_rows()]):
            return -math.inf
        return float(occ.sum()) * self.log_lam

    def conditional_at(self, spins, v):
        nb = self.graph.neighbors(v)
        if nb.size and np.any(spins[nb] == 2):
            return np.array([1.0, 0.0])
        p_occ = self.lam / (1.0 + self.lam)
        return np.array([1.0 - p_occ, p_occ])

    def _prefix_ok(self, spins, upto):
        if spins[upto] != 2:
            return True
        nb = self.graph.neighbors(upto)
        return not np.any(spins[nb[nb < upto]] == 2)


class ColoringSystem(SpinSystem):
    """Uniform distribution over proper q-colorings."""

    kind = "coloring"
    markov_field = True

    def __init__(self, graph, q):
        if q < 2:
            raise SystemError_(f"colorings need q >= 2, got {q}")
        super().__init__(graph, q)

    def log_weight(self, spins):
        spins = self.check_config(spins)
        g = self.graph
        if g.indices.size and np.any(spins[g.indices] == spins[g.edge_rows()]):
            return -math.inf
        return 0.0

    def conditional_at(self, spins, v):
        nb = self.graph.neighbors(v)
        allowed = np.ones(self.q, dtype=bool)
        for w in nb:
            allowed[spins[w] - 1] = False
        k = int(allowed.sum())
        if k == 0:
            raise SystemError_(f"no feasible color at site {v}")
        return allowed.astype(float) / k

    def feasible_spins_at(self, spins, v):
        nb = self.graph.neighbors(v)
        used = set(int(spins[w]) for w in nb)
        return [s for s in range(1, self.q + 1) if s not in used]

    def _prefix_ok(self, spins, upto):
        nb = self.graph.neighbors(upto)
        return not np.any(spins[nb[nb < upto]] == spins[upto])


class ProductCoinSystem(SpinSystem):
    """Uniform product measure on binary spins; updates are coin flips.

    ``flip_prob`` parameterizes the flip update rule associated with this
    system (1/2 reproduces the heat-bath coin).
    """

    kind = "product_coin"
    markov_field = True

    def __init__(self, graph, flip_prob=0.5):
        if not 0.0 < flip_prob <= 1.0:
            raise SystemError_(f"flip_prob must be in (0,1], got {flip_prob}")
        super().__init__(graph, 2)
        self.flip_prob = float(flip_prob)

    def log_weight(self, spins):
        self.check_config(spins)
        return 0.0

    def conditional_at(self, spins, v):
        return np.array([0.5, 0.5])

    def feasible_spins_at(self, spins, v):
        return [1, 2]

    def frozen_sites(self, spins):
        return frozenset()


class CycleBlockSystem(SpinSystem):
    """Uniform over cycle configurations whose spin-1 sites form one block.

    The block has length 1..n-1, so the measure is visibly non-local: whether
    a far-away spin may change depends on the whole block layout.
    """

    kind = "cycle_block"
    markov_field = False

    def __init__(self, graph):
        if graph.kind != "cycle":
            raise SystemError_("cycle_block systems require a cycle graph")
        super().__init__(graph, 2)

    def log_weight(self, spins):
        spins = self.check_config(spins)
        n = self.graph.n
        ones = int(np.sum(spins == 1))
        if not 1 <= ones <= n - 1:
            return -math.inf
        changes = int(np.sum(spins != np.roll(spins, -1)))
        return 0.0 if changes == 2 else -math.inf

    def enumerate_feasible(self, cap=DEFAULT_ENUM_CAP):
        n = self.graph.n
        if n * (n - 1) > cap:
            raise StateSpaceTooLarge(f"more than cap={cap} feasible configurations")
        out = []
        for start in range(n):
            for length in range(1, n):
                spins = np.full(n, 2, dtype=np.int8)
                for k in range(length):
                    spins[(start + k) % n] = 1
                out.append(spins)
        out.sort(key=lambda a: a.tobytes())
        return out


class CustomSystem(SpinSystem):
    """System defined by a caller-supplied weight oracle.

    Exactly one of ``weight`` (nonnegative, 0 = infeasible) or ``log_weight``
    (-inf = infeasible) must be given.
    """

    kind = "custom"

    def __init__(self, graph, q, weight=None, log_weight=None, markov_field=False):
        if (weight is None) == (log_weight is None):
            raise SystemError_("custom systems need exactly one of weight/log_weight")
        super().__init__(graph, q)
        self._weight = weight
        self._log_weight = log_weight
        self.markov_field = markov_field

    def log_weight(self, spins):
        spins = self.check_config(spins)
        if self._log_weight is not None:
            return float(self._log_weight(spins))
        w = float(self._weight(spins))
        if w < 0:
            raise SystemError_("weights must be nonnegative")
        return math.log(w) if w > 0 else -math.inf


class PinnedSystem(SpinSystem):
    """A system with some sites pinned to fixed spins (boundary conditions).

    The weight is the base weight when the pinned sites match and -inf
    otherwise, so conditionals and enumeration range over the free sites only.
    """

    kind = "pinned"

    def __init__(self, base: SpinSystem, pinned: dict):
        super().__init__(base.graph, base.q)
        self.base = base
        self.pinned = {int(v): int(s) for v, s in pinned.items()}
        for v, s in self.pinned.items():
            if not 0 <= v < base.graph.n:
                raise SystemError_(f"pinned site {v} out of range")
            if not 1 <= s <= base.q:
                raise SystemError_(f"pinned spin {s} out of range")
        self.free_sites = [v for v in range(base.graph.n) if v not in self.pinned]
        self.markov_field = base.markov_field
        self.kind = f"pinned:{base.kind}"

    def log_weight(self, spins):
        spins = self.check_config(spins)
        for v, s in self.pinned.items():
            if spins[v] != s:
                return -math.inf
        return self.base.log_weight(spins)

    def conditional_at(self, spins, v):
        if v in self.pinned:
            out = np.zeros(self.q)
            out[self.pinned[v] - 1] = 1.0
            return out
        return self.base.conditional_at(spins, v)

    def feasible_spins_at(self, spins, v):
        if v in self.pinned:
            return [self.pinned[v]]
        return self.base.feasible_spins_at(spins, v)

    def _prefix_ok(self, spins, upto):
        if upto in self.pinned and spins[upto] != self.pinned[upto]:
            return False
        return self.base._prefix_ok(spins, upto)

    def enumerate_feasible(self, cap=DEFAULT_ENUM_CAP):
        spins = np.ones(self.graph.n, dtype=np.int8)
        for v, s in self.pinned.items():
            spins[v] = s
        out = []
        free = self.free_sites
        nodes = 0

        def rec(k):
            nonlocal nodes
            if k == len(free):
                if self.base.is_feasible(spins):
                    if len(out) >= cap:
                        raise StateSpaceTooLarge(
                            f"more than cap={cap} feasible configurations")
                    out.append(spins.copy())
                return
            i = free[k]
            for s in range(1, self.q + 1):
                spins[i] = s
                nodes += 1
                if nodes > _NODE_BUDGET:
                    raise StateSpaceTooLarge("enumeration exceeds node budget")
                if self.base._prefix_ok(spins, i):
                    rec(k + 1)
            spins[i] = 1

        rec(0)
        return out

    def base_feasible(self):
        spins = np.ones(self.graph.n, dtype=np.int8)
        for v, s in self.pinned.items():
            spins[v] = s
        free = self.free_sites
        nodes = 0

        def rec(k):
            nonlocal nodes
            if k == len(free):
                return self.base.is_feasible(spins)
            i = free[k]
            for s in range(1, self.q + 1):
                spins[i] = s
                nodes += 1
                if nodes > _NODE_BUDGET:
                    raise StateSpaceTooLarge("feasibility search exceeds node budget")
                if self.base._prefix_ok(spins, i) and rec(k + 1):
                    return True
            spins[i] = 1
            return False

        if not rec(0):
            raise EmptySystemError("pinned system has no feasible configuration")
        return spins


def make_system(kind, graph, **params):
    """Build one of the named systems and certify its feasible set is nonempty."""
    if kind == "ising":
        sys_ = IsingSystem(graph, beta=params.get("beta", 1.0), field=params.get("field", 0.0))
    elif kind == "hardcore":
        sys_ = HardCoreSystem(graph, lam=params.get("lam", 1.0))
    elif kind == "coloring":
        sys_ = ColoringSystem(graph, q=params.get("q", 3))
    elif kind == "cycle_block":
        sys_ = CycleBlockSystem(graph)
    elif kind == "product_coin":
        sys_ = ProductCoinSystem(graph, flip_prob=params.get("flip_prob", 0.5))
    elif kind == "custom":
        sys_ = CustomSystem(graph, **params)
    else:
        raise SystemError_(f"unknown system kind {kind!r}")
    sys_.base_feasible()  # raises EmptySystemError when Omega is empty
    return sys_


def system_from_spec(graph, spec):
    """Load a system from its JSON form, e.g. {"system":"ising","beta":0.5}."""
    if not isinstance(spec, dict) or "system" not in spec:
        raise SystemError_(f"bad system spec: {spec!r}")
    kind = spec["system"]
    params = {k: v for k, v in spec.items() if k != "system"}
    if kind == "ising":
        params.setdefault("beta", 1.0)
        params["field"] = params.pop("field", params.pop("h", 0.0))
    if kind == "hardcore" and "lambda" in params:
        params["lam"] = params.pop("lambda")
    if kind == "custom":
        raise SystemError_("custom systems are library-only, not loadable from JSON")
    return make_system(kind, graph, **params)


@dataclass
class NonredundancyReport:
    per_site: list
    passed: bool


def check_nonredundancy(system, cap=DEFAULT_ENUM_CAP):
    """Per-site check that at least two spins occur among feasible configurations."""
    n = system.graph.n
    if isinstance(system, (IsingSystem, ProductCoinSystem)):
        return NonredundancyReport([True] * n, True)
    if isinstance(system, HardCoreSystem):
        # every site is occupied in its own singleton set and empty in the empty set
        return NonredundancyReport([True] * n, True)
    if isinstance(system, ColoringSystem) and system.q >= system.graph.max_degree + 1:
        base = system.base_feasible()
        ok = [len(system.feasible_spins_at(base, v)) >= 2 for v in range(n)]
        if all(ok):
            return NonredundancyReport(ok, True)
    states = system.enumerate_feasible(cap=cap)
    seen = [set() for _ in range(n)]
    for cfg in states:
        for v in range(n):
            seen[v].add(int(cfg[v]))
    per_site = [len(s) >= 2 for s in seen]
    return NonredundancyReport(per_site, all(per_site))


def fold_ising_boundary(system: IsingSystem, pinned: dict):
    """Fold pinned spins of an Ising system into per-site fields.

    Returns (subsystem on the induced free-site subgraph, free-site ids).
    The subsystem's conditionals agree with pinning the original system.
    """
    if not isinstance(system, IsingSystem):
        raise SystemError_("boundary folding applies to Ising systems")
    g = system.graph
    free = [v for v in range(g.n) if v not in pinned]
    index = {v: i for i, v in enumerate(free)}
    edges = []
    field = []
    for v in free:
        h_v = system.field[v]
        for w in g.neighbors(v):
            w = int(w)
            if w in pinned:
                h_v += float(pinned[w] * 2 - 3)
            elif w in index and v < w:
                edges.append((index[v], index[w]))
        field.append(h_v)
    sub = Graph(len(free), edges, kind="induced", params={"of": g.kind})
    return IsingSystem(sub, beta=system.beta, field=np.array(field)), free
