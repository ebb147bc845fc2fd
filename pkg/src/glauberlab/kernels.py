"""Single-site update kernels.

A kernel maps (configuration, site) to a distribution over the q spins for
that site; rows are probability vectors that place no mass on infeasible
substitutions.  Heat-bath and Metropolis are derived from a system's
conditionals; ``flip`` and ``neighbor_difference`` are the free-coin and
contiguous-block update rules.
"""

from __future__ import annotations

import numpy as np

from .systems import CycleBlockSystem, SpinSystem, SystemError_


class UpdateKernel:
    kind = "abstract"

    def __init__(self, system: SpinSystem):
        self.system = system
        self.q = system.q

    def row(self, spins, v):
        """Distribution of the new spin at v given the current configuration."""
        raise NotImplementedError

    @property
    def descriptor(self):
        return {"kind": self.kind}


class HeatBathKernel(UpdateKernel):
    """Resample the site from its conditional distribution."""

    kind = "heat_bath"

    def row(self, spins, v):
        return self.system.conditional_at(spins, v)


class MetropolisKernel(UpdateKernel):
    """Propose a uniform spin, accept with the conditional-weight ratio.

    Off-diagonal mass to s' is min(ratio, 1)/q; infeasible proposals have
    ratio 0 and are rejected, so hard constraints are preserved.
    """

    kind = "metropolis"

    def row(self, spins, v):
        cond = self.system.conditional_at(spins, v)
        s = int(spins[v])
        cur = cond[s - 1]
        if cur <= 0.0:
            raise SystemError_("current configuration is infeasible at the chosen site")
        out = np.empty(self.q)
        for sp in range(1, self.q + 1):
            if sp == s:
                continue
            out[sp - 1] = min(cond[sp - 1] / cur, 1.0) / self.q
        out[s - 1] = 0.0
        out[s - 1] = 1.0 - out.sum()
        return out


class FlipKernel(UpdateKernel):
    """Binary-spin kernel: flip with a fixed probability, else keep."""

    kind = "flip"

    def __init__(self, system, flip_prob):
        if system.q != 2:
            raise SystemError_("flip kernels need a two-spin system")
        if not 0.0 < flip_prob <= 1.0:
            raise SystemError_(f"flip_prob must be in (0,1], got {flip_prob}")
        super().__init__(system)
        self.flip_prob = float(flip_prob)

    def row(self, spins, v):
        s = int(spins[v])
        out = np.empty(2)
        out[s - 1] = 1.0 - self.flip_prob
        out[2 - s] = self.flip_prob
        return out

    @property
    def descriptor(self):
        return {"kind": self.kind, "flip_prob": self.flip_prob}


class NeighborDifferenceKernel(UpdateKernel):
    """Contiguous-block rule on a cycle: flip the spin iff the two neighbors differ.

    Deterministic, local, and reversible with respect to the uniform law on
    the block configurations (checked in the test suite via the exact chain).
    """

    kind = "neighbor_difference"

    def __init__(self, system):
        if not isinstance(system, CycleBlockSystem):
            raise SystemError_("the neighbor-difference rule is for cycle_block systems")
        super().__init__(system)

    def row(self, spins, v):
        nb = self.system.graph.neighbors(v)
        s = int(spins[v])
        out = np.zeros(2)
        if spins[nb[0]] != spins[nb[1]]:
            out[2 - s] = 1.0
        else:
            out[s - 1] = 1.0
        return out


def heat_bath_kernel(system):
    return HeatBathKernel(system)


def metropolis_kernel(system):
    return MetropolisKernel(system)


def flip_kernel(system, flip_prob=None):
    if flip_prob is None:
        flip_prob = getattr(system, "flip_prob", None)
    if flip_prob is None:
        raise SystemError_("flip kernels need flip_prob")
    return FlipKernel(system, flip_prob)


def neighbor_difference_kernel(system):
    return NeighborDifferenceKernel(system)


def make_kernel(system, spec):
    """Kernel from a JSON fragment, e.g. {"kernel": "heat_bath"}."""
    if isinstance(spec, str):
        spec = {"kernel": spec}
    kind = spec.get("kernel")
    if kind == "heat_bath":
        return heat_bath_kernel(system)
    if kind == "metropolis":
        return metropolis_kernel(system)
    if kind == "flip":
        return flip_kernel(system, spec.get("flip_prob"))
    if kind == "neighbor_difference":
        return neighbor_difference_kernel(system)
    raise SystemError_(f"unknown kernel kind {kind!r}")
