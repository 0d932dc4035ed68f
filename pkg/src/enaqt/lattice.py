"""Declarative waveguide networks and their tight-binding Hamiltonians.

A network is a set of single-mode waveguides (sites) with per-site
propagation-constant offsets (detunings) and pairwise evanescent couplings,
plus an optional absorbing sink realised as a linear chain of tightly
coupled guides hanging off the target site.  All entries are wavelength
dependent through a :class:`DispersionModel`; the Hamiltonian at a given
wavelength is a real-symmetric matrix in cm^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Tuple

import numpy as np

DETUNING_LAWS = ("inverse-lambda", "constant")


@dataclass(frozen=True)
class DispersionModel:
    """Wavelength dependence of detunings and couplings.

    Detunings scale by ``lambda0/lambda`` under the "inverse-lambda" law
    (constant effective-index difference) or stay fixed under "constant".
    Couplings scale as ``exp(slope * (lambda - lambda0))``.  The coupling
    slope is a configurable stand-in; there is no measured dispersion for
    the couplings, so treat the default as a placeholder.
    """

    lambda0_nm: float = 792.5
    beta0_per_cm: float = 0.0
    detuning0_per_cm: float = 1.0
    detuning_law: str = "inverse-lambda"
    coupling_slope_per_nm: float = 0.01

    def __post_init__(self):
        if self.lambda0_nm <= 0:
            raise ValueError(f"lambda0_nm must be positive, got {self.lambda0_nm}")
        if self.detuning_law not in DETUNING_LAWS:
            raise ValueError(
                f"detuning_law must be one of {DETUNING_LAWS}, got {self.detuning_law!r}"
            )

    def detuning_scale(self, wavelength_nm: float) -> float:
        """Multiplier applied to every site detuning at this wavelength."""
        if wavelength_nm <= 0:
            raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
        if self.detuning_law == "inverse-lambda":
            return self.lambda0_nm / wavelength_nm
        return 1.0

    def coupling_scale(self, wavelength_nm: float) -> float:
        """Multiplier applied to every coupling at this wavelength."""
        if wavelength_nm <= 0:
            raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
        return math.exp(self.coupling_slope_per_nm * (wavelength_nm - self.lambda0_nm))

    def detuning_at(self, wavelength_nm: float) -> float:
        return self.detuning0_per_cm * self.detuning_scale(wavelength_nm)


@dataclass(frozen=True)
class SinkSpec:
    """Absorbing reservoir: a chain of n_sink guides coupled at c_sink,
    attached to the target site through c_trap."""

    n_sink: int = 90
    c_trap_per_cm: float = 1.5
    c_sink_per_cm: float = 1.75

    def __post_init__(self):
        if self.n_sink < 1:
            raise ValueError(f"n_sink must be >= 1, got {self.n_sink}")
        if self.c_trap_per_cm <= 0:
            raise ValueError(f"c_trap_per_cm must be positive, got {self.c_trap_per_cm}")
        if self.c_sink_per_cm <= 0:
            raise ValueError(f"c_sink_per_cm must be positive, got {self.c_sink_per_cm}")


@dataclass(frozen=True)
class NetworkSpec:
    """Declarative description of a waveguide network.

    Site indices are 0-based.  ``couplings`` lists each unordered pair once;
    ``site_detunings`` lists only sites with a nonzero offset.  ``input_site``
    and ``target_site`` index the system sites (never the sink chain).
    """

    n_sites: int
    site_detunings: Tuple[Tuple[int, float], ...] = ()
    couplings: Tuple[Tuple[int, int, float], ...] = ()
    dispersion: DispersionModel = field(default_factory=DispersionModel)
    sink: Optional[SinkSpec] = None
    input_site: int = 0
    target_site: int = 0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {self.n_sites}")
        object.__setattr__(self, "site_detunings",
                           tuple((int(s), float(d)) for s, d in self.site_detunings))
        object.__setattr__(self, "couplings",
                           tuple((int(i), int(j), float(c)) for i, j, c in self.couplings))
        for s, _ in self.site_detunings:
            if not 0 <= s < self.n_sites:
                raise ValueError(f"detuning site {s} out of range for {self.n_sites} sites")
        seen = set()
        for i, j, c in self.couplings:
            if i == j:
                raise ValueError(f"self-coupling on site {i}")
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise ValueError(f"coupling ({i},{j}) out of range for {self.n_sites} sites")
            if c == 0 or not math.isfinite(c):
                raise ValueError(f"coupling ({i},{j}) must be finite and nonzero, got {c}")
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise ValueError(f"coupling pair {pair} listed more than once")
            seen.add(pair)
        for name in ("input_site", "target_site"):
            idx = getattr(self, name)
            if not 0 <= idx < self.n_sites:
                raise ValueError(f"{name}={idx} out of range for {self.n_sites} sites")

    @property
    def dimension(self) -> int:
        """Total guide count including the sink chain."""
        return self.n_sites + (self.sink.n_sink if self.sink else 0)

    def without_sink(self) -> "NetworkSpec":
        return replace(self, sink=None)


@dataclass(eq=False)
class HamiltonianMatrix:
    """Real-symmetric tight-binding matrix (cm^-1) at one wavelength.

    ``n_system`` marks how many leading rows describe system sites; the
    remainder is the sink chain.
    """

    entries: np.ndarray
    wavelength_nm: float
    n_system: int

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError(f"entries must be square, got shape {self.entries.shape}")
        if not np.array_equal(self.entries, self.entries.T):
            raise ValueError("entries must be symmetric")
        if not 1 <= self.n_system <= self.entries.shape[0]:
            raise ValueError(f"n_system={self.n_system} inconsistent with shape")

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def has_sink(self) -> bool:
        return self.n_system < self.dimension

    def system_block(self) -> "HamiltonianMatrix":
        n = self.n_system
        return HamiltonianMatrix(self.entries[:n, :n].copy(), self.wavelength_nm, n)


def enaqt4_network(c: float = 1.0,
                   delta_beta: float = 1.0,
                   sink: Optional[SinkSpec] = SinkSpec(),
                   dispersion: Optional[DispersionModel] = None) -> NetworkSpec:
    """Four-site chain 1-2-3-4 with the last site detuned.

    Site 0 is the input, site 2 the target (and the sink attachment point),
    and site 3 carries the detuning.  With ``delta_beta == c`` the chain has
    one eigenmode with no amplitude on the target, which caps the coherent
    trapping efficiency; breaking that degeneracy with decoherence is the
    transport-enhancement effect this package simulates.
    """
    if c <= 0:
        raise ValueError(f"chain coupling must be positive, got {c}")
    if dispersion is None:
        dispersion = DispersionModel(detuning0_per_cm=delta_beta)
    return NetworkSpec(
        n_sites=4,
        site_detunings=((3, delta_beta),) if delta_beta != 0 else (),
        couplings=((0, 1, c), (1, 2, c), (2, 3, c)),
        dispersion=dispersion,
        sink=sink,
        input_site=0,
        target_site=2,
    )


def build_hamiltonian(net: NetworkSpec, wavelength_nm: float,
                      include_sink: bool = True) -> HamiltonianMatrix:
    """Assemble the tight-binding matrix of ``net`` at one wavelength.

    The global propagation constant enters only as a uniform diagonal
    offset (beta0, default 0); populations depend on detuning differences
    alone.  Sink guides sit at the reference propagation constant and
    inherit the coupling dispersion of the system guides.
    """
    if wavelength_nm <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm}")
    disp = net.dispersion
    with_sink = include_sink and net.sink is not None
    dim = net.dimension if with_sink else net.n_sites
    h = np.zeros((dim, dim))

    np.fill_diagonal(h, disp.beta0_per_cm)
    dscale = disp.detuning_scale(wavelength_nm)
    for s, d in net.site_detunings:
        h[s, s] += d * dscale

    cscale = disp.coupling_scale(wavelength_nm)
    for i, j, c in net.couplings:
        h[i, j] = h[j, i] = c * cscale

    if with_sink:
        sink = net.sink
        first = net.n_sites
        h[net.target_site, first] = h[first, net.target_site] = sink.c_trap_per_cm * cscale
        for k in range(first, dim - 1):
            h[k, k + 1] = h[k + 1, k] = sink.c_sink_per_cm * cscale

    return HamiltonianMatrix(h, wavelength_nm, net.n_sites)


def required_sink_length(net: NetworkSpec, z_cm: float,
                         max_wavelength_nm: Optional[float] = None,
                         pad: int = 10) -> int:
    """Sink-guide count that keeps the far boundary outside the light cone.

    A chain with hopping C transports excitations at most 2*C sites per cm,
    so reflections off the far end cannot reach back while the chain is
    longer than the one-way cone.  Sized at the largest coupling scale in
    the wavelength range of interest.
    """
    if net.sink is None:
        raise ValueError("network has no sink")
    lam = max_wavelength_nm if max_wavelength_nm is not None else net.dispersion.lambda0_nm
    c_sink = net.sink.c_sink_per_cm * net.dispersion.coupling_scale(lam)
    return int(math.ceil(2.0 * c_sink * z_cm)) + pad


@dataclass(frozen=True)
class TightBindingReport:
    """Outcome of the omitted-coupling audit."""

    min_retained_per_cm: float
    threshold_per_cm: float
    flagged: Tuple[Tuple[Optional[int], Optional[int], float], ...]
    checked: int

    @property
    def passed(self) -> bool:
        return not self.flagged


def validate_tight_binding(net: NetworkSpec,
                           non_neighbour_couplings: Iterable,
                           fraction: float = 0.05) -> TightBindingReport:
    """Audit couplings omitted from the network model.

    Takes geometry-derived estimates for pairs the model leaves uncoupled,
    as bare values or ``(site_i, site_j, value)`` triples, and flags any
    that exceed ``fraction`` of the smallest retained coupling.  Report
    only; nothing is raised.
    """
    retained = [abs(c) for _, _, c in net.couplings]
    if net.sink is not None:
        retained += [net.sink.c_trap_per_cm, net.sink.c_sink_per_cm]
    min_retained = min(retained) if retained else math.inf
    threshold = fraction * min_retained

    flagged = []
    checked = 0
    for item in non_neighbour_couplings:
        if isinstance(item, (tuple, list)):
            i, j, value = int(item[0]), int(item[1]), float(item[2])
        else:
            i, j, value = None, None, float(item)
        checked += 1
        if abs(value) > threshold:
            flagged.append((i, j, value))
    return TightBindingReport(
        min_retained_per_cm=min_retained,
        threshold_per_cm=threshold,
        flagged=tuple(flagged),
        checked=checked,
    )
