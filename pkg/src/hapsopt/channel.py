"""User geometry, fading draws and the composite channel coefficient A."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

K_BOLTZMANN = 1.38e-23


@dataclass(frozen=True)
class LinkBudgetParams:
    bandwidth: float = 20e6
    noise_temp: float = 870.0
    wavelength: float = 0.15
    tx_gain: float = 2.0
    rx_gain: float = 1.0
    pathloss_exp: float = 2.0
    boltzmann: float = K_BOLTZMANN
    noise_var: float = 1.0
    rician_k: float = 4.5

    def __post_init__(self):
        for name in ("bandwidth", "noise_temp", "wavelength", "tx_gain", "rx_gain",
                     "pathloss_exp", "boltzmann", "noise_var"):
            if not getattr(self, name) > 0:
                raise ValueError(f"link.{name} must be positive")
        if self.rician_k < 0:
            raise ValueError("link.rician_k must be non-negative")


@dataclass(frozen=True)
class ArrayPattern:
    mainlobe_gain: float = 2.0
    backlobe_gain: float = 0.5
    half_beamwidth: float = math.pi / 6

    def __post_init__(self):
        if not 0 < self.backlobe_gain < self.mainlobe_gain:
            raise ValueError("need 0 < backlobe_gain < mainlobe_gain")
        if self.half_beamwidth <= 0:
            raise ValueError("half_beamwidth must be positive")


@dataclass(frozen=True)
class CellTopology:
    """One centre cell (index 0) surrounded by a ring of edge cells."""

    num_cells: int = 7
    users_per_cell: int = 8
    psi_c: float = math.pi / 6
    psi_e: float = math.pi / 13.33

    def __post_init__(self):
        if self.num_cells < 2:
            raise ValueError("need at least one edge cell")
        if self.users_per_cell < 1:
            raise ValueError("cells must hold at least one user")
        if not 0 < self.psi_e < self.psi_c <= math.pi / 2:
            raise ValueError("need 0 < psi_e < psi_c <= pi/2")

    def neighbors(self, m: int) -> list[int]:
        """Interfering cells of cell ``m`` (0-based)."""
        ring = self.num_cells - 1
        if m == 0:
            return list(range(1, self.num_cells))
        i = m - 1
        adj = sorted({(i - 1) % ring + 1, (i + 1) % ring + 1} - {m})
        return [0] + adj

    def elevation_band(self, m: int) -> tuple[float, float]:
        if m == 0:
            return self.psi_c, math.pi / 2
        return self.psi_e, self.psi_c


@dataclass(frozen=True)
class UserLink:
    cell: int
    user: int
    elevation: float
    serving_fade: float
    interferer_fades: dict[int, float]
    pathloss: float
    composite: float


@dataclass
class CellDraw:
    """Frozen small-scale and geometric realisation of one cell's users."""

    cell: int
    elevation: np.ndarray
    serving_fade: np.ndarray
    interferer_fades: np.ndarray  # (users, len(neighbors))
    neighbors: list[int] = field(default_factory=list)


def sample_rician_power(k: float, rng: np.random.Generator | int | None = None, size=None):
    """|g|^2 for a unit-mean-power Rician envelope with K-factor ``k``."""
    if k < 0:
        raise ValueError(f"Rician K-factor must be non-negative, got {k}")
    rng = np.random.default_rng(rng)
    if math.isinf(k):
        return np.ones(size) if size is not None else 1.0
    nu = math.sqrt(k / (k + 1))
    sigma = math.sqrt(1 / (2 * (k + 1)))
    re = nu + sigma * rng.standard_normal(size)
    im = sigma * rng.standard_normal(size)
    return re * re + im * im


def estimate_k_factor(power: np.ndarray) -> float:
    """Moment estimator of K from |g|^2 samples (2nd and 4th envelope moments)."""
    m2 = float(np.mean(power))
    m4 = float(np.mean(power * power))
    root = math.sqrt(max(2 * m2 * m2 - m4, 0.0))
    return root / (m2 - root)


def path_loss(params: LinkBudgetParams, altitude: float, elevation):
    """Space-link loss including the k_B*B*T_n noise floor; vectorised in elevation."""
    el = np.asarray(elevation, dtype=float)
    if altitude <= 0:
        raise ValueError("altitude must be positive")
    if np.any(el <= 0) or np.any(el > math.pi / 2 + 1e-12):
        raise ValueError("elevation must lie in (0, pi/2]")
    num = 16 * math.pi**2 * params.boltzmann * params.bandwidth * params.noise_temp
    num *= altitude**params.pathloss_exp
    out = num / (params.wavelength**2 * params.rx_gain * params.tx_gain * np.sin(el) ** params.pathloss_exp)
    return float(out) if out.ndim == 0 else out


def array_gain(pattern: ArrayPattern, departure_angle: float) -> float:
    if abs(departure_angle) <= pattern.half_beamwidth:
        return pattern.mainlobe_gain
    return pattern.backlobe_gain


def draw_users(topology: CellTopology, k: float, rng: np.random.Generator | int | None) -> list[CellDraw]:
    rng = np.random.default_rng(rng)
    draws = []
    K = topology.users_per_cell
    for m in range(topology.num_cells):
        lo, hi = topology.elevation_band(m)
        nb = topology.neighbors(m)
        draws.append(CellDraw(
            cell=m,
            elevation=rng.uniform(lo, hi, K),
            serving_fade=sample_rician_power(k, rng, K),
            interferer_fades=sample_rician_power(k, rng, (K, len(nb))),
            neighbors=nb,
        ))
    return draws


def composite_coefficients(
    draw: CellDraw,
    pattern: ArrayPattern,
    params: LinkBudgetParams,
    altitude: float,
    cell_powers,
) -> np.ndarray:
    """A for every user of one cell, in draw order (unsorted)."""
    P = np.asarray(cell_powers, dtype=float)
    pm = P[draw.cell]
    if pm <= 0 or np.any(P <= 0):
        raise ValueError("cell powers must be positive")
    Mb2, mb2 = pattern.mainlobe_gain**2, pattern.backlobe_gain**2
    g = draw.serving_fade
    ieci = draw.interferer_fades @ P[draw.neighbors]
    rho = pm / params.noise_var
    L = path_loss(params, altitude, draw.elevation)
    return mb2 / (Mb2 * pm * g) * ieci + L / (rho * Mb2 * g)


def build_links(
    topology: CellTopology,
    pattern: ArrayPattern,
    params: LinkBudgetParams,
    altitude: float,
    cell_powers,
    rng_seed: np.random.Generator | int | None = None,
    draws: list[CellDraw] | None = None,
) -> list[list[UserLink]]:
    """Per-cell user links sorted by decreasing composite coefficient.

    Pass ``draws`` to re-evaluate a frozen fading realisation at a new
    altitude or power split.
    """
    if draws is None:
        draws = draw_users(topology, params.rician_k, rng_seed)
    cells = []
    for d in draws:
        if len(d.elevation) == 0:
            raise ValueError(f"cell {d.cell} has no users")
        A = composite_coefficients(d, pattern, params, altitude, cell_powers)
        L = path_loss(params, altitude, d.elevation)
        order = np.argsort(-A, kind="stable")
        cells.append([
            UserLink(
                cell=d.cell,
                user=int(u),
                elevation=float(d.elevation[u]),
                serving_fade=float(d.serving_fade[u]),
                interferer_fades={j: float(d.interferer_fades[u, n]) for n, j in enumerate(d.neighbors)},
                pathloss=float(L[u]),
                composite=float(A[u]),
            )
            for u in order
        ])
    return cells
