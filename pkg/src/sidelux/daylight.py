"""Daylight-factor components, sun-patch geometry and per-point workplane
illuminance.

The diffuse side rests on the standard overcast-sky daylight factor: the sky
component (SC) and externally-reflected component (ERC) are numerical
integrals of the CIE overcast luminance distribution L(gamma) proportional to
(1 + 2 sin gamma)/3 over the aperture's spherical projection, and the
internally-reflected component (IRC) uses the split-flux average formula.
The direct side projects each aperture along the sun direction onto the
workplane to form the sun patch; points inside it receive the transmitted
beam, and the patch also feeds a floor-reflected diffuse term proportional
to its share of the floor area.

Per point p, with outdoor global/diffuse/direct horizontal illuminances:

    E_diffuse(p) = DF(p) * E_global + [p in patch scope] * E_direct * rho_floor * S_patch / S_floor
    E_direct(p)  = [p in patch] * E_direct * tau_glazing
    E(p)         = E_diffuse(p) + E_direct(p)

All evaluation functions are deterministic and side-effect free; the field
loop is embarrassingly parallel over grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from .errors import ConfigError, DataError, GeometryError
from .geometry import (
    PLANARITY_TOL,
    GridMesh,
    Point3,
    Polygon3,
    convex_contains_mask,
    decompose_convex,
    point_in_polygon,
    points_in_polygon_mask,
    project_polygon_along_direction,
    clip_polygon,
    workplane_grid_for_parts,
)
from .solar import EfficacyModel, GeoLocation, OutdoorIlluminance, SolarState, WeatherRecord, \
    reconstruct_illuminance, sun_position

# Horizontal illuminance of the full CIE overcast dome for unit zenith
# luminance: integral of (1+2 sin g)/3 * sin g over the hemisphere = 7*pi/9.
OVERCAST_DOME = 7.0 * math.pi / 9.0

DEFAULT_ANGULAR_STEP = 0.5          # degrees, sky integration resolution
DEFAULT_LUMINANCE_FRACTION = 0.2    # obstruction luminance relative to the sky it hides
UNOBSTRUCTED_C = 39.0               # split-flux obstruction coefficient, clear horizon
PATCH_SCOPES = ("patch", "room")


@dataclass(frozen=True)
class SurfaceOptics:
    """Interior reflectances per surface role."""

    floor: float
    walls: float
    ceiling: float

    def __post_init__(self):
        for name, v in (("floor", self.floor), ("walls", self.walls), ("ceiling", self.ceiling)):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} reflectance {v} out of [0, 1]")


@dataclass(frozen=True, eq=False)
class Aperture:
    """A vertical glazed opening.

    ``tau`` is the glazing light transmission; it both scales the
    transmitted beam and acts as the glass factor of the daylight factor.
    ``mf``/``fr``/``mg`` are the dirt, frame and site-activity correction
    factors; ``fc`` corrects the internally-reflected part for remoteness.
    """

    polygon: Polygon3
    tau: float = 0.9
    mf: float = 1.0
    fr: float = 1.0
    mg: float = 1.0
    fc: float = 1.0

    def __post_init__(self):
        if abs(float(self.polygon.normal[2])) > PLANARITY_TOL:
            raise GeometryError("aperture polygon must be vertical")
        if not self.polygon.is_convex:
            raise GeometryError("aperture polygon must be convex")
        for name, v in (("tau", self.tau), ("mf", self.mf), ("fr", self.fr),
                        ("mg", self.mg), ("fc", self.fc)):
            if not 0.0 < v <= 1.0:
                raise ConfigError(f"aperture factor {name}={v} out of (0, 1]")

    @property
    def area(self) -> float:
        return self.polygon.area


@dataclass(frozen=True, eq=False)
class Obstruction:
    """External vertical obstruction with a luminance expressed as a
    fraction of the sky luminance it hides."""

    polygon: Polygon3
    luminance_fraction: float = DEFAULT_LUMINANCE_FRACTION

    def __post_init__(self):
        if abs(float(self.polygon.normal[2])) > PLANARITY_TOL:
            raise GeometryError("obstruction polygon must be vertical")
        if not 0.0 <= self.luminance_fraction <= 1.0:
            raise ConfigError(
                f"luminance fraction {self.luminance_fraction} out of [0, 1]"
            )


@dataclass(eq=False)
class Room:
    """A closed room: horizontal floor outline (convex or L-shaped), flat
    ceiling at ``height`` above it, apertures on the walls."""

    floor: Polygon3
    height: float
    optics: SurfaceOptics
    apertures: tuple[Aperture, ...] = ()
    obstructions: tuple[Obstruction, ...] = ()

    def __post_init__(self):
        if self.height <= 0.0:
            raise ConfigError(f"room height {self.height} must be positive")
        if abs(abs(float(self.floor.normal[2])) - 1.0) > PLANARITY_TOL:
            raise GeometryError("floor polygon must be horizontal")
        xy = self.floor.coords[:, :2]
        signed = 0.5 * float(
            np.sum(xy[:, 0] * np.roll(xy[:, 1], -1) - np.roll(xy[:, 0], -1) * xy[:, 1])
        )
        if signed < 0.0:  # normalize to counter-clockwise seen from above
            self.floor = Polygon3(self.floor.coords[::-1])
        self.apertures = tuple(self.apertures)
        self.obstructions = tuple(self.obstructions)
        self.parts: list[Polygon3] = decompose_convex(self.floor)
        self.floor_z = float(self.floor.coords[:, 2].mean())
        self.s_t = self.floor.area
        self._aperture_outward = [self._wall_outward_for(ap) for ap in self.apertures]

    def _wall_outward_for(self, ap: Aperture) -> np.ndarray:
        pts = self.floor.coords
        n = len(pts)
        lo = self.floor_z - PLANARITY_TOL
        hi = self.floor_z + self.height + PLANARITY_TOL
        apts = ap.polygon.coords
        if apts[:, 2].min() < lo or apts[:, 2].max() > hi:
            raise GeometryError("aperture extends beyond the wall height")
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            e = b - a
            length = float(np.linalg.norm(e[:2]))
            if length < 1e-12:
                continue
            ex, ey = e[0] / length, e[1] / length
            outward = np.array([ey, -ex, 0.0])
            off = (apts - a) @ outward
            if float(np.abs(off).max()) > PLANARITY_TOL:
                continue
            s = (apts[:, 0] - a[0]) * ex + (apts[:, 1] - a[1]) * ey
            if s.min() < -PLANARITY_TOL or s.max() > length + PLANARITY_TOL:
                continue
            return outward
        raise GeometryError("aperture does not lie on any wall of the floor outline")

    def aperture_outward(self, index: int) -> np.ndarray:
        return self._aperture_outward[index]

    @property
    def perimeter(self) -> float:
        pts = self.floor.coords
        return float(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum())

    def contains(self, point) -> bool:
        p = point.as_array() if isinstance(point, Point3) else np.asarray(point, dtype=float)
        if not self.floor_z - PLANARITY_TOL <= p[2] <= self.floor_z + self.height + PLANARITY_TOL:
            return False
        mask = points_in_polygon_mask(
            np.array([p[0]]), np.array([p[1]]), self.floor.coords[:, :2]
        )
        return bool(mask[0])

    def workplane(self, cell: float, height: float = 0.01) -> GridMesh:
        return workplane_grid_for_parts(self.parts, cell, height)


@dataclass(frozen=True)
class DFBreakdown:
    """Daylight-factor components for one point and one aperture, all as
    fractions: df = (sc + erc + irc*fc) * mf * fr * gl * mg."""

    sc: float
    erc: float
    irc: float
    df: float


def df_from_components(sc: float, erc: float, irc: float, fc: float,
                       mf: float, fr: float, gl: float, mg: float) -> float:
    """Assemble the daylight factor from its components and corrections."""
    return (sc + erc + irc * fc) * mf * fr * gl * mg


def _sky_integral(point, window: Polygon3 | None, obstructions=(),
                  step_deg: float = DEFAULT_ANGULAR_STEP) -> tuple[float, float]:
    """Numerically integrate the overcast-sky luminance over the sky
    directions seen through ``window`` (or the full dome when None).

    Returns (sc, erc): the unobstructed fraction and the fraction re-emitted
    by obstructions, both normalized by the full-dome horizontal illuminance.
    """
    p = point.as_array() if isinstance(point, Point3) else np.asarray(point, dtype=float)
    h = math.radians(step_deg)

    if window is None:
        g_lo, g_hi = 1e-9, math.pi / 2.0
        f_lo, f_hi = -math.pi, math.pi
        ref = 0.0
        step_g = step_f = h
    else:
        # sample the window boundary to bound its spherical projection
        bpts = []
        V = window.coords
        for i in range(len(V)):
            a, b = V[i], V[(i + 1) % len(V)]
            ts = np.linspace(0.0, 1.0, 97)[:-1]
            bpts.append(a + ts[:, None] * (b - a))
        bpts = np.vstack(bpts)
        dirs = bpts - p
        r = np.linalg.norm(dirs, axis=1)
        if r.min() < 1e-9:
            raise GeometryError("point lies on the aperture polygon")
        gam = np.arcsin(np.clip(dirs[:, 2] / r, -1.0, 1.0))
        phi = np.arctan2(dirs[:, 0], dirs[:, 1])
        cen = window.centroid - p
        ref = math.atan2(cen[0], cen[1])
        dphi = (phi - ref + math.pi) % (2.0 * math.pi) - math.pi
        if gam.max() <= 1e-9:
            return 0.0, 0.0
        ext_g = max(float(gam.max() - gam.min()), 1e-6)
        ext_f = max(float(dphi.max() - dphi.min()), 1e-6)
        step_g = min(h, ext_g / 6.0)
        step_f = min(h, ext_f / 6.0)
        g_lo = max(1e-9, float(gam.min()) - 4.0 * step_g)
        g_hi = min(math.pi / 2.0, float(gam.max()) + 4.0 * step_g)
        f_lo = float(dphi.min()) - 4.0 * step_f
        f_hi = float(dphi.max()) + 4.0 * step_f
        if f_hi - f_lo >= 2.0 * math.pi:
            f_lo, f_hi = -math.pi, math.pi
        if g_hi <= g_lo:
            return 0.0, 0.0

    ng = max(1, int(math.ceil((g_hi - g_lo) / step_g)))
    nf = max(1, int(math.ceil((f_hi - f_lo) / step_f)))
    dg = (g_hi - g_lo) / ng
    df_ = (f_hi - f_lo) / nf
    gam = g_lo + (np.arange(ng) + 0.5) * dg
    phi = ref + f_lo + (np.arange(nf) + 0.5) * df_
    gam, phi = np.meshgrid(gam, phi, indexing="ij")
    gam = gam.ravel()
    phi = phi.ravel()
    sin_g = np.sin(gam)
    cos_g = np.cos(gam)
    d = np.column_stack((np.sin(phi) * cos_g, np.cos(phi) * cos_g, sin_g))
    weight = (1.0 + 2.0 * sin_g) / 3.0 * sin_g * cos_g * dg * df_

    if window is None:
        through = np.ones(len(d), dtype=bool)
        t_win = np.zeros(len(d))
    else:
        n_w = window.normal
        denom = d @ n_w
        with np.errstate(divide="ignore", invalid="ignore"):
            t_win = ((window.coords[0] - p) @ n_w) / denom
        hit = np.isfinite(t_win) & (t_win > 1e-9)
        through = np.zeros(len(d), dtype=bool)
        if hit.any():
            x = p + t_win[hit, None] * d[hit]
            x2 = window.to_plane_2d(x)
            through[hit] = points_in_polygon_mask(
                x2[:, 0], x2[:, 1], window._verts2d, boundary_tol=0.0
            )
        t_win = np.where(through, t_win, 0.0)

    blocked_fraction = np.zeros(len(d))
    t_best = np.full(len(d), np.inf)
    for obs in obstructions:
        n_o = obs.polygon.normal
        denom = d @ n_o
        with np.errstate(divide="ignore", invalid="ignore"):
            t_o = ((obs.polygon.coords[0] - p) @ n_o) / denom
        cand = np.isfinite(t_o) & (t_o > 1e-9) & through & (t_o > t_win - 1e-9)
        if not cand.any():
            continue
        x = p + t_o[cand, None] * d[cand]
        x2 = obs.polygon.to_plane_2d(x)
        inside = points_in_polygon_mask(x2[:, 0], x2[:, 1], obs.polygon._verts2d, boundary_tol=0.0)
        idx = np.flatnonzero(cand)[inside]
        closer = t_o[idx] < t_best[idx]
        idx = idx[closer]
        blocked_fraction[idx] = obs.luminance_fraction
        t_best[idx] = t_o[idx]

    blocked = np.isfinite(t_best) & (t_best < np.inf)
    sc = float(weight[through & ~blocked].sum()) / OVERCAST_DOME
    erc = float((weight * blocked_fraction)[through & blocked].sum()) / OVERCAST_DOME
    return sc, erc


def sky_component(point, aperture, obstructions=(), room: Room | None = None,
                  step_deg: float = DEFAULT_ANGULAR_STEP) -> float:
    """Fraction of the unobstructed overcast-dome horizontal illuminance
    received at ``point`` directly from sky visible through the aperture.

    ``aperture`` may be an :class:`Aperture`, a bare :class:`Polygon3`, or
    None for the hypothetical full-dome view (which yields 1.0).
    """
    if room is not None and not room.contains(point):
        raise ValueError("point lies outside the room")
    poly = aperture.polygon if isinstance(aperture, Aperture) else aperture
    return _sky_integral(point, poly, obstructions, step_deg)[0]


def externally_reflected_component(point, aperture, obstructions, room: Room | None = None,
                                   step_deg: float = DEFAULT_ANGULAR_STEP) -> float:
    """Same integration as :func:`sky_component`, but over sky directions
    hidden by obstructions, each weighted by its luminance fraction."""
    if room is not None and not room.contains(point):
        raise ValueError("point lies outside the room")
    poly = aperture.polygon if isinstance(aperture, Aperture) else aperture
    return _sky_integral(point, poly, obstructions, step_deg)[1]


def split_flux_irc(window_area: float, total_area: float, mean_reflectance: float,
                   lower_reflectance: float, upper_reflectance: float,
                   obstruction_coefficient: float = UNOBSTRUCTED_C) -> float:
    """Split-flux average internally-reflected component, as a fraction.

    ``lower_reflectance`` averages floor and walls below the window
    mid-height, ``upper_reflectance`` ceiling and walls above it.
    """
    if mean_reflectance >= 0.99:
        raise ConfigError("mean reflectance >= 0.99: inter-reflection diverges")
    return (
        0.85 * window_area / (total_area * (1.0 - mean_reflectance))
        * (obstruction_coefficient * lower_reflectance + 5.0 * upper_reflectance)
        / 100.0
    )


def _obstruction_coefficient(room: Room, ap: Aperture) -> float:
    """Clear-horizon coefficient reduced linearly to zero as the mean
    obstruction elevation (seen from the window center) reaches 80 deg."""
    if not room.obstructions:
        return UNOBSTRUCTED_C
    wc = ap.polygon.centroid
    angles = []
    for obs in room.obstructions:
        oc = obs.polygon.centroid
        top = float(obs.polygon.coords[:, 2].max())
        horiz = float(np.hypot(oc[0] - wc[0], oc[1] - wc[1]))
        angles.append(max(0.0, math.degrees(math.atan2(top - wc[2], max(horiz, 1e-9)))))
    mean_angle = sum(angles) / len(angles)
    return UNOBSTRUCTED_C * max(0.0, 1.0 - min(mean_angle, 80.0) / 80.0)


def internally_reflected_component(room: Room, ap: Aperture) -> float:
    """Internally-reflected component for one aperture from the room's
    surface areas and reflectances."""
    s_t = room.s_t
    a_walls = room.perimeter * room.height
    total = 2.0 * s_t + a_walls
    mid = float(ap.polygon.coords[:, 2].mean()) - room.floor_z
    mid = min(max(mid, 0.0), room.height)
    a_lower = room.perimeter * mid
    a_upper = a_walls - a_lower
    o = room.optics
    r_mean = (o.floor * s_t + o.ceiling * s_t + o.walls * a_walls) / total
    r_lower = (o.floor * s_t + o.walls * a_lower) / (s_t + a_lower)
    r_upper = (o.ceiling * s_t + o.walls * a_upper) / (s_t + a_upper)
    c = _obstruction_coefficient(room, ap)
    return split_flux_irc(ap.area, total, r_mean, r_lower, r_upper, c)


def daylight_factor(point, room: Room, ap: Aperture, obstructions=None,
                    step_deg: float = DEFAULT_ANGULAR_STEP) -> DFBreakdown:
    """Daylight factor (as a fraction) at a point for one aperture."""
    if obstructions is None:
        obstructions = room.obstructions
    if not room.contains(point):
        raise ValueError("point lies outside the room")
    sc, erc = _sky_integral(point, ap.polygon, obstructions, step_deg)
    irc = internally_reflected_component(room, ap)
    df = df_from_components(sc, erc, irc, ap.fc, ap.mf, ap.fr, ap.tau, ap.mg)
    return DFBreakdown(sc=sc, erc=erc, irc=irc, df=df)


@dataclass(frozen=True, eq=False)
class SunPatch:
    """Sunlit region on the workplane: the aperture projected along the sun
    direction and clipped to the floor. May consist of several convex
    pieces when the floor was decomposed."""

    pieces: tuple[Polygon3, ...]
    area: float

    @classmethod
    def empty(cls) -> "SunPatch":
        return cls((), 0.0)

    def __bool__(self) -> bool:
        return self.area > 0.0

    def contains(self, point) -> bool:
        return any(point_in_polygon(point, piece) for piece in self.pieces)


def compute_sun_patch(room: Room, ap: Aperture, sun: SolarState, plane_z: float,
                      outward=None, lifted_parts=None) -> SunPatch:
    """Project an aperture along the sun direction onto the plane
    z = ``plane_z`` and clip the image against the floor.

    Empty when the sun is below the horizon or behind the aperture's wall.
    """
    if sun.altitude <= 0.0:
        return SunPatch.empty()
    if outward is None:
        outward = room.aperture_outward(room.apertures.index(ap))
    d = sun.direction
    if float(d @ outward) >= -1e-9:
        return SunPatch.empty()
    img = project_polygon_along_direction(ap.polygon, d, plane_z)
    if img is None:
        return SunPatch.empty()
    if lifted_parts is None:
        lifted_parts = [part.at_z(plane_z) for part in room.parts]
    pieces = []
    area = 0.0
    for part in lifted_parts:
        piece = clip_polygon(img, part)
        if piece is not None:
            pieces.append(piece)
            area += piece.area
    if not pieces:
        return SunPatch.empty()
    return SunPatch(tuple(pieces), area)


def diffuse_at_point(point, df: float, outdoor: OutdoorIlluminance, patch: SunPatch | None,
                     room: Room, scope: str = "patch") -> float:
    """Diffuse illuminance at a point: the daylight-factor part plus, when a
    sun patch exists, the floor-reflected patch contribution."""
    if room.s_t <= 0.0:
        raise ConfigError("room floor area is zero")
    value = df * outdoor.e_global
    if (
        patch is not None
        and patch.area > 0.0
        and outdoor.e_direct > 0.0
        and (scope == "room" or patch.contains(point))
    ):
        value += outdoor.e_direct * room.optics.floor * patch.area / room.s_t
    return value


def direct_at_point(point, patch: SunPatch | None, outdoor: OutdoorIlluminance,
                    ap: Aperture) -> float:
    """Transmitted beam illuminance: nonzero only inside the sun patch."""
    if patch is None or patch.area <= 0.0 or outdoor.e_direct <= 0.0:
        return 0.0
    return outdoor.e_direct * ap.tau if patch.contains(point) else 0.0


@dataclass(eq=False)
class IlluminanceField:
    """Per-point illuminances over the workplane grid for one instant."""

    grid: GridMesh
    timestamp: datetime | None
    outdoor: OutdoorIlluminance
    sun: SolarState | None
    df: np.ndarray
    e_diffuse: np.ndarray
    e_direct: np.ndarray
    e_global: np.ndarray
    patches: tuple[SunPatch, ...]

    @property
    def patch_area(self) -> float:
        return float(sum(p.area for p in self.patches))


@dataclass(eq=False)
class PeriodResult:
    """Time series produced by a period simulation: outdoor conditions,
    total patch area and workplane illuminance at the probe points, plus
    full fields at explicitly requested instants."""

    timestamps: list[datetime]
    outdoor_global: np.ndarray
    outdoor_diffuse: np.ndarray
    outdoor_direct: np.ndarray
    patch_area: np.ndarray
    probe_points: tuple[tuple[float, float], ...]
    probe_names: tuple[str, ...]
    probe_global: np.ndarray
    fields: dict[datetime, IlluminanceField] = field(default_factory=dict)

    def hourly(self) -> "PeriodResult":
        """Average the minute series into clock hours (fields left as-is)."""
        from .metrics import resample_hourly

        hours, og = resample_hourly(self.timestamps, self.outdoor_global)
        _, od = resample_hourly(self.timestamps, self.outdoor_diffuse)
        _, ob = resample_hourly(self.timestamps, self.outdoor_direct)
        _, pa = resample_hourly(self.timestamps, self.patch_area)
        cols = []
        for j in range(self.probe_global.shape[1]):
            cols.append(resample_hourly(self.timestamps, self.probe_global[:, j])[1])
        probe = np.column_stack(cols) if cols else np.zeros((len(hours), 0))
        return PeriodResult(
            timestamps=hours,
            outdoor_global=og,
            outdoor_diffuse=od,
            outdoor_direct=ob,
            patch_area=pa,
            probe_points=self.probe_points,
            probe_names=self.probe_names,
            probe_global=probe,
            fields=dict(self.fields),
        )


class Simulator:
    """Workplane illuminance engine for one room.

    The daylight-factor field depends on geometry only, so it is computed
    once at construction and reused for every timestep; per step only the
    outdoor conversion and the sun-patch geometry change.
    """

    def __init__(self, room: Room, location: GeoLocation, cell: float = 0.1,
                 workplane_height: float = 0.01, efficacy: EfficacyModel | None = None,
                 patch_scope: str = "patch", angular_step: float = DEFAULT_ANGULAR_STEP):
        if patch_scope not in PATCH_SCOPES:
            raise ConfigError(f"patch scope must be one of {PATCH_SCOPES}")
        self.room = room
        self.location = location
        self.efficacy = efficacy if efficacy is not None else EfficacyModel()
        self.patch_scope = patch_scope
        self.angular_step = angular_step
        self.grid = room.workplane(cell, workplane_height)
        self._lifted_parts = [part.at_z(self.grid.plane_z) for part in room.parts]
        self._irc = [internally_reflected_component(room, ap) for ap in room.apertures]
        self.df_per_aperture, self.df = self._df_for_points(self.grid.points)
        self._probe_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}

    def _df_for_points(self, points: np.ndarray) -> tuple[list[dict], np.ndarray]:
        per_ap: list[dict] = []
        total = np.zeros(len(points))
        for k, ap in enumerate(self.room.apertures):
            sc = np.empty(len(points))
            erc = np.empty(len(points))
            for i, p in enumerate(points):
                sc[i], erc[i] = _sky_integral(p, ap.polygon, self.room.obstructions,
                                              self.angular_step)
            df = (sc + erc + self._irc[k] * ap.fc) * ap.mf * ap.fr * ap.tau * ap.mg
            per_ap.append({"sc": sc, "erc": erc, "irc": self._irc[k], "df": df})
            total = total + df
        return per_ap, total

    def _patch_mask(self, patch: SunPatch, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        mask = np.zeros(px.shape, dtype=bool)
        for piece in patch.pieces:
            v2 = piece.coords[:, :2]
            area2 = 0.5 * float(
                np.sum(v2[:, 0] * np.roll(v2[:, 1], -1) - np.roll(v2[:, 0], -1) * v2[:, 1])
            )
            if area2 < 0.0:
                v2 = v2[::-1]
            mask |= convex_contains_mask(px, py, v2)
        return mask

    def _evaluate_arrays(self, outdoor: OutdoorIlluminance, sun: SolarState | None,
                         px: np.ndarray, py: np.ndarray, df: np.ndarray):
        e_dif = df * outdoor.e_global
        e_dir = np.zeros(len(px))
        patches: list[SunPatch] = []
        if outdoor.e_direct > 0.0 and sun is not None and sun.altitude > 0.0:
            rho = self.room.optics.floor
            for k, ap in enumerate(self.room.apertures):
                patch = compute_sun_patch(
                    self.room, ap, sun, self.grid.plane_z,
                    outward=self.room.aperture_outward(k),
                    lifted_parts=self._lifted_parts,
                )
                patches.append(patch)
                if patch.area <= 0.0:
                    continue
                mask = self._patch_mask(patch, px, py)
                term = outdoor.e_direct * rho * patch.area / self.room.s_t
                if self.patch_scope == "patch":
                    e_dif = e_dif + term * mask
                else:
                    e_dif = e_dif + term
                e_dir = e_dir + mask * (outdoor.e_direct * ap.tau)
        else:
            patches = [SunPatch.empty() for _ in self.room.apertures]
        return e_dif, e_dir, tuple(patches)

    def evaluate(self, outdoor: OutdoorIlluminance, sun: SolarState | None,
                 timestamp: datetime | None = None) -> IlluminanceField:
        """Field over the workplane grid for given outdoor conditions."""
        pts = self.grid.points
        e_dif, e_dir, patches = self._evaluate_arrays(
            outdoor, sun, pts[:, 0], pts[:, 1], self.df
        )
        return IlluminanceField(
            grid=self.grid,
            timestamp=timestamp,
            outdoor=outdoor,
            sun=sun,
            df=self.df,
            e_diffuse=e_dif,
            e_direct=e_dir,
            e_global=e_dif + e_dir,
            patches=patches,
        )

    def step(self, record: WeatherRecord) -> IlluminanceField:
        """Field for one weather record."""
        sun = sun_position(record.timestamp, self.location)
        outdoor = reconstruct_illuminance(record, sun, self.efficacy)
        return self.evaluate(outdoor, sun, record.timestamp)

    def _probe_df(self, probes: tuple[tuple[float, float], ...]):
        key = tuple(probes)
        if key not in self._probe_cache:
            pts = np.array(
                [(x, y, self.grid.plane_z) for x, y in probes], dtype=float
            ).reshape(-1, 3)
            for p in pts:
                if not self.room.contains(p):
                    raise ConfigError(f"probe ({p[0]}, {p[1]}) lies outside the room")
            _, df = self._df_for_points(pts)
            self._probe_cache[key] = (pts, df)
        return self._probe_cache[key]

    def run(self, records, start: datetime | None = None, end: datetime | None = None,
            step_minutes: int = 1, probes=(), field_at=(), hourly: bool = False) -> PeriodResult:
        """Iterate timesteps over [start, end) and collect probe series.

        ``records`` must cover every step; a missing timestamp is an error.
        Full fields are kept only for the instants listed in ``field_at``.
        """
        if step_minutes < 1:
            raise ConfigError("step must be at least one minute")
        records = list(records)
        if not records:
            raise DataError("empty weather series")
        index = {r.timestamp: r for r in records}
        if start is None:
            start = records[0].timestamp
        if end is None:
            end = records[-1].timestamp + timedelta(minutes=step_minutes)
        step = timedelta(minutes=step_minutes)
        probes = tuple((float(x), float(y)) for x, y in probes)
        probe_names = tuple(f"p{i + 1}" for i in range(len(probes)))
        field_set = set(field_at)

        grid_pts = self.grid.points
        n_grid = len(grid_pts)
        if probes:
            probe_pts, probe_df = self._probe_df(probes)
            px = np.concatenate((grid_pts[:, 0], probe_pts[:, 0]))
            py = np.concatenate((grid_pts[:, 1], probe_pts[:, 1]))
            df_all = np.concatenate((self.df, probe_df))
        else:
            px, py, df_all = grid_pts[:, 0], grid_pts[:, 1], self.df

        timestamps: list[datetime] = []
        og: list[float] = []
        od: list[float] = []
        ob: list[float] = []
        pa: list[float] = []
        probe_rows: list[np.ndarray] = []
        fields: dict[datetime, IlluminanceField] = {}
        zeros_probe = np.zeros(len(probes))
        dark = OutdoorIlluminance.from_components(0.0, 0.0)

        t = start
        while t < end:
            rec = index.get(t)
            if rec is None:
                raise DataError(f"no weather record for {t.isoformat()}")
            sun = sun_position(t, self.location)
            outdoor = reconstruct_illuminance(rec, sun, self.efficacy)
            timestamps.append(t)
            og.append(outdoor.e_global)
            od.append(outdoor.e_diffuse)
            ob.append(outdoor.e_direct)
            if outdoor.e_global <= 0.0 and outdoor.e_direct <= 0.0:
                pa.append(0.0)
                probe_rows.append(zeros_probe)
                if t in field_set:
                    z = np.zeros(n_grid)
                    fields[t] = IlluminanceField(
                        grid=self.grid, timestamp=t, outdoor=dark, sun=sun, df=self.df,
                        e_diffuse=z, e_direct=z.copy(), e_global=z.copy(),
                        patches=tuple(SunPatch.empty() for _ in self.room.apertures),
                    )
                t += step
                continue
            e_dif, e_dir, patches = self._evaluate_arrays(outdoor, sun, px, py, df_all)
            pa.append(float(sum(p.area for p in patches)))
            e_glo = e_dif + e_dir
            probe_rows.append(e_glo[n_grid:].copy() if probes else zeros_probe)
            if t in field_set:
                fields[t] = IlluminanceField(
                    grid=self.grid, timestamp=t, outdoor=outdoor, sun=sun, df=self.df,
                    e_diffuse=e_dif[:n_grid].copy(), e_direct=e_dir[:n_grid].copy(),
                    e_global=e_glo[:n_grid].copy(), patches=patches,
                )
            t += step

        if not timestamps:
            raise DataError("empty simulation period (end must be after start)")
        missing = sorted(field_set - set(fields))
        if missing:
            raise DataError(
                "field requested at instants not visited by the stepping: "
                + ", ".join(ts.isoformat() for ts in missing)
            )
        result = PeriodResult(
            timestamps=timestamps,
            outdoor_global=np.array(og),
            outdoor_diffuse=np.array(od),
            outdoor_direct=np.array(ob),
            patch_area=np.array(pa),
            probe_points=probes,
            probe_names=probe_names,
            probe_global=np.vstack(probe_rows) if probe_rows else np.zeros((0, len(probes))),
            fields=fields,
        )
        return result.hourly() if hourly else result


def simulate_timestep(sim: Simulator, record: WeatherRecord) -> IlluminanceField:
    """One-record convenience wrapper around :meth:`Simulator.step`."""
    return sim.step(record)


def simulate_period(sim: Simulator, records, start=None, end=None, step_minutes: int = 1,
                    probes=(), field_at=(), hourly: bool = False) -> PeriodResult:
    """Convenience wrapper around :meth:`Simulator.run`."""
    return sim.run(records, start, end, step_minutes, probes, field_at, hourly)
