"""Deterministic raster and vector output.

Pixel convention: pixel (row j, column i) samples the plane at its centre,
``x = cx - w/2 + (i + 0.5) w/W`` and ``y = cy + h/2 - (j + 0.5) h/H``, so
row 0 is the top edge and the y-axis points up. Images are 8-bit RGB
without alpha. Nothing time-dependent is written into any payload.

The escape kernels are compiled copies of the pure-Python classifier in
``schwarz`` (same circumcircle search, droplet tolerances and symbol rule)
and are cross-checked against it in the test-suite.
"""
from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange
from PIL import Image, ImageDraw

from .config import DEFAULT
from .errors import InvalidInput

# the system TBB is often too old for numba; skip it rather than warn on every launch
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

SCHEMA = "sdl-1"
MAX_RES = 16384
PREFIX = 16          # symbols packed into the address code (2 bits each)

# pixel status
ESCAPED, BOUNDED, SINGULAR, SLIT = 0, 1, 2, 3

LOCUS_RGB = (18, 18, 28)
SLIT_RGB = (110, 110, 110)
SINGULAR_RGB = (200, 200, 200)


@dataclass
class RenderJob:
    target: str
    center: complex = 0j
    width: float = 4.0
    height: float | None = None
    resolution: tuple = (512, 512)
    max_iter: int = 500
    overlays: list = field(default_factory=list)
    palette: str = "address"
    a: complex | None = None

    def __post_init__(self):
        if isinstance(self.resolution, int):
            self.resolution = (self.resolution, self.resolution)
        W, H = self.resolution
        if not (0 < W <= MAX_RES and 0 < H <= MAX_RES):
            raise InvalidInput(f"resolution {W}x{H} outside 1..{MAX_RES}")
        if self.height is None:
            self.height = self.width * H / W
        if not (self.width > 0 and self.height > 0):
            raise InvalidInput("window must have positive width and height")
        if self.max_iter < 1:
            raise InvalidInput("max_iter must be positive")

    def axes(self):
        W, H = self.resolution
        c = complex(self.center)
        xs = c.real - self.width / 2 + (np.arange(W) + 0.5) * (self.width / W)
        ys = c.imag + self.height / 2 - (np.arange(H) + 0.5) * (self.height / H)
        return xs, ys

    def to_pixel(self, z: complex) -> tuple[float, float]:
        W, H = self.resolution
        c = complex(self.center)
        i = (z.real - (c.real - self.width / 2)) * W / self.width - 0.5
        j = ((c.imag + self.height / 2) - z.imag) * H / self.height - 0.5
        return i, j


@dataclass
class ScanRow:
    re_a: float
    im_a: float
    depth: int | None
    address: str
    classification: str

    FIELDS = ("re_a", "im_a", "depth", "address", "classification")

    def as_tuple(self):
        return (repr(self.re_a), repr(self.im_a), "" if self.depth is None else self.depth, self.address, self.classification)


def set_threads(n: int | None) -> int:
    if n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))
    return numba.get_num_threads()


# ---------------------------------------------------------------------------
# compiled geometry (mirrors cardioid.circumcircle / labelled_roots)


@njit(cache=True)
def _phi(l):
    return l / 2 - l * l / 4


@njit(cache=True)
def _d2(theta, a):
    e = cmath.exp(1j * theta)
    z = e / 2 - e * e / 4
    dz = (0.5 - e / 2) * 1j * e
    d2z = -0.5 * (1j * e) ** 2 + (0.5 - e / 2) * (-e)
    u = z - a
    d0 = (u * u.conjugate()).real
    d1 = 2 * (u.conjugate() * dz).real
    d2 = 2 * ((dz * dz.conjugate()).real + (u.conjugate() * d2z).real)
    return d0, d1, d2


def _boundary_table(n: int) -> np.ndarray:
    e = np.exp(1j * (np.arange(n) * (2 * math.pi / n)))
    return e / 2 - e * e / 4


@njit(cache=True)
def _geometry(a, table, slit_value, slit_angle, newton_theta, newton_steps):
    """(ok, r, alpha, t_alpha); ok is False on the slit (tied maxima)."""
    two_pi = 2 * math.pi
    n = table.shape[0]
    h = two_pi / n
    vals = np.empty(n)
    for k in range(n):
        u = table[k] - a
        vals[k] = u.real * u.real + u.imag * u.imag
    cr = np.empty(n)
    ct = np.empty(n)
    m = 0
    for k in range(n):
        if vals[k] >= vals[k - 1] and vals[k] >= vals[(k + 1) % n]:
            th = k * h
            for _ in range(newton_steps):
                _, d1, d2 = _d2(th, a)
                if d2 >= 0:
                    break
                step = -d1 / d2
                if step > h:
                    step = h
                elif step < -h:
                    step = -h
                th += step
                if abs(step) < newton_theta:
                    break
            th = th % two_pi
            cr[m] = math.sqrt(_d2(th, a)[0])
            ct[m] = th
            m += 1
    best = 0
    for k in range(1, m):
        if cr[k] > cr[best] or (cr[k] == cr[best] and ct[k] > ct[best]):
            best = k
    rmax = cr[best]
    for k in range(m):
        if rmax - cr[k] <= slit_value:
            dth = abs((ct[k] - ct[best] + math.pi) % two_pi - math.pi)
            if dth > slit_angle:
                return False, 0.0, 0j, 0.0
    th = ct[best]
    alpha = _phi(cmath.exp(1j * th))
    return True, abs(alpha - a), alpha, th / two_pi


@njit(cache=True)
def _cut_sqrt(a, alpha, z):
    d = (alpha - a) / abs(alpha - a)
    f1 = cmath.sqrt(-(z - alpha) / d)
    dz = z - alpha
    if dz == 0:
        return 0j
    f2 = cmath.sqrt((z - 0.25) / dz)
    return 2 * cmath.sqrt(d) * f1 * f2


@njit(cache=True)
def _label_sign(a, alpha, t_alpha):
    t_ref = t_alpha / 2
    target = cmath.exp(2j * math.pi * t_ref)
    z = _phi(target)
    s = _cut_sqrt(a, alpha, z)
    return 1.0 if abs(1 + s - target) < abs(1 - s - target) else -1.0


@njit(cache=True)
def _lam(w):
    s = cmath.sqrt(1 - 4 * w)
    r1 = 1 + s
    r2 = 1 - s
    return r1 if abs(r1) <= abs(r2) else r2


@njit(cache=True)
def _sheet(a, alpha, t_alpha, eps, w):
    lam = _lam(w)
    if lam == 0:
        return 3
    if abs(lam) > 1 + 1e-12:
        t = (cmath.phase(lam) / (2 * math.pi)) % 1.0
        return 1 if 0 < t < t_alpha else 3
    mu = 1 / lam.conjugate()
    z = _phi(mu)
    s = _cut_sqrt(a, alpha, z)
    r1 = 1 + eps * s
    r3 = 1 - eps * s
    return 1 if abs(mu - r1) <= abs(mu - r3) else 3


@njit(cache=True)
def _escape(a, r, alpha, t_alpha, eps, z, z_inf, max_iter, singular, boundary, addr):
    """Escape classification of one point; mirrors schwarz.classify_point.

    Returns (status, rank, code, ok) where code packs the first PREFIX
    symbols in base 4 and ok says the whole address is admissible.
    """
    code = 0
    prev = 0
    ok = True
    eps_r = boundary * max(1.0, r)
    n_addr = addr.shape[0]
    for n in range(max_iter + 1):
        if not z_inf:
            if abs(z - alpha) < singular or abs(z - 0.25) < singular:
                return SINGULAR, n, code, ok
            dist = abs(z - a)
            if dist <= r + eps_r:
                s = cmath.sqrt(1 - 4 * z)
                la = min(abs(1 + s), abs(1 - s))
                if la >= 1 - boundary:
                    return ESCAPED, n, code, ok
        if n == max_iter:
            break
        if z_inf or abs(z - a) > r:
            sym = 2
        elif prev == 1 or prev == 3:
            sym = 4 - prev
        else:
            sym = _sheet(a, alpha, t_alpha, eps, z)
        if sym == prev:
            ok = False
        if n < PREFIX:
            code |= sym << (2 * n)
        if n < n_addr:
            addr[n] = sym
        prev = sym
        # apply the map
        if z_inf:
            z = a
            z_inf = False
        else:
            lam = _lam(z)
            if abs(lam) <= 1 + boundary:
                if abs(lam) < 1e-150:
                    # the image overflows; treat it as the point at infinity
                    z_inf = True
                else:
                    lb = lam.conjugate()
                    z = (2 * lb - 1) / (4 * lb * lb)
            else:
                d = (z - a).conjugate()
                if d == 0:
                    z_inf = True
                else:
                    z = a + r * r / d
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                z_inf = True
    return BOUNDED, max_iter, code, ok


@njit(parallel=True, cache=True)
def _parameter_kernel(xs, ys, max_iter, table, slit_value, slit_angle, singular, boundary, status, rank, code, admissible, addr):
    H = ys.shape[0]
    W = xs.shape[0]
    for j in prange(H):
        buf = np.zeros(addr.shape[2], dtype=np.uint8)
        for i in range(W):
            a = complex(xs[i], ys[j])
            ok, r, alpha, t_alpha = _geometry(a, table, slit_value, slit_angle, 1e-14, 30)
            if not ok:
                status[j, i] = SLIT
                rank[j, i] = -1
                continue
            eps = _label_sign(a, alpha, t_alpha)
            st, rk, cd, adm = _escape(a, r, alpha, t_alpha, eps, 0j, True, max_iter, singular, boundary, buf)
            status[j, i] = st
            rank[j, i] = rk
            code[j, i] = cd
            admissible[j, i] = adm
            if addr.shape[2] > 0:
                for k in range(min(rk, addr.shape[2])):
                    addr[j, i, k] = buf[k]


@njit(parallel=True, cache=True)
def _dynamic_kernel(a, r, alpha, t_alpha, eps, xs, ys, max_iter, singular, boundary, status, rank, code, admissible):
    H = ys.shape[0]
    W = xs.shape[0]
    for j in prange(H):
        buf = np.zeros(0, dtype=np.uint8)
        for i in range(W):
            st, rk, cd, adm = _escape(a, r, alpha, t_alpha, eps, complex(xs[i], ys[j]), False, max_iter, singular, boundary, buf)
            status[j, i] = st
            rank[j, i] = rk
            code[j, i] = cd
            admissible[j, i] = adm


@njit(parallel=True, cache=True)
def _tricorn_kernel(xs, ys, max_iter, out, parameter, c0):
    H = ys.shape[0]
    W = xs.shape[0]
    for j in prange(H):
        for i in range(W):
            p = complex(xs[i], ys[j])
            if parameter:
                c = p
                z = 0j
            else:
                c = c0
                z = p
            n = 0
            while n < max_iter and z.real * z.real + z.imag * z.imag <= 16.0:
                z = z.conjugate() ** 2 + c
                n += 1
            out[j, i] = n


# ---------------------------------------------------------------------------
# escape scans


@dataclass
class EscapeGrid:
    status: np.ndarray
    rank: np.ndarray
    code: np.ndarray
    admissible: np.ndarray
    addresses: np.ndarray | None = None

    def prefix(self, j: int, i: int) -> tuple:
        """Address symbols stored in the packed code (at most PREFIX of them)."""
        n = min(int(self.rank[j, i]), PREFIX)
        c = int(self.code[j, i])
        return tuple((c >> (2 * k)) & 3 for k in range(n))


def _alloc(H, W, keep):
    return (np.full((H, W), BOUNDED, np.uint8), np.zeros((H, W), np.int32), np.zeros((H, W), np.uint32),
            np.ones((H, W), np.bool_), np.zeros((H, W, keep), np.uint8))


def parameter_scan(job: RenderJob, keep_address: int = 0, tol=DEFAULT) -> EscapeGrid:
    """Escape data of the critical value over the parameter window."""
    xs, ys = job.axes()
    H, W = len(ys), len(xs)
    status, rank, code, adm, addr = _alloc(H, W, keep_address)
    _parameter_kernel(xs, ys, job.max_iter, _boundary_table(tol.grid_samples), tol.slit_value, tol.slit_angle, tol.singular, tol.boundary,
                      status, rank, code, adm, addr)
    return EscapeGrid(status, rank, code, adm, addr if keep_address else None)


def dynamic_scan(a, job: RenderJob, tol=DEFAULT) -> EscapeGrid:
    from .cardioid import _label_sign as label_sign, circumcircle

    geom = circumcircle(a, tol)
    eps = float(label_sign(geom))
    xs, ys = job.axes()
    H, W = len(ys), len(xs)
    status, rank, code, adm, _ = _alloc(H, W, 0)
    _dynamic_kernel(complex(geom.a), geom.r, geom.alpha, geom.t_alpha, eps, xs, ys, job.max_iter, tol.singular, tol.boundary,
                    status, rank, code, adm)
    return EscapeGrid(status, rank, code, adm)


def tricorn_scan(job: RenderJob, parameter: bool = True, c=0j) -> np.ndarray:
    xs, ys = job.axes()
    out = np.zeros((len(ys), len(xs)), np.int32)
    _tricorn_kernel(xs, ys, job.max_iter, out, parameter, complex(c))
    return out


# ---------------------------------------------------------------------------
# colour


def address_hue(code: np.ndarray, n: int = 8) -> np.ndarray:
    """Base-3 positional value of the first n symbols (1, 2, 3 -> digits 0, 1, 2)."""
    code = code.astype(np.uint64)
    h = np.zeros(code.shape)
    for k in range(n):
        sym = (code >> np.uint64(2 * k)) & np.uint64(3)
        digit = np.where(sym > 0, sym.astype(float) - 1, 0.0)
        h += digit * 3.0 ** -(k + 1)
    return h


def hsv_to_rgb(h, s, v) -> np.ndarray:
    h = np.asarray(h) % 1.0
    s = np.broadcast_to(s, h.shape)
    v = np.broadcast_to(v, h.shape)
    i = np.floor(h * 6).astype(int) % 6
    f = h * 6 - np.floor(h * 6)
    p, q, t = v * (1 - s), v * (1 - s * f), v * (1 - s * (1 - f))
    choices = [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)]
    rgb = np.zeros(h.shape + (3,))
    for k, (r, g, b) in enumerate(choices):
        m = i == k
        rgb[m] = np.stack([r[m], g[m], b[m]], axis=-1)
    return np.clip(np.round(rgb * 255), 0, 255).astype(np.uint8)


def colour_escape(grid: EscapeGrid) -> np.ndarray:
    hue = address_hue(grid.code)
    shade = 0.45 + 0.55 * np.exp(-0.08 * np.maximum(grid.rank - 1, 0))
    rgb = hsv_to_rgb(hue, 0.75, shade)
    rgb[grid.status == BOUNDED] = LOCUS_RGB
    rgb[grid.status == SLIT] = SLIT_RGB
    rgb[grid.status == SINGULAR] = SINGULAR_RGB
    return rgb


def colour_escape_time(n: np.ndarray, max_iter: int) -> np.ndarray:
    t = np.sqrt(n / max_iter)
    rgb = hsv_to_rgb(0.62 - 0.5 * t, 0.7, 0.25 + 0.75 * (1 - t))
    rgb[n >= max_iter] = LOCUS_RGB
    return rgb


def to_png_bytes(rgb: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), "RGB").save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def _draw_polylines(rgb, job: RenderJob, lines, colour=(255, 255, 255)):
    img = Image.fromarray(rgb, "RGB")
    d = ImageDraw.Draw(img)
    for pts in lines:
        pix = [job.to_pixel(complex(p)) for p in pts]
        if len(pix) > 1:
            d.line(pix, fill=colour, width=1)
    return np.asarray(img).copy()


# ---------------------------------------------------------------------------
# renderers


def render_cs_locus(job: RenderJob, tol=DEFAULT):
    grid = parameter_scan(job, tol=tol)
    return colour_escape(grid), grid


def render_dynamical_plane(a, job: RenderJob, tol=DEFAULT):
    grid = dynamic_scan(a, job, tol)
    rgb = colour_escape(grid)
    from .cardioid import boundary_point, circumcircle

    geom = circumcircle(a, tol)
    ts = np.linspace(0, 1, 721)
    heart = [boundary_point(t) for t in ts]
    circle = [geom.a + geom.r * cmath.exp(2j * math.pi * t) for t in ts]
    return _draw_polylines(rgb, job, [heart, circle], (240, 240, 240)), grid


def _ray_overlays(job: RenderJob):
    from .tricorn import trace_parameter_ray

    lines = []
    for th in job.overlays:
        lines.append(trace_parameter_ray(th).points)
    return lines


def render_tricorn(job: RenderJob):
    n = tricorn_scan(job)
    rgb = colour_escape_time(n, job.max_iter)
    if job.overlays:
        rgb = _draw_polylines(rgb, job, _ray_overlays(job))
    return rgb, n


BASILICA_LIMB = dict(center=complex(-1.4, 0.0), width=1.3)


def render_basilica_limb(job: RenderJob):
    return render_tricorn(job)


# ---------------------------------------------------------------------------
# lamination disk


def geodesic(s: float, t: float, samples: int = 64) -> np.ndarray:
    """Points on the hyperbolic geodesic joining the boundary angles s, t (turns)."""
    p, q = cmath.exp(2j * math.pi * s), cmath.exp(2j * math.pi * t)
    half = abs(cmath.phase(q / p)) / 2
    if abs(half - math.pi / 2) < 1e-9:
        return np.linspace(p, q, samples)
    mid = (p + q) / abs(p + q)
    cen = mid / math.cos(half)
    rad = math.tan(half)
    a0, a1 = cmath.phase(p - cen), cmath.phase(q - cen)
    d = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    return cen + rad * np.exp(1j * (a0 + d * np.linspace(0, 1, samples)))


def _svg_arc(s, t, R, cx, cy) -> str:
    p, q = cmath.exp(2j * math.pi * s), cmath.exp(2j * math.pi * t)
    x1, y1 = cx + R * p.real, cy - R * p.imag
    x2, y2 = cx + R * q.real, cy - R * q.imag
    half = abs(cmath.phase(q / p)) / 2
    if abs(half - math.pi / 2) < 1e-9:
        return f"M {x1:.6f} {y1:.6f} L {x2:.6f} {y2:.6f}"
    rad = R * math.tan(half)
    ccw = cmath.phase(q / p) > 0
    sweep = 0 if ccw else 1
    return f"M {x1:.6f} {y1:.6f} A {rad:.6f} {rad:.6f} 0 0 {sweep} {x2:.6f} {y2:.6f}"


def _disk_angles(lam):
    from .portraits import position

    leaves = sorted((sorted(position(x, lam.map_kind) for x in leaf) for leaf in lam.leaves))
    polys = []
    for cl in lam.classes:
        if len(cl) > 2:
            polys.append(sorted(position(x, lam.map_kind) for x in cl))
    return leaves, polys


def render_lamination_disk(lam, job: RenderJob | None = None):
    """Return (svg text, RGB raster) of the lamination's geodesics."""
    if lam.crossings():
        raise InvalidInput("lamination has crossing leaves")
    job = job or RenderJob("lamination_disk", 0j, 2.2, None, (512, 512))
    leaves, polys = _disk_angles(lam)
    size = 512
    R, cx, cy = 240.0, 256.0, 256.0
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             f'<circle cx="{cx}" cy="{cy}" r="{R}" fill="white" stroke="black" stroke-width="1"/>']
    for pg in polys:
        d = " ".join(_svg_arc(pg[k], pg[(k + 1) % len(pg)], R, cx, cy) for k in range(len(pg)))
        parts.append(f'<path d="{d}" fill="#c8d8f0" stroke="none"/>')
    for s, t in leaves:
        parts.append(f'<path d="{_svg_arc(s, t, R, cx, cy)}" fill="none" stroke="#203060" stroke-width="0.8"/>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"

    W, H = job.resolution
    img = Image.new("RGB", (W, H), (255, 255, 255))
    d = ImageDraw.Draw(img)
    circle = [job.to_pixel(cmath.exp(2j * math.pi * t)) for t in np.linspace(0, 1, 721)]
    d.line(circle, fill=(0, 0, 0), width=1)
    for pg in polys:
        ring = []
        for k in range(len(pg)):
            ring.extend(job.to_pixel(complex(z)) for z in geodesic(pg[k], pg[(k + 1) % len(pg)]))
        d.polygon(ring, fill=(200, 216, 240))
    for s, t in leaves:
        d.line([job.to_pixel(complex(z)) for z in geodesic(s, t)], fill=(32, 48, 96), width=1)
    return svg, np.asarray(img).copy()


# ---------------------------------------------------------------------------
# exports


CLASS_NAMES = {ESCAPED: "escaping", BOUNDED: "bounded", SINGULAR: "singular", SLIT: "slit"}


def scan_rows(job: RenderJob, tol=DEFAULT) -> list[ScanRow]:
    grid = parameter_scan(job, keep_address=job.max_iter, tol=tol)
    xs, ys = job.axes()
    rows = []
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            st = int(grid.status[j, i])
            rk = int(grid.rank[j, i])
            word = "".join(str(s) for s in grid.addresses[j, i, :rk]) if st == ESCAPED else ""
            rows.append(ScanRow(float(x), float(y), rk if st == ESCAPED else None, word, CLASS_NAMES[st]))
    return rows


def rows_to_csv(rows: list[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ScanRow.FIELDS)
    for r in rows:
        w.writerow(r.as_tuple())
    return buf.getvalue()


def dumps_json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=1) + "\n"
