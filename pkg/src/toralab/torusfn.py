"""Z^d-periodic vector-valued functions on the torus.

Two representations: finite Fourier series (TrigPoly) with the
convention f(x) = sum_n c_n exp(2 pi i <n, x>), and uniform-grid samples
(GridFunction) at the points k/N.  The transform divides by N^d so the
re-indexing under integer linear substitutions is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnreliableFit

TWO_PI = 2.0 * np.pi


def _chunks(n, size):
    for i in range(0, n, size):
        yield slice(i, min(i + size, n))


class TrigPoly:
    """Finite Fourier series with integer frequency support.

    coeffs maps frequency tuples n in Z^d to complex vectors of length m.
    """

    def __init__(self, dim_domain, dim_range, coeffs=None):
        self.dim_domain = int(dim_domain)
        self.dim_range = int(dim_range)
        self.coeffs = {}
        self._dense = None
        if coeffs:
            for n, c in coeffs.items():
                self[n] = c

    def __setitem__(self, n, c):
        n = tuple(int(x) for x in n)
        c = np.asarray(c, dtype=complex).reshape(self.dim_range)
        self._dense = None
        if np.any(c != 0):
            self.coeffs[n] = c
        else:
            self.coeffs.pop(n, None)

    def __getitem__(self, n):
        return self.coeffs.get(tuple(int(x) for x in n),
                               np.zeros(self.dim_range, dtype=complex))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim_domain, dim_range):
        return cls(dim_domain, dim_range)

    @classmethod
    def sin_mode(cls, freq, amplitude, dim_range=None):
        """amplitude * sin(2 pi <freq, x>) as a real trig polynomial."""
        freq = tuple(int(x) for x in freq)
        amp = np.atleast_1d(np.asarray(amplitude, dtype=float))
        m = dim_range or amp.size
        out = cls(len(freq), m)
        vec = np.zeros(m, dtype=complex)
        vec[:amp.size] = amp
        out[freq] = vec / 2j
        out[tuple(-x for x in freq)] = -vec / 2j
        return out

    @classmethod
    def cos_mode(cls, freq, amplitude, dim_range=None):
        freq = tuple(int(x) for x in freq)
        amp = np.atleast_1d(np.asarray(amplitude, dtype=float))
        m = dim_range or amp.size
        out = cls(len(freq), m)
        vec = np.zeros(m, dtype=complex)
        vec[:amp.size] = amp
        out[freq] = vec / 2
        out[tuple(-x for x in freq)] = vec / 2
        return out

    @classmethod
    def constant_fn(cls, dim_domain, value):
        value = np.atleast_1d(np.asarray(value, dtype=complex))
        out = cls(dim_domain, value.size)
        out[(0,) * dim_domain] = value
        return out

    # -- structure ---------------------------------------------------------

    @property
    def support_radius(self):
        """Max sup-norm of frequencies in the support."""
        if not self.coeffs:
            return 0
        return max(max(abs(x) for x in n) for n in self.coeffs)

    def modes(self):
        keys = sorted(self.coeffs)
        if not keys:
            return (np.zeros((0, self.dim_domain), dtype=np.int64),
                    np.zeros((0, self.dim_range), dtype=complex))
        n = np.array(keys, dtype=np.int64)
        c = np.array([self.coeffs[k] for k in keys], dtype=complex)
        return n, c

    def copy(self):
        return TrigPoly(self.dim_domain, self.dim_range,
                        {n: c.copy() for n, c in self.coeffs.items()})

    def is_real(self, tol=1e-12):
        for n, c in self.coeffs.items():
            cc = self[tuple(-x for x in n)]
            if np.max(np.abs(cc - np.conj(c))) > tol:
                return False
        return True

    def symmetrize_real(self):
        """Project onto real-valued functions (enforce c_{-n} = conj(c_n))."""
        out = TrigPoly(self.dim_domain, self.dim_range)
        seen = set()
        for n in list(self.coeffs):
            if n in seen:
                continue
            neg = tuple(-x for x in n)
            seen.add(n)
            seen.add(neg)
            avg = 0.5 * (self[n] + np.conj(self[neg]))
            out[n] = avg
            if neg != n:
                out[neg] = np.conj(avg)
            else:
                out[n] = avg.real
        return out

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        out = self.copy()
        for n, c in other.coeffs.items():
            out[n] = out[n] + c
        return out

    def __sub__(self, other):
        out = self.copy()
        for n, c in other.coeffs.items():
            out[n] = out[n] - c
        return out

    def __mul__(self, scalar):
        return TrigPoly(self.dim_domain, self.dim_range,
                        {n: scalar * c for n, c in self.coeffs.items()})

    __rmul__ = __mul__

    def matrix_apply(self, mat):
        """Left-multiply values by a constant matrix: x -> mat @ f(x)."""
        mat = np.asarray(mat, dtype=complex)
        out = TrigPoly(self.dim_domain, mat.shape[0])
        for n, c in self.coeffs.items():
            out[n] = mat @ c
        return out

    # -- evaluation --------------------------------------------------------

    def _dense_2d(self):
        """Coefficient tensor on the frequency box, for separable eval."""
        if self._dense is None:
            f = self.support_radius
            size = 2 * f + 1
            tensor = np.zeros((size, size, self.dim_range), dtype=complex)
            for n, c in self.coeffs.items():
                tensor[n[0] + f, n[1] + f] = c
            self._dense = (f, tensor)
        return self._dense

    def _eval_separable(self, flat):
        f, tensor = self._dense_2d()
        freqs = np.arange(-f, f + 1, dtype=float)
        e1 = np.exp((2j * np.pi) * np.outer(flat[:, 0], freqs))
        e2 = np.exp((2j * np.pi) * np.outer(flat[:, 1], freqs))
        tmp = np.tensordot(e1, tensor, axes=(1, 0))      # (P, b, m)
        return np.einsum("pbm,pb->pm", tmp, e2)

    def eval(self, points, chunk=1 << 22):
        """Evaluate at points of shape (..., d); returns (..., m) complex."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.dim_domain)
        n, c = self.modes()
        n_modes = n.shape[0]
        if self.dim_domain == 2 and n_modes > 12 * (2 * self.support_radius + 1):
            # box-dense polynomial: separable exponentials are cheaper
            out = np.empty((flat.shape[0], self.dim_range), dtype=complex)
            for sl in _chunks(flat.shape[0], 1 << 16):
                out[sl] = self._eval_separable(flat[sl])
            return out.reshape(pts.shape[:-1] + (self.dim_range,))
        out = np.zeros((flat.shape[0], self.dim_range), dtype=complex)
        if n_modes:
            step = max(1, chunk // n_modes)
            for sl in _chunks(flat.shape[0], step):
                phases = flat[sl] @ n.T.astype(float)
                out[sl] = np.exp((2j * np.pi) * phases) @ c
        return out.reshape(pts.shape[:-1] + (self.dim_range,))

    def eval_real(self, points):
        return self.eval(points).real

    def _jacobian_separable(self, flat):
        f, tensor = self._dense_2d()
        freqs = np.arange(-f, f + 1, dtype=float)
        e1 = np.exp((2j * np.pi) * np.outer(flat[:, 0], freqs))
        e2 = np.exp((2j * np.pi) * np.outer(flat[:, 1], freqs))
        w = (2j * np.pi) * freqs
        out = np.empty((flat.shape[0], self.dim_range, 2), dtype=complex)
        tmp = np.tensordot(e1 * w, tensor, axes=(1, 0))
        out[..., 0] = np.einsum("pbm,pb->pm", tmp, e2)
        tmp = np.tensordot(e1, tensor, axes=(1, 0))
        out[..., 1] = np.einsum("pbm,pb->pm", tmp, e2 * w)
        return out

    def eval_jacobian(self, points):
        """Jacobian at points: shape (..., m, d)."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.dim_domain)
        n, c = self.modes()
        n_modes = n.shape[0]
        if self.dim_domain == 2 and n_modes > 12 * (2 * self.support_radius + 1):
            out = np.empty((flat.shape[0], self.dim_range, 2), dtype=complex)
            for sl in _chunks(flat.shape[0], 1 << 16):
                out[sl] = self._jacobian_separable(flat[sl])
            return out.reshape(pts.shape[:-1] +
                               (self.dim_range, self.dim_domain))
        out = np.zeros((flat.shape[0], self.dim_range, self.dim_domain),
                       dtype=complex)
        if n_modes:
            nf = n.astype(float)
            factor = (2j * np.pi) * nf                      # (K, d)
            for sl in _chunks(flat.shape[0], max(1, (1 << 21) // max(n_modes, 1))):
                e = np.exp((2j * np.pi) * (flat[sl] @ nf.T))  # (P, K)
                out[sl] = np.einsum("pk,km,kd->pmd", e, c, factor)
        return out.reshape(pts.shape[:-1] + (self.dim_range, self.dim_domain))

    # -- calculus ----------------------------------------------------------

    def derivative(self, direction):
        """Directional derivative along a constant vector."""
        v = np.asarray(direction, dtype=float)
        out = TrigPoly(self.dim_domain, self.dim_range)
        for n, c in self.coeffs.items():
            out[n] = (2j * np.pi * float(np.dot(n, v))) * c
        return out

    def partial(self, axis):
        e = np.zeros(self.dim_domain)
        e[axis] = 1.0
        return self.derivative(e)

    def compose_affine(self, mat, shift=None):
        """Exact coefficients of x -> f(M x + c) for integer M.

        The mode at frequency n moves to M^T n and picks up the phase
        exp(2 pi i <n, c>); no truncation is involved.
        """
        mt = np.asarray(mat, dtype=np.int64)
        c_shift = np.zeros(self.dim_domain) if shift is None else \
            np.asarray(shift, dtype=float)
        out = TrigPoly(self.dim_domain, self.dim_range)
        for n, c in self.coeffs.items():
            n_arr = np.array(n, dtype=np.int64)
            new_n = tuple(int(x) for x in (mt.T @ n_arr))
            phase = np.exp(2j * np.pi * float(np.dot(n_arr, c_shift)))
            out[new_n] = out[new_n] + phase * c
        return out

    # -- norms -------------------------------------------------------------

    def l2_norm(self):
        if not self.coeffs:
            return 0.0
        return float(np.sqrt(sum(np.sum(np.abs(c) ** 2)
                                 for c in self.coeffs.values())))

    def c0_upper(self):
        """Coefficient l1 bound for sup_x max_i |f_i(x)|."""
        if not self.coeffs:
            return 0.0
        total = np.zeros(self.dim_range)
        for c in self.coeffs.values():
            total += np.abs(c)
        return float(np.max(total))

    def c0_lower(self, grid_n=64):
        return float(grid_sup(self, grid_n))

    def restrict(self, radius):
        """Drop coefficients outside the sup-norm ball of the given radius."""
        out = TrigPoly(self.dim_domain, self.dim_range)
        dropped = 0.0
        for n, c in self.coeffs.items():
            if max(abs(x) for x in n) <= radius:
                out[n] = c
            else:
                dropped += float(np.max(np.abs(c)))
        return out, dropped

    def threshold(self, cutoff):
        out = TrigPoly(self.dim_domain, self.dim_range)
        for n, c in self.coeffs.items():
            if np.max(np.abs(c)) > cutoff:
                out[n] = c
        return out

    def to_grid(self, grid_n, allow_alias=False):
        if not allow_alias and 2 * self.support_radius >= grid_n:
            raise ValueError("grid too coarse for the support radius "
                             f"({self.support_radius} vs N={grid_n})")
        d, m = self.dim_domain, self.dim_range
        arr = np.zeros((grid_n,) * d + (m,), dtype=complex)
        for n, c in self.coeffs.items():
            idx = tuple(x % grid_n for x in n)
            arr[idx] += c
        vals = np.fft.ifftn(arr, axes=tuple(range(d))) * (grid_n ** d)
        return GridFunction(vals, interpolation="trig")


def grid_sup(tp, grid_n=64):
    vals = tp.to_grid(grid_n, allow_alias=2 * tp.support_radius >= grid_n)
    return np.max(np.abs(vals.values.real)) if tp.is_real(1e-9) else \
        np.max(np.abs(vals.values))


@dataclass
class C0Bounds:
    lower: float
    upper: float


def c0_norm(fn, grid_n=128):
    """Certified bracket for the sup norm: [grid max, coefficient l1 sum]."""
    tp = fn if isinstance(fn, TrigPoly) else fn.to_trig()
    safe_n = max(grid_n, 2 * tp.support_radius + 2)
    return C0Bounds(lower=float(grid_sup(tp, safe_n)), upper=tp.c0_upper())


def c1_norm(fn, grid_n=128):
    """Bracket for ||f||_C0 + max_j ||d_j f||_C0."""
    tp = fn if isinstance(fn, TrigPoly) else fn.to_trig()
    base = c0_norm(tp, grid_n)
    lowers, uppers = [], []
    for j in range(tp.dim_domain):
        b = c0_norm(tp.partial(j), grid_n)
        lowers.append(b.lower)
        uppers.append(b.upper)
    return C0Bounds(lower=base.lower + (max(lowers) if lowers else 0.0),
                    upper=base.upper + (max(uppers) if uppers else 0.0))


class GridFunction:
    """Samples of a periodic function at the uniform grid k/N."""

    def __init__(self, values, interpolation="trig"):
        values = np.asarray(values)
        if values.ndim < 2:
            raise ValueError("expected shape (N, ..., N, m)")
        self.values = values
        self.dim_domain = values.ndim - 1
        self.dim_range = values.shape[-1]
        self.grid_n = values.shape[0]
        if any(s != self.grid_n for s in values.shape[:-1]):
            raise ValueError("grid must be uniform in every axis")
        self.interpolation = interpolation
        self._trig_cache = None

    @classmethod
    def from_callable(cls, fn, dim_domain, grid_n, interpolation="trig"):
        axes = [np.arange(grid_n) / grid_n] * dim_domain
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        vals = np.asarray(fn(mesh.reshape(-1, dim_domain)))
        m = vals.shape[-1] if vals.ndim > 1 else 1
        vals = vals.reshape((grid_n,) * dim_domain + (m,))
        return cls(vals, interpolation=interpolation)

    def grid_points(self):
        axes = [np.arange(self.grid_n) / self.grid_n] * self.dim_domain
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def to_trig(self, threshold=0.0):
        """Fourier coefficients (divided by N^d); optionally thresholded."""
        d, n = self.dim_domain, self.grid_n
        coef = np.fft.fftn(self.values, axes=tuple(range(d))) / (n ** d)
        freqs = (np.fft.fftfreq(n) * n).astype(np.int64)
        out = TrigPoly(d, self.dim_range)
        mags = np.max(np.abs(coef), axis=-1)
        idx = np.argwhere(mags > threshold)
        for ind in idx:
            key = tuple(int(freqs[i]) for i in ind)
            out[key] = coef[tuple(ind)]
        return out

    def eval(self, points):
        if self.interpolation == "linear":
            return self._eval_linear(points)
        if self._trig_cache is None:
            self._trig_cache = self.to_trig(threshold=0.0)
        return self._trig_cache.eval(points).real if \
            np.isrealobj(self.values) else self._trig_cache.eval(points)

    def _eval_linear(self, points):
        pts = np.asarray(points, dtype=float) % 1.0
        flat = pts.reshape(-1, self.dim_domain)
        n = self.grid_n
        scaled = flat * n
        base = np.floor(scaled).astype(int)
        frac = scaled - base
        out = np.zeros((flat.shape[0], self.dim_range))
        for corner in range(1 << self.dim_domain):
            weight = np.ones(flat.shape[0])
            idx = []
            for axis in range(self.dim_domain):
                bit = (corner >> axis) & 1
                weight = weight * (frac[:, axis] if bit else 1 - frac[:, axis])
                idx.append((base[:, axis] + bit) % n)
            out += weight[:, None] * self.values[tuple(idx)]
        return out.reshape(pts.shape[:-1] + (self.dim_range,))

    def jacobian_grid(self):
        """Spectral Jacobian at the grid points: shape grid + (m, d)."""
        d, n, m = self.dim_domain, self.grid_n, self.dim_range
        coef = np.fft.fftn(self.values, axes=tuple(range(d)))
        freqs = (np.fft.fftfreq(n) * n)
        out = np.empty(self.values.shape + (d,), dtype=complex)
        for axis in range(d):
            shape = [1] * (d + 1)
            shape[axis] = n
            mult = (2j * np.pi) * freqs.reshape(shape)
            out[..., axis] = np.fft.ifftn(coef * mult, axes=tuple(range(d)))
        return out.real if np.isrealobj(self.values) else out

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def l2_norm(self):
        return float(np.sqrt(np.mean(np.sum(np.abs(self.values) ** 2,
                                            axis=-1))))


def transform(gf, threshold=0.0):
    """GridFunction -> TrigPoly (the forward transform of the module)."""
    return gf.to_trig(threshold=threshold)


def inverse_transform(tp, grid_n):
    """TrigPoly -> GridFunction; exact when 2 * support_radius < N."""
    return tp.to_grid(grid_n)


# ---------------------------------------------------------------------------
# Regularity estimators
# ---------------------------------------------------------------------------

@dataclass
class HolderEstimate:
    """Least-squares slope of log sup-increment against log scale."""
    exponent: float
    constant: float
    residual: float
    scales: np.ndarray
    increments: np.ndarray
    n_pairs: int
    reliable: bool
    threshold: float


def _as_evaluator(fn):
    if isinstance(fn, TrigPoly):
        return fn.dim_domain, fn.eval_real
    if isinstance(fn, GridFunction):
        return fn.dim_domain, fn.eval
    if callable(fn):
        raise TypeError("pass (dim, callable) via estimate_holder_callable")
    raise TypeError(f"cannot evaluate {type(fn)!r}")


def estimate_holder(fn, dim=None, j_min=4, j_max=16, pairs=10000, seed=0,
                    residual_threshold=0.2, strict=False):
    """Estimate a Holder exponent from sup-increments at dyadic scales.

    The increment at scale 2^-j is the max of |f(x + delta u) - f(x)| over
    `pairs` random base points and unit directions u.  The exponent is the
    least-squares slope in log-log; an estimator, not a certificate.
    """
    if callable(fn) and not isinstance(fn, (TrigPoly, GridFunction)):
        if dim is None:
            raise TypeError("dim required for a bare callable")
        evaluator = fn
    else:
        dim, evaluator = _as_evaluator(fn)
    rng = np.random.default_rng(seed)
    base = rng.random((pairs, dim))
    dirs = rng.normal(size=(pairs, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    scales = np.array([2.0 ** (-j) for j in range(j_min, j_max + 1)])
    sups = []
    f0 = np.asarray(evaluator(base))
    for delta in scales:
        f1 = np.asarray(evaluator(base + delta * dirs))
        inc = np.max(np.abs(f1 - f0), axis=-1) if f1.ndim > 1 else \
            np.abs(f1 - f0)
        sups.append(float(np.max(inc)))
    sups = np.array(sups)
    mask = sups > 0
    if mask.sum() < 3:
        if np.all(sups < 1e-13 * max(1.0, np.max(np.abs(f0)))):
            # constant function: any exponent fits; report saturation
            return HolderEstimate(exponent=1.0, constant=0.0, residual=0.0,
                                  scales=scales, increments=sups,
                                  n_pairs=pairs, reliable=True,
                                  threshold=residual_threshold)
        raise UnreliableFit("increments vanish at almost every scale")
    x = np.log(scales[mask])
    y = np.log(sups[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    reliable = resid <= residual_threshold
    if strict and not reliable:
        raise UnreliableFit(f"log-log fit residual {resid:.3f} exceeds "
                            f"{residual_threshold}")
    return HolderEstimate(exponent=float(min(max(slope, 0.0), 1.5)),
                          constant=float(np.exp(intercept)),
                          residual=resid, scales=scales, increments=sups,
                          n_pairs=pairs, reliable=reliable,
                          threshold=residual_threshold)


def finite_difference_ratio(fn, dim, scale, pairs=10000, seed=0):
    """sup over sampled pairs of |f(x + delta u) - f(x)| / delta."""
    if isinstance(fn, (TrigPoly, GridFunction)):
        _, evaluator = _as_evaluator(fn)
    else:
        evaluator = fn
    rng = np.random.default_rng(seed)
    base = rng.random((pairs, dim))
    dirs = rng.normal(size=(pairs, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    f0 = np.asarray(evaluator(base))
    f1 = np.asarray(evaluator(base + scale * dirs))
    inc = np.abs(f1 - f0)
    if inc.ndim > 1:
        inc = np.max(inc, axis=-1)
    return float(np.max(inc) / scale)


def holder_norm(fn, beta, grid_n=128, pairs=10000, seed=0):
    """Numeric Holder(beta) norm: C0 plus the sup increment quotient."""
    tp = fn if isinstance(fn, TrigPoly) else fn.to_trig()
    dim, evaluator = _as_evaluator(tp)
    rng = np.random.default_rng(seed)
    base = rng.random((pairs, dim))
    other = rng.random((pairs, dim))
    diff = base - other
    diff -= np.round(diff)  # torus distance representative
    dist = np.linalg.norm(diff, axis=1)
    keep = dist > 1e-12
    f0 = evaluator(base[keep])
    f1 = evaluator(other[keep])
    quot = np.max(np.abs(f0 - f1), axis=-1) / dist[keep] ** beta
    return c0_norm(tp, grid_n).lower + float(np.max(quot))


def sobolev_norm(fn, q, grid_n=64):
    """Grid quadrature of (|f|^q + |Df|^q)^(1/q); diagnostic only.

    A grid cannot certify weak differentiability, so this is reported as
    an indicator, never as a membership proof.
    """
    if isinstance(fn, TrigPoly):
        gf = fn.to_grid(max(grid_n, 2 * fn.support_radius + 2))
    else:
        gf = fn
    vals = np.abs(gf.values)
    fnorm = np.sqrt(np.sum(vals ** 2, axis=-1))
    jac = gf.jacobian_grid()
    jnorm = np.sqrt(np.sum(np.abs(jac) ** 2, axis=(-2, -1)))
    integrand = fnorm ** q + jnorm ** q
    return float(np.mean(integrand) ** (1.0 / q))


def trig_to_record(tp):
    """JSON-compatible record: list of (frequency, complex vector) pairs."""
    modes = []
    for n in sorted(tp.coeffs):
        c = tp.coeffs[n]
        modes.append({"freq": [int(x) for x in n],
                      "re": [float(v) for v in c.real],
                      "im": [float(v) for v in c.imag]})
    return {"dim_domain": tp.dim_domain, "dim_range": tp.dim_range,
            "convention": "exp(2 pi i <n, x>)", "modes": modes}


def trig_from_record(rec):
    tp = TrigPoly(rec["dim_domain"], rec["dim_range"])
    for mode in rec["modes"]:
        tp[tuple(mode["freq"])] = np.array(mode["re"]) + \
            1j * np.array(mode["im"])
    return tp


def save_grid(gf, path, extra_header=None):
    """Text format: one JSON header line, then one sample row per line."""
    import json
    header = {"dim_domain": gf.dim_domain, "dim_range": gf.dim_range,
              "grid_n": gf.grid_n, "interpolation": gf.interpolation,
              "convention": "samples at k/N, row-major",
              "complex": bool(np.iscomplexobj(gf.values))}
    if extra_header:
        header.update(extra_header)
    flat = gf.values.reshape(-1, gf.dim_range)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row in flat:
            if header["complex"]:
                fh.write(" ".join(f"{v.real:.17g} {v.imag:.17g}"
                                  for v in row) + "\n")
            else:
                fh.write(" ".join(f"{float(v):.17g}" for v in row) + "\n")


def load_grid(path):
    import json
    with open(path) as fh:
        header = json.loads(fh.readline())
        rows = [line.split() for line in fh if line.strip()]
    d, m, n = header["dim_domain"], header["dim_range"], header["grid_n"]
    data = np.array(rows, dtype=float)
    if header["complex"]:
        vals = data[:, 0::2] + 1j * data[:, 1::2]
    else:
        vals = data
    return GridFunction(vals.reshape((n,) * d + (m,)),
                        interpolation=header["interpolation"])


def weierstrass_type(alpha, base=3, terms=30):
    """Self-similar profile sum_k base^(-alpha k) sin(2 pi base^k x).

    Classical lacunary series with Holder exponent alpha by construction
    (matched amplitude/frequency base); the standard test family for the
    exponent estimator.
    """
    def fn(points):
        pts = np.asarray(points, dtype=float)
        x = pts[..., 0] if pts.ndim > 1 else pts
        out = np.zeros_like(x)
        for k in range(terms):
            out += base ** (-alpha * k) * np.sin(TWO_PI * (base ** k) * x)
        return out[..., None]
    return fn
