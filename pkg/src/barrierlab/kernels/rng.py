"""Counter-based random numbers shared by the numba and numpy backends.

Every normal draw is a pure function of (master_seed, path_index, draw_index):
a 64-bit mix (splitmix-style finalizer over a Weyl sequence) produces a
uniform in (0, 1), which is mapped through the inverse normal CDF.  This
gives each path an independent substream addressed by its index, so results
are reproducible for any batch split and any number of workers.

The inverse normal CDF is Wichura's double-precision rational approximation;
the same coefficients are used verbatim by both backends.
"""
from __future__ import annotations

import numpy as np

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_S30 = U64(30)
_S27 = U64(27)
_S31 = U64(31)
_S11 = U64(11)
_ONE = U64(1)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53

# Two reserved draw slots per time step: slot 0 drives the base increment,
# slot 1 is consumed only when the skew mixture is active.
DRAWS_PER_STEP = 2


def mix64(z):
    """Finalizing bijection on 64-bit integers (scalar or ndarray)."""
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def path_key(master_seed, path_index):
    """Independent 64-bit stream key for one path."""
    with np.errstate(over="ignore"):  # modular 64-bit arithmetic is intended
        return mix64(mix64(U64(master_seed) + GOLDEN * (U64(path_index) + _ONE)))


def path_keys(master_seed, path_start, n_paths):
    """Vector of stream keys for a contiguous block of path indices."""
    with np.errstate(over="ignore"):
        idx = np.arange(path_start, path_start + n_paths, dtype=np.uint64)
        return mix64(mix64(U64(master_seed) + GOLDEN * (idx + _ONE)))


def uniform(key, draw_index):
    """Uniform in (0, 1) for the given stream key(s) and draw index."""
    with np.errstate(over="ignore"):
        bits = mix64(key + GOLDEN * U64(draw_index))
    if isinstance(bits, np.ndarray):
        return ((bits >> _S11).astype(np.float64) + 0.5) * _INV_2_53
    return (float(bits >> _S11) + 0.5) * _INV_2_53


# ---------------------------------------------------------------------------
# Inverse normal CDF (double precision rational approximation)

# Central branch |p - 0.5| <= 0.425
_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
# Intermediate branch r = sqrt(-log(p)) in (1.6, 5]
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
# Tail branch r > 5
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly7(c, x):
    """Degree-7 polynomial with coefficients in ascending order (Horner)."""
    return c[0] + x * (
        c[1] + x * (c[2] + x * (c[3] + x * (c[4] + x * (c[5] + x * (c[6] + x * c[7])))))
    )


def norm_ppf_scalar(p: float) -> float:
    """Inverse standard normal CDF for a scalar in (0, 1)."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly7(_A, r) / _poly7(_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = np.sqrt(-np.log(r))
    if r <= 5.0:
        r = r - 1.6
        val = _poly7(_C, r) / _poly7(_D, r)
    else:
        r = r - 5.0
        val = _poly7(_E, r) / _poly7(_F, r)
    return -val if q < 0.0 else val


def norm_ppf(p: np.ndarray) -> np.ndarray:
    """Vectorised inverse standard normal CDF, same branches as the scalar form."""
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    r = 0.180625 - q[central] * q[central]
    out[central] = q[central] * _poly7(_A, r) / _poly7(_B, r)

    tail = ~central
    pt = np.where(q[tail] < 0.0, p[tail], 1.0 - p[tail])
    r = np.sqrt(-np.log(pt))
    near = r <= 5.0
    rn = r[near] - 1.6
    rf = r[~near] - 5.0
    vals = np.empty_like(r)
    vals[near] = _poly7(_C, rn) / _poly7(_D, rn)
    vals[~near] = _poly7(_E, rf) / _poly7(_F, rf)
    out[tail] = np.where(q[tail] < 0.0, -vals, vals)
    return out


def standard_normals(key, draw_index):
    """Standard normal draw(s) for stream key(s) at the given draw index."""
    u = uniform(key, draw_index)
    if isinstance(u, np.ndarray):
        return norm_ppf(u)
    return norm_ppf_scalar(u)
