# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of :mod:`paulilt.specfun._core`.

Same four primitives, same branch map, same constants — see the pure module's
docstring for the method notes and the accuracy discussion.  The twin exists
because the resolvent-kernel sweeps and Birman-Schwinger bisections evaluate
millions of scalar kernels; everything here is a straight scalar transcription
of the vectorized fallback, kept line-comparable on purpose so the
twin-consistency test (identical branch choices, <=1e-13 relative agreement)
pins the two implementations together.
"""

from libc.math cimport (M_PI, cosh, exp, fabs, lgamma, log, sin, sinh, sqrt,
                        tgamma)

import numpy as np

cimport numpy as cnp

cnp.import_array()

__all__ = ["bessel_i", "bessel_k", "bessel_i_diff", "bessel_k_diff"]

cdef double _EPS = 1e-17
cdef int _MAXIT = 400

# Taylor coefficients of 1/Gamma(1+x); see _core._RGAMMA1_TAYLOR.
cdef double[9] _RG1 = [
    1.0,
    0.57721566490153286,
    -0.65587807152025388,
    -0.042002635034095236,
    0.16653861138229149,
    -0.042197734555544337,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
]


cdef inline double _asym_threshold(double nu) nogil:
    cdef double t = 2.0 * nu * nu
    return t if t > 18.0 else 18.0


cdef void _gam1_gam2(double mu, double* gam1, double* gam2) nogil:
    cdef double mu2, rg_plus, rg_minus
    if fabs(mu) < 1e-3:
        mu2 = mu * mu
        gam1[0] = -(_RG1[1] + mu2 * (_RG1[3] + mu2 * (_RG1[5] + mu2 * _RG1[7])))
        gam2[0] = _RG1[0] + mu2 * (_RG1[2] + mu2 * (_RG1[4] + mu2 * (_RG1[6] + mu2 * _RG1[8])))
    else:
        rg_plus = 1.0 / tgamma(1.0 + mu)
        rg_minus = 1.0 / tgamma(1.0 - mu)
        gam1[0] = (rg_minus - rg_plus) / (2.0 * mu)
        gam2[0] = (rg_minus + rg_plus) / 2.0


# ----------------------------------------------------------------------------
# I_nu
# ----------------------------------------------------------------------------

cdef double _i_series(double nu, double z, bint scaled) nogil:
    cdef double quarter = 0.25 * z * z
    cdef double term = 1.0
    cdef double total = 1.0
    cdef double front
    cdef int k
    for k in range(1, _MAXIT):
        term = term * quarter / (k * (nu + k))
        total += term
        if term <= _EPS * total:
            break
    front = nu * log(0.5 * z) - lgamma(1.0 + nu)
    if scaled:
        front -= z
    return exp(front) * total


cdef double _i_asym(double nu, double z, bint scaled) nogil:
    cdef double mu4 = 4.0 * nu * nu
    cdef double u = 1.0
    cdef double s_dom = 1.0
    cdef double s_sub = 1.0
    cdef double sign = 1.0
    cdef double u_next, val
    cdef int k
    for k in range(1, _MAXIT):
        u_next = u * (mu4 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * z)
        if fabs(u_next) >= fabs(u):
            break
        sign = -sign
        u = u_next
        s_dom += sign * u
        s_sub += u
        if fabs(u) <= _EPS * s_dom:
            break
    val = (s_dom - sin(M_PI * nu) * exp(-2.0 * z) * s_sub) / sqrt(2.0 * M_PI * z)
    return val if scaled else exp(z) * val


cdef double _i_scalar(double nu, double z, bint scaled) nogil:
    if z < _asym_threshold(nu):
        return _i_series(nu, z, scaled)
    return _i_asym(nu, z, scaled)


# ----------------------------------------------------------------------------
# K_nu
# ----------------------------------------------------------------------------

cdef void _k_temme(double mu, double z, double* kmu, double* kmu1) nogil:
    cdef double half = 0.5 * z
    cdef double d = -log(half)
    cdef double e = mu * d
    cdef double pimu = M_PI * mu
    cdef double fact = pimu / sin(pimu) if pimu != 0.0 else 1.0
    cdef double fact2
    cdef double gam1 = 0.0, gam2 = 0.0
    cdef double gampl, gammi, f, p, q, w, c, ksum, k1sum, delta
    cdef int k
    if fabs(e) < 1e-8:
        fact2 = 1.0 + e * e / 6.0
    else:
        fact2 = sinh(e) / e
    _gam1_gam2(mu, &gam1, &gam2)
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    f = fact * (gam1 * cosh(e) + gam2 * fact2 * d)
    p = 0.5 * exp(e) / gampl
    q = 0.5 * exp(-e) / gammi
    w = z * z * 0.25
    c = 1.0
    ksum = f
    k1sum = p
    for k in range(1, _MAXIT):
        f = (k * f + p + q) / (k * k - mu * mu)
        p = p / (k - mu)
        q = q / (k + mu)
        c = c * w / k
        delta = c * f
        ksum += delta
        k1sum += c * (p - k * f)
        if fabs(delta) < _EPS * fabs(ksum):
            break
    kmu[0] = ksum
    kmu1[0] = k1sum * (2.0 / z)


cdef void _k_cf2(double mu, double z, double* kmu, double* kmu1) nogil:
    # scaled pair (e^z K_mu, e^z K_{mu+1})
    cdef double mu2 = mu * mu
    cdef double b = 2.0 * (1.0 + z)
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double delh = d
    cdef double q1 = 0.0
    cdef double q2 = 1.0
    cdef double a1 = 0.25 - mu2
    cdef double q = a1
    cdef double c = a1
    cdef double a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if fabs(dels) < _EPS * fabs(s):
            break
    h = a1 * h
    kmu[0] = sqrt(M_PI / (2.0 * z)) / s
    kmu1[0] = kmu[0] * (mu + z + 0.5 - h) / z


cdef double _k_asym(double nu, double z) nogil:
    # scaled e^z K_nu
    cdef double mu4 = 4.0 * nu * nu
    cdef double u = 1.0
    cdef double total = 1.0
    cdef double u_next
    cdef int k
    for k in range(1, _MAXIT):
        u_next = u * (mu4 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * z)
        if fabs(u_next) >= fabs(u):
            break
        u = u_next
        total += u
        if fabs(u) <= _EPS * total:
            break
    return sqrt(M_PI / (2.0 * z)) * total


cdef double _k_scalar(double nu, double z, bint scaled) nogil:
    cdef int n_up = <int>(nu + 0.5)
    cdef double mu = nu - n_up
    cdef double kmu = 0.0, kmu1 = 0.0, tmp
    cdef int j
    if z >= _asym_threshold(nu):
        tmp = _k_asym(nu, z)
        return tmp if scaled else tmp * exp(-z)
    if z <= 2.0:
        _k_temme(mu, z, &kmu, &kmu1)
        if scaled:
            kmu *= exp(z)
            kmu1 *= exp(z)
    else:
        _k_cf2(mu, z, &kmu, &kmu1)
        if not scaled:
            kmu *= exp(-z)
            kmu1 *= exp(-z)
    if n_up == 0:
        return kmu
    for j in range(1, n_up):
        tmp = kmu1
        kmu1 = kmu + (2.0 * (mu + j) / z) * kmu1
        kmu = tmp
    return kmu1


# ----------------------------------------------------------------------------
# Differences
# ----------------------------------------------------------------------------

cdef void _diff_asym_sums(double nu, double z, double* s_plus, double* s_minus) nogil:
    cdef double mu4 = 4.0 * nu * nu
    cdef double u0 = 1.0
    cdef double d = 0.0
    cdef double sp = 0.0
    cdef double sm = 0.0
    cdef double sign = 1.0
    cdef double odd2, d_next
    cdef int k
    for k in range(1, _MAXIT):
        odd2 = <double>((2 * k - 1) * (2 * k - 1))
        d_next = (d * (mu4 - odd2) + u0 * mu4) / (8.0 * k * z)
        if k > 1 and fabs(d_next) >= fabs(d):
            break
        d = d_next
        u0 = u0 * (-odd2) / (8.0 * k * z)
        sign = -sign
        sp += d
        sm += sign * d
        if fabs(d) <= _EPS * (fabs(sp) + 1e-300):
            break
    s_plus[0] = sp
    s_minus[0] = sm


cdef double _kdiff_scalar(double nu, double z, bint scaled) nogil:
    cdef double sp = 0.0, sm = 0.0, val
    if z >= 18.0:
        _diff_asym_sums(nu, z, &sp, &sm)
        val = sqrt(M_PI / (2.0 * z)) * sp
        return val if scaled else val * exp(-z)
    val = _k_scalar(nu, z, True) - _k_scalar(0.0, z, True)
    return val if scaled else val * exp(-z)


cdef double _idiff_scalar(double nu, double z, bint scaled) nogil:
    cdef double sp = 0.0, sm = 0.0, val, sub
    if z >= 18.0:
        _diff_asym_sums(nu, z, &sp, &sm)
        sub = _k_asym(nu, z) * (sin(M_PI * nu) / M_PI)
        val = -sm / sqrt(2.0 * M_PI * z) + exp(-2.0 * z) * sub
        return val if scaled else val * exp(z)
    val = _i_scalar(0.0, z, True) - _i_scalar(nu, z, True)
    return val if scaled else val * exp(z)


# ----------------------------------------------------------------------------
# Python-facing wrappers (scalar or ndarray z, matching the pure twin)
# ----------------------------------------------------------------------------

ctypedef double (*scalar_fn)(double, double, bint) nogil


cdef _apply(scalar_fn fn, double nu, z, bint scaled):
    cdef double[::1] src
    cdef double[::1] dst
    cdef Py_ssize_t i, n
    cdef double zs
    if type(z) is float or type(z) is int:
        zs = <double>z
        if zs <= 0.0:
            raise ValueError("argument must satisfy z > 0")
        return fn(nu, zs, scaled)
    if np.ndim(z) == 0:
        zs = <double>z
        if zs <= 0.0:
            raise ValueError("argument must satisfy z > 0")
        return fn(nu, zs, scaled)
    arr = np.ascontiguousarray(z, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("argument must satisfy z > 0")
    out = np.empty_like(arr)
    src = arr.ravel()
    dst = out.ravel()
    n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = fn(nu, src[i], scaled)
    return out


def _check_order(double nu):
    if not 0.0 <= nu <= 2.0:
        raise ValueError(f"order out of range: nu={nu}")


def bessel_i(double nu, z, bint scaled=False):
    """Compiled I_nu; see :func:`paulilt.specfun._core.bessel_i`."""
    _check_order(nu)
    return _apply(_i_scalar, nu, z, scaled)


def bessel_k(double nu, z, bint scaled=False):
    """Compiled K_nu; see :func:`paulilt.specfun._core.bessel_k`."""
    _check_order(nu)
    return _apply(_k_scalar, nu, z, scaled)


def bessel_k_diff(double nu, z, bint scaled=False):
    """Compiled K_nu - K_0; see :func:`paulilt.specfun._core.bessel_k_diff`."""
    _check_order(nu)
    return _apply(_kdiff_scalar, nu, z, scaled)


def bessel_i_diff(double nu, z, bint scaled=False):
    """Compiled I_0 - I_nu; see :func:`paulilt.specfun._core.bessel_i_diff`."""
    _check_order(nu)
    return _apply(_idiff_scalar, nu, z, scaled)
