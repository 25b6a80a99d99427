"""Scalar Bessel kernels in plain Python.

This is the reference implementation of the hot loops.  ``_ckernels.pyx``
mirrors every function here with C types; the two are kept in lockstep and
the test suite checks that they agree to rounding.

Methods
-------
* ``I_nu``: ascending series for x <= 25, Hankel-type asymptotic beyond.
* ``K_nu``: Temme's series for x <= 2, Steed's continued fraction beyond.
* ``J_nu, Y_nu`` (nu >= 0): Temme for x < 2, Steed CF1 + CF2 for
  2 <= x < 25, Hankel P/Q asymptotics for x >= 25.
* ``J_{-nu}``: ascending series for x < 2, reflection through (J, Y)
  for 2 <= x < 25, Hankel with the negative order beyond.
"""

import math

import numpy as np

EPS = 1.0e-16
FPMIN = 1.0e-300
MAXIT = 100000
SERIES_MAX = 25.0
TEMME_MAX = 2.0
EULER = 0.57721566490153286061

# Taylor coefficients of 1/Gamma(1+x) about 0.
_RGAMMA_TAYLOR = (
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -0.0000012504934821426706573,
    0.0000011330272319816958824,
    -0.00000020563384169776071035,
    0.0000000061160951044814158179,
    0.0000000050020076444692229301,
    -0.0000000011812745704870201446,
    0.00000000010434267116911005105,
    0.000000000007782263439905071254,
    -0.0000000000036968056186422057082,
    0.0000000000005100370287454475979,
    -0.000000000000020583260535665067832,
    -0.0000000000000053481225394230179824,
    0.0000000000000012267786282382607902,
)


def rgamma_parts(mu):
    """Temme's auxiliary gamma combinations for ``|mu| <= 1/2``.

    Returns ``(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))`` where
    ``gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)`` and
    ``gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2``.  Both are evaluated from
    the odd and even parts of the Taylor series so neither cancels at mu = 0.
    """
    even = 0.0
    odd = 0.0
    mu2 = mu * mu
    for k in range(len(_RGAMMA_TAYLOR) - 1, -1, -1):
        if k % 2 == 0:
            even = even * mu2 + _RGAMMA_TAYLOR[k]
        else:
            odd = odd * mu2 + _RGAMMA_TAYLOR[k]
    gam1 = -odd
    gam2 = even
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def hankel_pq(nu, x):
    """Asymptotic P and Q for J/Y at large x, summed to the smallest term."""
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    last = math.inf
    k = 0
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = abs(term)
        if mag >= last or mag < EPS * 1e-3:
            break
        last = mag
        # term = a_k / x^k; P takes even k, Q odd k, with alternating signs
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 == 1 else term
    return p, q


def bessel_i_scaled(nu, x):
    """``exp(-x) I_nu(x)`` for nu >= 0 and x > 0."""
    if x <= SERIES_MAX:
        half = 0.5 * x
        term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0) - x)
        total = term
        q = half * half
        k = 0
        while True:
            k += 1
            term *= q / (k * (k + nu))
            total += term
            if term < EPS * total:
                break
        return total
    mu = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    last = math.inf
    k = 0
    while True:
        k += 1
        term *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= last or abs(term) < EPS * 1e-3:
            break
        last = abs(term)
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_k_scaled(nu, x):
    """``exp(x) K_nu(x)`` and ``exp(x) K_{nu+1}(x)`` for nu >= 0, x > 0."""
    nl = int(nu + 0.5)
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    if x < TEMME_MAX:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = rgamma_parts(xmu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        sum1 = p
        for i in range(1, MAXIT):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * ff
            total += delta
            sum1 += c * (p - i * ff)
            if abs(delta) < abs(total) * EPS:
                break
        scale = math.exp(x)
        kmu = total * scale
        k1 = sum1 * xi2 * scale
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - xmu2
        q = c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, MAXIT):
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
            if abs(dels / s) < EPS:
                break
        h = a1 * h
        kmu = math.sqrt(math.pi / (2.0 * x)) / s
        k1 = kmu * (xmu + x + 0.5 - h) * xi
    for i in range(1, nl + 1):
        ktemp = (xmu + i) * xi2 * k1 + kmu
        kmu = k1
        k1 = ktemp
    return kmu, k1


def bessel_jy(nu, x):
    """``(J_nu, Y_nu, J'_nu, Y'_nu)`` for nu >= 0 and x > 0."""
    if x >= SERIES_MAX:
        return _jy_hankel(nu, x)
    nl = int(nu + 0.5) if x < TEMME_MAX else max(0, int(nu - x + 1.5))
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi
    # CF1: J'_nu / J_nu by modified Lentz
    isign = 1
    h = max(nu * xi, FPMIN)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(MAXIT):
        b += xi2
        d = b - d
        if abs(d) < FPMIN:
            d = FPMIN
        c = b - 1.0 / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = c * d
        h *= delta
        if d < 0.0:
            isign = -isign
        if abs(delta - 1.0) < EPS:
            break
    jl = isign * FPMIN
    jpl = h * jl
    jl1 = jl
    jp1 = jpl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        jtemp = fact * jl + jpl
        fact -= xi
        jpl = fact * jtemp - jl
        jl = jtemp
    if jl == 0.0:
        jl = EPS
    f = jpl / jl
    if x < TEMME_MAX:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        fact = 1.0 if abs(pimu) < EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        fact2 = 1.0 if abs(e) < EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = rgamma_parts(xmu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < EPS else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        total = ff + r * q
        sum1 = p
        for i in range(1, MAXIT):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            delta = c * (ff + r * q)
            total += delta
            sum1 += c * p - i * delta
            if abs(delta) < (1.0 + abs(total)) * EPS:
                break
        ymu = -total
        y1 = -sum1 * xi2
        ymup = xmu * xi * ymu - y1
        jmu = w / (ymup - f * ymu)
    else:
        # CF2: p + iq by complex Lentz
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        for i in range(2, MAXIT):
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < FPMIN:
                dr = FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < FPMIN:
                cr = FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < EPS:
                break
        gam = (p - f) / q
        jmu = math.copysign(math.sqrt(w / ((p - f) * gam + q)), jl)
        ymu = jmu * gam
        ymup = ymu * (p + q / gam)
        y1 = xmu * xi * ymu - ymup
    fact = jmu / jl
    jv = jl1 * fact
    jp = jp1 * fact
    for i in range(1, nl + 1):
        ytemp = (xmu + i) * xi2 * y1 - ymu
        ymu = y1
        y1 = ytemp
    return jv, ymu, jp, nu * xi * ymu - y1


def _jy_hankel(nu, x):
    amp = math.sqrt(2.0 / (math.pi * x))
    chi = x - (0.5 * nu + 0.25) * math.pi
    cs = math.cos(chi)
    sn = math.sin(chi)
    p, q = hankel_pq(nu, x)
    jv = amp * (p * cs - q * sn)
    yv = amp * (p * sn + q * cs)
    chi1 = chi - 0.5 * math.pi
    cs1 = math.cos(chi1)
    sn1 = math.sin(chi1)
    p1, q1 = hankel_pq(nu + 1.0, x)
    j1 = amp * (p1 * cs1 - q1 * sn1)
    y1 = amp * (p1 * sn1 + q1 * cs1)
    return jv, yv, nu / x * jv - j1, nu / x * yv - y1


def bessel_j_negative(nu, x):
    """``(J_{-nu}(x), d/dx J_{-nu}(x))`` for non-integer nu > 0."""
    if x < TEMME_MAX:
        # sum_k (-1)^k (x/2)^{2k-nu} / (k! Gamma(k+1-nu)), Neumaier-compensated
        half = 0.5 * x
        q = -half * half
        term = math.pow(half, -nu) / math.gamma(1.0 - nu)
        s = term
        comp = 0.0
        ds = -nu * term
        dcomp = 0.0
        k = 0
        while True:
            k += 1
            term *= q / (k * (k - nu))
            t = s + term
            comp += (s - t) + term if abs(s) >= abs(term) else (term - t) + s
            s = t
            dterm = (2 * k - nu) * term
            t = ds + dterm
            dcomp += (ds - t) + dterm if abs(ds) >= abs(dterm) else (dterm - t) + ds
            ds = t
            if abs(term) < EPS * abs(s) and abs(dterm) < EPS * abs(ds):
                break
        return s + comp, (ds + dcomp) / x
    if x >= SERIES_MAX:
        return _jneg_hankel(nu, x)
    jv, yv, jp, yp = bessel_jy(nu, x)
    cs = math.cos(nu * math.pi)
    sn = math.sin(nu * math.pi)
    return cs * jv - sn * yv, cs * jp - sn * yp


def _jneg_hankel(nu, x):
    # J'_v = J_{v-1} - (v/x) J_v at v = -nu
    amp = math.sqrt(2.0 / (math.pi * x))
    chi = x - (-0.5 * nu + 0.25) * math.pi
    p, q = hankel_pq(nu, x)
    jv = amp * (p * math.cos(chi) - q * math.sin(chi))
    chim = chi + 0.5 * math.pi
    pm, qm = hankel_pq(-nu - 1.0, x)
    jm = amp * (pm * math.cos(chim) - qm * math.sin(chim))
    return jv, jm + nu / x * jv


def bessel_j_any(v, x):
    """``(J_v(x), J'_v(x))`` for any real order v and x > 0."""
    if v >= 0.0:
        jv, _, jp, _ = bessel_jy(v, x)
        return jv, jp
    n = round(-v)
    if abs(v + n) < 1e-15:
        jv, _, jp, _ = bessel_jy(float(n), x)
        sign = -1.0 if n % 2 else 1.0
        return sign * jv, sign * jp
    if v > -1.0:
        return bessel_j_negative(-v, x)
    # orders below -1: reflection through (J, Y)
    jv, yv, jp, yp = bessel_jy(-v, x)
    cs = math.cos(-v * math.pi)
    sn = math.sin(-v * math.pi)
    return cs * jv - sn * yv, cs * jp - sn * yp


def bessel_j_zero(v, n):
    """n-th positive zero of J_v for v in (-1, 1).

    McMahon's estimate ``beta = (n + v/2 - 1/4) pi`` fixes the bracket
    ``[beta - pi/2, beta + pi/2]``; a Newton iteration safeguarded by
    bisection refines it.
    """
    beta = (n + 0.5 * v - 0.25) * math.pi
    lo = max(beta - 0.5 * math.pi, 1e-12)
    hi = beta + 0.5 * math.pi
    flo = bessel_j_any(v, lo)[0]
    fhi = bessel_j_any(v, hi)[0]
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ArithmeticError("no sign change in McMahon bracket for J_%g zero %d" % (v, n))
    mu = 4.0 * v * v
    b8 = 8.0 * beta
    x = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 ** 3)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(200):
        f, fp = bessel_j_any(v, x)
        if f == 0.0:
            return x
        if (f > 0.0) == (flo > 0.0):
            lo = x
        else:
            hi = x
        step = f / fp if fp != 0.0 else math.inf
        xn = x - step
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4.0 * EPS * xn or hi - lo <= 4.0 * EPS * hi:
            x = xn
            break
        x = xn
    return x


def friedrichs_kernel_array(nu, t, x, xt):
    """Vectorised Friedrichs heat kernel over broadcast arrays."""
    t, x, xt = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float),
                                   np.asarray(xt, float))
    out = np.empty(t.shape)
    flat_t, flat_x, flat_xt, flat_o = t.ravel(), x.ravel(), xt.ravel(), out.ravel()
    for k in range(flat_t.size):
        tk = flat_t[k]
        r = flat_x[k] * flat_xt[k] / (2.0 * tk)
        gap = flat_x[k] - flat_xt[k]
        flat_o[k] = (math.sqrt(flat_x[k] * flat_xt[k]) / (2.0 * tk)
                     * bessel_i_scaled(nu, r) * math.exp(-gap * gap / (4.0 * tk)))
    return out


def bessel_j_array(v, x):
    """J_v evaluated elementwise on an array of positive arguments."""
    x = np.asarray(x, float)
    out = np.empty(x.shape)
    flat_x, flat_o = x.ravel(), out.ravel()
    for k in range(flat_x.size):
        flat_o[k] = bessel_j_any(v, flat_x[k])[0]
    return out
