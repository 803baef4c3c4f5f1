"""Compiled inner loops for the kernel k2 and the model kernels B.

Everything here works on plain floats and arrays so numba can compile it.
Model variants are passed as integer codes (see ``models.VARIANT_CODES``).
"""

import math

import numpy as np
from numba import njit

PLE, GP1, GP2, GP3 = 0, 1, 2, 3


@njit(cache=True, nogil=True)
def angular_factor(cos_abs, btab):
    """Tabulated even angular factor on a uniform |cos| grid; constant 1 if empty."""
    n = btab.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return btab[0]
    x = cos_abs * (n - 1)
    i = int(x)
    if i >= n - 1:
        return btab[n - 1]
    t = x - i
    return btab[i] * (1.0 - t) + btab[i + 1] * t


@njit(cache=True, nogil=True)
def b_core(code, c, alpha, m, E, gpre2, gpost2, Ia, Ib, Ipa, Ipb):
    """Angle-free part of B for a collision (Ia, Ib) -> (Ipa, Ipb).

    gpre2, gpost2 are the squared relative speeds before and after.
    """
    h = 0.5 * alpha
    if code == PLE:
        return c * E ** (1.0 - h)
    if code == GP1:
        return c * E ** h
    R = m * gpost2 / (4.0 * E)
    t1 = (R * gpre2) ** h
    if code == GP2:
        return c * (t1 + ((Ipa + Ipb) / E * (Ia + Ib) / m) ** h)
    return c * (t1 + (Ipa * Ia / (E * m)) ** h + (Ipb * Ib / (E * m)) ** h)


@njit(cache=True, nogil=True)
def k2_core(gn, cn, an, Ia, Ib, m, delta, code, c, alpha, btab,
            chi_x, chi_w, rho_u, rho_w, th_c, th_w, lag_x, lag_w, chi_half):
    """k2 in the (chi, w, I') parametrization.

    gn = |g|, cn = G.n, an = |G_perp| with G = (xi + xi_*)/2.  The chi rule is
    applied on [cn - chi_half, cn + chi_half], split at the kink chi0 where
    I*' - I' changes sign.  Returns the value without the 4 m^{3/2} Z (I I*)^.. prefactor.
    """
    lo = cn - chi_half
    hi = cn + chi_half
    split = False
    chi0 = 0.0
    if gn > 0.0:
        chi0 = (Ib - Ia) / (m * gn)
        split = lo < chi0 < hi
    nseg = 2 if split else 1
    p = 0.5 * delta - 1.0
    ex = -delta - 0.5
    angular = btab.shape[0] > 0
    total = 0.0
    for seg in range(nseg):
        if nseg == 1:
            a0, a1 = lo, hi
        elif seg == 0:
            a0, a1 = lo, chi0
        else:
            a0, a1 = chi0, hi
        half = 0.5 * (a1 - a0)
        mid = 0.5 * (a1 + a0)
        for ic in range(chi_x.shape[0]):
            chi = mid + half * chi_x[ic]
            wc = half * chi_w[ic]
            D = Ia - Ib + m * gn * chi
            L = -D if D < 0.0 else 0.0
            gpre_par = gn + chi
            gpost_par = chi - gn
            pre = math.exp(-0.5 * m * ((cn - chi) ** 2 + 0.25 * gn * gn) - 0.5 * abs(D))
            acc_c = 0.0
            for ir in range(rho_u.shape[0]):
                rho = math.sqrt(2.0 * rho_u[ir] / m)
                for it in range(th_c.shape[0]):
                    w2 = an * an - 2.0 * an * rho * th_c[it] + rho * rho
                    g2pre = gpre_par * gpre_par + w2
                    g2post = gpost_par * gpost_par + w2
                    bang = 1.0
                    if angular:
                        den = math.sqrt(g2pre * g2post)
                        cs = 0.0
                        if den > 0.0:
                            cs = abs(chi * chi - gn * gn + w2) / den
                        bang = angular_factor(min(cs, 1.0), btab)
                    acc_x = 0.0
                    for ix in range(lag_x.shape[0]):
                        Ip = L + lag_x[ix]
                        Isp = Ip + D
                        Et = 0.25 * m * g2pre + Ia + Ip
                        if code == PLE:
                            f = c * Et ** (ex + 1.0 - 0.5 * alpha)
                        elif code == GP1:
                            f = c * Et ** (ex + 0.5 * alpha)
                        else:
                            f = b_core(code, c, alpha, m, Et, g2pre, g2post, Ia, Ip, Ib, Isp) * Et ** ex
                        if p != 0.0:
                            f *= (Ip * Isp) ** p
                        acc_x += lag_w[ix] * f
                    acc_c += rho_w[ir] * th_w[it] * bang * acc_x
            total += wc * pre * acc_c
    return total


@njit(cache=True, nogil=True)
def k2_batch(gn, cn, an, Ia, Ib, m, delta, code, c, alpha, btab,
             chi_x, chi_w, rho_u, rho_w, th_c, th_w, lag_x, lag_w, chi_half, out):
    for i in range(gn.shape[0]):
        out[i] = k2_core(gn[i], cn[i], an[i], Ia[i], Ib[i], m, delta, code, c, alpha, btab,
                         chi_x, chi_w, rho_u, rho_w, th_c, th_w, lag_x, lag_w, chi_half)


@njit(cache=True, nogil=True)
def rR_core(code, c, alpha, m, g2, Ia, Ib, r_x, r_w, R_x, R_w):
    """Integral of the angle-free B against the BL weight over (r, R).

    The weight (r(1-r))^{d/2-1}(1-R)^{d-1}R^{1/2} is carried by the Jacobi rules.
    """
    E = 0.25 * m * g2 + Ia + Ib
    if code == PLE or code == GP1:
        s = 0.0
        for i in range(r_w.shape[0]):
            s += r_w[i]
        t = 0.0
        for j in range(R_w.shape[0]):
            t += R_w[j]
        return b_core(code, c, alpha, m, E, g2, g2, Ia, Ib, Ia, Ib) * s * t
    acc = 0.0
    for j in range(R_x.shape[0]):
        R = R_x[j]
        gpost2 = 4.0 * R * E / m
        for i in range(r_x.shape[0]):
            r = r_x[i]
            Ipa = r * (1.0 - R) * E
            Ipb = (1.0 - r) * (1.0 - R) * E
            acc += R_w[j] * r_w[i] * b_core(code, c, alpha, m, E, g2, gpost2, Ia, Ib, Ipa, Ipb)
    return acc


@njit(cache=True, nogil=True)
def rR_batch(code, c, alpha, m, g2, Ia, Ib, r_x, r_w, R_x, R_w, out):
    for i in range(g2.shape[0]):
        out[i] = rR_core(code, c, alpha, m, g2[i], Ia[i], Ib[i], r_x, r_w, R_x, R_w)


@njit(cache=True, nogil=True)
def iso_k2_rows(rows, s, I, m, delta, code, c, alpha, btab, g_x, g_w,
                chi_x, chi_w, rho_u, rho_w, th_c, th_w, lag_x, lag_w, chi_half, pref, out):
    """Legendre moments 1/2 int k2 P_l(mu) dmu between speed/energy nodes.

    ``out`` has shape (len(rows), n, lmax + 1); only j >= i is filled (the
    kernel is symmetric).  mu is the cosine between the two velocities; the
    integral is taken in |g| = |xi - xi*|, dmu = g dg / (s s*), which keeps the
    integrand smooth when the two speeds are close.
    """
    n = s.shape[0]
    nl = out.shape[2]
    P = np.empty(nl)
    acc = np.empty(nl)
    for ii in range(rows.shape[0]):
        i = rows[ii]
        for j in range(i, n):
            sa = s[i]
            sb = s[j]
            lo = abs(sa - sb)
            hi = sa + sb
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            for l in range(nl):
                acc[l] = 0.0
            for q in range(g_x.shape[0]):
                gn = mid + half * g_x[q]
                cn = (sa * sa - sb * sb) / (2.0 * gn)
                a2 = 0.5 * (sa * sa + sb * sb) - 0.25 * gn * gn - cn * cn
                an = math.sqrt(a2) if a2 > 0.0 else 0.0
                v = k2_core(gn, cn, an, I[i], I[j], m, delta, code, c, alpha, btab,
                            chi_x, chi_w, rho_u, rho_w, th_c, th_w, lag_x, lag_w, chi_half)
                mu = (sa * sa + sb * sb - gn * gn) / (2.0 * sa * sb)
                P[0] = 1.0
                if nl > 1:
                    P[1] = mu
                for l in range(2, nl):
                    P[l] = ((2 * l - 1) * mu * P[l - 1] - (l - 1) * P[l - 2]) / l
                for l in range(nl):
                    acc[l] += half * g_w[q] * gn * v * P[l]
            f = pref * (I[i] * I[j]) ** (0.25 * delta - 0.5) / (2.0 * sa * sb)
            for l in range(nl):
                out[ii, j, l] = f * acc[l]
