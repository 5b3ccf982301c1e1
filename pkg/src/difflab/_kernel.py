"""Compiled inner loop for the explicit finite-volume update.

The kernel advances the field in place from t to a target time, applying the
same arithmetic as solver._Stepper step by step: powers, CFL bound, face
fluxes with upwinded drift, donor-cell flux limiting (slow diffusion only),
conservative update, and admissibility checks.  Status codes: 0 ok,
1 negative density beyond tolerance, 2 non-finite value, 3 fast-diffusion
positivity lost, 4 step budget exhausted.
"""
from __future__ import annotations

import math

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    class _Shim:
        @staticmethod
        def njit(*args, **kwargs):
            def deco(fn):
                return fn
            return deco

    numba = _Shim()


@numba.njit(cache=True)
def advance_to(n, t, target, gamma, dim, dr, area, vol, inv_vol, vface, vmax,
               safety, farfield, ghost_c, ghost_alpha, ghost_offset, ghost_fixed,
               ghost_r, max_steps, w, ngam, flux, theta):
    gp1 = gamma + 1.0
    coef = abs(gamma) / gp1
    ag = abs(gamma)
    ncells = n.size
    # power fast paths for the common exponents
    pcode = 0
    if gp1 == 2.0:
        pcode = 1
    elif gp1 == 1.5:
        pcode = 2
    elif gp1 == 0.5:
        pcode = 3
    diff_geom = 2.0 * dim / (dr * dr)
    has_drift = vmax > 0.0
    steps = 0
    outflow = 0.0
    status = 0
    bad_cell = -1

    while t < target * (1.0 - 1e-13):
        dmax = 0.0
        for i in range(ncells):
            ni = n[i]
            if ni > 0.0:
                if pcode == 1:
                    wi = ni * ni
                elif pcode == 2:
                    wi = ni * math.sqrt(ni)
                elif pcode == 3:
                    wi = math.sqrt(ni)
                else:
                    wi = ni ** gp1
                w[i] = wi
                ngam[i] = wi / ni
            else:
                w[i] = 0.0
                ngam[i] = 0.0
        for i in range(1, ncells):
            d = ngam[i - 1] if ngam[i - 1] > ngam[i] else ngam[i]
            if d > dmax:
                dmax = d
        ghost = 0.0
        if farfield:
            tt = ghost_fixed if ghost_fixed > 0.0 else t + ghost_offset
            xi = ghost_r * tt ** (-ghost_alpha)
            ghost = tt ** (-ghost_alpha * dim) * (ghost_c + 0.5 * ghost_alpha * xi * xi) ** (1.0 / gamma)
            gd = ghost ** gamma
            d = gd if gd > ngam[ncells - 1] else ngam[ncells - 1]
            if d > dmax:
                dmax = d
        inv = 0.0
        if dmax > 0.0:
            inv += ag * dmax * diff_geom
        if has_drift:
            inv += vmax / dr
        if inv == 0.0:
            dt = target - t
        else:
            dt = safety / inv
            if dt > target - t:
                dt = target - t

        cf = coef / dr
        flux[0] = 0.0
        for j in range(1, ncells):
            f = -cf * (w[j] - w[j - 1])
            if has_drift:
                v = vface[j]
                f += (n[j - 1] if v > 0.0 else n[j]) * v
            flux[j] = f
        if farfield:
            f = -cf * (ghost ** gp1 - w[ncells - 1])
            if has_drift:
                v = vface[ncells]
                f += (n[ncells - 1] if v > 0.0 else ghost) * v
            flux[ncells] = f
        else:
            flux[ncells] = 0.0

        if gamma > 0.0:
            need = False
            for i in range(ncells):
                left = -flux[i]
                out = area[i] * (left if left > 0.0 else 0.0)
                right = flux[i + 1]
                out += area[i + 1] * (right if right > 0.0 else 0.0)
                od = out * dt
                content = vol[i] * n[i]
                if od > content:
                    theta[i] = content / od
                    need = True
                else:
                    theta[i] = 1.0
            if need:
                for j in range(1, ncells):
                    if flux[j] > 0.0:
                        flux[j] *= theta[j - 1]
                    else:
                        flux[j] *= theta[j]
                if flux[ncells] > 0.0:
                    flux[ncells] *= theta[ncells - 1]

        nmin = 1e300
        nmax = -1e300
        ok = True
        for i in range(ncells):
            val = n[i] + dt * inv_vol[i] * (area[i] * flux[i] - area[i + 1] * flux[i + 1])
            n[i] = val
            if not np.isfinite(val):
                ok = False
                bad_cell = i
            if val > nmax:
                nmax = val
            if val < nmin:
                nmin = val
        if not ok:
            status = 2
            t += dt
            break
        outflow += dt * area[ncells] * flux[ncells]
        if gamma > 0.0:
            lim = 1.0 if nmax < 1.0 else nmax
            if nmin < -1e-12 * lim:
                status = 1
                for i in range(ncells):
                    if n[i] == nmin:
                        bad_cell = i
                        break
                t += dt
                break
            if nmin < 0.0:
                for i in range(ncells):
                    if n[i] < 0.0:
                        n[i] = 0.0
        else:
            if nmin <= 0.0:
                status = 3
                for i in range(ncells):
                    if n[i] == nmin:
                        bad_cell = i
                        break
                t += dt
                break
        t += dt
        steps += 1
        if steps >= max_steps:
            status = 4
            break

    if status == 0:
        t = target
    return t, outflow, steps, status, bad_cell
