"""Numpy operator backend for the formulary right-hand sides.

Works on raw component arrays bound to one section geometry; mirrors the
exact-arithmetic backend used by the equation audit in tools/.
"""

from __future__ import annotations

import numpy as np

from . import geometry as geo


class NumpyOps:
    def __init__(self, geom):
        self.geom = geom

    def gamma(self):
        return self.geom.gamma.data

    @staticmethod
    def add(*ts):
        out = ts[0].copy()
        for t in ts[1:]:
            out = out + t
        return out

    @staticmethod
    def scale(c, T):
        return float(c) * T

    @staticmethod
    def smul(s, T):
        return s * T   # scalar field broadcasting against trailing axes works
        # because scalars are (n1,n2) and tensors are (...,n1,n2)

    def dot(self, F, G):
        ra = F.ndim - 2
        return geo.dot_data(self.geom, F, ra, G, ra)

    def con21(self, G, F):
        return geo.con21_data(self.geom, G, F)

    def grad(self, f):
        return geo.covd_data(self.geom, f, 0)

    def div(self, T):
        return geo.div_data(self.geom, T, T.ndim - 2)

    def curl(self, F):
        return geo.curl_data(self.geom, F)

    def star1(self, F):
        return geo.star1_data(self.geom, F)

    def star2(self, G):
        return geo.star2_data(self.geom, G)

    def oh(self, F, G):
        return geo.oh_data(self.geom, F, G)

    def noh(self, h):
        return geo.noh_data(self.geom, h)

    def wedge(self, G, H):
        return geo.wedge_data(self.geom, G, H)


def state_field_dict(state, renormalized=True):
    """Field mapping consumed by the formulary RHS functions."""
    f = {
        "tr_chi": state.tr_chi.data,
        "tr_chibar": state.tr_chibar.data,
        "chi_hat": state.chi_hat.data,
        "chibar_hat": state.chibar_hat.data,
        "eta": state.eta.data,
        "etabar": state.etabar.data,
        "omega": state.omega.data,
        "K": state.geom.gauss_K,
        "alpha": state.alpha.data,
        "alphabar": state.alphabar.data,
        "beta": state.beta.data,
        "betabar": state.betabar.data,
        "rho": state.rho.data,
        "sigma": state.sigma.data,
    }
    if renormalized:
        iv = 1.0 / state.v
        f["inv_v"] = np.full(state.grid.shape, iv)
        f["Tchi"] = f["tr_chi"] - 2.0 * iv
        f["Tchibar"] = f["tr_chibar"] + 2.0 * iv
        f["Ktil"] = f["K"] - iv * iv
        ops = NumpyOps(state.geom)
        f["rho_check"] = f["rho"] - 0.5 * ops.dot(f["chi_hat"], f["chibar_hat"])
        f["sigma_check"] = f["sigma"] + 0.5 * ops.wedge(f["chibar_hat"], f["chi_hat"])
    return f
