"""Null structure equations of the double-null variable set.

Every transport equation, constraint, and gauge relation used by the
evolver and the residual monitors is defined here exactly once, as a
right-hand-side function written against an abstract operator backend
(``ops``).  The production code evaluates them with the numpy backend in
:mod:`dnull.tensorops`; ``tools/verify_equations.py`` re-evaluates the
same functions in exact rational arithmetic on random metric jets and
checks each one as an identity of the metric ansatz.  That audit is the
authority for the signs and factors below; its findings are recorded in
``docs/equation_coverage.json``.

Field-name conventions for the ``f`` mapping:

==============  ====  =========================================
name            rank  meaning
==============  ====  =========================================
tr_chi          0     outgoing expansion
tr_chibar       0     ingoing expansion
omega           0     lapse acceleration scalar (-e4 log Omega)
rho, sigma      0     scalar curvature components
K               0     Gauss curvature of the section
logOmega        0     log of the lapse-like factor
inv_v           0     1/v as a scalar field (renormalized forms)
eta, etabar     1     torsion 1-forms
beta, betabar   1     vector curvature components
chi_hat         2     outgoing shear (symmetric traceless)
chibar_hat      2     ingoing shear
alpha, alphabar 2     extreme curvature components
==============  ====  =========================================

The torsion ``zeta`` is never stored: ``zeta = -etabar`` throughout.
"""

from __future__ import annotations

from fractions import Fraction as Fr

__all__ = ["RHS", "EQUATIONS", "equation_ids", "lhs_coefficient_terms"]


def _zeta(ops, f):
    return ops.scale(-1, f["etabar"])


def _chi_full(ops, f):
    return ops.add(f["chi_hat"], ops.smul(ops.scale(Fr(1, 2), f["tr_chi"]), ops.gamma()))


def _chibar_full(ops, f):
    return ops.add(f["chibar_hat"], ops.smul(ops.scale(Fr(1, 2), f["tr_chibar"]), ops.gamma()))


# ---------------------------------------------------------------------------
# Ricci-coefficient transport, u direction (nabla_3)
# ---------------------------------------------------------------------------

def rhs_chibar_hat_3(ops, f):
    """d3 chibar_hat = -tr_chibar chibar_hat - alphabar."""
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chibar"]), f["chibar_hat"]),
        ops.scale(-1, f["alphabar"]),
    )


def rhs_tr_chibar_3(ops, f):
    """Ingoing Raychaudhuri: d3 tr_chibar = -1/2 tr_chibar^2 - |chibar_hat|^2."""
    return ops.add(
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], f["tr_chibar"])),
        ops.scale(-1, ops.dot(f["chibar_hat"], f["chibar_hat"])),
    )


def rhs_chi_hat_3(ops, f):
    """d3 chi_hat = -1/2 tr_chibar chi_hat + noh(eta) - 1/2 tr_chi chibar_hat + eta oh eta."""
    return ops.add(
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chibar"]), f["chi_hat"]),
        ops.noh(f["eta"]),
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chi"]), f["chibar_hat"]),
        ops.oh(f["eta"], f["eta"]),
    )


def rhs_tr_chi_3(ops, f):
    """d3 tr_chi = -1/2 tr_chibar tr_chi + 2 rho - chi_hat.chibar_hat + 2 div eta + 2|eta|^2."""
    return ops.add(
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], f["tr_chi"])),
        ops.scale(2, f["rho"]),
        ops.scale(-1, ops.dot(f["chi_hat"], f["chibar_hat"])),
        ops.scale(2, ops.div(f["eta"])),
        ops.scale(2, ops.dot(f["eta"], f["eta"])),
    )


def rhs_etabar_3(ops, f):
    """d3 etabar = -chibar.(etabar - eta) + betabar.

    The printed form of this transport splits the full ingoing second
    fundamental form differently; the jet audit selects this grouping
    (it is the one that closes to zero in vacuum).
    """
    chibar = _chibar_full(ops, f)
    return ops.add(
        ops.scale(-1, ops.con21(chibar, f["etabar"])),
        ops.con21(chibar, f["eta"]),
        f["betabar"],
    )


# ---------------------------------------------------------------------------
# Ricci-coefficient transport, v direction (nabla_4)
# ---------------------------------------------------------------------------

def rhs_chibar_hat_4(ops, f):
    """d4 chibar_hat = -1/2 tr_chi chibar_hat + noh(etabar) + 2 omega chibar_hat
    - 1/2 tr_chibar chi_hat + etabar oh etabar."""
    return ops.add(
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chi"]), f["chibar_hat"]),
        ops.noh(f["etabar"]),
        ops.smul(ops.scale(2, f["omega"]), f["chibar_hat"]),
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chibar"]), f["chi_hat"]),
        ops.oh(f["etabar"], f["etabar"]),
    )


def rhs_tr_chibar_4(ops, f):
    """d4 tr_chibar = -1/2 tr_chi tr_chibar + 2 omega tr_chibar + 2 rho
    - chi_hat.chibar_hat + 2 div etabar + 2|etabar|^2."""
    return ops.add(
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], f["tr_chibar"])),
        ops.scale(2, ops.smul(f["omega"], f["tr_chibar"])),
        ops.scale(2, f["rho"]),
        ops.scale(-1, ops.dot(f["chi_hat"], f["chibar_hat"])),
        ops.scale(2, ops.div(f["etabar"])),
        ops.scale(2, ops.dot(f["etabar"], f["etabar"])),
    )


def rhs_chi_hat_4(ops, f):
    """Outgoing shear transport: d4 chi_hat = -tr_chi chi_hat - 2 omega chi_hat - alpha."""
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chi"]), f["chi_hat"]),
        ops.smul(ops.scale(-2, f["omega"]), f["chi_hat"]),
        ops.scale(-1, f["alpha"]),
    )


def rhs_tr_chi_4(ops, f):
    """Outgoing Raychaudhuri: d4 tr_chi = -1/2 tr_chi^2 - 2 omega tr_chi - |chi_hat|^2."""
    return ops.add(
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], f["tr_chi"])),
        ops.scale(-2, ops.smul(f["omega"], f["tr_chi"])),
        ops.scale(-1, ops.dot(f["chi_hat"], f["chi_hat"])),
    )


def rhs_eta_4(ops, f):
    """d4 eta = -chi.(eta - etabar) - beta."""
    chi = _chi_full(ops, f)
    return ops.add(
        ops.scale(-1, ops.con21(chi, f["eta"])),
        ops.con21(chi, f["etabar"]),
        ops.scale(-1, f["beta"]),
    )


# ---------------------------------------------------------------------------
# Curvature transport (Bianchi), u direction
# ---------------------------------------------------------------------------

def rhs_betabar_3(ops, f):
    """d3 betabar = -2 tr_chibar betabar - div alphabar - (eta + 2 etabar).alphabar.

    The torsion contraction differs from the printed display; fixed by the
    jet audit.
    """
    return ops.add(
        ops.smul(ops.scale(-2, f["tr_chibar"]), f["betabar"]),
        ops.scale(-1, ops.div(f["alphabar"])),
        ops.scale(-1, ops.con21(f["alphabar"], f["eta"])),
        ops.scale(-2, ops.con21(f["alphabar"], f["etabar"])),
    )


def rhs_beta_3(ops, f):
    """d3 beta = -tr_chibar beta + grad rho + star grad sigma + 2 chi_hat.betabar
    + 3 (eta rho + star-eta sigma)."""
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chibar"]), f["beta"]),
        ops.grad(f["rho"]),
        ops.star1(ops.grad(f["sigma"])),
        ops.scale(2, ops.con21(f["chi_hat"], f["betabar"])),
        ops.scale(3, ops.smul(f["rho"], f["eta"])),
        ops.scale(3, ops.smul(f["sigma"], ops.star1(f["eta"]))),
    )


def rhs_rho_3(ops, f):
    """d3 rho = -3/2 tr_chibar rho - div betabar - 1/2 chi_hat.alphabar
    + zeta.betabar - 2 eta.betabar."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chibar"], f["rho"])),
        ops.scale(-1, ops.div(f["betabar"])),
        ops.scale(Fr(-1, 2), ops.dot(f["chi_hat"], f["alphabar"])),
        ops.dot(zeta, f["betabar"]),
        ops.scale(-2, ops.dot(f["eta"], f["betabar"])),
    )


def rhs_sigma_3(ops, f):
    """d3 sigma = -3/2 tr_chibar sigma - div star-betabar - 1/2 chi_hat.star-alphabar
    + (zeta - 2 eta).star-betabar.

    The chi_hat.star-alphabar sign and the torsion contraction differ from
    the printed display; this is the form the jet audit certifies.
    """
    zeta = _zeta(ops, f)
    sbb = ops.star1(f["betabar"])
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chibar"], f["sigma"])),
        ops.scale(-1, ops.div(sbb)),
        ops.scale(Fr(-1, 2), ops.dot(f["chi_hat"], ops.star2(f["alphabar"]))),
        ops.dot(ops.add(zeta, ops.scale(-2, f["eta"])), sbb),
    )


def rhs_alpha_3(ops, f):
    """d3 alpha = -1/2 tr_chibar alpha + noh(beta) - 3 (chi_hat rho + star-chi_hat sigma)
    + (zeta + 4 eta) oh beta."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chibar"]), f["alpha"]),
        ops.noh(f["beta"]),
        ops.scale(-3, ops.smul(f["rho"], f["chi_hat"])),
        ops.scale(-3, ops.smul(f["sigma"], ops.star2(f["chi_hat"]))),
        ops.oh(ops.add(zeta, ops.scale(4, f["eta"])), f["beta"]),
    )


def rhs_K_3(ops, f):
    """d3 K = -tr_chibar K + div betabar - (zeta - 2 eta).betabar
    + 1/2 chibar_hat.(noh(eta) + eta oh eta) - 1/2 tr_chibar div eta - 1/2 tr_chibar |eta|^2."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chibar"], f["K"])),
        ops.div(f["betabar"]),
        ops.scale(-1, ops.dot(ops.add(zeta, ops.scale(-2, f["eta"])), f["betabar"])),
        ops.scale(Fr(1, 2), ops.dot(f["chibar_hat"], ops.add(ops.noh(f["eta"]), ops.oh(f["eta"], f["eta"])))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], ops.div(f["eta"]))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], ops.dot(f["eta"], f["eta"]))),
    )


# ---------------------------------------------------------------------------
# Curvature transport (Bianchi), v direction
# ---------------------------------------------------------------------------

def rhs_betabar_4(ops, f):
    """d4 betabar = -tr_chi betabar - grad rho + star grad sigma + 2 omega betabar
    + 2 chibar_hat.beta - 3 (etabar rho - star-etabar sigma)."""
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chi"]), f["betabar"]),
        ops.scale(-1, ops.grad(f["rho"])),
        ops.star1(ops.grad(f["sigma"])),
        ops.smul(ops.scale(2, f["omega"]), f["betabar"]),
        ops.scale(2, ops.con21(f["chibar_hat"], f["beta"])),
        ops.scale(-3, ops.smul(f["rho"], f["etabar"])),
        ops.scale(3, ops.smul(f["sigma"], ops.star1(f["etabar"]))),
    )


def rhs_beta_4(ops, f):
    """d4 beta = -2 tr_chi beta + div alpha - 2 omega beta - etabar.alpha.

    The contraction is with etabar (equivalently +zeta.alpha), not eta;
    fixed by the jet audit.
    """
    return ops.add(
        ops.smul(ops.scale(-2, f["tr_chi"]), f["beta"]),
        ops.div(f["alpha"]),
        ops.smul(ops.scale(-2, f["omega"]), f["beta"]),
        ops.scale(-1, ops.con21(f["alpha"], f["etabar"])),
    )


def rhs_rho_4(ops, f):
    """d4 rho = -3/2 tr_chi rho + div beta - 1/2 chibar_hat.alpha + zeta.beta + 2 etabar.beta."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chi"], f["rho"])),
        ops.div(f["beta"]),
        ops.scale(Fr(-1, 2), ops.dot(f["chibar_hat"], f["alpha"])),
        ops.dot(zeta, f["beta"]),
        ops.scale(2, ops.dot(f["etabar"], f["beta"])),
    )


def rhs_sigma_4(ops, f):
    """d4 sigma = -3/2 tr_chi sigma - div star-beta + 1/2 chibar_hat.star-alpha
    - zeta.star-beta - 2 etabar.star-beta."""
    zeta = _zeta(ops, f)
    sb = ops.star1(f["beta"])
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chi"], f["sigma"])),
        ops.scale(-1, ops.div(sb)),
        ops.scale(Fr(1, 2), ops.dot(f["chibar_hat"], ops.star2(f["alpha"]))),
        ops.scale(-1, ops.dot(zeta, sb)),
        ops.scale(-2, ops.dot(f["etabar"], sb)),
    )


def rhs_alphabar_4(ops, f):
    """d4 alphabar = -1/2 tr_chi alphabar - noh(betabar) + 4 omega alphabar
    - 3 (chibar_hat rho - star-chibar_hat sigma) + (zeta - 4 etabar) oh betabar."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.smul(ops.scale(Fr(-1, 2), f["tr_chi"]), f["alphabar"]),
        ops.scale(-1, ops.noh(f["betabar"])),
        ops.smul(ops.scale(4, f["omega"]), f["alphabar"]),
        ops.scale(-3, ops.smul(f["rho"], f["chibar_hat"])),
        ops.scale(3, ops.smul(f["sigma"], ops.star2(f["chibar_hat"]))),
        ops.oh(ops.add(zeta, ops.scale(-4, f["etabar"])), f["betabar"]),
    )


def rhs_K_4(ops, f):
    """d4 K = -tr_chi K - div beta - (zeta + 2 etabar).beta
    + 1/2 chi_hat.(noh(etabar) + etabar oh etabar) - 1/2 tr_chi div etabar - 1/2 tr_chi |etabar|^2."""
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chi"], f["K"])),
        ops.scale(-1, ops.div(f["beta"])),
        ops.scale(-1, ops.dot(ops.add(zeta, ops.scale(2, f["etabar"])), f["beta"])),
        ops.scale(Fr(1, 2), ops.dot(f["chi_hat"], ops.add(ops.noh(f["etabar"]), ops.oh(f["etabar"], f["etabar"])))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], ops.div(f["etabar"]))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], ops.dot(f["etabar"], f["etabar"]))),
    )


# ---------------------------------------------------------------------------
# Constraints (elliptic on each section) and the Gauss relation
# ---------------------------------------------------------------------------

def residual_codazzi_chi(ops, f):
    """div chi_hat - 1/2 grad tr_chi + beta + zeta.(chi_hat - 1/2 tr_chi gamma).

    The torsion contraction is zeta = -etabar.  The printed display uses
    (eta - etabar)/2 in its place; the two differ by grad(log Omega) terms
    and only the zeta form passes the jet audit.
    """
    zeta = _zeta(ops, f)
    dev = ops.add(f["chi_hat"], ops.smul(ops.scale(Fr(-1, 2), f["tr_chi"]), ops.gamma()))
    return ops.add(
        ops.div(f["chi_hat"]),
        ops.scale(Fr(-1, 2), ops.grad(f["tr_chi"])),
        f["beta"],
        ops.con21(dev, zeta),
    )


def residual_codazzi_chibar(ops, f):
    """div chibar_hat - 1/2 grad tr_chibar - betabar - zeta.(chibar_hat - 1/2 tr_chibar gamma)."""
    zeta = _zeta(ops, f)
    dev = ops.add(f["chibar_hat"], ops.smul(ops.scale(Fr(-1, 2), f["tr_chibar"]), ops.gamma()))
    return ops.add(
        ops.div(f["chibar_hat"]),
        ops.scale(Fr(-1, 2), ops.grad(f["tr_chibar"])),
        ops.scale(-1, f["betabar"]),
        ops.scale(-1, ops.con21(dev, zeta)),
    )


def residual_codazzi_eta(ops, f):
    """curl eta - sigma - 1/2 chibar_hat wedge chi_hat."""
    return ops.add(
        ops.curl(f["eta"]),
        ops.scale(-1, f["sigma"]),
        ops.scale(Fr(-1, 2), ops.wedge(f["chibar_hat"], f["chi_hat"])),
    )


def residual_gauss(ops, f):
    """K + rho - 1/2 chi_hat.chibar_hat + 1/4 tr_chi tr_chibar."""
    return ops.add(
        f["K"],
        f["rho"],
        ops.scale(Fr(-1, 2), ops.dot(f["chi_hat"], f["chibar_hat"])),
        ops.scale(Fr(1, 4), ops.smul(f["tr_chi"], f["tr_chibar"])),
    )


# ---------------------------------------------------------------------------
# Renormalized forms.  These are algebraic consequences of the raw set and
# the Gauss relation; the 1/v coefficients below were re-derived from the
# raw set (the audit confirms them) because two of the printed displays
# drop terms.  ``inv_v`` is the scalar field 1/v.
# ---------------------------------------------------------------------------

def rhs_Tchi_3(ops, f):
    """u-transport of T = tr_chi - 2/v:

    d3 T = -tr_chibar T - 2 Ktil + 2 div eta + 2|eta|^2
           - (2/v)(tr_chibar + 2/v) + 2/v^2.
    """
    iv = f["inv_v"]
    T = f["Tchi"]
    Tb = f["Tchibar"]
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chibar"], T)),
        ops.scale(-2, f["Ktil"]),
        ops.scale(2, ops.div(f["eta"])),
        ops.scale(2, ops.dot(f["eta"], f["eta"])),
        ops.scale(-2, ops.smul(iv, Tb)),
        ops.scale(2, ops.smul(iv, iv)),
    )


def rhs_Tchi_4(ops, f):
    """v-transport of T = tr_chi - 2/v:

    d4 T = -tr_chi T + 1/2 T^2 - 2 omega tr_chi - |chi_hat|^2.
    """
    T = f["Tchi"]
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chi"], T)),
        ops.scale(Fr(1, 2), ops.smul(T, T)),
        ops.scale(-2, ops.smul(f["omega"], f["tr_chi"])),
        ops.scale(-1, ops.dot(f["chi_hat"], f["chi_hat"])),
    )


def rhs_Tchibar_3(ops, f):
    """u-transport of Tb = tr_chibar + 2/v:

    d3 Tb = -1/2 tr_chibar Tb + (1/v) tr_chibar - |chibar_hat|^2.
    """
    Tb = f["Tchibar"]
    return ops.add(
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], Tb)),
        ops.smul(f["inv_v"], f["tr_chibar"]),
        ops.scale(-1, ops.dot(f["chibar_hat"], f["chibar_hat"])),
    )


def rhs_Tchibar_4(ops, f):
    """v-transport of Tb = tr_chibar + 2/v:

    d4 Tb = -tr_chi Tb + (2/v) T - 2 Ktil + 2 omega tr_chibar
            + 2 div etabar + 2|etabar|^2.

    The 2 omega tr_chibar term is required for consistency with the raw
    ingoing-expansion transport (the audit rejects the version without it).
    """
    Tb = f["Tchibar"]
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chi"], Tb)),
        ops.scale(2, ops.smul(f["inv_v"], f["Tchi"])),
        ops.scale(-2, f["Ktil"]),
        ops.scale(2, ops.smul(f["omega"], f["tr_chibar"])),
        ops.scale(2, ops.div(f["etabar"])),
        ops.scale(2, ops.dot(f["etabar"], f["etabar"])),
    )


def rhs_Ktil_3(ops, f):
    """u-transport of Ktil = K - 1/v^2:

    d3 Ktil = -tr_chibar Ktil - (1/v^2) tr_chibar + [rhs of the raw K u-transport
    minus its -tr_chibar K term].
    """
    iv = f["inv_v"]
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chibar"], f["Ktil"])),
        ops.scale(-1, ops.smul(ops.smul(iv, iv), f["tr_chibar"])),
        ops.div(f["betabar"]),
        ops.scale(-1, ops.dot(ops.add(zeta, ops.scale(-2, f["eta"])), f["betabar"])),
        ops.scale(Fr(1, 2), ops.dot(f["chibar_hat"], ops.add(ops.noh(f["eta"]), ops.oh(f["eta"], f["eta"])))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], ops.div(f["eta"]))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chibar"], ops.dot(f["eta"], f["eta"]))),
    )


def rhs_Ktil_4(ops, f):
    """v-transport of Ktil = K - 1/v^2:

    d4 Ktil = -tr_chi Ktil - (1/v^2)(tr_chi - 2/v) + [rhs of the raw K
    v-transport minus its -tr_chi K term].

    The -(1/v^2)(tr_chi - 2/v) source is dropped by the printed
    renormalized display; it is required for agreement with the raw form.
    """
    iv = f["inv_v"]
    zeta = _zeta(ops, f)
    return ops.add(
        ops.scale(-1, ops.smul(f["tr_chi"], f["Ktil"])),
        ops.scale(-1, ops.smul(ops.smul(iv, iv), f["Tchi"])),
        ops.scale(-1, ops.div(f["beta"])),
        ops.scale(-1, ops.dot(ops.add(zeta, ops.scale(2, f["etabar"])), f["beta"])),
        ops.scale(Fr(1, 2), ops.dot(f["chi_hat"], ops.add(ops.noh(f["etabar"]), ops.oh(f["etabar"], f["etabar"])))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], ops.div(f["etabar"]))),
        ops.scale(Fr(-1, 2), ops.smul(f["tr_chi"], ops.dot(f["etabar"], f["etabar"]))),
    )


def rhs_sigma_check_3(ops, f):
    """u-transport of sigma_check, derived from the verified raw sigma and
    shear transports by the product rule:

    d3 sigma_check = -3/2 tr_chibar sigma_check - div star-betabar
    + (zeta - 2 eta).star-betabar + 1/2 chibar_hat wedge (noh(eta) + eta oh eta)
    - 1/2 chi_hat.star-alphabar - 1/2 alphabar wedge chi_hat.
    """
    zeta = _zeta(ops, f)
    sbb = ops.star1(f["betabar"])
    etaq = ops.add(ops.noh(f["eta"]), ops.oh(f["eta"], f["eta"]))
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chibar"], f["sigma_check"])),
        ops.scale(-1, ops.div(sbb)),
        ops.dot(ops.add(zeta, ops.scale(-2, f["eta"])), sbb),
        ops.scale(Fr(1, 2), ops.wedge(f["chibar_hat"], etaq)),
        ops.scale(Fr(-1, 2), ops.dot(f["chi_hat"], ops.star2(f["alphabar"]))),
        ops.scale(Fr(-1, 2), ops.wedge(f["alphabar"], f["chi_hat"])),
    )


def rhs_sigma_check_4(ops, f):
    """v-transport of sigma_check, derived from the verified raw transports:

    d4 sigma_check = -3/2 tr_chi sigma_check - div star-beta
    - (zeta + 2 etabar).star-beta + 1/2 (noh(etabar) + etabar oh etabar) wedge chi_hat
    + 1/2 chibar_hat.star-alpha - 1/2 chibar_hat wedge alpha.
    """
    zeta = _zeta(ops, f)
    sb = ops.star1(f["beta"])
    ebq = ops.add(ops.noh(f["etabar"]), ops.oh(f["etabar"], f["etabar"]))
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chi"], f["sigma_check"])),
        ops.scale(-1, ops.div(sb)),
        ops.scale(-1, ops.dot(ops.add(zeta, ops.scale(2, f["etabar"])), sb)),
        ops.scale(Fr(1, 2), ops.wedge(ebq, f["chi_hat"])),
        ops.scale(Fr(1, 2), ops.dot(f["chibar_hat"], ops.star2(f["alpha"]))),
        ops.scale(Fr(-1, 2), ops.wedge(f["chibar_hat"], f["alpha"])),
    )


def rhs_rho_check_3(ops, f):
    """d3 rho_check = -3/2 tr_chibar rho_check - div betabar + (zeta - 2 eta).betabar
    - 1/2 chibar_hat.(noh(eta) + eta oh eta) + 1/4 tr_chi |chibar_hat|^2."""
    zeta = _zeta(ops, f)
    zm = ops.add(zeta, ops.scale(-2, f["eta"]))
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chibar"], f["rho_check"])),
        ops.scale(-1, ops.div(f["betabar"])),
        ops.dot(zm, f["betabar"]),
        ops.scale(Fr(-1, 2), ops.dot(f["chibar_hat"], ops.add(ops.noh(f["eta"]), ops.oh(f["eta"], f["eta"])))),
        ops.scale(Fr(1, 4), ops.smul(f["tr_chi"], ops.dot(f["chibar_hat"], f["chibar_hat"]))),
    )


def rhs_rho_check_4(ops, f):
    """d4 rho_check = -3/2 tr_chi rho_check + div beta + (zeta + 2 etabar).beta
    - 1/2 chi_hat.(noh(etabar) + etabar oh etabar) + 1/4 tr_chibar |chi_hat|^2."""
    zeta = _zeta(ops, f)
    zp = ops.add(zeta, ops.scale(2, f["etabar"]))
    return ops.add(
        ops.scale(Fr(-3, 2), ops.smul(f["tr_chi"], f["rho_check"])),
        ops.div(f["beta"]),
        ops.dot(zp, f["beta"]),
        ops.scale(Fr(-1, 2), ops.dot(f["chi_hat"], ops.add(ops.noh(f["etabar"]), ops.oh(f["etabar"], f["etabar"])))),
        ops.scale(Fr(1, 4), ops.smul(f["tr_chibar"], ops.dot(f["chi_hat"], f["chi_hat"]))),
    )


def rhs_beta_3_elliptic(ops, f):
    """d3 beta in the (K, sigma_check) form:

    d3 beta = -tr_chibar beta - grad K + star grad sigma_check + 2 chi_hat.betabar
      - 3 (eta K - star-eta sigma_check)
      + 1/2 [grad(chi_hat.chibar_hat) + star grad(chi_hat wedge chibar_hat)]
      - 1/4 [(grad tr_chi) tr_chibar + tr_chi grad tr_chibar]
      + 3/2 [eta (chi_hat.chibar_hat) + star-eta (chi_hat wedge chibar_hat)]
      - 3/4 eta tr_chi tr_chibar.
    """
    cc = ops.dot(f["chi_hat"], f["chibar_hat"])
    cw = ops.wedge(f["chi_hat"], f["chibar_hat"])
    tt = ops.smul(f["tr_chi"], f["tr_chibar"])
    se = ops.star1(f["eta"])
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chibar"]), f["beta"]),
        ops.scale(-1, ops.grad(f["K"])),
        ops.star1(ops.grad(f["sigma_check"])),
        ops.scale(2, ops.con21(f["chi_hat"], f["betabar"])),
        ops.scale(-3, ops.smul(f["K"], f["eta"])),
        ops.scale(3, ops.smul(f["sigma_check"], se)),
        ops.scale(Fr(1, 2), ops.grad(cc)),
        ops.scale(Fr(1, 2), ops.star1(ops.grad(cw))),
        ops.scale(Fr(-1, 4), ops.smul(f["tr_chibar"], ops.grad(f["tr_chi"]))),
        ops.scale(Fr(-1, 4), ops.smul(f["tr_chi"], ops.grad(f["tr_chibar"]))),
        ops.scale(Fr(3, 2), ops.smul(cc, f["eta"])),
        ops.scale(Fr(3, 2), ops.smul(cw, se)),
        ops.scale(Fr(-3, 4), ops.smul(tt, f["eta"])),
    )


def rhs_betabar_4_elliptic(ops, f):
    """d4 betabar in the (K, sigma_check) form:

    d4 betabar = -tr_chi betabar + grad K + star grad sigma_check + 2 omega betabar
      + 2 chibar_hat.beta + 3 (etabar K + star-etabar sigma_check)
      - 1/2 grad(chi_hat.chibar_hat) + 1/2 star grad(chi_hat wedge chibar_hat)
      + 1/4 [(grad tr_chi) tr_chibar + tr_chi grad tr_chibar]
      - 3/2 [etabar (chi_hat.chibar_hat) - star-etabar (chi_hat wedge chibar_hat)]
      + 3/4 etabar tr_chi tr_chibar.
    """
    cc = ops.dot(f["chi_hat"], f["chibar_hat"])
    cw = ops.wedge(f["chi_hat"], f["chibar_hat"])
    tt = ops.smul(f["tr_chi"], f["tr_chibar"])
    seb = ops.star1(f["etabar"])
    return ops.add(
        ops.smul(ops.scale(-1, f["tr_chi"]), f["betabar"]),
        ops.grad(f["K"]),
        ops.star1(ops.grad(f["sigma_check"])),
        ops.smul(ops.scale(2, f["omega"]), f["betabar"]),
        ops.scale(2, ops.con21(f["chibar_hat"], f["beta"])),
        ops.scale(3, ops.smul(f["K"], f["etabar"])),
        ops.scale(3, ops.smul(f["sigma_check"], seb)),
        ops.scale(Fr(-1, 2), ops.grad(cc)),
        ops.scale(Fr(1, 2), ops.star1(ops.grad(cw))),
        ops.scale(Fr(1, 4), ops.smul(f["tr_chibar"], ops.grad(f["tr_chi"]))),
        ops.scale(Fr(1, 4), ops.smul(f["tr_chi"], ops.grad(f["tr_chibar"]))),
        ops.scale(Fr(-3, 2), ops.smul(cc, f["etabar"])),
        ops.scale(Fr(3, 2), ops.smul(cw, seb)),
        ops.scale(Fr(3, 4), ops.smul(tt, f["etabar"])),
    )


# ---------------------------------------------------------------------------
# Registry.  direction: 'u' means the left side is the nabla_3 derivative of
# the field, 'v' the nabla_4 derivative, 'c' a constraint residual (the
# function returns the full residual, zero in vacuum).
# ---------------------------------------------------------------------------

RHS = {
    "transport_u.chibar_hat": dict(fn=rhs_chibar_hat_3, field="chibar_hat", rank=2, direction="u", tier="ricci"),
    "transport_u.tr_chibar": dict(fn=rhs_tr_chibar_3, field="tr_chibar", rank=0, direction="u", tier="ricci"),
    "transport_u.chi_hat": dict(fn=rhs_chi_hat_3, field="chi_hat", rank=2, direction="u", tier="ricci"),
    "transport_u.tr_chi": dict(fn=rhs_tr_chi_3, field="tr_chi", rank=0, direction="u", tier="ricci"),
    "transport_u.etabar": dict(fn=rhs_etabar_3, field="etabar", rank=1, direction="u", tier="ricci"),
    "transport_v.chibar_hat": dict(fn=rhs_chibar_hat_4, field="chibar_hat", rank=2, direction="v", tier="ricci"),
    "transport_v.tr_chibar": dict(fn=rhs_tr_chibar_4, field="tr_chibar", rank=0, direction="v", tier="ricci"),
    "transport_v.chi_hat": dict(fn=rhs_chi_hat_4, field="chi_hat", rank=2, direction="v", tier="ricci"),
    "transport_v.tr_chi": dict(fn=rhs_tr_chi_4, field="tr_chi", rank=0, direction="v", tier="ricci"),
    "transport_v.eta": dict(fn=rhs_eta_4, field="eta", rank=1, direction="v", tier="ricci"),
    "transport_u.betabar": dict(fn=rhs_betabar_3, field="betabar", rank=1, direction="u", tier="bianchi"),
    "transport_u.beta": dict(fn=rhs_beta_3, field="beta", rank=1, direction="u", tier="bianchi"),
    "transport_u.rho": dict(fn=rhs_rho_3, field="rho", rank=0, direction="u", tier="bianchi"),
    "transport_u.sigma": dict(fn=rhs_sigma_3, field="sigma", rank=0, direction="u", tier="bianchi"),
    "transport_u.alpha": dict(fn=rhs_alpha_3, field="alpha", rank=2, direction="u", tier="bianchi"),
    "transport_u.K": dict(fn=rhs_K_3, field="K", rank=0, direction="u", tier="bianchi"),
    "transport_v.betabar": dict(fn=rhs_betabar_4, field="betabar", rank=1, direction="v", tier="bianchi"),
    "transport_v.beta": dict(fn=rhs_beta_4, field="beta", rank=1, direction="v", tier="bianchi"),
    "transport_v.rho": dict(fn=rhs_rho_4, field="rho", rank=0, direction="v", tier="bianchi"),
    "transport_v.sigma": dict(fn=rhs_sigma_4, field="sigma", rank=0, direction="v", tier="bianchi"),
    "transport_v.alphabar": dict(fn=rhs_alphabar_4, field="alphabar", rank=2, direction="v", tier="bianchi"),
    "transport_v.K": dict(fn=rhs_K_4, field="K", rank=0, direction="v", tier="bianchi"),
    "constraint.codazzi_chi": dict(fn=residual_codazzi_chi, field=None, rank=1, direction="c", tier="constraint"),
    "constraint.codazzi_chibar": dict(fn=residual_codazzi_chibar, field=None, rank=1, direction="c", tier="constraint"),
    "constraint.codazzi_eta": dict(fn=residual_codazzi_eta, field=None, rank=0, direction="c", tier="constraint"),
    "constraint.gauss": dict(fn=residual_gauss, field=None, rank=0, direction="c", tier="constraint"),
    "transport_u.Tchi": dict(fn=rhs_Tchi_3, field="Tchi", rank=0, direction="u", tier="renormalized"),
    "transport_v.Tchi": dict(fn=rhs_Tchi_4, field="Tchi", rank=0, direction="v", tier="renormalized"),
    "transport_u.Tchibar": dict(fn=rhs_Tchibar_3, field="Tchibar", rank=0, direction="u", tier="renormalized"),
    "transport_v.Tchibar": dict(fn=rhs_Tchibar_4, field="Tchibar", rank=0, direction="v", tier="renormalized"),
    "transport_u.Ktil": dict(fn=rhs_Ktil_3, field="Ktil", rank=0, direction="u", tier="renormalized"),
    "transport_v.Ktil": dict(fn=rhs_Ktil_4, field="Ktil", rank=0, direction="v", tier="renormalized"),
    "transport_u.sigma_check": dict(fn=rhs_sigma_check_3, field="sigma_check", rank=0, direction="u", tier="renormalized"),
    "transport_v.sigma_check": dict(fn=rhs_sigma_check_4, field="sigma_check", rank=0, direction="v", tier="renormalized"),
    "transport_u.rho_check": dict(fn=rhs_rho_check_3, field="rho_check", rank=0, direction="u", tier="renormalized"),
    "transport_v.rho_check": dict(fn=rhs_rho_check_4, field="rho_check", rank=0, direction="v", tier="renormalized"),
    "transport_u.beta_elliptic": dict(fn=rhs_beta_3_elliptic, field="beta", rank=1, direction="u", tier="renormalized"),
    "transport_v.betabar_elliptic": dict(fn=rhs_betabar_4_elliptic, field="betabar", rank=1, direction="v", tier="renormalized"),
}

EQUATIONS = RHS  # registry alias used by the coverage audit


def equation_ids():
    return sorted(RHS)


def lhs_coefficient_terms(eq_id):
    """Names of the derived fields an equation needs beyond the core state."""
    need = set()
    src = RHS[eq_id]["fn"].__doc__ or ""
    for name in ("Tchi", "Tchibar", "Ktil", "rho_check", "sigma_check", "inv_v"):
        if name in src:
            need.add(name)
    return need
