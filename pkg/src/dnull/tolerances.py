"""Default numerical tolerances, overridable through the run config."""

TOL = {
    # identity / algebra checks
    "traceless": 1e-10,
    "metric_inverse": 1e-12,
    "hodge_star": 1e-12,
    "metric_compat": 1e-10,
    "curl_grad": 1e-9,
    "raw_vs_renormalized": 1e-10,
    # quadrature / geometry
    "round_area": 1e-6,
    "gauss_bonnet_h2": 10.0,      # coefficient of h^2
    # state validation
    "gauge_identity": 1e-8,
    "omega_bounds": (0.5, 2.0),
    # norms
    "mixed_norm_bruteforce": 1e-12,
    "hawking_roundsphere": 1e-10,
}


def tol(key, overrides=None):
    if overrides and key in overrides:
        return overrides[key]
    return TOL[key]
