"""Pure-Python fallback for the hot evaluation kernels.

Must stay numerically identical (same operations, same order) to the Cython
twin in ``_kernels.pyx``; the test suite asserts agreement at the last ulp.
"""

BACKEND = "python"

_FD_REL = 1e-7


def po_scaled(h, c, eps, k_beta, K_c, K_p, p, hat_K_h):
    """IPR open probability of the scaled system.

    eps enters only through the scaled inactivation half-value; c is clipped
    at 0 to tolerate integrator undershoot.
    """
    if c < 0.0:
        c = 0.0
    c4 = c * c * c * c
    p2 = p * p
    Kp2 = K_p * K_p
    phi_p = p2 / (Kp2 + p2)
    phi_pdown = Kp2 / (Kp2 + p2)
    Kc4 = K_c * K_c * K_c * K_c
    m_alpha = c4 / (Kc4 + c4)
    Kh4 = hat_K_h * hat_K_h * hat_K_h * hat_K_h
    e2Kh4 = eps * eps * Kh4
    hinf = e2Kh4 / (e2Kh4 + c4) if (e2Kh4 + c4) > 0.0 else 1.0
    beta = phi_p * m_alpha * h
    alpha = phi_pdown * (1.0 - m_alpha * hinf)
    return beta / (beta + k_beta * (beta + alpha))


def rhs_scaled(h, c, eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t, gamma,
               hat_tau_max, hat_K_h, hat_V_s, hat_K):
    """Right-hand side (dh/dt, dc/dt) of the scaled closed-cell system."""
    cp = c if c > 0.0 else 0.0
    c4 = cp * cp * cp * cp
    Kh4 = hat_K_h * hat_K_h * hat_K_h * hat_K_h
    e2Kh4 = eps * eps * Kh4
    hinf = e2Kh4 / (e2Kh4 + c4) if (e2Kh4 + c4) > 0.0 else 1.0
    dh = (hinf - h) * (c4 + eps * eps) / hat_tau_max

    p2 = p * p
    Kp2 = K_p * K_p
    phi_p = p2 / (Kp2 + p2)
    phi_pdown = Kp2 / (Kp2 + p2)
    Kc4 = K_c * K_c * K_c * K_c
    m_alpha = c4 / (Kc4 + c4)
    beta = phi_p * m_alpha * h
    alpha = phi_pdown * (1.0 - m_alpha * hinf)
    po = beta / (beta + k_beta * (beta + alpha))
    j_ipr = k_IPR * po * (gamma * c_t - (1.0 + gamma) * c)

    Ks2 = K_s * K_s
    den = Ks2 + cp * cp
    j_plus = hat_V_s * cp * cp / den
    dmc = c_t - cp
    j_minus = hat_K * gamma * gamma * hat_V_s * dmc * dmc / den
    dc = j_ipr - eps * j_plus + eps * eps * j_minus
    return dh, dc


def divergence_scaled(h, c, eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t, gamma,
                      hat_tau_max, hat_K_h, hat_V_s, hat_K):
    """Divergence of the scaled field by central differences with a fixed
    relative step (deterministic)."""
    dh_step = _FD_REL * (1.0 + abs(h))
    dc_step = _FD_REL * (1.0 + abs(c))
    args = (eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t, gamma,
            hat_tau_max, hat_K_h, hat_V_s, hat_K)
    fhp = rhs_scaled(h + dh_step, c, *args)[0]
    fhm = rhs_scaled(h - dh_step, c, *args)[0]
    fcp = rhs_scaled(h, c + dc_step, *args)[1]
    fcm = rhs_scaled(h, c - dc_step, *args)[1]
    return (fhp - fhm) / (2.0 * dh_step) + (fcp - fcm) / (2.0 * dc_step)


def rhs_scaled_with_div(h, c, eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t, gamma,
                        hat_tau_max, hat_K_h, hat_V_s, hat_K):
    args = (eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t, gamma,
            hat_tau_max, hat_K_h, hat_V_s, hat_K)
    dh, dc = rhs_scaled(h, c, *args)
    dv = divergence_scaled(h, c, *args)
    return dh, dc, dv
