# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled evaluation kernels for the scaled closed-cell system.

Operation-for-operation identical to ``_kernels_py.py``; keep the two in
sync (the test suite compares them at the last ulp).
"""

BACKEND = "cython"

cdef double _FD_REL = 1e-7


cpdef double po_scaled(double h, double c, double eps, double k_beta,
                       double K_c, double K_p, double p, double hat_K_h):
    cdef double c4, p2, Kp2, phi_p, phi_pdown, Kc4, m_alpha, Kh4, e2Kh4
    cdef double hinf, beta, alpha
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


cpdef (double, double) rhs_scaled(double h, double c, double eps,
                                  double k_beta, double K_c, double K_s,
                                  double K_p, double k_IPR, double p,
                                  double c_t, double gamma,
                                  double hat_tau_max, double hat_K_h,
                                  double hat_V_s, double hat_K):
    cdef double cp, c4, Kh4, e2Kh4, hinf, dh, p2, Kp2, phi_p, phi_pdown
    cdef double Kc4, m_alpha, beta, alpha, po, j_ipr, Ks2, den, j_plus
    cdef double dmc, j_minus, dc
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


cpdef double divergence_scaled(double h, double c, double eps, double k_beta,
                               double K_c, double K_s, double K_p,
                               double k_IPR, double p, double c_t,
                               double gamma, double hat_tau_max,
                               double hat_K_h, double hat_V_s, double hat_K):
    cdef double dh_step = _FD_REL * (1.0 + (h if h >= 0.0 else -h))
    cdef double dc_step = _FD_REL * (1.0 + (c if c >= 0.0 else -c))
    cdef double fhp, fhm, fcp, fcm, tmp
    fhp, tmp = rhs_scaled(h + dh_step, c, eps, k_beta, K_c, K_s, K_p, k_IPR,
                          p, c_t, gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    fhm, tmp = rhs_scaled(h - dh_step, c, eps, k_beta, K_c, K_s, K_p, k_IPR,
                          p, c_t, gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    tmp, fcp = rhs_scaled(h, c + dc_step, eps, k_beta, K_c, K_s, K_p, k_IPR,
                          p, c_t, gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    tmp, fcm = rhs_scaled(h, c - dc_step, eps, k_beta, K_c, K_s, K_p, k_IPR,
                          p, c_t, gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    return (fhp - fhm) / (2.0 * dh_step) + (fcp - fcm) / (2.0 * dc_step)


cpdef (double, double, double) rhs_scaled_with_div(double h, double c,
                                                   double eps, double k_beta,
                                                   double K_c, double K_s,
                                                   double K_p, double k_IPR,
                                                   double p, double c_t,
                                                   double gamma,
                                                   double hat_tau_max,
                                                   double hat_K_h,
                                                   double hat_V_s,
                                                   double hat_K):
    cdef double dh, dc, dv
    dh, dc = rhs_scaled(h, c, eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t,
                        gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    dv = divergence_scaled(h, c, eps, k_beta, K_c, K_s, K_p, k_IPR, p, c_t,
                           gamma, hat_tau_max, hat_K_h, hat_V_s, hat_K)
    return dh, dc, dv
