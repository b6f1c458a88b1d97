"""Numba-compiled inner loop of the coupled time-domain simulation.

Kept free of Python objects: plain scalars and float64 arrays in, arrays
out. The public API lives in sysdyn; everything here is an implementation
detail. The hydraulic node is sub-stepped adaptively inside each RK4 step
because a small accumulator makes the gas-spring dynamics much faster
than the 0.1 s flap time step.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _piston_extension(theta, l1, l2, l3):
    dx = l2 - l1 * np.sin(theta)
    dy = l3 - l1 * np.cos(theta)
    return np.sqrt(dx * dx + dy * dy)


@njit(cache=True, inline="always")
def _piston_jacobian(theta, l1, l2, l3):
    dx = l2 - l1 * np.sin(theta)
    dy = l3 - l1 * np.cos(theta)
    s = np.sqrt(dx * dx + dy * dy)
    return (-dx * l1 * np.cos(theta) + dy * l1 * np.sin(theta)) / s


@njit(cache=True)
def _starved_pressure(
    Q_in, P0, R_m, delta_pi, R_t, P_relief, k_relief, use_membrane, use_relief
):
    P = Q_in * R_t
    if use_membrane and P > delta_pi:
        P = (Q_in + delta_pi / R_m) / (1.0 / R_t + 1.0 / R_m)
        if use_relief and P > P_relief:
            g = 1.0 / R_t + 1.0 / R_m + k_relief
            P = (Q_in + delta_pi / R_m + k_relief * P_relief) / g
    if P > P0:
        P = P0
    return P


@njit(cache=True)
def _advance_node(
    V,
    Q_in,
    dt,
    Vacc,
    P0,
    R_m,
    delta_pi,
    R_t,
    P_relief,
    k_relief,
    use_membrane,
    use_relief,
):
    """Sub-stepped accumulator/feed-node update over one flap step.

    Returns (V_new, P_last, d_perm, d_brine, d_relief, dE_in, dE_out).
    Volume bookkeeping is exact: every substep adds Q*h to both the state
    and the cumulative counters.
    """
    d_perm = 0.0
    d_brine = 0.0
    d_relief = 0.0
    dE_in = 0.0
    dE_out = 0.0
    P = P0
    remaining = dt
    h_floor = dt / 4096.0
    while remaining > 1e-15:
        if V > 0.0:
            P = P0 * Vacc / (Vacc - V)
        else:
            P = _starved_pressure(
                Q_in, P0, R_m, delta_pi, R_t, P_relief, k_relief,
                use_membrane, use_relief,
            )
        Qp = 0.0
        if use_membrane and P > delta_pi:
            Qp = (P - delta_pi) / R_m
        Qb = P / R_t
        Qr = 0.0
        if use_relief and P > P_relief:
            Qr = k_relief * (P - P_relief)
        dV = Q_in - Qp - Qb - Qr
        if V <= 0.0 and dV < 0.0:
            dV = 0.0

        # Stable explicit substep: h <= tau/2 of the gas-spring relaxation.
        h = remaining
        if V > 0.0:
            dPdV = P0 * Vacc / ((Vacc - V) * (Vacc - V))
            dQdP = 1.0 / R_t
            if use_membrane and P > delta_pi:
                dQdP += 1.0 / R_m
            if use_relief and P > P_relief:
                dQdP += k_relief
            tau = 1.0 / (dPdV * dQdP)
            if 0.5 * tau < h:
                h = 0.5 * tau
            if h < h_floor:
                h = h_floor
            if h > remaining:
                h = remaining
        if dV < 0.0 and V + dV * h < 0.0:
            h = V / (-dV)
            if h > remaining:
                h = remaining
        V_new = V + dV * h
        if V_new < 0.0:
            V_new = 0.0
        top = Vacc * (1.0 - 1e-9)
        if V_new > top:
            V_new = top
        d_perm += Qp * h
        d_brine += Qb * h
        d_relief += Qr * h
        dE_in += P * Q_in * h
        dE_out += P * (Qp + Qb + Qr) * h
        V = V_new
        remaining -= h
    return V, P, d_perm, d_brine, d_relief, dE_in, dE_out


@njit(cache=True)
def integrate_wec(
    n_steps,
    dt,
    ramp_steps,
    fe_half,
    I_tot,
    K_hs,
    Kw,
    pto_connected,
    use_membrane,
    use_relief,
    l1,
    l2,
    l3,
    Ap,
    crack,
    Vacc,
    P0,
    R_m,
    delta_pi,
    R_t,
    P_relief,
    k_relief,
    theta0,
    omega0,
):
    n = n_steps + 1
    theta = np.zeros(n)
    omega = np.zeros(n)
    s_rel = np.zeros(n)
    P_node = np.zeros(n)
    Qp_s = np.zeros(n)
    Qb_s = np.zeros(n)
    Qr_s = np.zeros(n)
    Vliq = np.zeros(n)
    tau_pto = np.zeros(n)
    conv_force = np.zeros(n)

    theta[0] = theta0
    omega[0] = omega0
    s0 = _piston_extension(theta0, l1, l2, l3)
    m = Kw.shape[0]

    # totals: intake, perm, brine, relief, then the post-ramp four,
    # hydraulic energy in/out, then the RK4-stage work integrals
    # (excitation, radiated, PTO).
    totals = np.zeros(13)
    diverged_at = -1.0

    V = 0.0
    P = P0
    for i in range(n_steps):
        th = theta[i]
        om = omega[i]

        # Radiation history dots (taps j >= 1); tap 0 uses the live omega.
        S_a = 0.0
        S_b = 0.0
        for j in range(1, m):
            ia = i - j
            ib = i - j + 1
            if ia >= 0:
                S_a += Kw[j] * omega[ia]
            if ib >= 0:
                S_b += Kw[j] * omega[ib]
        conv_force[i] = Kw[0] * om + S_a

        # Node pressure frozen over the step for the PTO reaction torque.
        if pto_connected:
            if V > 0.0:
                P_frozen = P0 * Vacc / (Vacc - V)
            else:
                q_est = Ap * np.abs(_piston_jacobian(th, l1, l2, l3) * om)
                P_frozen = _starved_pressure(
                    q_est, P0, R_m, delta_pi, R_t, P_relief, k_relief,
                    use_membrane, use_relief,
                )
        else:
            P_frozen = 0.0

        # Boundary-layer width for the rectifying PTO force: wide enough
        # that the regularized Coulomb torque is non-stiff at this dt
        # (effective damping rate <= 1/dt), so RK4 does not chatter at
        # velocity reversals and the energy ledger stays consistent.
        v_eps = 0.01
        if pto_connected:
            dsd0 = _piston_jacobian(th, l1, l2, l3)
            bound = Ap * (P_frozen + crack) * dsd0 * dsd0 * dt / I_tot
            if bound > v_eps:
                v_eps = bound

        # RK4 on (theta, omega).
        fe0 = fe_half[2 * i]
        fe1 = fe_half[2 * i + 1]
        fe2 = fe_half[2 * i + 2]

        k1t, k1o, pe1, pr1, pp1 = _deriv(
            th, om, fe0, 0.0, S_a, S_b, Kw[0], K_hs, I_tot,
            pto_connected, P_frozen, crack, Ap, l1, l2, l3, v_eps,
        )
        k2t, k2o, pe2, pr2, pp2 = _deriv(
            th + 0.5 * dt * k1t, om + 0.5 * dt * k1o, fe1, 0.5, S_a, S_b,
            Kw[0], K_hs, I_tot, pto_connected, P_frozen, crack, Ap, l1, l2, l3, v_eps,
        )
        k3t, k3o, pe3, pr3, pp3 = _deriv(
            th + 0.5 * dt * k2t, om + 0.5 * dt * k2o, fe1, 0.5, S_a, S_b,
            Kw[0], K_hs, I_tot, pto_connected, P_frozen, crack, Ap, l1, l2, l3, v_eps,
        )
        k4t, k4o, pe4, pr4, pp4 = _deriv(
            th + dt * k3t, om + dt * k3o, fe2, 1.0, S_a, S_b,
            Kw[0], K_hs, I_tot, pto_connected, P_frozen, crack, Ap, l1, l2, l3, v_eps,
        )
        th_new = th + dt / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        om_new = om + dt / 6.0 * (k1o + 2.0 * k2o + 2.0 * k3o + k4o)
        # Work integrals on the same quadrature as the state update, so
        # the energy ledger is not polluted by sampling the discontinuous
        # PTO torque only at step boundaries.
        totals[10] += dt / 6.0 * (pe1 + 2.0 * pe2 + 2.0 * pe3 + pe4)
        totals[11] += dt / 6.0 * (pr1 + 2.0 * pr2 + 2.0 * pr3 + pr4)
        totals[12] += dt / 6.0 * (pp1 + 2.0 * pp2 + 2.0 * pp3 + pp4)

        if not (np.isfinite(th_new) and np.isfinite(om_new)) or np.abs(th_new) > np.pi:
            diverged_at = i * dt
            break

        theta[i + 1] = th_new
        omega[i + 1] = om_new

        s_new = _piston_extension(th_new, l1, l2, l3)
        s_rel[i + 1] = s_new - s0

        if pto_connected:
            dvol_in = Ap * np.abs(s_new - _piston_extension(th, l1, l2, l3))
            Q_in = dvol_in / dt
            V, P, d_perm, d_brine, d_relief, dE_in, dE_out = _advance_node(
                V, Q_in, dt, Vacc, P0, R_m, delta_pi, R_t, P_relief, k_relief,
                use_membrane, use_relief,
            )
            totals[0] += dvol_in
            totals[1] += d_perm
            totals[2] += d_brine
            totals[3] += d_relief
            if i >= ramp_steps:
                totals[4] += dvol_in
                totals[5] += d_perm
                totals[6] += d_brine
                totals[7] += d_relief
            totals[8] += dE_in
            totals[9] += dE_out

            dsdth = _piston_jacobian(th, l1, l2, l3)
            v_pist = dsdth * om
            sat = v_pist / v_eps
            if sat > 1.0:
                sat = 1.0
            elif sat < -1.0:
                sat = -1.0
            tau_pto[i] = -Ap * (P_frozen + crack) * dsdth * sat

            P_node[i + 1] = P
            Vliq[i + 1] = V
            if use_membrane and P > delta_pi:
                Qp_s[i + 1] = (P - delta_pi) / R_m
            Qb_s[i + 1] = P / R_t
            if use_relief and P > P_relief:
                Qr_s[i + 1] = k_relief * (P - P_relief)

    return (
        theta, omega, s_rel, P_node, Qp_s, Qb_s, Qr_s, Vliq,
        tau_pto, conv_force, totals, diverged_at,
    )


@njit(cache=True, inline="always")
def _deriv(
    th, om, fe, c, S_a, S_b, Kw0, K_hs, I_tot,
    pto_connected, P_frozen, crack, Ap, l1, l2, l3, v_eps,
):
    conv = Kw0 * om + (1.0 - c) * S_a + c * S_b
    tau = 0.0
    if pto_connected:
        dsdth = _piston_jacobian(th, l1, l2, l3)
        v = dsdth * om
        sat = v / v_eps
        if sat > 1.0:
            sat = 1.0
        elif sat < -1.0:
            sat = -1.0
        tau = -Ap * (P_frozen + crack) * dsdth * sat
    dom = (fe - conv - K_hs * th + tau) / I_tot
    return om, dom, fe * om, conv * om, tau * om
