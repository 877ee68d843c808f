"""Small dense conic QP solver.

Solves

    minimize    0.5 x'Px + q'x
    subject to  A x in C

where C is a product of an equality set, a box, and a list of 2-D disks
(second-order cones in the plane). The iteration is the operator-splitting
scheme popularised by OSQP, generalised to the disk projections, with Ruiz
equilibration, adaptive step size, primal infeasibility certificates and a
final active-set polish.

Rows of ``A`` are laid out as ``[eq | box | disk pairs]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ConeProgram:
    P: np.ndarray
    q: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_box: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    A_disk: np.ndarray  # (2 * n_disk, n): consecutive row pairs
    centers: np.ndarray  # (n_disk, 2)
    radii: np.ndarray  # (n_disk,)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.A_eq.shape[0], self.A_box.shape[0], self.A_disk.shape[0] // 2

    def A(self) -> np.ndarray:
        return np.vstack([self.A_eq, self.A_box, self.A_disk])

    def objective(self, x) -> float:
        return float(0.5 * x @ self.P @ x + self.q @ x)

    def max_violation(self, x) -> float:
        """Largest absolute constraint violation at ``x``."""
        v = 0.0
        if len(self.b_eq):
            v = max(v, float(np.abs(self.A_eq @ x - self.b_eq).max()))
        if len(self.lo):
            ax = self.A_box @ x
            v = max(v, float(np.max(self.lo - ax, initial=0.0)), float(np.max(ax - self.hi, initial=0.0)))
        if len(self.radii):
            d = (self.A_disk @ x).reshape(-1, 2) - self.centers
            v = max(v, float(np.max(np.linalg.norm(d, axis=1) - self.radii, initial=0.0)))
        return v


@dataclass
class SolveResult:
    status: str  # "solved", "infeasible" or "max_iter"
    x: np.ndarray
    y: np.ndarray
    iterations: int
    polished: bool = False
    objective: float = math.nan
    info: dict = field(default_factory=dict)


def _project(zeta, m_e, m_b, b, lo, hi, centers, radii):
    z = zeta.copy()
    z[:m_e] = b
    z[m_e:m_e + m_b] = np.clip(z[m_e:m_e + m_b], lo, hi)
    if len(radii):
        d = z[m_e + m_b:].reshape(-1, 2) - centers
        nrm = np.sqrt((d * d).sum(axis=1))
        scale = np.where(nrm > radii, radii / np.maximum(nrm, 1e-300), 1.0)
        z[m_e + m_b:] = (centers + d * scale[:, None]).ravel()
    return z


def _support(y, m_e, m_b, b, lo, hi, centers, radii) -> float:
    """Support function of C evaluated at y."""
    s = float(b @ y[:m_e])
    yb = y[m_e:m_e + m_b]
    with np.errstate(invalid="ignore"):
        up = np.where(yb > 0, hi * yb, 0.0)
        dn = np.where(yb < 0, lo * yb, 0.0)
    s += float(np.nansum(up) + np.nansum(dn))
    if len(radii):
        yd = y[m_e + m_b:].reshape(-1, 2)
        s += float((centers * yd).sum() + (radii * np.linalg.norm(yd, axis=1)).sum())
    return s


def _ruiz(P, A, pair_start, iters=15):
    n, m = P.shape[0], A.shape[0]
    D = np.ones(n)
    E = np.ones(m)
    Ps, As = P.copy(), A.copy()
    for _ in range(iters):
        col = np.maximum(np.abs(Ps).max(axis=0), np.abs(As).max(axis=0, initial=0.0))
        row = np.abs(As).max(axis=1, initial=0.0)
        d = 1.0 / np.sqrt(np.where(col > 1e-12, col, 1.0))
        e = 1.0 / np.sqrt(np.where(row > 1e-12, row, 1.0))
        # disk pairs share one factor so the disks stay round
        if m > pair_start:
            pe = e[pair_start:].reshape(-1, 2)
            e[pair_start:] = np.repeat(np.sqrt(pe[:, 0] * pe[:, 1]), 2)
        D *= d
        E *= e
        Ps = d[:, None] * Ps * d[None, :]
        As = e[:, None] * As * d[None, :]
    return D, E


def solve(prog: ConeProgram, *, eps_abs=1e-6, eps_rel=1e-6, eps_pinf=1e-6, max_iter=5000,
          rho=0.1, sigma=1e-6, alpha=1.6, x0=None, y0=None, polish=True, check_every=10) -> SolveResult:
    """Run the splitting iteration; see the module docstring."""
    m_e, m_b, m_d = prog.sizes
    n = prog.n
    A = prog.A()
    m = A.shape[0]
    pair_start = m_e + m_b

    D, E = _ruiz(prog.P, A, pair_start)
    Ps = D[:, None] * prog.P * D[None, :]
    qs = D * prog.q
    c = 1.0 / max(np.abs(Ps).max(), np.abs(qs).max(initial=0.0), 1e-12)
    c = min(max(c, 1e-4), 1e4)
    Ps *= c
    qs *= c
    As = E[:, None] * A * D[None, :]
    b_s = E[:m_e] * prog.b_eq
    lo_s = E[m_e:pair_start] * prog.lo
    hi_s = E[m_e:pair_start] * prog.hi
    ed = E[pair_start::2] if m_d else np.zeros(0)
    cen_s = prog.centers * ed[:, None] if m_d else np.zeros((0, 2))
    rad_s = prog.radii * ed if m_d else np.zeros(0)

    def rho_vec(r):
        v = np.full(m, r)
        v[:m_e] = 1e3 * r
        if m_b:
            tight = np.abs(hi_s - lo_s) < 1e-9
            v[m_e:pair_start][tight] = 1e3 * r
        return v

    rv = rho_vec(rho)
    I_n = np.eye(n)

    def factor(rv):
        Kinv = np.linalg.inv(Ps + sigma * I_n + As.T @ (rv[:, None] * As))
        return Kinv, Kinv @ As.T, Kinv @ qs

    Kinv, KAt, Kq = factor(rv)

    x = np.zeros(n) if x0 is None else np.asarray(x0, float) / D
    z = _project(As @ x, m_e, m_b, b_s, lo_s, hi_s, cen_s, rad_s)
    y = np.zeros(m) if y0 is None else c * np.asarray(y0, float) / E
    status = "max_iter"
    it = 0
    Einv = 1.0 / E
    Dinv = 1.0 / D
    polish_tried = not polish
    polished_x = None

    for it in range(1, max_iter + 1):
        xt = sigma * (Kinv @ x) - Kq + KAt @ (rv * z - y)
        zt = As @ xt
        x_new = alpha * xt + (1 - alpha) * x
        z_relax = alpha * zt + (1 - alpha) * z
        z_new = _project(z_relax + y / rv, m_e, m_b, b_s, lo_s, hi_s, cen_s, rad_s)
        y_new = y + rv * (z_relax - z_new)
        dy = y_new - y
        x, z, y = x_new, z_new, y_new

        if it % check_every:
            continue
        Ax = As @ x
        r_prim = np.abs(Einv * (Ax - z)).max(initial=0.0)
        Px = Ps @ x
        Aty = As.T @ y
        r_dual = np.abs(Dinv * (Px + qs + Aty)).max() / c
        n_prim = max(np.abs(Einv * Ax).max(initial=0.0), np.abs(Einv * z).max(initial=0.0))
        n_dual = max(np.abs(Dinv * Px).max(), np.abs(Dinv * Aty).max(), np.abs(Dinv * qs).max()) / c
        if r_prim <= eps_abs + eps_rel * n_prim and r_dual <= eps_abs + eps_rel * n_dual:
            status = "solved"
            break
        # an exact active-set polish from a moderately accurate iterate
        if (not polish_tried and r_prim <= 1e2 * (eps_abs + eps_rel * n_prim)
                and r_dual <= 1e2 * (eps_abs + eps_rel * n_dual)):
            polish_tried = True
            polished_x = _polish(prog, D * x, E * y / c)
            if polished_x is not None:
                status = "solved"
                break
        # infeasibility certificate on the unscaled step of the multipliers
        dy_u = E * dy / c
        ndy = np.abs(dy_u).max(initial=0.0)
        if ndy > 1e-12:
            if (np.abs(A.T @ dy_u).max() <= eps_pinf * ndy
                    and _support(dy_u, m_e, m_b, prog.b_eq, prog.lo, prog.hi, prog.centers, prog.radii)
                    <= -eps_pinf * ndy):
                status = "infeasible"
                break
        if it % 50 == 0:
            ratio = math.sqrt((r_prim / max(n_prim, 1e-12)) / max(r_dual / max(n_dual, 1e-12), 1e-12))
            if ratio > 5 or ratio < 0.2:
                rho = min(max(rho * ratio, 1e-6), 1e6)
                rv = rho_vec(rho)
                Kinv, KAt, Kq = factor(rv)

    x_u = D * x
    y_u = E * y / c
    res = SolveResult(status, x_u, y_u, it, info={"rho": rho})
    if polished_x is not None:
        res.x = polished_x
        res.polished = True
    elif status == "solved" and polish:
        xp = _polish(prog, x_u, y_u)
        if xp is not None:
            res.x = xp
            res.polished = True
    if status != "infeasible":
        res.objective = prog.objective(res.x)
    return res


def _kkt_solve(kkt, rhs):
    try:
        sol = np.linalg.solve(kkt, rhs)
        if np.all(np.isfinite(sol)):
            return sol
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(kkt, rhs, rcond=None)[0]


def _polish(prog: ConeProgram, x, y, max_rounds: int = 30):
    """Refine the splitting solution by an active-set iteration.

    Starts from the active set suggested by the multipliers, solves the
    equality-constrained QP on it (active disks linearised, linearisation
    refreshed until it settles on the boundary), then adds violated
    constraints and drops constraints whose multiplier has the wrong sign.
    Returns ``None`` if no KKT point is reached.
    """
    m_e, m_b, m_d = prog.sizes
    n = prog.n
    yb = y[m_e:m_e + m_b]
    zb = prog.A_box @ x
    act_hi = (yb > 0) & (prog.hi - zb < yb)
    act_lo = (yb < 0) & (zb - prog.lo < -yb)
    act_disk = np.zeros(m_d, bool)
    if m_d:
        zd = (prog.A_disk @ x).reshape(-1, 2) - prog.centers
        yd = y[m_e + m_b:].reshape(-1, 2)
        act_disk = prog.radii - np.linalg.norm(zd, axis=1) < np.linalg.norm(yd, axis=1)

    scale = max(1.0, float(np.abs(prog.q).max(initial=0.0)), float(np.abs(np.diag(prog.P)).max()))
    feas_tol = 1e-10 * max(1.0, float(np.abs(prog.radii).max(initial=1.0)))
    x_ref = prog.objective(x)
    xp = x.copy()
    lam_prev: dict[int, float] = {}
    for _ in range(max_rounds):
        lam = None
        for _inner in range(12):
            rows, rhs = [prog.A_eq], [prog.b_eq]
            rows.append(prog.A_box[act_hi])
            rhs.append(prog.hi[act_hi])
            rows.append(prog.A_box[act_lo])
            rhs.append(prog.lo[act_lo])
            P_eff, q_eff = prog.P, prog.q
            disk_idx = np.flatnonzero(act_disk)
            for k in disk_idx:
                Ak = prog.A_disk[2 * k:2 * k + 2]
                d = Ak @ xp - prog.centers[k]
                nd = np.linalg.norm(d)
                u = d / nd if nd > 1e-12 else np.array([1.0, 0.0])
                rows.append((u @ Ak)[None, :])
                rhs.append(np.array([prog.radii[k] + u @ prog.centers[k]]))
                # curvature of the disk boundary (Newton step on the Lagrangian)
                mu = lam_prev.get(int(k), 0.0)
                if mu > 0 and nd > 1e-12:
                    Hk = (mu / nd) * (Ak.T @ (np.eye(2) - np.outer(u, u)) @ Ak)
                    if P_eff is prog.P:
                        P_eff, q_eff = prog.P.copy(), prog.q.copy()
                    P_eff += Hk
                    q_eff -= Hk @ xp
            Aa = np.vstack(rows)
            ba = np.concatenate(rhs)
            ma = Aa.shape[0]
            kkt = np.block([[P_eff, Aa.T], [Aa, np.zeros((ma, ma))]])
            sol = _kkt_solve(kkt, np.concatenate([-q_eff, ba]))
            xp, lam = sol[:n], sol[n:]
            if not len(disk_idx):
                break
            lam_dk = lam[ma - len(disk_idx):]
            lam_prev = {int(k): float(v) for k, v in zip(disk_idx, lam_dk)}
            dn = np.linalg.norm((prog.A_disk @ xp).reshape(-1, 2)[disk_idx] - prog.centers[disk_idx], axis=1)
            if np.abs(dn - prog.radii[disk_idx]).max() <= 1e-3 * feas_tol:
                break
        n_hi, n_lo = int(act_hi.sum()), int(act_lo.sum())
        lam_hi = lam[m_e:m_e + n_hi]
        lam_lo = lam[m_e + n_hi:m_e + n_hi + n_lo]
        lam_dk = lam[m_e + n_hi + n_lo:]
        changed = False
        # drop the worst wrong-sign multiplier
        cands = []
        if n_hi:
            i = int(np.argmin(lam_hi))
            cands.append((lam_hi[i], "hi", np.flatnonzero(act_hi)[i]))
        if n_lo:
            i = int(np.argmax(lam_lo))
            cands.append((-lam_lo[i], "lo", np.flatnonzero(act_lo)[i]))
        if len(lam_dk):
            i = int(np.argmin(lam_dk))
            cands.append((lam_dk[i], "disk", np.flatnonzero(act_disk)[i]))
        if cands:
            worst = min(cands, key=lambda c: c[0])
            if worst[0] < -1e-9 * scale:
                {"hi": act_hi, "lo": act_lo, "disk": act_disk}[worst[1]][worst[2]] = False
                changed = True
        if not changed:
            if len(prog.lo):
                ab = prog.A_box @ xp
                add_hi = (ab > prog.hi + feas_tol) & ~act_hi
                add_lo = (ab < prog.lo - feas_tol) & ~act_lo
                if add_hi.any() or add_lo.any():
                    act_hi |= add_hi
                    act_lo |= add_lo
                    changed = True
            if m_d:
                dn = np.linalg.norm((prog.A_disk @ xp).reshape(-1, 2) - prog.centers, axis=1)
                add = (dn > prog.radii + feas_tol) & ~act_disk
                if add.any():
                    act_disk |= add
                    changed = True
        if not changed:
            break
    else:
        return None
    if prog.max_violation(xp) > 1e-9 * max(1.0, float(np.abs(prog.radii).max(initial=1.0))):
        return None
    # the splitting iterate may be slightly infeasible and hence slightly cheaper
    if prog.objective(xp) > x_ref + 1e-3 * max(1.0, abs(x_ref)):
        return None
    return xp


def solve_equality_qp(prog: ConeProgram) -> np.ndarray:
    """Minimiser of the objective subject to the equality rows only."""
    n = prog.n
    m_e = prog.A_eq.shape[0]
    kkt = np.block([[prog.P, prog.A_eq.T], [prog.A_eq, np.zeros((m_e, m_e))]])
    return _kkt_solve(kkt, np.concatenate([-prog.q, prog.b_eq]))[:n]
