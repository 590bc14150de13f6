# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory kernels.

Same contract as ``_pykernels.simulate_rewards``: a whole trajectory driven
by a pre-drawn ``(horizon, width)`` block of uniforms.  Arithmetic is laid
out in the same order as the Python path so both produce identical bits.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt

from .bombe import oscillation_table

cnp.import_array()

cdef enum:
    BOMBE = 0
    TOW = 1
    EG = 2
    SOFTMAX = 3
    UCB1T = 4


cdef inline int _pick_max(double[::1] x, int n, double u) noexcept nogil:
    cdef double best = x[0]
    cdef int k, nb = 0, target, c = 0
    for k in range(1, n):
        if x[k] > best:
            best = x[k]
    for k in range(n):
        if x[k] == best:
            nb += 1
    target = <int>(u * nb)
    if target > nb - 1:
        target = nb - 1
    for k in range(n):
        if x[k] == best:
            if c == target:
                return k
            c += 1
    return n - 1


cdef void _resolve(double[::1] probs, int M, int N, double[:, ::1] U, Py_ssize_t t, int base,
                   int mode, long[::1] choice, double[::1] reward) noexcept nogil:
    cdef int i, k, m, winner, c
    for i in range(M):
        reward[i] = 0.0
    for k in range(N):
        m = 0
        for i in range(M):
            if choice[i] == k:
                m += 1
        if m == 0 or not (U[t, base + k] < probs[k]):
            continue
        if mode == 0:
            winner = <int>(U[t, base + N + k] * m)
            if winner > m - 1:
                winner = m - 1
            c = 0
            for i in range(M):
                if choice[i] == k:
                    if c == winner:
                        reward[i] = 1.0
                    c += 1
        else:
            for i in range(M):
                if choice[i] == k:
                    reward[i] = 1.0 / m


def simulate_rewards(int policy, double[::1] probs, int n_users, double[:, ::1] uniforms,
                     int collision_mode, double omega, double amplitude, int period,
                     double epsilon, double tau):
    cdef int M = n_users
    cdef int N = probs.shape[0]
    cdef Py_ssize_t horizon = uniforms.shape[0]
    cdef int draws = 2 if policy == EG else 1
    if uniforms.shape[1] != draws * M + 2 * N:
        raise ValueError("uniform block width does not match the policy's draws")
    if policy == BOMBE and M < 2:
        raise ValueError("the Bombe needs at least 2 users")
    if policy < BOMBE or policy > UCB1T:
        raise ValueError(f"unknown policy code {policy}")

    out_arr = np.empty((M, horizon))
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] osc = np.ascontiguousarray(oscillation_table(amplitude, period, N))
    cdef double[:, ::1] q = np.zeros((M, N))
    cdef double[:, ::1] dq = np.zeros((M, N))
    cdef double[::1] col = np.zeros(N)
    cdef double[::1] x = np.zeros(N)
    cdef long[:, ::1] counts = np.zeros((M, N), dtype=np.int_)
    cdef double[:, ::1] sums = np.zeros((M, N))
    cdef double[:, ::1] sq = np.zeros((M, N))
    cdef long[::1] choice = np.zeros(M, dtype=np.int_)
    cdef double[::1] reward = np.zeros(M)

    cdef Py_ssize_t t
    cdef int i, k, l, r, arm, base = draws * M
    cdef long n, total_pulls
    cdef double s, u, top, total, acc, target, mean, log_t, var, ok

    with nogil:
        for t in range(horizon):
            r = t % period
            for i in range(M):
                if policy == BOMBE or policy == TOW:
                    s = q[i, 0]
                    for l in range(1, N):
                        s += q[i, l]
                    for k in range(N):
                        x[k] = q[i, k] - (s - q[i, k]) / (N - 1) + osc[r, k]
                    choice[i] = _pick_max(x, N, uniforms[t, i])
                elif policy == EG:
                    u = uniforms[t, 2 * i + 1]
                    if uniforms[t, 2 * i] < epsilon:
                        arm = <int>(u * N)
                        if arm > N - 1:
                            arm = N - 1
                        choice[i] = arm
                    else:
                        for k in range(N):
                            x[k] = sums[i, k] / counts[i, k] if counts[i, k] else 0.0
                        choice[i] = _pick_max(x, N, u)
                elif policy == SOFTMAX:
                    u = uniforms[t, i]
                    for k in range(N):
                        x[k] = sums[i, k] / counts[i, k] if counts[i, k] else 0.0
                    top = x[0]
                    for k in range(1, N):
                        if x[k] > top:
                            top = x[k]
                    total = 0.0
                    for k in range(N):
                        x[k] = exp((x[k] - top) / tau)
                        total += x[k]
                    target = u * total
                    acc = 0.0
                    arm = N - 1
                    for k in range(N):
                        acc += x[k]
                        if target < acc:
                            arm = k
                            break
                    choice[i] = arm
                else:
                    u = uniforms[t, i]
                    arm = -1
                    total_pulls = 0
                    for k in range(N):
                        total_pulls += counts[i, k]
                        if counts[i, k] == 0 and arm < 0:
                            arm = k
                    if arm >= 0:
                        choice[i] = arm
                    else:
                        log_t = log(<double>total_pulls)
                        for k in range(N):
                            n = counts[i, k]
                            mean = sums[i, k] / n
                            var = sq[i, k] / n - mean * mean + sqrt(2.0 * log_t / n)
                            if not (var < 0.25):
                                var = 0.25
                            x[k] = mean + sqrt(log_t / n * var)
                        choice[i] = _pick_max(x, N, u)

            _resolve(probs, M, N, uniforms, t, base, collision_mode, choice, reward)
            for i in range(M):
                out[i, t] = reward[i]

            if policy == BOMBE:
                for i in range(M):
                    for k in range(N):
                        dq[i, k] = 0.0
                    dq[i, choice[i]] = 1.0 if reward[i] > 0 else -omega
                for k in range(N):
                    col[k] = dq[0, k]
                    for i in range(1, M):
                        col[k] += dq[i, k]
                for i in range(M):
                    for k in range(N):
                        q[i, k] += dq[i, k] - (col[k] - dq[i, k]) / (M - 1)
            elif policy == TOW:
                for i in range(M):
                    q[i, choice[i]] += 1.0 if reward[i] > 0 else -omega
            else:
                for i in range(M):
                    arm = choice[i]
                    counts[i, arm] += 1
                    sums[i, arm] += reward[i]
                    sq[i, arm] += reward[i] * reward[i]
    return out_arr

