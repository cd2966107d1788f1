# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Compiled Metropolis sweep kernel; semantics match _sa_py.run_metropolis."""

from libc.math cimport exp


def run_metropolis(signed char[:, ::1] spins,
                   const double[:, :] h,
                   const int[:, ::1] nbr_idx,
                   const double[:, :, :] nbr_val,
                   const int[:, ::1] perms,
                   const double[:] betas,
                   const double[:, :, :] uniforms):
    cdef Py_ssize_t reads = spins.shape[0]
    cdef Py_ssize_t n = spins.shape[1]
    cdef Py_ssize_t deg = nbr_idx.shape[1]
    cdef Py_ssize_t sweeps = betas.shape[0]
    cdef Py_ssize_t r, c, t, d, i
    cdef double field, de, beta, arg

    with nogil:
        for r in range(reads):
            for c in range(sweeps):
                beta = betas[c]
                for t in range(n):
                    i = perms[r, t]
                    field = h[r, i]
                    for d in range(deg):
                        field += nbr_val[r, i, d] * spins[r, nbr_idx[i, d]]
                    de = -2.0 * spins[r, i] * field
                    arg = -beta * de
                    if arg > 50.0:
                        arg = 50.0
                    if uniforms[r, c, t] < exp(arg):
                        spins[r, i] = -spins[r, i]
