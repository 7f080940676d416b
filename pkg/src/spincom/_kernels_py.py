"""Numpy implementation of the per-frequency kernels.

Same contract as the compiled ``_kernels`` module; used when the extension
is not built or ``SPINCOM_PURE_PYTHON`` is set.
"""
import numpy as np


def _inverses(drift, omegas):
    eye = np.eye(4)
    m = -1j * omegas[:, None, None] * eye - drift[None, :, :]
    try:
        return np.linalg.inv(m), -1
    except np.linalg.LinAlgError:
        for w, mw in enumerate(m):
            try:
                np.linalg.inv(mw)
            except np.linalg.LinAlgError:
                return None, w
        raise


def output_batch(drift, omegas, output, feedthrough, noise_input, noise, signal):
    n = len(omegas)
    chi, bad = _inverses(np.asarray(drift), np.asarray(omegas, dtype=float))
    if chi is None:
        return np.empty((n, 4)), np.empty((n, 2), complex), bad
    gain = np.asarray(output) @ chi
    tr = gain @ np.asarray(noise_input) + np.asarray(feedthrough)
    weighted = tr * np.asarray(noise)
    s = np.einsum("wak,wbk->wab", weighted, tr.conj())
    spec = np.stack([s[:, 0, 0].real, s[:, 1, 1].real, s[:, 0, 1].real, s[:, 0, 1].imag], axis=1)
    trans = gain @ np.asarray(signal)
    return spec, trans, -1


def cavity_batch(drift, diffusion, omegas):
    n = len(omegas)
    chi, bad = _inverses(np.asarray(drift), np.asarray(omegas, dtype=float))
    if chi is None:
        return np.empty((n, 4)), bad
    diag = np.einsum("wij,jk,wik->wi", chi, np.asarray(diffusion), chi.conj()).real
    return diag, -1
