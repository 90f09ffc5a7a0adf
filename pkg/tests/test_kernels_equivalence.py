"""The compiled extension and the pure-Python fallback must produce
bitwise-identical paths from the same draw blocks."""

import numpy as np
import pytest

from escapelab import RngStream
from escapelab._kernels import HAVE_COMPILED, fallback

if HAVE_COMPILED:
    from escapelab._kernels import _core
else:  # pragma: no cover - compiled module is expected in this repo
    _core = None

pytestmark = pytest.mark.skipif(not HAVE_COMPILED, reason="no compiled kernels")


def test_sde_segment_bitwise_equal():
    gen = RngStream(42).generator()
    normals = gen.standard_normal((5000, 2))
    rec_a = np.zeros((600, 6))
    rec_b = np.zeros((600, 6))
    args = dict(v=0.5, vs=1e-4, p=0.5, t=0.0, dt=1e-3,
                alpha=1.0, f=0.8, eps=0.05, k=1.0, kstar=1.0, V=1e4,
                hbar=1.0, p_scale=1e4, p_noise=0,
                absorb_floor=0.0, vstar_stop=0.0,
                stop_on_v_absorbed=0, stop_on_vs_absorbed=0,
                record_every=10, tau_v=0.0, tau_vs=0.0, sup_vs=1e-4, step0=0)
    out_a = _core.sde_em_segment(normals=normals, rec=rec_a, **args)
    out_b = fallback.sde_em_segment(normals=normals, rec=rec_b, **args)
    assert out_a == out_b
    assert np.array_equal(rec_a, rec_b)


def test_gillespie_segment_bitwise_equal():
    gen = RngStream(43).generator()
    uniforms = gen.random(3 * 4000)
    rec_a = np.zeros((4000 // 7 + 2, 4))
    rec_b = np.zeros((4000 // 7 + 2, 4))

    def run(mod, rec):
        w_parent = np.full(20000, -1, dtype=np.int64)
        m_parent = np.full(20000, -1, dtype=np.int64)
        w_btime = np.zeros(20000)
        m_btime = np.zeros(20000)
        w_alive = np.zeros(20000, dtype=np.int64)
        m_alive = np.zeros(20000, dtype=np.int64)
        w_alive[:500] = np.arange(500)
        m_alive[:1] = 0
        out = mod.bd_gillespie_segment(
            500, 1, 500, 0.0, uniforms, 3,
            1.0, 0.8, 0.05, 1.0, 1.0, 1.0, 1000.0,
            50.0, 10**9, 0, 0, 0, 7, rec,
            1, w_parent, m_parent, w_btime, m_btime, w_alive, m_alive,
            500, 1, 500, 1, 0, 1,
        )
        return out, w_parent.copy(), m_parent.copy(), w_btime.copy()

    out_a, wp_a, mp_a, wb_a = run(_core, rec_a)
    out_b, wp_b, mp_b, wb_b = run(fallback, rec_b)
    assert out_a == out_b
    assert np.array_equal(rec_a, rec_b)
    assert np.array_equal(wp_a, wp_b) and np.array_equal(mp_a, mp_b)
    assert np.array_equal(wb_a, wb_b)


def test_feller_segment_bitwise_equal():
    gen = RngStream(44).generator()
    normals = gen.standard_normal(20000)
    a = _core.feller_em_segment(1.0, 0.0, 1e-4, normals, 0.0, 1e-300)
    b = fallback.feller_em_segment(1.0, 0.0, 1e-4, normals, 0.0, 1e-300)
    assert a == b
