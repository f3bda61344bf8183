import numpy as np
import pytest
import scipy.io

from daepl import samples


def random_structured(rng, n_max=8, max_block=3):
    """Random pencil with a nilpotent part of random block structure."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(0, n))
    blocks, k = [], m
    while k > 0:
        b = int(rng.integers(1, min(max_block, k) + 1))
        blocks.append(b)
        k -= b
    return samples.random_pencil(n, n - m, blocks, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def mtx_dir(tmp_path):
    """Matrix Market files for the two reference pencils plus a 3x3 identity."""
    p1, p2 = samples.p1(), samples.p2()
    files = {
        "E1": p1.E, "A1": p1.A, "E2": p2.E, "A2": p2.A, "I3": np.eye(3),
    }
    for name, m in files.items():
        scipy.io.mmwrite(str(tmp_path / f"{name}.mtx"), m)
    (tmp_path / "e1.txt").write_text("1 0\n")
    (tmp_path / "e2.txt").write_text("0 1\n")
    return tmp_path


def certified(rng, count, index0=True, n_max=8):
    """``count`` random pencils with a built generator: (known, wong, estimate, generator)."""
    from daepl.pencil import estimate_index
    from daepl.semigroup import build_generator
    from daepl.wong import consistent_space, wong_sequence

    out = []
    while len(out) < count:
        if index0:
            kp = samples.random_index0_pencil(int(rng.integers(2, n_max + 1)), rng=rng)
        else:
            kp = random_structured(rng, n_max=n_max)
            if kp.r == 0:
                continue
        est = estimate_index(kp.pencil, kp.rho0)
        w = wong_sequence(kp.pencil, index=est)
        g = build_generator(kp.pencil, consistent_space(kp.pencil, w, est), w)
        out.append((kp, w, est, g))
    return out
