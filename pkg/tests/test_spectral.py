import numpy as np
import pytest

from toralab import spectral
from toralab.errors import NotHyperbolic

CAT = spectral.automorphism([[2, 1], [1, 1]])
B_BLOCK = spectral.automorphism([[3, 1], [2, 1]])
GOLDEN = (3 + np.sqrt(5)) / 2


def test_validation():
    with pytest.raises(ValueError):
        spectral.automorphism([[2, 0], [0, 2]])
    with pytest.raises(ValueError):
        spectral.automorphism([[1, 2, 3], [4, 5, 6]])


def test_cat_classification():
    flags = spectral.classify(CAT)
    assert flags.hyperbolic and flags.irreducible and flags.weakly_irreducible
    assert flags.no_three_same_modulus and flags.no_forbidden_pairs
    assert flags.diagonalizable


def test_block_diagonal_weakly_irreducible():
    m = spectral.block_diagonal(CAT, CAT)
    flags = spectral.classify(m)
    assert flags.weakly_irreducible and not flags.irreducible
    assert flags.diagonalizable


def test_jordan_block_weakly_irreducible():
    m = spectral.block_upper_identity(CAT)
    flags = spectral.classify(m)
    assert flags.weakly_irreducible and not flags.irreducible
    assert not flags.diagonalizable


def test_mixed_blocks_not_weakly_irreducible():
    m = spectral.block_diagonal(CAT, B_BLOCK)
    flags = spectral.classify(m)
    assert not flags.weakly_irreducible and not flags.irreducible


def test_non_hyperbolic_cyclotomic():
    comp = spectral.automorphism(
        [[0, 0, 0, -1], [1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]])
    flags = spectral.classify(comp)
    assert not flags.hyperbolic
    assert flags.cluster_moduli == ((1.0, 4),)
    with pytest.raises(NotHyperbolic):
        spectral.lyapunov_splitting(comp)


def test_forbidden_pair_flag():
    # [[0,1],[1,0]] has eigenvalues 1, -1: the pair lambda, -lambda
    m = spectral.automorphism([[0, 1], [1, 0]])
    flags = spectral.classify(m)
    assert not flags.no_forbidden_pairs


def test_splitting_cat():
    sd = spectral.lyapunov_splitting(CAT)
    assert sd.stable_dim == sd.unstable_dim == 1
    rho = [c.rho for c in sd.clusters]
    assert np.allclose(sorted(rho), [1 / GOLDEN, GOLDEN], atol=1e-12)
    # unstable direction is the golden-ratio eigenvector
    v = sd.unstable_basis[:, 0]
    lv = CAT.as_array() @ v
    assert np.allclose(lv, GOLDEN * v, atol=1e-10)


def test_splitting_growth_rates():
    # (1/n) log ||L^n v|| -> log rho_i at n = 200.  The iteration is
    # re-projected onto the cluster subspace each step (float leakage into
    # faster clusters otherwise takes over near n ~ 90).  The 1e-6 bound
    # is attainable exactly for one-dimensional real clusters; Jordan or
    # complex-pair clusters carry an intrinsic (log n)/n-size transient.
    n = 200
    for m in [CAT, spectral.block_diagonal(CAT, B_BLOCK),
              spectral.block_upper_identity(CAT)]:
        sd = spectral.lyapunov_splitting(m)
        mf = m.as_array()
        for cluster, basis in zip(sd.clusters, sd.cluster_bases):
            proj = basis @ basis.T
            simple = basis.shape[1] == 1
            for j in range(basis.shape[1]):
                w = basis[:, j].copy()
                acc = 0.0
                for _ in range(n):
                    w = proj @ (mf @ w)
                    nrm = np.linalg.norm(w)
                    acc += np.log(nrm)
                    w /= nrm
                tol = 1e-6 if simple else 0.05
                assert abs(acc / n - cluster.exponent) < tol


def test_adapted_norm_contracts_on_sample():
    rng = np.random.default_rng(0)
    for m in [CAT, spectral.block_upper_identity(CAT)]:
        sd = spectral.lyapunov_splitting(m)
        mf = m.as_array()
        norm = sd.stable_norm
        dim = sd.stable_dim
        coords = rng.normal(size=(1000, dim))
        vecs = coords @ norm.basis.T
        before = norm.vector_norm(vecs.T if vecs.ndim == 1 else vecs)
        after = norm.vector_norm((mf @ vecs.T).T)
        assert norm.contraction < 1.0
        assert np.all(after <= norm.contraction * before * (1 + 1e-9))


def test_jordan_adapted_norm_handles_defect():
    m = spectral.block_upper_identity(CAT)
    sd = spectral.lyapunov_splitting(m)
    assert sd.unstable_dim == 2
    assert sd.unstable_norm.contraction < 1.0   # contraction of L^-1 on E^u


def _random_corpus(count=50, seed=11):
    """Mixed corpus: random unimodular conjugates of structured blocks
    plus raw random unimodular matrices, dimensions up to 6."""
    rng = np.random.default_rng(seed)
    chol = []
    a2 = [[2, 1], [1, 1]]
    b2 = [[3, 1], [2, 1]]
    c2 = [[1, 1], [1, 2]]
    out = []
    while len(out) < count:
        kind = rng.integers(0, 4)
        if kind == 0:
            m = spectral.random_unimodular(int(rng.integers(2, 7)),
                                           steps=14, rng=rng)
        else:
            blocks = [a2, b2, c2]
            i, j = rng.integers(0, 3, size=2)
            base = spectral.block_diagonal(
                spectral.automorphism(blocks[i]),
                spectral.automorphism(blocks[j]))
            u = spectral.random_unimodular(4, steps=6, rng=rng, entry_cap=8)
            m = u @ base @ u.inverse()
        out.append(m)
    return out


def test_lemma_vs_definitional_on_corpus():
    corpus = _random_corpus(50)
    disagreements = []
    for m in corpus:
        try:
            flags = spectral.classify(m)
        except Exception:
            continue
        verdict, witness = spectral.weakly_irreducible_definitional(m)
        if verdict != flags.weakly_irreducible:
            disagreements.append((m.entries, flags.weakly_irreducible,
                                  verdict, witness))
    assert not disagreements, disagreements[:3]


def test_irreducible_implies_weakly_irreducible():
    for m in _random_corpus(30, seed=5):
        try:
            flags = spectral.classify(m)
        except Exception:
            continue
        if flags.irreducible:
            assert flags.weakly_irreducible


def test_classification_report_roundtrip():
    import json
    rep = spectral.classification_report(CAT)
    blob = json.dumps(rep)
    back = json.loads(blob)
    assert back["flags"]["hyperbolic"] is True
    assert back["charpoly"] == [1, -3, 1]
