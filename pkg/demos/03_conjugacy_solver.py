#!/usr/bin/env python3
"""Solve L o H = H o f for a perturbed cat map and probe H's regularity.

The solver accumulates the unstable/stable one-sided sums of the twisted
equation; the returned H evaluates anywhere on the torus with a
certified series tail, so the residual certificate is checked on points
the solver never saw.
"""

import numpy as np

from toralab import conjugacy, maps, spectral
from toralab.torusfn import TrigPoly

cat = spectral.automorphism([[2, 1], [1, 1]])
eps = 1e-3
f = maps.build(cat, TrigPoly.sin_mode((0, 1), [eps, 0.0]))
print("perturbation:", f"||R|| = {f.smallness.r_c0:.1e},",
      f"||DR|| <= {f.smallness.dr_c0_upper:.3e},",
      "cone bound ok:", f.smallness.cone_ok)

rep = maps.verify_anosov(f)
print(f"cone-field verification: theta = {rep.theta:.4f}, "
      f"margin = {rep.invariance_margin:.3f}")

res = conjugacy.solve_conjugacy(f, tol=1e-10, grid_n=256,
                                residual_samples=10000, regularity=True)
print(f"\nsolved in {res.n_terms} sweeps; contraction factors "
      f"{res.contraction_u:.3f}/{res.contraction_s:.3f}")
print(f"residual on independent points: {res.residual_max:.2e}")
print(f"||h||_C0 = {res.h_c0:.3e} (~ eps), ||Dh||_C0 = {res.dh_c0:.3e}")
print(f"anchor H(p) = 0 residual: {res.anchor_residual:.2e}")

reg = res.regularity
print(f"Holder(h)  ~ {reg['holder_h'].exponent:.3f} "
      f"(reliable: {reg['holder_h'].reliable})")
print(f"Holder(Dh) ~ {reg['holder_dh'].exponent:.3f} "
      f"(reliable: {reg['holder_dh'].reliable})")
print(f"Sobolev W^(1,{reg['sobolev_q']}) indicator: {reg['sobolev_h']:.4f} "
      "(diagnostic only)")

print("\nperiodic covariance: H maps f-orbits to L-periodic points")
print(f"  worst defect over periods 1..3: "
      f"{conjugacy.periodic_covariance(res, n_max=3):.2e}")

print("\nlinear-response scaling of ||h|| with eps:")
for e in (1e-4, 1e-3, 1e-2):
    fe = maps.build(cat, TrigPoly.sin_mode((0, 1), [e, 0.0]), warn=False)
    r = conjugacy.solve_conjugacy(fe, tol=1e-11, grid_n=64,
                                  residual_samples=200)
    print(f"  eps = {e:7.0e}:  ||h|| = {r.h_c0:.4e}   ratio "
          f"{r.h_c0 / e:.4f}")

print("\nJacobian diagnostics across resolutions (non-C1 telemetry): the")
print("equation residual of L DH = (DH o f) Df does not go to zero,")
print("because h is only Holder for a generic perturbation:")
for n in (64, 128, 256):
    r = conjugacy.solve_conjugacy(f, tol=1e-10, grid_n=n,
                                  residual_samples=100, anchor=False)
    jac = conjugacy.jacobian_dh(r, sample_n=32)
    print(f"  N = {n:3d}:  residual = {jac.residual_eq:.3e}   "
          f"min |det DH| = {jac.min_det:.4f}")
