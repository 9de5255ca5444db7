#!/usr/bin/env python3
"""Linear cocycles over a perturbed automorphism.

Lyapunov exponents three ways (pointwise QR, volume average, exact at
periodic points), conformality of return maps, fiber bunching, and
singular-subspace estimates of the invariant subbundles.
"""

import numpy as np

from toralab import cocycles, conjugacy, maps, spectral
from toralab.torusfn import TrigPoly

cat = spectral.automorphism([[2, 1], [1, 1]])
golden = (3 + np.sqrt(5)) / 2
f = maps.build(cat, TrigPoly.sin_mode((0, 1), [1e-3, 0.0]))
spec = cocycles.CocycleSpec(f, "derivative")

print("=== Lyapunov exponents of the derivative cocycle ===")
ref = [-np.log(golden), np.log(golden)]
rep = cocycles.lyapunov_volume(spec, 2000, grid_per_axis=8, reference=ref)
print(f"volume average: {rep.exponents}  (linear values {ref})")
print(f"max deviation {rep.max_deviation:.2e}; Birkhoff long-orbit "
      f"estimate {rep.birkhoff}")

print("\n=== exponents at periodic points ===")
for n in (1, 2):
    for orbit in maps.periodic_points(f, n).orbits:
        if orbit.period != n:
            continue
        r = cocycles.exponents_at_periodic(spec, orbit, reference=ref)
        print(f"  period {orbit.period} at {np.round(orbit.points[0], 4)}: "
              f"exponents {np.round(r.exponents, 6)} "
              f"(deviation {r.max_deviation:.1e})")

print("\n=== conformality of return maps ===")
mats = {
    "rotation-scaling": 1.7 * np.array([[np.cos(0.6), -np.sin(0.6)],
                                        [np.sin(0.6), np.cos(0.6)]]),
    "diag(2, 3)": np.diag([2.0, 3.0]),
    "shear [[2,1],[0,2]]": np.array([[2.0, 1.0], [0.0, 2.0]]),
}
for name, m in mats.items():
    v = cocycles.conformality_check(m)
    print(f"  {name:22s}: {v.verdict}"
          + (f" (cond C_p = {v.conjugator_cond:.2f})"
             if v.conjugator is not None else ""))

print("\n=== fiber bunching ===")
full = cocycles.fiber_bunching_check(spec, beta=1.0)
print(f"full derivative cocycle: value {full.value:.4f} -> bunched: "
      f"{full.bunched} (the cat map itself is not fiber bunched)")
idx = [i for i, c in enumerate(f.spec.clusters) if c.rho > 1][0]
restr = cocycles.CocycleSpec(f, "restriction", cluster_index=idx)
fb = cocycles.fiber_bunching_check(restr, beta=1.0)
print(f"restriction to one Lyapunov line: value {fb.value:.4f} -> bunched: "
      f"{fb.bunched}")

print("\n=== invariant subbundles of the 4-d skew example ===")
ce = conjugacy.build_counterexample([[2, 1], [1, 1]], [[3, 1], [2, 1]],
                                    TrigPoly.sin_mode((1, 0), 0.01),
                                    k_trunc=50)
spec4 = cocycles.CocycleSpec(ce.f, "derivative")
x0 = np.array([0.1, 0.2, 0.3, 0.4])
for i, cluster in enumerate(ce.f.spec.clusters):
    if cluster.rho < 1:
        continue
    est = cocycles.oseledets_subbundle(spec4, x0, 50, i)
    print(f"  cluster rho = {cluster.rho:.4f}: angle to L's subspace "
          f"{est.angle_to_linear:.2e}, convergence {est.convergence:.1e}")
print("the faster subbundle tilts by O(eps); the A-factor line is "
      "preserved by the skew structure")
