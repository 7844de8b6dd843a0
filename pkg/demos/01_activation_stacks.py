"""
Activation derivative stacks and their bound constants
======================================================

Every supported activation exposes (sigma, sigma', sigma'', sigma''')
in closed form, plus the Lipschitz and sup constants the generalization
bound consumes.
"""

import numpy as np

from pinnbound import ActivationSpec, constants, eval_derivs

xs = np.linspace(-3, 3, 7)

for name, k in [("tanh", 1), ("tanh", 3), ("sigmoid", 1), ("expnegrelu", 3)]:
    spec = ActivationSpec.from_name(name, k)
    s0, s1, s2, s3 = eval_derivs(spec, xs)
    print(f"{name}^{k}")
    print("  sigma   ", np.round(s0, 4))
    print("  sigma'  ", np.round(s1, 4))
    print("  sigma'' ", np.round(s2, 4))
    print("  sigma'''", np.round(s3, 4))
    sc = constants(spec)
    print(f"  L={sc.L_sigma:.4g} L'={sc.L_sigma1:.4g} L''={sc.L_sigma2:.4g} "
          f"B={sc.B_sigma:.4g} B'={sc.B_sigma1:.4g} "
          f"sigma(0)={sc.c0:.4g} sigma'(0)={sc.c1:.4g} sigma''(0)={sc.c2:.4g}")

# sanity: the closed forms agree with a central finite difference
spec = ActivationSpec.from_name("tanh", 3)
h = 1e-5
fd = (eval_derivs(spec, xs + h)[0] - eval_derivs(spec, xs - h)[0]) / (2 * h)
print("\nmax |sigma'(closed form) - sigma'(finite diff)| =",
      float(np.max(np.abs(eval_derivs(spec, xs)[1] - fd))))
