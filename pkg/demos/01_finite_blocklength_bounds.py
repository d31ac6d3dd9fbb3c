"""Finite blocklength bounds for an i.i.d. qubit pair, checked against the oracle.

Walks through the basic objects: a pair of states, their distinguishability
scalars, the spectral measure of the relative modular operator, the exact
Neyman-Pearson frontier, and the concentration upper bounds on log beta_n.
"""

import math

import numpy as np

import qhtbounds as q

# the reference qubit pair (both Bloch vectors have norm 1/2)
rho = q.from_bloch((-0.177483, 0.365807, 0.291007))
sigma = q.from_bloch((-0.452239, -0.141906, -0.159193))

d = q.rel_entropy(rho, sigma)
v = q.info_variance(rho, sigma)
c = q.sup_norm_c(rho, sigma)
print("relative entropy D      =", d)
print("information variance V  =", v)
print("sup-norm constant       =", c)

# the classical random variable behind every bound
meas = q.relative_modular_measure(rho, sigma)
print("\nspectral measure atoms (location, weight):")
for loc, w in zip(meas.locations, meas.weights):
    print(f"  {loc:+.6f}  {w:.6f}")
print("mean + D      =", meas.mean + d, " (zero up to rounding)")
print("variance - V  =", meas.variance - v)
print("E[e^X]        =", q.measure_mgf(meas, 1.0))

# exact trade-off at one copy
curve = q.error_curve(rho, sigma)
print("\nexact frontier breakpoints:", len(curve.alphas))
for eps in (0.05, 0.1, 0.3):
    print(f"  beta*({eps}) = {q.optimal_type2(rho, sigma, eps):.6f}")

# concentration bounds versus the exact optimum as n grows
print("\nn  eps   log beta (exact)   azuma-stein   ks-stein")
for n in (1, 2, 4):
    rn, sn = q.tensor_pow(rho, n), q.tensor_pow(sigma, n)
    pairs = [(rho, sigma)] * n
    for eps in (0.05, 0.2):
        exact = math.log(q.optimal_type2(rn, sn, eps))
        az = q.azuma_stein_bound(pairs, eps).value
        ks = q.ks_stein_bound(pairs, eps).value
        print(f"{n}  {eps:<5} {exact:+.4f}            {az:+.4f}       {ks:+.4f}")

# the comparison table behind the curve figure: the Kearns-Saul route
# improves on the Renyi envelope g below the crossover threshold
eps0, eps0_tilde = q.crossover_eps(rho, sigma)
print("\ncrossover thresholds: eps0 =", eps0, " eps0_tilde =", eps0_tilde)
print("eps    g        h        h_tilde  s1       s2")
for row in q.q_curve(rho, sigma, 100, np.linspace(0.05, 0.95, 7)):
    print(
        f"{row['eps']:.3f}  {row['g']:.4f}   {row['h']:.4f}   "
        f"{row['h_tilde']:.4f}   {row['s1']:+.4f}  {row['s2']:.4f}"
    )
