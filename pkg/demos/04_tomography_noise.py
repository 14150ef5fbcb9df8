# %% [markdown]
# # Finite photon counts
#
# Both of Bob's steps rely on polarization tomography.  With n photons per
# setting the reconstructed Bloch vector is off by about 1/sqrt(n), which
# tilts the dephasing basis slightly and adds noise to every curve sample.

# %%
import numpy as np

from polwitness import (PreparationParams, discretize, make_lorentzian, reconstruct,
                        simulate_counts, simulate_protocol, trace_distance_qubit)
from polwitness.spectrum import Quantile
from polwitness.states import reduce_system
from polwitness.units import LINEWIDTH_PS, wavelength_to_omega
from polwitness.witness import experiment_sweep, witness_max

spec = make_lorentzian(wavelength_to_omega(914.0), 1.0 / LINEWIDTH_PS)
grid = discretize(spec, Quantile(4096))
sweep = experiment_sweep(spec.delta_omega)
params = PreparationParams(0.5, length_mm=35.92, birefringence=0.179)

# %%
rho = reduce_system(simulate_protocol(params, grid, sweep, seed=0).state)
for n in (10**3, 10**4, 10**5, 10**6):
    errs = [trace_distance_qubit(rho, reconstruct(simulate_counts(rho, n, seed=s)))
            for s in range(50)]
    print(f"n = {n:8d}  mean reconstruction error {np.mean(errs):.2e}")

# %% [markdown]
# The witness itself is robust: over many seeds its spread is far below the
# difference between crystal lengths.

# %%
exact = witness_max(simulate_protocol(params, grid, sweep, seed=0).curve)
noisy = [witness_max(simulate_protocol(params, grid, sweep, seed=s, counts=10**5).curve)
         for s in range(30)]
print(f"noiseless {exact:.5f}, noisy mean {np.mean(noisy):.5f} +/- {np.std(noisy):.5f}")
