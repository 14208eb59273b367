"""The analog network seen three ways: admittance, scattering, beamforming.

Shows that a purely reactive symmetric admittance matrix yields a symmetric
unitary scattering matrix, that both routes to the beamforming response
agree, and that twice the response always fits in the unit spectral-norm
ball, which is exactly the optimizer's feasible set.

Run:  python demos/demo_network_model.py
"""

import numpy as np

from milacbeam import (MiLACNetwork, admittance_to_beamforming,
                       admittance_to_scattering, check_reciprocal_lossless,
                       random_reactive_admittance, scattering_to_beamforming,
                       spectral_norm)

rng = np.random.default_rng(42)
n_rf, n_tx = 4, 8

net = MiLACNetwork(y=random_reactive_admittance(n_rf + n_tx, rng), n_rf=n_rf)
print(f"{net.n_ports}-port network, {net.n_rf} RF-chain ports, "
      f"{net.n_tx} antenna ports, Z0 = {net.z0} ohm")

phi = admittance_to_scattering(net)
rep = check_reciprocal_lossless(phi)
print(f"reciprocal+lossless check: ok={rep.ok}  "
      f"symmetry dev {rep.symmetry_deviation:.2e}, "
      f"unitarity dev {rep.unitarity_deviation:.2e}")

p_direct = admittance_to_beamforming(net)
p_via_phi = scattering_to_beamforming(phi, n_rf, n_tx)
print(f"two routes to the beamforming response agree to "
      f"{np.linalg.norm(p_direct - p_via_phi):.2e}")

print(f"spectral norm of the scaled response 2*Pm: "
      f"{spectral_norm(2 * p_direct):.6f}  (always <= 1 for these networks)")

# a lossy network violates the certificate
lossy = MiLACNetwork(y=net.y + 0.004 * np.eye(net.n_ports), n_rf=n_rf)
rep = check_reciprocal_lossless(admittance_to_scattering(lossy), tol=1e-8)
print(f"adding port conductance breaks losslessness: ok={rep.ok}  "
      f"unitarity dev {rep.unitarity_deviation:.2e}")
