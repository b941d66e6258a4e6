"""Payload sweep on the three-cell chain.

Longer frames hold the channel longer per successful exchange, which
raises every cell's access intensity.  For the chain that is good news
for the edge cells and bad news for the middle one: its unblocked
fraction decays toward the infinite-intensity limit of zero.  The sweep
prints one row per payload with the middle cell's share shrinking while
every access intensity grows monotonically.
"""

import numpy as np

from cellwlan.dcf import backoff_preset, mac_phy_preset
from cellwlan.multicell import MulticellInput, payload_sweep
from cellwlan.topology import graph_from_edges

graph = graph_from_edges([1, 2, 3], [(1, 2), (2, 3)])
inp = MulticellInput(
    graph=graph, node_counts=(10, 10, 10),
    mac_phy=mac_phy_preset("dot11b-11mbps", payload_bits=8.0 * 1000),
    backoff=backoff_preset("dot11b-11mbps"))

payloads_bytes = range(100, 1501, 100)
points = payload_sweep(inp, tuple(8.0 * b for b in payloads_bytes))

print(f"{'bytes':>6} {'rho_edge':>10} {'rho_mid':>10} {'x_edge':>8} "
      f"{'x_mid':>8} {'net thpt':>9}")
for pt in points:
    print(f"{pt.payload_bits / 8.0:>6.0f} {pt.rho[0]:>10.3f} "
          f"{pt.rho[1]:>10.3f} {pt.x[0]:>8.4f} {pt.x[1]:>8.4f} "
          f"{pt.normalized_network_throughput:>9.4f}")

rho = np.array([pt.rho for pt in points])
assert np.all(np.diff(rho, axis=0) > 0), "access intensities must grow"
print("\nEvery cell's access intensity increases with the payload, yet "
      "the middle cell's\nairtime share only shrinks: the product-form "
      "weights favor the paired edge\ntransmissions ever more strongly.")
