"""Persistent TCP downloads through each cell's AP.

With one long-lived download per station and delayed ACKs off, every
data frame the AP sends is answered by an ACK frame from some station,
so in the long run half the successful transmissions in a cell belong to
the AP.  That makes the cell behave like two saturated nodes sending
frames of the average of the data and ACK sizes.  This script reduces
each cell that way, solves the resulting network, and compares the
per-AP throughput of an isolated cell against the three-cell chain.
"""

from cellwlan.dcf import backoff_preset, mac_phy_preset
from cellwlan.multicell import tcp_long_throughputs
from cellwlan.topology import graph_from_edges

mac = mac_phy_preset("dot11b-11mbps", payload_bits=8.0 * 1000)
backoff = backoff_preset("dot11b-11mbps")
data_bits = 8.0 * 1500
ack_bits = 8.0 * 40

chain = graph_from_edges([1, 2, 3], [(1, 2), (2, 3)])
res = tcp_long_throughputs(chain, mac, backoff, data_bits, ack_bits)

print(f"equivalent frame size: {res.equivalent_payload_bits / 8.0:.0f} "
      f"bytes (mean of {data_bits / 8:.0f}-byte data and "
      f"{ack_bits / 8:.0f}-byte ACK)")
print(f"isolated cell AP throughput: "
      f"{res.isolated_ap_throughput_pkts:.1f} data frames/s")
print("\nthree-chain per-AP throughput:")
for j, c in enumerate(chain.cells):
    frac = res.ap_throughput_pkts[j] / res.isolated_ap_throughput_pkts
    print(f"  cell {c}: {res.ap_throughput_pkts[j]:>7.1f} frames/s "
          f"({frac:.2f} of isolated)")

edgeless = graph_from_edges([1, 2, 3], [])
alone = tcp_long_throughputs(edgeless, mac, backoff, data_bits, ack_bits)
print("\nsame three cells with no mutual interference:")
for j, c in enumerate(edgeless.cells):
    print(f"  cell {c}: {alone.ap_throughput_pkts[j]:>7.1f} frames/s")

print("\nThe chain's middle AP is throttled to a sliver of its isolated "
      "rate even though\nits own cell is no busier: both neighbors "
      "contend with it for the same air.")
