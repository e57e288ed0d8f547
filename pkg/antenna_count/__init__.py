"""
LoS Massive MIMO Antenna Count
------------------------------
How many 60 GHz base-station antennas match a 1.9 GHz PCS array under
line-of-sight propagation, zero-forcing, and max-min power control.
"""

__version__ = "1.0.0"
