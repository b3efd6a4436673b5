"""SU(d) valence-bond-solid states and the codes built from them."""
