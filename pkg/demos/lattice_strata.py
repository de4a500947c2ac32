"""Square-tiled realizations: the same lattice character in every stratum it reaches.

A character with image Z + iZ and volume p is realized in H(n_1, ..., n_k)
exactly when p >= n_k + 1.  We take genus 3, volume 4, and walk all strata.
"""
from flatperiods import Partition, PeriodVector, all_partitions, decide, realize, verify_certificate
from flatperiods.field import I
from flatperiods.surface import vertex_cycles

chi = PeriodVector.of(4, I, 1, 0, 1, 0)
print("character:", ", ".join(str(z) for z in chi))
for part in all_partitions(3):
    verdict = decide(chi, part)
    if not verdict:
        print(f"H({part}): not realizable, deficit {verdict.deficit}")
        continue
    cert = realize(chi, part)
    angles = sorted(2 * (c.order + 1) for c in vertex_cycles(cert.surface) if c.order)
    ok = verify_certificate(cert).ok
    print(f"H({part}): {len(cert.surface.polygons)} polygons, cone angles {angles} (x pi), verified={ok}")
