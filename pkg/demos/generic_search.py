"""Genus 3 with non-discrete image: the heuristic search and its honest failure mode.

Success yields a certificate; running out of steps yields HeuristicExhausted,
which never claims the character is unrealizable.
"""
from flatperiods import HeuristicExhausted, Partition, PeriodVector, realize, verify_certificate
from flatperiods.builder import diagram_svg
from flatperiods.field import I, sqrt

chi = PeriodVector.of(10, I * 10, 1, I, 1 + sqrt(2), I)
for part in (Partition.of(4), Partition.of(1, 3), Partition.of(1, 1, 1, 1)):
    res = realize(chi, part, max_steps=100, seed=0)
    if isinstance(res, HeuristicExhausted):
        print(f"H({part}): search exhausted")
        continue
    print(f"H({part}): verified={verify_certificate(res).ok}, {len(res.diagram.slits)} slits")

res = realize(PeriodVector.of(1, I, 1, I, 1 + sqrt(2), I), Partition.of(4), max_steps=0)
print("with no search budget:", res)

cert = realize(chi, Partition.of(1, 3))
with open("generic_h13.svg", "w") as fh:
    fh.write(diagram_svg(cert.diagram))
print("slit diagram written to generic_h13.svg")
