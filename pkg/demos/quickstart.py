"""Covers, periods and point counts for the even shift."""

from soficlab.census import census, entropy, is_receptive
from soficlab.corpus import shift
from soficlab.period import period_of
from soficlab.presentation import find_magic_word, fischer_cover

even = shift("even")
F = fischer_cover(even)
print("Fischer cover:", F.n, "states, magic word", "".join(find_magic_word(F)))
print("period:", period_of(even).per)
h = entropy(even)
print(f"entropy in [{float(h.lower):.9f}, {float(h.upper):.9f}]")
print("1^inf receptive:", is_receptive(even, "1")[0], "| 0^inf receptive:", is_receptive(even, "0")[0])

t = census(even, 8)
print(" n   q   s  rec")
for n in range(1, 9):
    print(f"{n:2d} {t.q[n]:3d} {t.s[n]:3d} {t.rec[n]:4d}")
