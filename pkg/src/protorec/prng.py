"""SplitMix64 generator used for every shuffle in the package.

A fixed, fully specified generator keeps trial splits identical across
platforms and Python versions (``random.Random`` makes no such promise for
``shuffle``).
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:

    def __init__(self, seed=0):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n):
        """Integer in [0, n). Plain modulo; the bias is below 2**-50 for n < 2**14."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def random(self):
        """Float in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items):
        """In-place Fisher-Yates, walking from the end."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


def shuffled(items, seed):
    return SplitMix64(seed).shuffle(list(items))
