"""Unbounded non-negative words and the bit-pattern builders shared by the
host simulator and the emitted MRAM code.

Words are plain Python ints; the functions here only enforce non-negativity
and build structured masks.
"""

Word = int


def bitlen(w: Word) -> int:
    """Binary digits of ``w``, with ``bitlen(0) == 1``."""
    if w < 0:
        raise ValueError(f"words are non-negative, got {w}")
    return w.bit_length() or 1


def doubling_steps(count: int):
    """Yield the doubling schedule used by :func:`replicate`.

    Walks the bits of ``count`` from the most significant one down. Each item
    is ``(k, add_one)``: double the current ``k``-copy run, then append one
    more copy if ``add_one``. The emitter walks the same schedule so host and
    MRAM builds stay instruction-for-instruction comparable.
    """
    k = 1
    for bit in bin(count)[3:]:
        yield k, bit == "1"
        k = 2 * k + (bit == "1")


def replicate(pattern: Word, width: int, count: int) -> Word:
    """Return ``sum(pattern << (i * width) for i in range(count))``.

    Built with ``rep(2k) = rep(k) * (1 + 2**(k*width))`` so only O(log count)
    multiplies and adds are needed.
    """
    if width < 0 or count < 0:
        raise ValueError("width and count must be non-negative")
    if pattern < 0 or pattern >> width:
        raise ValueError(f"pattern {pattern} does not fit in {width} bits")
    if count == 0:
        return 0
    r = pattern
    for k, add_one in doubling_steps(count):
        r *= 1 + (1 << (k * width))
        if add_one:
            r = (r << width) + pattern
    return r


def ones(length: int) -> Word:
    """``length`` consecutive one bits, via :func:`replicate`."""
    return replicate(1, 1, length)


def blockmask(base: int, length: int) -> Word:
    """Ones exactly at bit positions ``base .. base+length-1``."""
    if base < 0 or length < 0:
        raise ValueError("base and length must be non-negative")
    return ((1 << length) - 1) << base


def digitmask(g: int, p: int, a: int, D: int) -> Word:
    """Ones at every index ``i < g**D`` whose base-``g`` digit ``p`` is ``a``."""
    if g < 2 or not 0 <= a < g or not 0 <= p < D:
        raise ValueError(f"bad digitmask arguments g={g} p={p} a={a} D={D}")
    run = g**p
    return replicate(blockmask(a * run, run), run * g, g ** (D - p - 1))


def popcount(w: Word) -> int:
    return w.bit_count()


def bits(w: Word):
    """Indices of the set bits of ``w``, ascending."""
    while w:
        low = w & -w
        i = low.bit_length() - 1
        yield i
        w ^= low
