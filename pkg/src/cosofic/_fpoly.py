"""Dense polynomials over Z/p, coefficients stored low-to-high.

The zero polynomial is the empty tuple; every other value has a nonzero top
coefficient.  Only what the Laurent ideals need lives here.
"""


def trim(coeffs, p):
    c = [x % p for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def add(a, b, p):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def sub(a, b, p):
    return add(a, [-x for x in b], p)


def mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out, p)


def divmod_(a, b, p):
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        f = a[k + len(b) - 1] * inv % p
        if f:
            q[k] = f
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - f * y) % p
    return trim(q, p), trim(a, p)


def mod(a, b, p):
    return divmod_(a, b, p)[1]


def monic(a, p):
    if not a:
        return ()
    inv = pow(a[-1], p - 2, p)
    return trim([x * inv for x in a], p)


def gcd(a, b, p):
    a, b = trim(a, p), trim(b, p)
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def lcm(a, b, p):
    if not a or not b:
        return ()
    return monic(divmod_(mul(a, b, p), gcd(a, b, p), p)[0], p)


def t_power_minus_one(n, p):
    """``t^n - 1`` for n >= 1."""
    return trim([-1] + [0] * (n - 1) + [1], p)


def strip_t(a):
    """Split off the largest power of t: returns (v, a / t^v)."""
    v = 0
    while v < len(a) and a[v] == 0:
        v += 1
    return v, tuple(a[v:])


def inverse_of_t(g, p):
    """``t^{-1}`` modulo g (requires g(0) != 0)."""
    if not g or g[0] % p == 0:
        raise ValueError("t is not invertible modulo this polynomial")
    if len(g) == 1:
        return ()
    # t * h = 1 mod g with h = -(g - g0)/(t g0)
    inv0 = pow(g[0], p - 2, p)
    return trim([-x * inv0 for x in g[1:]], p)


def laurent_residue(terms, g, p):
    """Reduce ``sum c t^e`` (terms: dict e -> c) modulo g, g(0) != 0."""
    if not terms:
        return ()
    lo = min(terms)
    poly = [0] * (max(terms) - lo + 1)
    for e, c in terms.items():
        poly[e - lo] = c
    r = mod(trim(poly, p), g, p)
    if lo >= 0:
        return mod(mul(r, mod((0,) * lo + (1,), g, p), p), g, p) if lo else r
    tinv = inverse_of_t(g, p)
    factor = (1,)
    base, e = tinv, -lo
    while e:
        if e & 1:
            factor = mod(mul(factor, base, p), g, p)
        base = mod(mul(base, base, p), g, p)
        e >>= 1
    return mod(mul(r, factor, p), g, p)
