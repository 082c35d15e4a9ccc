"""Pure-Python BLS12-381 arithmetic.

Fallback used when the compiled ``abesd._native`` extension is missing.
Byte encodings and pairing values are identical to the native backend:
ZCash-style compressed points and a 576-byte big-endian Fp12 encoding in
the ``Fp2[u]/(u^2+1) -> Fp6[v]/(v^3-(u+1)) -> Fp12[w]/(w^2-v)`` tower.

The pairing is the optimal ate pairing raised to the final exponent
``3 * (p^12 - 1) / r``, matching the common arkworks/blst convention.
"""

from __future__ import annotations

P = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB
R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
BLS_X = 0xD201000000010000  # |x|, x itself is negative
_HALF_P = (P - 1) // 2

_G1_X = 0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB
_G1_Y = 0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1
_G2_X = (
    0x024AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8,
    0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E,
)
_G2_Y = (
    0x0CE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801,
    0x0606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE,
)


# --- Fp --------------------------------------------------------------------

def fp_sqrt(a: int) -> int | None:
    s = pow(a, (P + 1) // 4, P)
    return s if s * s % P == a % P else None


# --- Fp2 = Fp[u]/(u^2 + 1), elements are (c0, c1) ---------------------------

F2_ZERO = (0, 0)
F2_ONE = (1, 0)


def f2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def f2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def f2_neg(a):
    return (-a[0] % P, -a[1] % P)


def f2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def f2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, 2 * a0 * a1 % P)


def f2_muls(a, k: int):
    return (a[0] * k % P, a[1] * k % P)


def f2_mul_xi(a):
    # multiply by xi = 1 + u
    return ((a[0] - a[1]) % P, (a[0] + a[1]) % P)


def f2_conj(a):
    return (a[0], -a[1] % P)


def f2_inv(a):
    t = pow(a[0] * a[0] + a[1] * a[1], -1, P)
    return (a[0] * t % P, -a[1] * t % P)


def f2_pow(a, e: int):
    out = F2_ONE
    for bit in bin(e)[2:]:
        out = f2_sqr(out)
        if bit == "1":
            out = f2_mul(out, a)
    return out


def f2_sqrt(a):
    a0, a1 = a
    if a1 == 0:
        s = fp_sqrt(a0)
        if s is not None:
            return (s, 0)
        s = fp_sqrt(-a0 % P)
        return None if s is None else (0, s)
    n = fp_sqrt((a0 * a0 + a1 * a1) % P)
    if n is None:
        return None
    inv2 = (P + 1) // 2
    t = (a0 + n) * inv2 % P
    x0 = fp_sqrt(t)
    if x0 is None:
        x0 = fp_sqrt((a0 - n) * inv2 % P)
        if x0 is None:
            return None
    x1 = a1 * pow(2 * x0, -1, P) % P
    cand = (x0, x1)
    return cand if f2_sqr(cand) == (a0 % P, a1 % P) else None


# --- Fp6 = Fp2[v]/(v^3 - xi) ------------------------------------------------

F6_ZERO = (F2_ZERO, F2_ZERO, F2_ZERO)
F6_ONE = (F2_ONE, F2_ZERO, F2_ZERO)


def f6_add(a, b):
    return (f2_add(a[0], b[0]), f2_add(a[1], b[1]), f2_add(a[2], b[2]))


def f6_sub(a, b):
    return (f2_sub(a[0], b[0]), f2_sub(a[1], b[1]), f2_sub(a[2], b[2]))


def f6_neg(a):
    return (f2_neg(a[0]), f2_neg(a[1]), f2_neg(a[2]))


def f6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    t2 = f2_mul(a2, b2)
    c0 = f2_add(t0, f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)), f2_add(t1, t2))))
    c1 = f2_add(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1)), f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), f2_add(t0, t2)), t1)
    return (c0, c1, c2)


def f6_mul_v(a):
    return (f2_mul_xi(a[2]), a[0], a[1])


def f6_inv(a):
    a0, a1, a2 = a
    t0 = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    t1 = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    t2 = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    d = f2_add(f2_mul(a0, t0), f2_mul_xi(f2_add(f2_mul(a2, t1), f2_mul(a1, t2))))
    di = f2_inv(d)
    return (f2_mul(t0, di), f2_mul(t1, di), f2_mul(t2, di))


# --- Fp12 = Fp6[w]/(w^2 - v) ------------------------------------------------

F12_ONE = (F6_ONE, F6_ZERO)


def f12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = f6_mul(a0, b0)
    t1 = f6_mul(a1, b1)
    c1 = f6_sub(f6_mul(f6_add(a0, a1), f6_add(b0, b1)), f6_add(t0, t1))
    return (f6_add(t0, f6_mul_v(t1)), c1)


def f12_sqr(a):
    a0, a1 = a
    t = f6_mul(a0, a1)
    c0 = f6_sub(f6_mul(f6_add(a0, a1), f6_add(a0, f6_mul_v(a1))), f6_add(t, f6_mul_v(t)))
    return (c0, f6_add(t, t))


def f12_conj(a):
    return (a[0], f6_neg(a[1]))


def f12_inv(a):
    a0, a1 = a
    d = f6_inv(f6_sub(f6_mul(a0, a0), f6_mul_v(f6_mul(a1, a1))))
    return (f6_mul(a0, d), f6_neg(f6_mul(a1, d)))


def f12_pow(a, e: int):
    out = F12_ONE
    for bit in bin(e)[2:]:
        out = f12_sqr(out)
        if bit == "1":
            out = f12_mul(out, a)
    return out


def _frob_consts(power: int):
    xi = (1, 1)
    return [f2_pow(xi, k * (P**power - 1) // 6) for k in range(6)]


_FROB1 = _frob_consts(1)
_FROB2 = _frob_consts(2)


def _to_w(a):
    # coefficients of w^0..w^5
    (c00, c01, c02), (c10, c11, c12) = a
    return [c00, c10, c01, c11, c02, c12]


def _from_w(b):
    return ((b[0], b[2], b[4]), (b[1], b[3], b[5]))


def f12_frob(a, power: int = 1):
    coeffs = _to_w(a)
    if power == 1:
        return _from_w([f2_mul(f2_conj(c), g) for c, g in zip(coeffs, _FROB1)])
    if power == 2:
        return _from_w([f2_mul(c, g) for c, g in zip(coeffs, _FROB2)])
    out = a
    for _ in range(power):
        out = f12_frob(out, 1)
    return out


# --- short Weierstrass curves y^2 = x^3 + b, Jacobian coordinates ------------

class _FieldOps:
    __slots__ = ("zero", "one", "add", "sub", "mul", "sqr", "inv", "neg", "b")

    def __init__(self, zero, one, add, sub, mul, sqr, inv, neg, b):
        self.zero, self.one = zero, one
        self.add, self.sub, self.mul, self.sqr = add, sub, mul, sqr
        self.inv, self.neg, self.b = inv, neg, b


_FP = _FieldOps(
    0, 1,
    lambda a, b: (a + b) % P,
    lambda a, b: (a - b) % P,
    lambda a, b: a * b % P,
    lambda a: a * a % P,
    lambda a: pow(a, -1, P),
    lambda a: -a % P,
    4,
)
_FP2 = _FieldOps(F2_ZERO, F2_ONE, f2_add, f2_sub, f2_mul, f2_sqr, f2_inv, f2_neg, (4, 4))


def _jac_double(F, pt):
    X, Y, Z = pt
    if Z == F.zero:
        return pt
    A = F.sqr(X)
    B = F.sqr(Y)
    C = F.sqr(B)
    D = F.sub(F.sub(F.sqr(F.add(X, B)), A), C)
    D = F.add(D, D)
    E = F.add(F.add(A, A), A)
    Fv = F.sqr(E)
    X3 = F.sub(Fv, F.add(D, D))
    C8 = F.add(C, C)
    C8 = F.add(C8, C8)
    C8 = F.add(C8, C8)
    Y3 = F.sub(F.mul(E, F.sub(D, X3)), C8)
    YZ = F.mul(Y, Z)
    return (X3, Y3, F.add(YZ, YZ))


def _jac_add(F, p1, p2):
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    if Z1 == F.zero:
        return p2
    if Z2 == F.zero:
        return p1
    Z1Z1 = F.sqr(Z1)
    Z2Z2 = F.sqr(Z2)
    U1 = F.mul(X1, Z2Z2)
    U2 = F.mul(X2, Z1Z1)
    S1 = F.mul(F.mul(Y1, Z2), Z2Z2)
    S2 = F.mul(F.mul(Y2, Z1), Z1Z1)
    H = F.sub(U2, U1)
    rr = F.sub(S2, S1)
    if H == F.zero:
        if rr == F.zero:
            return _jac_double(F, p1)
        return (F.one, F.one, F.zero)
    rr = F.add(rr, rr)
    I = F.sqr(F.add(H, H))
    J = F.mul(H, I)
    V = F.mul(U1, I)
    X3 = F.sub(F.sub(F.sqr(rr), J), F.add(V, V))
    S1J = F.mul(S1, J)
    Y3 = F.sub(F.mul(rr, F.sub(V, X3)), F.add(S1J, S1J))
    Z3 = F.mul(F.sub(F.sub(F.sqr(F.add(Z1, Z2)), Z1Z1), Z2Z2), H)
    return (X3, Y3, Z3)


def _jac_neg(F, pt):
    return (pt[0], F.neg(pt[1]), pt[2])


def _jac_mul(F, pt, k: int):
    if k < 0:
        pt = _jac_neg(F, pt)
        k = -k
    if k == 0 or pt[2] == F.zero:
        return (F.one, F.one, F.zero)
    table = [(F.one, F.one, F.zero), pt]
    for _ in range(14):
        table.append(_jac_add(F, table[-1], pt))
    acc = (F.one, F.one, F.zero)
    nibbles = hex(k)[2:]
    for i, ch in enumerate(nibbles):
        if i:
            for _ in range(4):
                acc = _jac_double(F, acc)
        d = int(ch, 16)
        if d:
            acc = _jac_add(F, acc, table[d])
    return acc


def _jac_affine(F, pt):
    X, Y, Z = pt
    if Z == F.zero:
        return None
    zi = F.inv(Z)
    zi2 = F.sqr(zi)
    return (F.mul(X, zi2), F.mul(F.mul(Y, zi2), zi))


def _jac_eq(F, p1, p2):
    inf1 = p1[2] == F.zero
    inf2 = p2[2] == F.zero
    if inf1 or inf2:
        return inf1 and inf2
    Z1Z1 = F.sqr(p1[2])
    Z2Z2 = F.sqr(p2[2])
    if F.mul(p1[0], Z2Z2) != F.mul(p2[0], Z1Z1):
        return False
    return F.mul(F.mul(p1[1], p2[2]), Z2Z2) == F.mul(F.mul(p2[1], p1[2]), Z1Z1)


def _on_curve(F, x, y) -> bool:
    return F.sqr(y) == F.add(F.mul(F.sqr(x), x), F.b)


def _fp_big(y: int) -> bool:
    return y > _HALF_P


def _fp2_big(y) -> bool:
    return _fp_big(y[1]) if y[1] else _fp_big(y[0])


class _Point:
    __slots__ = ("_pt",)
    _F: _FieldOps
    _SIZE: int

    def __init__(self, pt):
        self._pt = pt

    @classmethod
    def identity(cls):
        F = cls._F
        return cls((F.one, F.one, F.zero))

    def is_identity(self) -> bool:
        return self._pt[2] == self._F.zero

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(_jac_add(self._F, self._pt, other._pt))

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(_jac_add(self._F, self._pt, _jac_neg(self._F, other._pt)))

    def __neg__(self):
        return type(self)(_jac_neg(self._F, self._pt))

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return type(self)(_jac_mul(self._F, self._pt, k % R))

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return _jac_eq(self._F, self._pt, other._pt)

    def __hash__(self):
        return hash(self.to_bytes())

    def affine(self):
        return _jac_affine(self._F, self._pt)

    def _in_subgroup(self) -> bool:
        return _jac_mul(self._F, self._pt, R)[2] == self._F.zero

    def _unchecked_mul(self, k: int):
        # no reduction mod r: used for cofactor clearing on points outside G1
        return type(self)(_jac_mul(self._F, self._pt, k))

    @classmethod
    def from_bytes(cls, data: bytes):
        pt = cls._decode(bytes(data))
        if not pt._in_subgroup():
            raise ValueError("point is not in the prime-order subgroup")
        return pt

    @classmethod
    def _from_bytes_unchecked(cls, data: bytes):
        return cls._decode(bytes(data))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_bytes().hex()})"


def _split_flags(data: bytes, size: int):
    if len(data) != size:
        raise ValueError(f"expected {size} bytes, got {len(data)}")
    flags = data[0] >> 5
    compressed, infinity, sign = bool(flags & 4), bool(flags & 2), bool(flags & 1)
    if not compressed:
        raise ValueError("only compressed encodings are supported")
    body = bytes([data[0] & 0x1F]) + data[1:]
    if infinity:
        if sign or any(body):
            raise ValueError("non-canonical encoding of the point at infinity")
        return None, sign
    return body, sign


class G1(_Point):
    __slots__ = ()
    _F = _FP
    _SIZE = 48

    @classmethod
    def generator(cls):
        return cls((_G1_X, _G1_Y, 1))

    def to_bytes(self) -> bytes:
        aff = self.affine()
        if aff is None:
            return b"\xc0" + bytes(47)
        x, y = aff
        out = bytearray(x.to_bytes(48, "big"))
        out[0] |= 0x80 | (0x20 if _fp_big(y) else 0)
        return bytes(out)

    @classmethod
    def _decode(cls, data: bytes):
        body, sign = _split_flags(data, 48)
        if body is None:
            return cls.identity()
        x = int.from_bytes(body, "big")
        if x >= P:
            raise ValueError("coordinate not reduced")
        y = fp_sqrt((x * x * x + 4) % P)
        if y is None:
            raise ValueError("x is not on the curve")
        if _fp_big(y) != sign:
            y = -y % P
        return cls((x, y, 1))


class G2(_Point):
    __slots__ = ()
    _F = _FP2
    _SIZE = 96

    @classmethod
    def generator(cls):
        return cls((_G2_X, _G2_Y, F2_ONE))

    def to_bytes(self) -> bytes:
        aff = self.affine()
        if aff is None:
            return b"\xc0" + bytes(95)
        x, y = aff
        out = bytearray(x[1].to_bytes(48, "big") + x[0].to_bytes(48, "big"))
        out[0] |= 0x80 | (0x20 if _fp2_big(y) else 0)
        return bytes(out)

    @classmethod
    def _decode(cls, data: bytes):
        body, sign = _split_flags(data, 96)
        if body is None:
            return cls.identity()
        x1 = int.from_bytes(body[:48], "big")
        x0 = int.from_bytes(body[48:], "big")
        if x0 >= P or x1 >= P:
            raise ValueError("coordinate not reduced")
        x = (x0, x1)
        y = f2_sqrt(f2_add(f2_mul(f2_sqr(x), x), (4, 4)))
        if y is None:
            raise ValueError("x is not on the curve")
        if _fp2_big(y) != sign:
            y = f2_neg(y)
        return cls((x, y, F2_ONE))


class GT:
    """Element of the order-r subgroup of Fp12*, written multiplicatively."""

    __slots__ = ("_v",)

    def __init__(self, v):
        self._v = v

    @classmethod
    def identity(cls):
        return cls(F12_ONE)

    def is_identity(self) -> bool:
        return self._v == F12_ONE

    def __mul__(self, other):
        if not isinstance(other, GT):
            return NotImplemented
        return GT(f12_mul(self._v, other._v))

    def __truediv__(self, other):
        if not isinstance(other, GT):
            return NotImplemented
        return GT(f12_mul(self._v, f12_conj(other._v)))

    def inverse(self):
        # unitary elements: inverse is conjugation
        return GT(f12_conj(self._v))

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return GT(f12_pow(self._v, k % R))

    def __eq__(self, other):
        if not isinstance(other, GT):
            return NotImplemented
        return self._v == other._v

    def __hash__(self):
        return hash(self._v)

    def to_bytes(self) -> bytes:
        (a, b, c), (d, e, f) = self._v
        return b"".join(x.to_bytes(48, "big") for pair in (a, b, c, d, e, f) for x in pair)

    @classmethod
    def from_bytes(cls, data: bytes):
        data = bytes(data)
        if len(data) != 576:
            raise ValueError(f"expected 576 bytes, got {len(data)}")
        xs = [int.from_bytes(data[i:i + 48], "big") for i in range(0, 576, 48)]
        if any(x >= P for x in xs):
            raise ValueError("coordinate not reduced")
        fp2 = [(xs[i], xs[i + 1]) for i in range(0, 12, 2)]
        v = ((fp2[0], fp2[1], fp2[2]), (fp2[3], fp2[4], fp2[5]))
        if v == (F6_ZERO, F6_ZERO) or f12_pow(v, R) != F12_ONE:
            raise ValueError("element is not in the target group")
        return cls(v)

    def __repr__(self):
        return f"GT({self.to_bytes()[:16].hex()}...)"


# --- pairing ----------------------------------------------------------------

_X_BITS = bin(BLS_X)[3:]


def _line(lam, xt, yt, xp, yp):
    # line through T with slope lam, evaluated at P, scaled by w^3
    c00 = f2_sub(f2_mul(lam, xt), yt)
    c01 = f2_neg(f2_muls(lam, xp))
    return ((c00, c01, F2_ZERO), (F2_ZERO, (yp, 0), F2_ZERO))


def _mul_by_line(f, line):
    # f * (l00 + l01 v + l11 v w)
    (a0, a1) = f
    (l00, l01, _), (_, l11, _) = line
    # a0 * (l00 + l01 v)
    b0, b1, b2 = a0
    t0 = (
        f2_add(f2_mul(b0, l00), f2_mul_xi(f2_mul(b2, l01))),
        f2_add(f2_mul(b1, l00), f2_mul(b0, l01)),
        f2_add(f2_mul(b2, l00), f2_mul(b1, l01)),
    )
    # a1 * (l11 v)
    c0, c1, c2 = a1
    t1 = (f2_mul_xi(f2_mul(c2, l11)), f2_mul(c0, l11), f2_mul(c1, l11))
    # (a0 + a1)(l00 + (l01 + l11) v) - t0 - t1
    s0, s1, s2 = f6_add(a0, a1)
    m = f2_add(l01, l11)
    t2 = (
        f2_add(f2_mul(s0, l00), f2_mul_xi(f2_mul(s2, m))),
        f2_add(f2_mul(s1, l00), f2_mul(s0, m)),
        f2_add(f2_mul(s2, l00), f2_mul(s1, m)),
    )
    return (f6_add(t0, f6_mul_v(t1)), f6_sub(t2, f6_add(t0, t1)))


def miller_loop(pairs):
    """Product of Miller loops f_{|x|,Q}(P), conjugated for negative x."""
    work = []
    for p1, q2 in pairs:
        a = p1.affine()
        b = q2.affine()
        if a is None or b is None:
            continue
        work.append([a[0], a[1], b[0], b[1], b[0], b[1]])
    f = F12_ONE
    if not work:
        return f
    three = (3, 0)
    for bit in _X_BITS:
        f = f12_sqr(f)
        for st in work:
            xp, yp, xq, yq, xt, yt = st
            lam = f2_mul(f2_mul(three, f2_sqr(xt)), f2_inv(f2_add(yt, yt)))
            f = _mul_by_line(f, _line(lam, xt, yt, xp, yp))
            x3 = f2_sub(f2_sqr(lam), f2_add(xt, xt))
            yt = f2_sub(f2_mul(lam, f2_sub(xt, x3)), yt)
            xt = x3
            if bit == "1":
                lam = f2_mul(f2_sub(yq, yt), f2_inv(f2_sub(xq, xt)))
                f = _mul_by_line(f, _line(lam, xt, yt, xp, yp))
                x3 = f2_sub(f2_sub(f2_sqr(lam), xt), xq)
                yt = f2_sub(f2_mul(lam, f2_sub(xt, x3)), yt)
                xt = x3
            st[4], st[5] = xt, yt
    return f12_conj(f)


def _exp_by_x(f):
    # f^x for x = -|x|, valid in the cyclotomic subgroup
    return f12_conj(f12_pow(f, BLS_X))


def final_exponentiation(f):
    """f^(3 (p^12 - 1) / r)."""
    f = f12_mul(f12_conj(f), f12_inv(f))
    f = f12_mul(f12_frob(f, 2), f)
    # 3 (p^4 - p^2 + 1) / r = (x - 1)^2 (x + p) (x^2 + p^2 - 1) + 3
    t = f12_mul(_exp_by_x(f), f12_conj(f))
    a = f12_mul(_exp_by_x(t), f12_conj(t))
    b = f12_mul(_exp_by_x(a), f12_frob(a, 1))
    c = f12_mul(f12_mul(_exp_by_x(_exp_by_x(b)), f12_frob(b, 2)), f12_conj(b))
    return f12_mul(c, f12_mul(f12_sqr(f), f))


def pairing(p1: G1, q2: G2) -> GT:
    return GT(final_exponentiation(miller_loop([(p1, q2)])))


def multi_pairing(pairs) -> GT:
    return GT(final_exponentiation(miller_loop(list(pairs))))
