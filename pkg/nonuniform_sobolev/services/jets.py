"""
Усеченные ряды Тейлора (jets) для производных радиальных профилей.

Jet хранит коэффициенты c_0..c_M разложения g(ρ0 + ε) = Σ c_m ε^m
поэлементно для массива точек ρ0; g^{(m)}(ρ0) = m!·c_m.
"""
from __future__ import annotations

import math
from typing import Union

import numpy as np

Scalar = Union[int, float]


class Jet:
    """Jet порядка M над массивом точек; coeffs имеет форму (M+1, *shape)"""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: np.ndarray):
        self.coeffs = coeffs

    @classmethod
    def variable(cls, point: np.ndarray, order: int) -> "Jet":
        """Независимая переменная: ρ0 + ε"""
        point = np.asarray(point, dtype=float)
        coeffs = np.zeros((order + 1,) + point.shape)
        coeffs[0] = point
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def _lift(self, other: Union["Jet", Scalar]) -> "Jet":
        if isinstance(other, Jet):
            return other
        coeffs = np.zeros_like(self.coeffs)
        coeffs[0] = other
        return Jet(coeffs)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * other)
        a, b = self.coeffs, other.coeffs
        out = np.zeros_like(a)
        for k in range(a.shape[0]):
            for i in range(k + 1):
                out[k] += a[i] * b[k - i]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / other)
        a, b = self.coeffs, other.coeffs
        q = np.zeros_like(a)
        for k in range(a.shape[0]):
            acc = a[k].copy()
            for i in range(1, k + 1):
                acc -= b[i] * q[k - i]
            q[k] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def exp(self) -> "Jet":
        a = self.coeffs
        e = np.zeros_like(a)
        e[0] = np.exp(a[0])
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for i in range(1, k + 1):
                acc += i * a[i] * e[k - i]
            e[k] = acc / k
        return Jet(e)

    def log(self) -> "Jet":
        a = self.coeffs
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for i in range(1, k):
                acc += i * out[i] * a[k - i]
            out[k] = (a[k] - acc / k) / a[0]
        return Jet(out)

    def __pow__(self, exponent: Scalar) -> "Jet":
        if float(exponent).is_integer() and exponent >= 0:
            # целая степень корректна и при ρ0 = 0
            result = self._lift(1.0)
            for _ in range(int(exponent)):
                result = result * self
            return result
        a = self.coeffs
        p = np.zeros_like(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            p[0] = np.power(a[0], exponent)
            for k in range(1, a.shape[0]):
                acc = np.zeros_like(a[0])
                for i in range(1, k + 1):
                    acc += ((exponent + 1) * i - k) * a[i] * p[k - i]
                p[k] = acc / (k * a[0])
        return Jet(p)

    def derivatives(self) -> np.ndarray:
        """Массив g^{(m)}(ρ0), m = 0..M"""
        factorials = np.array([math.factorial(m) for m in range(self.order + 1)], dtype=float)
        return self.coeffs * factorials.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
