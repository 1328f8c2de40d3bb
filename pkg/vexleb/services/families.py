import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from vexleb.core.errors import DomainError, IncompatibleFamilyError, ParameterError
from vexleb.schemas.grid import Grid1D, Grid2D, Rectangle

# (first cell, one past last cell, interval length)
Interval = Tuple[int, int, float]

_POW2_EPS = 1e-9


def _log2_exact(value: float, what: str) -> int:
    s = math.log2(value)
    if abs(s - round(s)) > _POW2_EPS:
        raise IncompatibleFamilyError(f"{what} = {value} is not a power of 2")
    return int(round(s))


class RectFamily(BaseModel):
    """
    Rectangles over which maximal operators take suprema.

    all      every grid-aligned interval product
    dyadic   products of dyadic intervals [m 2^s, (m+1) 2^s)
    shifted  dyadic intervals translated by (t, tau), snapped to the grid
    capped   grid-aligned products with both sides at most 2^k

    Dyadic intervals are clipped to the grid but keep their full length.
    """

    model_config = ConfigDict(frozen=True)

    mode: Literal['all', 'dyadic', 'shifted', 'capped'] = 'all'
    k: Optional[int] = None
    shift: Tuple[float, float] = (0.0, 0.0)
    max_length: Optional[float] = None
    base: Optional[Rectangle] = None

    @classmethod
    def all_aligned(cls, base: Optional[Rectangle] = None) -> "RectFamily":
        return cls(mode='all', base=base)

    @classmethod
    def dyadic(cls, max_length: Optional[float] = None, base: Optional[Rectangle] = None) -> "RectFamily":
        return cls(mode='dyadic', max_length=max_length, base=base)

    @classmethod
    def shifted(cls, t: float, tau: float, max_length: Optional[float] = None) -> "RectFamily":
        return cls(mode='shifted', shift=(t, tau), max_length=max_length)

    @classmethod
    def size_capped(cls, k: int) -> "RectFamily":
        return cls(mode='capped', k=k)

    def with_base(self, base: Rectangle) -> "RectFamily":
        return self.model_copy(update={'base': base})

    def intervals(self, axis: Grid1D, which: int = 0) -> List[Interval]:
        """Admissible intervals along one axis (which = 0 for x, 1 for y)."""
        if self.mode in ('all', 'capped'):
            out = self._aligned(axis)
        else:
            out = self._lattice(axis, self.shift[which] if self.mode == 'shifted' else 0.0)
        if self.base is not None:
            a, b = (self.base.x0, self.base.x1) if which == 0 else (self.base.y0, self.base.y1)
            lo, hi = axis.cell_range(max(a, axis.lo), min(b, axis.hi))
            out = [iv for iv in out if iv[0] >= lo and iv[1] <= hi]
        return out

    def rectangles(self, grid: Grid2D) -> Tuple[List[Interval], List[Interval]]:
        if not isinstance(grid, Grid2D):
            raise DomainError("Rectangle families need a 2-D grid")
        return self.intervals(grid.x, 0), self.intervals(grid.y, 1)

    def _aligned(self, axis: Grid1D) -> List[Interval]:
        cap = math.inf
        if self.mode == 'capped':
            if self.k is None:
                raise ParameterError("Size-capped family needs k")
            cap = 2.0 ** self.k * (1 + _POW2_EPS)
        out = []
        for i0 in range(axis.n):
            for i1 in range(i0 + 1, axis.n + 1):
                length = (i1 - i0) * axis.h
                if length > cap:
                    break
                out.append((i0, i1, length))
        return out

    def _lattice(self, axis: Grid1D, t: float) -> List[Interval]:
        h = axis.h
        s_min = _log2_exact(h, "Cell width")
        if abs(axis.lo / h - round(axis.lo / h)) > _POW2_EPS:
            raise IncompatibleFamilyError(f"Grid origin {axis.lo} is not on the dyadic lattice of width {h}")
        if self.max_length is not None:
            s_max = _log2_exact(self.max_length, "Largest dyadic length")
        else:
            s_max = int(math.ceil(math.log2(axis.length) - _POW2_EPS))
        s_max = max(s_max, s_min)
        shift = round(t / h)
        origin = round(axis.lo / h)

        out = []
        for s in range(s_min, s_max + 1):
            cells = 2 ** (s - s_min)
            length = 2.0 ** s
            # lattice in cell units: [m * cells - shift, (m + 1) * cells - shift)
            m_lo = math.floor((origin + shift) / cells)
            m_hi = math.ceil((origin + axis.n + shift) / cells)
            for m in range(m_lo, m_hi):
                i0 = m * cells - shift - origin
                i1 = i0 + cells
                i0, i1 = max(i0, 0), min(i1, axis.n)
                if i0 < i1:
                    out.append((i0, i1, length))
        return out
