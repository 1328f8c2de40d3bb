from pathlib import Path
from typing import List, Optional, Union

from vexleb.core.errors import DomainError, UsageError
from vexleb.schemas.grid import ExponentField, Grid, Grid1D, Grid2D, GridFunction, Rectangle
from vexleb.services.conditions import ConditionService
from vexleb.services.dyadic import DyadicService
from vexleb.services.experiments import ExperimentService
from vexleb.services.families import RectFamily
from vexleb.services.norms import NormService
from vexleb.services.operators import OperatorService
from vexleb.utils.gridio import read_grid_function

FAMILY_NAMES = ("all", "dyadic", "capped")


def get_norm_service(args) -> NormService:
    return NormService(tol=getattr(args, "tol", None))


def get_operator_service(args) -> OperatorService:
    return OperatorService(get_norm_service(args))


def get_condition_service(args) -> ConditionService:
    norms = get_norm_service(args)
    return ConditionService(norms, OperatorService(norms))


def get_experiment_service(args) -> ExperimentService:
    norms = get_norm_service(args)
    operators = OperatorService(norms)
    return ExperimentService(norms, operators, ConditionService(norms, operators), threads=getattr(args, "threads", None))


def get_dyadic_service(args) -> DyadicService:
    return DyadicService(threads=getattr(args, "threads", None))


def parse_floats(text: str, what: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers, got '{text}'")


def is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def load_function(path: Optional[str], what: str, required: bool = True) -> Optional[GridFunction]:
    if path is None:
        if required:
            raise UsageError(f"--{what} is required")
        return None
    data = read_grid_function(path)
    if isinstance(data, ExponentField):
        return data.base
    return data


def load_exponent(value: Optional[str], what: str, kind: str = "exponent",
                  required: bool = True) -> Union[float, ExponentField, None]:
    """A number, or a grid-function file read as an exponent (or order) field."""
    if value is None:
        if required:
            raise UsageError(f"--{what} is required")
        return None
    if is_number(value):
        return float(value)
    if not Path(value).is_file():
        raise UsageError(f"--{what} is neither a number nor an existing file: {value}")
    data = read_grid_function(value)
    if isinstance(data, ExponentField):
        if data.kind != kind:
            raise UsageError(f"--{what} file has kind '{data.kind}', expected '{kind}'")
        return data
    return ExponentField.of(data, kind=kind)


def require_scalar(value: Union[float, ExponentField], what: str) -> float:
    if isinstance(value, ExponentField):
        if not value.is_constant:
            raise UsageError(f"--{what} must be constant for this operation")
        return value.pminus
    return float(value)


def parse_grid(text: Optional[str]) -> Optional[Grid]:
    """'lo,hi,n' for 1-D or 'lo,hi,n,lo,hi,n' for 2-D."""
    if text is None:
        return None
    parts = parse_floats(text, "--grid")
    if len(parts) == 3:
        return Grid1D(lo=parts[0], hi=parts[1], n=int(parts[2]))
    if len(parts) == 6:
        return Grid2D(x=Grid1D(lo=parts[0], hi=parts[1], n=int(parts[2])),
                      y=Grid1D(lo=parts[3], hi=parts[4], n=int(parts[5])))
    raise UsageError("--grid takes lo,hi,n or lo,hi,n,lo,hi,n")


def parse_box(text: Optional[str]) -> Optional[Rectangle]:
    """'x0,x1' or 'x0,x1,y0,y1'."""
    if text is None:
        return None
    parts = parse_floats(text, "--box")
    if len(parts) == 2:
        return Rectangle.interval(*parts)
    if len(parts) == 4:
        return Rectangle(x0=parts[0], x1=parts[1], y0=parts[2], y1=parts[3])
    raise UsageError("--box takes x0,x1 or x0,x1,y0,y1")


def build_family(name: Optional[str], k: Optional[int] = None, base: Optional[Rectangle] = None) -> RectFamily:
    name = name or "all"
    if name == "all":
        return RectFamily.all_aligned(base)
    if name == "dyadic":
        return RectFamily.dyadic(base=base)
    if name == "capped":
        if k is None:
            raise UsageError("--family capped needs --k")
        family = RectFamily.size_capped(k)
        return family.with_base(base) if base else family
    raise UsageError(f"Unknown family '{name}'; valid names: {', '.join(FAMILY_NAMES)}")


def axis_weight(path: Optional[str], axis: Grid1D, what: str) -> GridFunction:
    """A 1-D weight file on `axis`, or the unit weight when omitted."""
    if path is None:
        return GridFunction.constant(axis, 1.0)
    w = load_function(path, what)
    if w.grid != axis:
        raise DomainError(f"--{what} does not live on the matching axis")
    return w
