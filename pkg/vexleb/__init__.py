# Variable-exponent Lebesgue space toolkit: norms, operators, weight conditions and experiments
__version__ = "1.0.0"
