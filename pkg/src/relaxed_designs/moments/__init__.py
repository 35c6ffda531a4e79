"""Moment superoperators: gate moments, brickwork block operators, Haar projector."""

from .block import BlockMomentOperator
from .decomposition import moment_decomposition_check
from .gate import GateMoment, gate_moment, relaxed_gate_moment, tensor_power_tt, uniform_moment
from .haar import HaarProjector
from .spectral import SpectralEstimate, spectral_norm_diff

__all__ = [
    "BlockMomentOperator",
    "GateMoment",
    "HaarProjector",
    "SpectralEstimate",
    "gate_moment",
    "moment_decomposition_check",
    "relaxed_gate_moment",
    "spectral_norm_diff",
    "tensor_power_tt",
    "uniform_moment",
]


def block_moment_matvec(op: BlockMomentOperator, v):
    return op.matvec(v)


def haar_moment_matvec(proj: HaarProjector, v):
    return proj.matvec(v)
