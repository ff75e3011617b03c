"""Average bit-error rate <-> ergodic capacity transforms for fading channels.

Binary modulations are described by the pair (a, b) with conditional BER
Q(b, a snr)/2.  The package converts an average-BER function of average SNR
into ergodic capacity and the imaginary part of capacity on the negative SNR
axis back into average BER, with Rayleigh/Nakagami-m closed forms, a
measured-curve pipeline and Monte Carlo estimators for cross-checking.
"""

from __future__ import annotations

__version__ = "0.1.0"

from ._accel import backend_name
from .channels import (
    AwgnChannel,
    ChannelModel,
    NakagamiChannel,
    RayleighChannel,
    avg_ber_closed,
    avg_ber_direct,
    avg_ber_from_outage,
    avg_ber_function,
    avg_certainty_from_outage,
    comp_outage,
    db_to_linear,
    ergodic_capacity,
    im_capacity_function,
    im_capacity_neg,
    parse_channel,
    snr_pdf,
)
from .empirical import BerCurve, ExtrapolationPolicy, empirical_capacity, interpolate, load_curve, save_curve
from .exceptions import (
    BerRangeError,
    ConvergenceError,
    CurveError,
    DomainError,
    InconsistentInputError,
    QuadratureError,
    UnsupportedChannelError,
    UnsupportedModulationError,
)
from .kernels import KernelContext, kernel_Z, kernel_Zhat
from .modulation import (
    CBFSK,
    CBPSK,
    DBPSK,
    NCBFSK,
    BinaryModulation,
    certainty,
    certainty_pdf,
    instantaneous_ber,
    parse_modulation,
)
from .montecarlo import McConfig, McEstimate, estimate_avg_ber, estimate_capacity, estimate_comp_outage, sample_snr
from .transforms import (
    GcqNodes,
    ImCapacity,
    TransformConfig,
    TransformResult,
    ber_to_capacity,
    ber_to_capacity_gcq,
    capacity_to_ber,
    make_gcq_nodes,
)
