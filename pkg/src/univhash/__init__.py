"""Universal source and channel codes from random linear hash ensembles over GF(q)."""
from .coders import (ChannelCode, SourceCode, channel_decode, channel_encode,
                     source_decode, source_encode, syndrome_channel_decode,
                     syndrome_channel_encode)
from .ensembles import (AllLinearSpec, SparseEnsembleSpec, combine_alpha_beta,
                        estimate_alpha_beta, kappa)
from .estimators import SyndromeChannelCoder, UniversalChannelCoder, UniversalSourceCoder
from .exponents import exponent_channel, exponent_source
from .gfq import FieldMatrix
from .types import ConditionalDistribution, Distribution, TypeHistogram

__version__ = "0.1.0"
