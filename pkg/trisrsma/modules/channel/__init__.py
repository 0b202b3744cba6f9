from .models import (
    NearFieldChannel,
    UserChannel,
    EffectiveChannel,
    ChannelSet,
    feed_to_ris,
    ris_to_receiver,
    path_loss,
    path_gain,
    steering_vector,
    effective,
    assemble,
    generate_channels,
    single_element_equivalent,
)
from .io import export_channels, import_channels, channels_to_bytes, channels_from_bytes

__all__ = [
    'NearFieldChannel', 'UserChannel', 'EffectiveChannel', 'ChannelSet',
    'feed_to_ris', 'ris_to_receiver', 'path_loss', 'path_gain', 'steering_vector', 'effective',
    'assemble', 'generate_channels', 'single_element_equivalent',
    'export_channels', 'import_channels', 'channels_to_bytes', 'channels_from_bytes',
]
