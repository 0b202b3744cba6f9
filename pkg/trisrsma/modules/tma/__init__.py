from .config import TmaParams, ControlTiming
from .codec import encode, decode, precode_frame, dump_frame_csv, wrap_phase

__all__ = ['TmaParams', 'ControlTiming', 'encode', 'decode', 'precode_frame', 'dump_frame_csv', 'wrap_phase']
