from .config import SystemConfig, default_config, parse_config, serialize_config, load_config
from .geometry import Geometry, Substreams, place_users, substreams, uniform_disk
from .units import db_to_linear, linear_to_db, dbm_to_watts, watts_to_dbm, dbw_to_watts, watts_to_dbw

__all__ = [
    'SystemConfig', 'default_config', 'parse_config', 'serialize_config', 'load_config',
    'Geometry', 'Substreams', 'place_users', 'substreams', 'uniform_disk',
    'db_to_linear', 'linear_to_db', 'dbm_to_watts', 'watts_to_dbm', 'dbw_to_watts', 'watts_to_dbw',
]
