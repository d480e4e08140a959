from eigendesign.config.parser import load_config, parse_config
from eigendesign.config.presets import FigurePresets
