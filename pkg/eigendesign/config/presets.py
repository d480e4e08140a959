from typing import Dict, List

from eigendesign.exceptions import ConfigError


class FigurePresets:
    """Config overrides reproducing the published figure panels; everything else keeps its default."""

    FIG2A = {"variant": "max_both", "domain": "disk"}
    FIG2B = {"variant": "max_both", "domain": "square", "stepsize": "0.01"}
    FIG3A = {"variant": "max_numerator_only", "domain": "disk"}
    FIG3B = {"variant": "max_numerator_only", "domain": "square"}
    FIG4A = {"variant": "min_denominator_only", "domain": "disk"}
    FIG4B = {"variant": "min_denominator_only", "domain": "square"}
    # panel a is the initial design of this run, panel b its result
    FIG5A = {"variant": "min_denominator_only", "domain": "square", "initial_design": "halfplane"}
    FIG5B = {"variant": "min_denominator_only", "domain": "square", "initial_design": "halfplane"}
    FIG6A = {"variant": "max_denominator_only", "domain": "disk"}
    FIG6B = {"variant": "max_denominator_only", "domain": "square"}

    @classmethod
    def names(cls) -> List[str]:
        return sorted(name.lower() for name in vars(cls) if name.startswith("FIG"))

    @classmethod
    def get(cls, name: str) -> Dict[str, str]:
        preset = getattr(cls, name.upper(), None) if name.lower().startswith("fig") else None
        if preset is None:
            raise ConfigError(f"unknown preset {name!r}, expected one of {', '.join(cls.names())}", line=0)
        return dict(preset)
