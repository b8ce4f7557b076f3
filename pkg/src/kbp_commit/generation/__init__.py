# generate() lives in kbp_commit.generation.generator, which depends on kbp_commit.logic;
# only the data model is re-exported here so the checker can import it.
from kbp_commit.generation.config import Config, Policy, load_config, save_config
from kbp_commit.generation.system import (
    InterpretedSystem,
    ObservationHistory,
    Point,
    Run,
    observation_history,
    prefix_system,
)

__all__ = [
    "Config",
    "InterpretedSystem",
    "ObservationHistory",
    "Point",
    "Policy",
    "Run",
    "load_config",
    "observation_history",
    "prefix_system",
    "save_config",
]
