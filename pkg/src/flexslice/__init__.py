"""Admission control and embedding of network slices with flexible VNF order."""
from .errors import (
    CapacityError,
    ConfigurationError,
    FlexSliceError,
    ParameterError,
    ParseError,
    SizeError,
    SpecificationError,
)
from .model import (
    VNF,
    AdmissionDecision,
    Embedding,
    PhysicalNetwork,
    ScenarioResult,
    SliceConfiguration,
    SliceRequest,
    apply_embedding,
    objective_value,
    release_embedding,
    validate_embedding,
)
from .configs import enumerate_configs, pin_to_config, virtual_links
from .pathing import shortest_path
from .topology import bundled_graph, dump_graph, gen_fat_tree, load_graph
from .bnb import BnBStar
from .harness import ScenarioSpec, compare_settings, run_scenario

__version__ = "0.1.0"
