"""Robust LTL strategy synthesis for MDPs with set-valued transitions."""
from .automata import Dra, Ldba, accepts_lasso, fixture_dra, fixture_ldba, load_automaton, parse_hoa
from .hexworld import HexConfig, HexLayout, default_layout, generate_hexworld
from .model import MdpstModel, ModelError, SetOutcome, load_model, validate_model
from .montecarlo import SimConfig, simulate
from .product import ProductMdpst, build_product, build_product_dra, load_product
from .synthesis import MdpstStrategy, solve
from .winning_region import compute_winning_region, winning_region_rabin

__version__ = "0.1.0"

__all__ = [
    "Dra", "Ldba", "accepts_lasso", "fixture_dra", "fixture_ldba", "load_automaton", "parse_hoa",
    "HexConfig", "HexLayout", "default_layout", "generate_hexworld",
    "MdpstModel", "ModelError", "SetOutcome", "load_model", "validate_model",
    "SimConfig", "simulate",
    "ProductMdpst", "build_product", "build_product_dra", "load_product",
    "MdpstStrategy", "solve",
    "compute_winning_region", "winning_region_rabin",
]
