from .absm import absm, feasibility_check, refine_upper_bound, required_links
from .refine import refine

__all__ = ["absm", "feasibility_check", "refine", "refine_upper_bound", "required_links"]
