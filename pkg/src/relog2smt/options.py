"""The three translation axes and the named combination presets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

SORT_MODES = ("typed", "untyped")
REL_MODES = ("predicates", "functions")
SCOPE_MODES = ("unscoped", "expand", "solver_fmf")

_SCOPE_ALIASES = {"fmf": "solver_fmf", "fortress": "expand"}


@dataclass(frozen=True, order=True)
class Options:
    sort_mode: str = "typed"
    rel_mode: str = "predicates"
    scope_mode: str = "unscoped"

    def __post_init__(self):
        if self.sort_mode not in SORT_MODES:
            raise ValueError(f"sort mode must be one of {SORT_MODES}, got {self.sort_mode!r}")
        if self.rel_mode not in REL_MODES:
            raise ValueError(f"relation mode must be one of {REL_MODES}, got {self.rel_mode!r}")
        scope = _SCOPE_ALIASES.get(self.scope_mode, self.scope_mode)
        if scope not in SCOPE_MODES:
            raise ValueError(f"scope mode must be one of {SCOPE_MODES}, got {self.scope_mode!r}")
        object.__setattr__(self, "scope_mode", scope)

    @property
    def typed(self) -> bool:
        return self.sort_mode == "typed"

    @property
    def functions(self) -> bool:
        return self.rel_mode == "functions"

    @property
    def scoped(self) -> bool:
        return self.scope_mode != "unscoped"

    @property
    def label(self) -> str:
        return f"{self.sort_mode}/{self.rel_mode}/{self.scope_mode}"

    @classmethod
    def parse(cls, label: str) -> Options:
        parts = label.strip().split("/")
        if len(parts) != 3:
            raise ValueError(f"combination must look like typed/predicates/unscoped, got {label!r}")
        return cls(*parts)


ALL_COMBOS = tuple(Options(s, r, c) for s, r, c in
                   itertools.product(SORT_MODES, REL_MODES, SCOPE_MODES))

# Check-marked cells of the option table: everything else was rejected for
# poor performance.
INTERESTING = (
    Options("typed", "functions", "expand"),
    Options("typed", "predicates", "unscoped"),
    Options("untyped", "predicates", "unscoped"),
    Options("untyped", "predicates", "solver_fmf"),
)

SCOPED_COMBOS = tuple(o for o in ALL_COMBOS if o.scoped)


def select_combos(spec: str) -> tuple[Options, ...]:
    """``all``, ``interesting``, ``scoped`` or a comma list of labels."""
    if spec == "all":
        return ALL_COMBOS
    if spec == "interesting":
        return INTERESTING
    if spec == "scoped":
        return SCOPED_COMBOS
    return tuple(Options.parse(x) for x in spec.split(",") if x.strip())
