"""Declarative model configuration compiled into gate lists.

Two architectures over the same trainable-block family:

* parallel: one qubit per (feature, prefactor) pair; a single encoding layer
  sits between 2 ansatz layers.
* serial: one qubit per feature carrying all of that feature's encodings;
  r encoding layers interleave with r+1 ansatz layers.

An ansatz layer applies, per mixed-frequency group, B training blocks. One
block on group qubits q_0 < q_1 < ... < q_{k-1} is: ROT on q_{k-1}, then for
j = k-1..1 a CNOT(control=q_j, target=q_{j-1}) followed by ROT on q_{j-1}.
CNOTs never cross group boundaries, which is what confines mixed frequencies
to groups. Measurement is <Z> on the top (lowest-index) qubit of each group,
combined by sum (or mean) into the scalar model output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigurationError
from .simulator import Gate
from .spectrum import MixedSpectrum, mixed_cardinality, spectrum_from_prefactors

_ARCHITECTURES = ("serial", "parallel")
_AXES = ("rx", "ry", "rz")
_COMBINE = ("sum", "mean")


@dataclass(frozen=True)
class ModelConfig:
    """Architecture declaration: prefactors per feature, groups, block depth."""

    architecture: str
    prefactors: tuple
    groups: tuple
    blocks_per_layer: int
    encoding_axis: str = "rx"
    combine: str = "sum"

    def __post_init__(self):
        arch = str(self.architecture).lower()
        axis = str(self.encoding_axis).lower()
        combine = str(self.combine).lower()
        prefactors = tuple(tuple(float(p) for p in pf) for pf in self.prefactors)
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        object.__setattr__(self, "architecture", arch)
        object.__setattr__(self, "encoding_axis", axis)
        object.__setattr__(self, "combine", combine)
        object.__setattr__(self, "prefactors", prefactors)
        object.__setattr__(self, "groups", groups)

        if arch not in _ARCHITECTURES:
            raise ConfigurationError(f"architecture must be one of {_ARCHITECTURES}, got {arch!r}")
        if axis not in _AXES:
            raise ConfigurationError(f"encoding_axis must be one of {_AXES}, got {axis!r}")
        if combine not in _COMBINE:
            raise ConfigurationError(f"combine must be one of {_COMBINE}, got {combine!r}")
        if len(prefactors) == 0:
            raise ConfigurationError("need at least one feature")
        for f, pf in enumerate(prefactors):
            if len(pf) == 0:
                raise ConfigurationError(f"feature {f} has an empty prefactor list")
            if any(p <= 0 for p in pf):
                raise ConfigurationError(f"feature {f} has non-positive prefactors {pf}")
        d = len(prefactors)
        flat = sorted(i for g in groups for i in g)
        if flat != list(range(d)):
            raise ConfigurationError(f"groups {groups} are not a partition of the {d} features")
        if self.blocks_per_layer < 1:
            raise ConfigurationError(f"blocks_per_layer must be >= 1, got {self.blocks_per_layer}")
        if arch == "serial":
            lengths = {len(pf) for pf in prefactors}
            if len(lengths) > 1:
                raise ConfigurationError(
                    "serial architecture needs the same number of encodings per feature; "
                    f"got lengths {sorted(len(pf) for pf in prefactors)}"
                )

    @property
    def n_features(self) -> int:
        return len(self.prefactors)

    def to_dict(self) -> dict:
        return {
            "architecture": self.architecture,
            "prefactors": [list(pf) for pf in self.prefactors],
            "groups": [list(g) for g in self.groups],
            "blocks_per_layer": self.blocks_per_layer,
            "encoding_axis": self.encoding_axis,
            "combine": self.combine,
        }

    @staticmethod
    def from_dict(data: dict) -> "ModelConfig":
        known = {"architecture", "prefactors", "groups", "blocks_per_layer", "encoding_axis", "combine"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown model config keys: {sorted(unknown)}")
        missing = {"architecture", "prefactors", "blocks_per_layer"} - set(data)
        if missing:
            raise ConfigurationError(f"missing model config keys: {sorted(missing)}")
        groups = data.get("groups")
        if groups is None:
            groups = [list(range(len(data["prefactors"])))]
        return ModelConfig(
            architecture=data["architecture"],
            prefactors=tuple(tuple(pf) for pf in data["prefactors"]),
            groups=tuple(tuple(g) for g in groups),
            blocks_per_layer=int(data["blocks_per_layer"]),
            encoding_axis=data.get("encoding_axis", "rx"),
            combine=data.get("combine", "sum"),
        )


@dataclass(frozen=True)
class ParamCircuit:
    """Compiled gate list with parameter slots and spectrum declaration."""

    n_qubits: int
    n_features: int
    n_params: int
    gates: tuple
    measurement_qubits: tuple
    groups: tuple              # feature-index groups
    group_qubits: tuple        # qubit indices per group, ascending
    spectrum: MixedSpectrum
    segments: tuple            # (label, layer_index, gate_start, gate_end)
    architecture: str
    combine: str
    encoding_layers: int
    config: Optional[ModelConfig] = field(default=None, compare=False, repr=False)


def _encoding_assignment(config: ModelConfig):
    """Parallel qubit layout: (feature, prefactor) pairs, features then prefactors ascending."""
    pairs = []
    for f, pf in enumerate(config.prefactors):
        for p in sorted(pf):
            pairs.append((f, p))
    return pairs


def qubit_count(config: ModelConfig) -> int:
    """Number of qubits the compiled circuit will use."""
    if config.architecture == "parallel":
        return sum(len(pf) for pf in config.prefactors)
    return config.n_features


def _ansatz_layer_count(config: ModelConfig) -> int:
    if config.architecture == "parallel":
        return 2
    return len(config.prefactors[0]) + 1


def param_count(config: ModelConfig) -> int:
    """Closed-form trainable-parameter count: layers * B * sum_groups 3*k_g."""
    if config.architecture == "parallel":
        pairs = _encoding_assignment(config)
        group_sizes = [sum(1 for f, _ in pairs if f in set(g)) for g in config.groups]
    else:
        group_sizes = [len(g) for g in config.groups]
    return _ansatz_layer_count(config) * config.blocks_per_layer * 3 * sum(group_sizes)


def _ansatz_layer(group_qubits, config: ModelConfig, slot_start: int):
    gates = []
    slot = slot_start
    for qs in group_qubits:
        for _ in range(config.blocks_per_layer):
            gates.append(Gate("rot", qs[-1], param_slot=slot))
            slot += 3
            for j in range(len(qs) - 1, 0, -1):
                gates.append(Gate("cnot", qs[j - 1], control=qs[j]))
                gates.append(Gate("rot", qs[j - 1], param_slot=slot))
                slot += 3
    return gates, slot


def build_circuit(config: ModelConfig) -> ParamCircuit:
    """Compile a ModelConfig into its ordered gate list."""
    d = config.n_features
    if config.architecture == "parallel":
        pairs = _encoding_assignment(config)
        n_qubits = len(pairs)
        group_qubits = tuple(
            tuple(q for q, (f, _) in enumerate(pairs) if f in set(g)) for g in config.groups
        )
        encoding_layers = [[Gate(config.encoding_axis, q, feature=f, prefactor=p)
                            for q, (f, p) in enumerate(pairs)]]
    else:
        n_qubits = d
        group_qubits = tuple(tuple(sorted(g)) for g in config.groups)
        r = len(config.prefactors[0])
        ordered = [sorted(pf) for pf in config.prefactors]
        encoding_layers = [
            [Gate(config.encoding_axis, f, feature=f, prefactor=ordered[f][layer]) for f in range(d)]
            for layer in range(r)
        ]

    gates = []
    segments = []
    slot = 0
    for layer, enc in enumerate(encoding_layers + [None]):
        start = len(gates)
        layer_gates, slot = _ansatz_layer(group_qubits, config, slot)
        gates.extend(layer_gates)
        segments.append(("ansatz", layer, start, len(gates)))
        if enc is not None:
            start = len(gates)
            gates.extend(enc)
            segments.append(("encoding", layer, start, len(gates)))

    spectrum = MixedSpectrum(
        dim_spectra=tuple(spectrum_from_prefactors(pf) for pf in config.prefactors),
        groups=config.groups,
    )
    circuit = ParamCircuit(
        n_qubits=n_qubits,
        n_features=d,
        n_params=slot,
        gates=tuple(gates),
        measurement_qubits=tuple(min(qs) for qs in group_qubits),
        groups=config.groups,
        group_qubits=group_qubits,
        spectrum=spectrum,
        segments=tuple(segments),
        architecture=config.architecture,
        combine=config.combine,
        encoding_layers=len(encoding_layers),
        config=config,
    )
    assert circuit.n_params == param_count(config)
    return circuit


@dataclass(frozen=True)
class SufficiencyReport:
    n_params: int
    spectrum_cardinality: int
    sufficient: bool


def parameter_sufficiency(config: ModelConfig) -> SufficiencyReport:
    """Compare trainable-parameter count against the model's spectrum size.

    A model needs at least one real parameter per accessible frequency for
    individual coefficient control, so sufficient = n_params >= |spectrum|.
    """
    spec = MixedSpectrum(
        dim_spectra=tuple(spectrum_from_prefactors(pf) for pf in config.prefactors),
        groups=config.groups,
    )
    card = mixed_cardinality(spec).total
    n = param_count(config)
    return SufficiencyReport(n_params=n, spectrum_cardinality=card, sufficient=n >= card)
