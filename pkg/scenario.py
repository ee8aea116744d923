#!/usr/bin/env python3
"""
Scenario files: one JSON document per experimental setup

A scenario declares the PSAs, observables, bases, contradictory pairs,
an optional Hamiltonian with a time grid, and experiment blocks. Loading
validates the document against docs/scenario.schema.json, resolves every
reference and builds the core objects, failing on the first problem with
its location in the document.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import jsonschema

import config
from errors import PaqsError, ScenarioError, ScenarioParseError, ScenarioReferenceError
from hilbert import Basis, HermitianOperator, StateVector, decode_matrix, decode_vector, eigenbasis, pauli
from powers import PSA, ContradictoryPair, build_quantum_situation, declare_contradictory, powers_of

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parent / "docs" / "scenario.schema.json"
SCENARIO_DIR = Path(__file__).resolve().parent / "scenarios"


@dataclass(frozen=True)
class Evolution:
    hamiltonian: str
    psa: str
    basis: str
    times: Tuple[float, ...]
    hbar: float = 1.0


@dataclass(frozen=True)
class ExperimentBlock:
    psa: str
    basis: str
    shots: int
    seed: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Scenario:
    path: str
    name: str
    dimension: int
    psas: Dict[str, PSA]
    observables: Dict[str, HermitianOperator]
    bases: Dict[str, Basis]
    contradictory_pairs: Tuple[Tuple[str, ContradictoryPair], ...] = ()
    evolution: Optional[Evolution] = None
    experiments: Tuple[ExperimentBlock, ...] = ()
    description: str = field(default="")

    def psa(self, psa_id):
        if psa_id not in self.psas:
            raise ScenarioReferenceError(f"Unknown PSA {psa_id!r} (known: {', '.join(self.psas)})")
        return self.psas[psa_id]

    def basis(self, label):
        if label not in self.bases:
            raise ScenarioReferenceError(f"Unknown basis {label!r} (known: {', '.join(self.bases)})")
        return self.bases[label]

    def observable(self, name):
        if name not in self.observables:
            raise ScenarioReferenceError(f"Unknown observable {name!r}")
        return self.observables[name]

    def pairs_for(self, basis_label):
        return [pair for label, pair in self.contradictory_pairs if label == basis_label]

    def situation(self, psa_id, basis_label):
        return build_quantum_situation(self.psa(psa_id), self.basis(basis_label))


def resolve_path(path):
    """Accept a file path or the bare name of a bundled scenario"""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    bundled = SCENARIO_DIR / (candidate.name if candidate.suffix else f"{candidate.name}.json")
    return bundled if bundled.exists() else candidate


def _read_json(path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario file: {e.strerror}", str(path)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(f"{path}: invalid JSON: {e.msg}", e.lineno, e.colno) from e


def _json_path(parts):
    out = "$"
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate_document(document):
    """Schema check; raises ScenarioError at the first offending location"""
    schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(document), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        first = errors[0]
        raise ScenarioError(f"schema violation: {first.message}", _json_path(first.absolute_path))


def _build(where, factory, *args, **kwargs):
    """Construct a core object, re-raising its invariant failure with the document path"""
    try:
        return factory(*args, **kwargs)
    except ScenarioError:
        raise
    except PaqsError as e:
        raise ScenarioError(str(e), where) from e


def _observable(name, spec):
    if "pauli" in spec:
        base = pauli(spec["pauli"])
        matrix = base.matrix * spec.get("scale", 1.0)
    else:
        matrix = decode_matrix(spec["matrix"]) * spec.get("scale", 1.0)
    return HermitianOperator(matrix, label=name)


def _basis(label, spec, observables, dim):
    names = tuple(spec.get("names", ()))
    if "observable" in spec:
        if spec["observable"] not in observables:
            raise ScenarioReferenceError(f"Unknown observable {spec['observable']!r}", f"$.bases.{label}.observable")
        basis = eigenbasis(observables[spec["observable"]], label, names)
    else:
        basis = Basis(label, tuple(StateVector(decode_vector(v)) for v in spec["vectors"]), names)
    if basis.dim != dim:
        raise ScenarioError(f"basis has dimension {basis.dim}, scenario declares {dim}", f"$.bases.{label}")
    return basis


def _pair(i, spec, bases, observables):
    where = f"$.contradictory_pairs[{i}]"
    if spec["basis"] not in bases:
        raise ScenarioReferenceError(f"Unknown basis {spec['basis']!r}", f"{where}.basis")
    if spec["observable"] not in observables:
        raise ScenarioReferenceError(f"Unknown observable {spec['observable']!r}", f"{where}.observable")
    powers = {p.name: p for p in powers_of(bases[spec["basis"]])}
    for name in spec["powers"]:
        if name not in powers:
            raise ScenarioReferenceError(f"Unknown power {name!r} in basis {spec['basis']!r}", f"{where}.powers")
    a, b = (powers[name] for name in spec["powers"])
    return spec["basis"], _build(where, declare_contradictory, a, b, observables[spec["observable"]])


def _check_refs(where, spec, psas, bases):
    if spec["psa"] not in psas:
        raise ScenarioReferenceError(f"Unknown PSA {spec['psa']!r}", f"{where}.psa")
    if spec["basis"] not in bases:
        raise ScenarioReferenceError(f"Unknown basis {spec['basis']!r}", f"{where}.basis")


def build_scenario(document, path="<memory>"):
    """Resolve an already-parsed scenario document"""
    validate_document(document)
    dim = document["dimension"]
    max_dim = config.load_settings().max_dim
    if dim > max_dim:
        raise ScenarioError(f"dimension {dim} exceeds the supported maximum {max_dim}", "$.dimension")

    psas = {}
    for psa_id, amplitudes in document["psas"].items():
        where = f"$.psas.{psa_id}"
        if len(amplitudes) != dim:
            raise ScenarioError(f"state has {len(amplitudes)} amplitudes, scenario declares {dim}", where)
        psas[psa_id] = PSA(psa_id, _build(where, StateVector, decode_vector(amplitudes)))

    observables = {}
    for name, spec in document.get("observables", {}).items():
        observables[name] = _build(f"$.observables.{name}", _observable, name, spec)
        if observables[name].dim != dim:
            raise ScenarioError(f"observable has dimension {observables[name].dim}, scenario declares {dim}",
                                f"$.observables.{name}")

    bases = {label: _build(f"$.bases.{label}", _basis, label, spec, observables, dim)
             for label, spec in document["bases"].items()}

    pairs = tuple(_pair(i, spec, bases, observables)
                  for i, spec in enumerate(document.get("contradictory_pairs", [])))

    evolution = None
    if "evolution" in document:
        spec = document["evolution"]
        _check_refs("$.evolution", spec, psas, bases)
        if spec["hamiltonian"] not in observables:
            raise ScenarioReferenceError(f"Unknown observable {spec['hamiltonian']!r}", "$.evolution.hamiltonian")
        evolution = Evolution(spec["hamiltonian"], spec["psa"], spec["basis"],
                              tuple(float(t) for t in spec["times"]), float(spec.get("hbar", 1.0)))

    experiments = []
    for i, spec in enumerate(document.get("experiments", [])):
        _check_refs(f"$.experiments[{i}]", spec, psas, bases)
        experiments.append(ExperimentBlock(spec["psa"], spec["basis"], spec["shots"], spec.get("seed")))

    logger.debug("scenario %s: %d PSAs, %d bases, %d pairs, %d experiments",
                 path, len(psas), len(bases), len(pairs), len(experiments))
    return Scenario(
        path=str(path),
        name=document.get("name", Path(str(path)).stem),
        dimension=dim,
        psas=psas,
        observables=observables,
        bases=bases,
        contradictory_pairs=pairs,
        evolution=evolution,
        experiments=tuple(experiments),
        description=document.get("description", ""),
    )


def load_scenario(path):
    """Read, validate and resolve a scenario file"""
    path = resolve_path(path)
    return build_scenario(_read_json(path), path)
