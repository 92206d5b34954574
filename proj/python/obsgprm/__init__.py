"""Optical burst switching simulator: Bayesian learned routing vs shortest path."""

from ._obsgprm import (
    BlrClass,
    ConnectionSpec,
    Error,
    EvidenceVector,
    InitialMode,
    NoObservationsError,
    Outcome,
    ParseError,
    Policy,
    RoutingTable,
    Scenario,
    SuccessTable,
    Topology,
    TrafficMatrix,
    UndefinedMetricError,
    UnknownNeighborError,
    ValidationError,
    blr_gain,
    build_table,
    classify_blr,
    load_matrix,
    load_scenario,
    load_topology,
    node_capacities,
    offered_load,
    parse_topology,
    permutation_count,
    run_experiment,
    scale_to_load,
    simulate,
    u_gain,
)

__version__ = "0.1.0"
