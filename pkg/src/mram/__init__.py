"""MRAM workbench: a unit-cost multiplication RAM, an NDTM-to-MRAM transpiler,
and the tooling to measure how the result depends on the cost model."""

__version__ = "0.1.0"
