"""Layer placement planning and cluster simulation for distributed LLM serving."""

try:
    from ._helio import (
        Cluster,
        ParseError,
        Plan,
        ValidationError,
        generate_trace,
        max_flow_value,
        plan,
        plan_for_placement,
        simulate,
        throughput_upper_bound,
    )
except ImportError:  # running against a build tree, extension on sys.path
    from _helio import (
        Cluster,
        ParseError,
        Plan,
        ValidationError,
        generate_trace,
        max_flow_value,
        plan,
        plan_for_placement,
        simulate,
        throughput_upper_bound,
    )

__all__ = [
    "Cluster",
    "ParseError",
    "Plan",
    "ValidationError",
    "generate_trace",
    "max_flow_value",
    "plan",
    "plan_for_placement",
    "simulate",
    "throughput_upper_bound",
]
