#!/usr/bin/env python3
"""Worked example: validate a broken pipeline, plan a fix, re-validate.

Starts from observational data whose structure is unknown but whose
noise is believed additive, tries to run a deep generative effect
estimator directly, watches it fail on the structural requirement, asks
the planner for the shortest repairs, and validates the repaired
pipeline.  Finishes with the catalog-wide transition audit.
"""

import argparse

from cdl_compass.engine import (
    audit_transitions,
    plan_pipeline,
    render_audit_text,
    render_plans_text,
    render_validation_text,
    validate_pipeline,
)
from cdl_compass.lattice import KnowledgeState
from cdl_compass.registry import default_catalog, load_catalog


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", default="unknown:noise_model:static")
    parser.add_argument("--goal", default="causal:nonparametric:static")
    parser.add_argument("--broken", default="decaf", help="card to attempt directly")
    parser.add_argument("--catalog", default=None, help="catalog JSON (default built-in)")
    parser.add_argument("--max-len", type=int, default=6)
    args = parser.parse_args()

    catalog = default_catalog() if args.catalog is None else load_catalog(args.catalog)
    start = KnowledgeState.from_triple(args.start)
    goal = KnowledgeState.from_triple(args.goal)

    print(f"start state: {start.triple}")
    print(f"goal:        {goal.triple}")
    print()
    print(f"-- attempting [{args.broken}] directly --")
    broken = validate_pipeline(catalog, [args.broken], start)
    print(render_validation_text(broken))
    print()

    print("-- planning repairs --")
    plans = plan_pipeline(catalog, start, goal, max_len=args.max_len)
    relaxing = audit_transitions(catalog).relaxing
    print(render_plans_text(plans, relaxing))
    print()

    if plans and plans[0]:
        repaired = plans[0] + [args.broken]
        print(f"-- validating {repaired} --")
        print(render_validation_text(validate_pipeline(catalog, repaired, start)))
        print()

    print("-- catalog transition audit --")
    print(render_audit_text(audit_transitions(catalog)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
