"""RAN slicing control laboratory: python bindings over the C++ core."""

try:
    from ranlab._ranlab import (  # noqa: F401
        alternative_weights,
        analyze_csv,
        build_action_space,
        decode_frame,
        default_weights,
        derive_weight,
        dqn_td_target,
        encode_frame,
        feasible_allocations,
        global_reward,
        median,
        parse_intent,
        ppo_clip_term,
        prb_ratio,
        run_baseline,
        simulate_windows,
    )
except ImportError:  # in-tree builds keep the module at the top level
    from _ranlab import (  # noqa: F401
        alternative_weights,
        analyze_csv,
        build_action_space,
        decode_frame,
        default_weights,
        derive_weight,
        dqn_td_target,
        encode_frame,
        feasible_allocations,
        global_reward,
        median,
        parse_intent,
        ppo_clip_term,
        prb_ratio,
        run_baseline,
        simulate_windows,
    )

__all__ = [
    "alternative_weights",
    "analyze_csv",
    "build_action_space",
    "decode_frame",
    "default_weights",
    "derive_weight",
    "dqn_td_target",
    "encode_frame",
    "feasible_allocations",
    "global_reward",
    "median",
    "parse_intent",
    "ppo_clip_term",
    "prb_ratio",
    "run_baseline",
    "simulate_windows",
]
