#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ranlab/e2_proto.hpp"
#include "ranlab/kpm.hpp"

namespace ranlab::intent {

enum class Kpi { DlBuffer, DlBrate, DlTxPkts, PrbRatio };

std::string_view kpi_name(Kpi k);
Kpi kpi_from_name(std::string_view name);

enum class RewardPrimitive { MaxAverage, MaxElem, MaxPrbRatio };
enum class Direction { Maximize, Minimize };
enum class ActionKind { Scheduling, RanSlicing };

struct SliceIntent {
    SliceId name = SliceId::Embb;
    RewardPrimitive reward = RewardPrimitive::MaxAverage;
    Direction direction = Direction::Maximize;  // metadata; sign lives in the weight
    std::vector<Kpi> reward_kpis;
    std::vector<Kpi> observation_kpis;
};

struct IntentSpec {
    std::vector<SliceIntent> slices;          // 1..3, unique names
    std::set<ActionKind> action_kinds;        // non-empty
    std::string global_reward_type;
    std::vector<double> global_reward_weights;  // sign-carrying, one per slice
};

enum class IntentErrorCode {
    MalformedJson,
    MissingField,
    BadFieldType,
    UnknownSlice,
    DuplicateSlice,
    UnknownReward,
    UnknownKpi,
    EmptyRewardKpis,
    UnknownActionKind,
    EmptyActions,
    WeightMismatch,
};

std::string_view intent_error_name(IntentErrorCode c);

struct IntentError : std::runtime_error {
    IntentError(IntentErrorCode code, std::string detail)
        : std::runtime_error(std::string(intent_error_name(code)) + ": " + detail), code(code) {}
    IntentErrorCode code;
};

struct ParseOptions {
    // Accepts MinAverageReward/MinElemReward names (direction=minimize).
    // Off by default: those names are rejected as UnknownReward.
    bool accept_min_primitives = false;
};

IntentSpec parse_intent(std::string_view text, const ParseOptions& opts = {});

// -------- action spaces --------

enum class ActionSpaceKind { Slicing, Scheduling, Joint, SchedSingleSlice };

struct ActionSpace {
    ActionSpaceKind kind = ActionSpaceKind::Slicing;
    std::optional<SliceId> single_slice;      // set for SchedSingleSlice
    std::vector<e2::ControlDirective> actions;
    size_t size() const { return actions.size(); }
};

// Slicing: the 16 feasible-table rows in row order. Scheduling: all 27
// (RR|WF|PF)^3 triples lexicographic with RR<WF<PF, eMBB most significant.
// Joint: the 16 slicing directives first, then the 27 scheduling ones (43).
ActionSpace build_action_space(const std::set<ActionKind>& kinds, int total_prbs = kTotalPrbs);

// 3-action per-slice scheduling space (RR, WF, PF) for dedicated xApps.
ActionSpace build_sched_single_slice_space(SliceId s);

// -------- rewards --------

// MaxAverage -> mean of the window's values; MaxElem -> max element.
double slice_reward(RewardPrimitive p, std::span<const double> values);

// Granted-over-requested PRBs, clamped to [0,1]; defined as 1 when the
// requested sum is zero.
double prb_ratio(double granted_sum, double requested_sum);

// Per-slice KPI values gathered over a window of samples for one slice.
struct SliceWindow {
    std::vector<KpmSample> samples;  // all same slice, time-ordered
};

// Applies the slice's reward primitive to the window: value list is every
// reward-KPI value across the window's samples; PRB ratio uses window sums.
double reward_from_window(const SliceIntent& si, const SliceWindow& w);

// Per-step inner sum of the discounted global reward: sum_j w_j * r_j.
// Single-slice input reproduces the per-slice form.
double global_reward(std::span<const double> slice_rewards, std::span<const double> weights);

// -------- weight design --------

// priority / scale_ref, negated for minimize. scale_ref must be > 0.
double derive_weight(double priority, double scale_ref, Direction dir);

// Table-derived weight configurations (sign-carrying; URLLC negative).
std::vector<double> default_weights();      // (72.0440333, 0.229357798, -0.00005)
std::vector<double> alternative_weights();  // (72.0440333, 1.5, -0.00005)
std::vector<double> weights_by_name(std::string_view name);

}  // namespace ranlab::intent
