#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>

#include "ranlab/e2_proto.hpp"
#include "ranlab/model_io.hpp"

namespace ranlab::ric {

struct TimerSet {
    int64_t du_report_ms = 1000;
    int64_t kpm_log_ms = 250;
    int64_t action_update_ms = 250;

    void validate() const;

    static TimerSet set1() { return {1000, 250, 250}; }
    static TimerSet set2() { return {250, 250, 250}; }
    static TimerSet set3() { return {100, 100, 100}; }
    static TimerSet by_name(std::string_view name);
    bool operator==(const TimerSet&) const = default;
};

enum class DomainKind { Slicing, SchedAll, SchedSlice, Joint };

struct ControlDomain {
    DomainKind kind = DomainKind::Slicing;
    std::optional<SliceId> slice;  // set for SchedSlice

    bool overlaps(const ControlDomain& other) const;
    std::string to_string() const;
    static ControlDomain parse(std::string_view text);  // "slicing", "sched", "sched:mmtc", "joint"
    bool operator==(const ControlDomain&) const = default;
};

enum class RicErrorCode { ActionSpaceMismatch, CorruptModel, UnknownIntent, DomainConflict };

std::string_view ric_error_name(RicErrorCode c);

struct RicError : std::runtime_error {
    RicError(RicErrorCode code, std::string detail)
        : std::runtime_error(std::string(ric_error_name(code)) + ": " + detail), code(code) {}
    RicErrorCode code;
};

struct XappDescriptor {
    std::string id;
    std::string model_id;
    std::string intent_id;
    ControlDomain domain;
    TimerSet timers;
    std::optional<int64_t> report_period_ms;  // hierarchical override of du_report

    int64_t effective_report_ms() const {
        return report_period_ms ? *report_period_ms : timers.du_report_ms;
    }
    std::string to_json() const;
    static XappDescriptor from_json(std::string_view text);
};

// Expected action-space cardinality per domain: 16 / 27 / 43 / 3.
size_t expected_actions(const ControlDomain& d);

// Validates a model artifact against a control domain; throws RicError on a
// cardinality mismatch or a corrupt artifact. Returns the parsed model.
drl::PolicyModel validate_onboard(std::string_view model_bytes, const ControlDomain& domain);

// Structured JSONL event sink: one object per line with tick, session, event
// and a payload digest.
class EventLog {
public:
    void log(int64_t tick, std::string_view session, std::string_view event,
             std::string_view payload);
    const std::vector<std::string>& lines() const { return lines_; }
    std::string dump() const;

private:
    std::vector<std::string> lines_;
};

// Rolling per-slice window history plus the inference path of one running
// xApp. Inference uses exactly the most recent K=10 log windows and never
// fires before they accumulate.
class XappSession {
public:
    XappSession(XappDescriptor desc, drl::PolicyModel model, EventLog* log);

    const XappDescriptor& descriptor() const { return desc_; }
    const drl::PolicyModel& model() const { return model_; }
    std::vector<SliceId> observed_slices() const;

    // One log window worth of samples (all three slices).
    void append_window(std::span<const KpmSample> window);
    void reset_windows(int64_t tick);
    bool warmed_up() const;

    // Domain-restricted directive from the current history; nullopt during
    // warm-up. Pure w.r.t. session state except counters.
    std::optional<e2::ControlDirective> on_action_tick(int64_t tick);

    void on_rejected(int64_t tick);

    uint64_t directives_emitted = 0;
    uint64_t rejected_acks = 0;

private:
    std::vector<double> build_state() const;

    XappDescriptor desc_;
    drl::PolicyModel model_;
    intent::ActionSpace space_;
    EventLog* log_;
    std::array<std::deque<std::array<double, 3>>, 3> history_;  // per slice, newest at back
};

// Per-domain last-write-wins merge of same-tick directives. Warning strings
// describe overwrites; owners records which session supplied each part.
struct MergeResult {
    e2::ControlDirective directive;
    std::vector<std::string> warnings;
    std::optional<std::string> slicing_owner;
    std::array<std::optional<std::string>, 3> sched_owner;  // per slice
};

MergeResult merge_directives(
    std::span<const std::pair<std::string, e2::ControlDirective>> pending);

struct RicOptions {
    bool parallel_sessions = false;  // per-session inference workers, serialized merge
};

struct SubscriptionPlan {
    int64_t report_period_ms = 0;
    int64_t kpm_log_ms = 0;
    std::vector<size_t> session_indices;
    e2::Subscribe subscribe() const { return {report_period_ms, kpm_log_ms}; }
};

// Near-real-time RIC runtime on a virtual clock: dispatch, demultiplexed KPM
// intake, per-tick inference and control merging.
class Ric {
public:
    explicit Ric(RicOptions opts = {}, EventLog* log = nullptr);

    struct Xapp {
        XappDescriptor desc;
        drl::PolicyModel model;
    };

    // Validates pairwise-disjoint control domains before any subscription.
    void dispatch(std::vector<Xapp> xapps);

    const std::vector<SubscriptionPlan>& subscriptions() const { return plans_; }
    const std::vector<std::unique_ptr<XappSession>>& sessions() const { return sessions_; }

    // Demultiplexes one report from subscription `sub` into its sessions.
    void on_report(size_t sub, const e2::KpmReport& report);

    // Runs every due session at tick t; returns the merged Control to send
    // (at most one per tick).
    std::optional<e2::Control> on_tick(int64_t t_ms);

    void on_ack(const e2::ControlAck& ack);

private:
    RicOptions opts_;
    EventLog* log_;
    std::vector<std::unique_ptr<XappSession>> sessions_;
    std::vector<SubscriptionPlan> plans_;
    std::vector<uint64_t> next_seq_;  // per subscription
    uint64_t action_seq_ = 0;
    struct SentControl {
        std::optional<std::string> slicing_owner;
    };
    std::map<uint64_t, SentControl> inflight_;
};

}  // namespace ranlab::ric
