#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranlab/common.hpp"
#include "ranlab/kpm.hpp"

namespace ranlab::sim {

// Per-slice source rates in bits/s, divided evenly across the slice's UEs by
// the World. eMBB is constant bitrate; mMTC and URLLC draw Poisson packet
// counts of kPacketBytes each with the given mean rate.
struct TrafficProfile {
    double embb_bps = 0.0;
    double mmtc_bps = 0.0;
    double urllc_bps = 0.0;

    double rate_for(SliceId s) const {
        switch (s) {
            case SliceId::Embb: return embb_bps;
            case SliceId::Mmtc: return mmtc_bps;
            case SliceId::Urllc: return urllc_bps;
        }
        return 0.0;
    }

    static TrafficProfile profile1() { return {1e6, 30e3, 10e3}; }
    static TrafficProfile profile2() { return {4e6, 44.6e3, 89.3e3}; }
    static TrafficProfile by_id(int id);
};

enum class SchedPolicy : int { RR = 0, WF = 1, PF = 2 };

std::string_view sched_policy_name(SchedPolicy p);
SchedPolicy sched_policy_from_name(std::string_view name);

// Per-slice scheduler selection; every slice has exactly one profile.
struct SchedProfileMap {
    std::array<SchedPolicy, 3> policy{SchedPolicy::RR, SchedPolicy::RR, SchedPolicy::RR};
    SchedPolicy& operator[](SliceId s) { return policy[static_cast<int>(s)]; }
    SchedPolicy operator[](SliceId s) const { return policy[static_cast<int>(s)]; }
    bool operator==(const SchedProfileMap&) const = default;
};

// PRBs per slice; feasible iff the triple is a row of the 16-row table.
struct SlicingAllocation {
    std::array<int, 3> prbs{0, 0, 0};
    int operator[](SliceId s) const { return prbs[static_cast<int>(s)]; }
    bool operator==(const SlicingAllocation&) const = default;
};

// The feasible PRB split table for 50 PRBs, in its canonical row order.
// Row indices are the slicing action ids.
std::span<const SlicingAllocation> feasible_allocations();
bool is_feasible(const SlicingAllocation& a);

struct UeState {
    int ue_id = 0;
    SliceId slice = SliceId::Embb;
    double pos_x_m = 0.0;
    double pos_y_m = 0.0;
    double speed_mps = 0.0;
    uint64_t buffer_bytes = 0;
    double ewma_tput_bps = 0.0;
    uint64_t cum_arrived = 0;
    uint64_t cum_served = 0;
    uint64_t cum_dropped = 0;

    // traffic source state
    double arrival_carry_bytes = 0.0;  // fractional CBR remainder
    // mobility state
    double waypoint_x_m = 0.0;
    double waypoint_y_m = 0.0;

    double distance_m() const { return std::sqrt(pos_x_m * pos_x_m + pos_y_m * pos_y_m); }
};

struct ScenarioParams {
    double radius_m = 50.0;                    // Location 1 = 50, Location 2 = 20
    std::array<int, 3> ue_counts{2, 2, 2};
    double speed_mps = 0.0;
    TrafficProfile traffic = TrafficProfile::profile1();
    uint64_t seed = 1;
    bool fading = false;
    SlicingAllocation initial_allocation{{18, 15, 17}};
    SchedProfileMap initial_scheds{};
    uint64_t buffer_cap_bytes = 0;             // 0 = unbounded (no drops)
};

// Bytes generated for one UE over dt ms. CBR slices carry the fractional
// remainder in the UE state; Poisson slices draw packet counts.
uint64_t generate_arrivals(const TrafficProfile& profile, UeState& ue, int dt_ms, Rng& rng);

// Distance-indexed spectral efficiency in bits per PRB per TTI, optionally
// scaled by seeded log-normal fading. Strictly positive within the cell.
uint64_t per_prb_rate(const UeState& ue, bool fading, Rng& fading_rng);
uint64_t per_prb_rate_table(double distance_m);

// Random waypoint within the cell radius at the UE's configured speed.
// speed 0 leaves the position untouched; displacement per call is bounded by
// speed * dt.
void update_mobility(UeState& ue, double radius_m, int dt_ms, Rng& rng);

// One PRB grant decision, recorded when tracing is enabled.
struct GrantRecord {
    int64_t tti = 0;
    SliceId slice = SliceId::Embb;
    SchedPolicy policy = SchedPolicy::RR;
    int prb_index = 0;   // within the slice budget
    int ue_id = 0;
    // candidate snapshot at grant time: (ue_id, rate bits/PRB, ewma bps, remaining demand bytes)
    struct Candidate {
        int ue_id;
        uint64_t rate;
        double ewma;
        double demand_bytes;
    };
    std::vector<Candidate> backlogged;
};

// Input snapshot for scheduling one slice for one TTI.
struct SchedUe {
    int ue_id = 0;
    uint64_t buffer_bytes = 0;
    uint64_t rate_bits_per_prb = 1;
    double ewma_tput_bps = 0.0;
};

// Grants budget PRBs across the slice's UEs under the given policy.
// rr_cursor persists across TTIs (caller-owned). Returns per-UE grant counts
// aligned with `ues`; appends per-grant records to `trace` when non-null.
std::vector<int> schedule_slice(SchedPolicy policy, std::span<const SchedUe> ues,
                                int prb_budget, size_t& rr_cursor,
                                std::vector<GrantRecord>* trace = nullptr,
                                int64_t tti = 0, SliceId slice = SliceId::Embb);

struct TtiStats {
    std::array<uint64_t, 3> served_bytes{};
    std::array<uint64_t, 3> granted_prbs{};
    std::array<uint64_t, 3> requested_prbs{};
    std::array<uint64_t, 3> arrived_bytes{};
};

// Cumulative per-slice counters used to derive window samples; additive by
// construction (a window is a difference of totals).
struct SliceTotals {
    std::array<uint64_t, 3> served_bytes{};
    std::array<uint64_t, 3> served_pkts{};   // sum of floor(cum_served/125) per UE
    std::array<uint64_t, 3> granted_prbs{};
    std::array<uint64_t, 3> requested_prbs{};
};

class World {
public:
    explicit World(const ScenarioParams& params);

    // Applies a control directive. Infeasible slicing triples are rejected
    // (previous allocation kept) and false is returned.
    bool apply_slicing(const SlicingAllocation& a);
    void apply_scheds(const SchedProfileMap& m);
    void apply_sched(SliceId s, SchedPolicy p);

    // Advances one 1 ms TTI: mobility, arrivals, per-slice scheduling,
    // service, EWMA update, counter accumulation.
    TtiStats step_tti();

    // Window sample per slice over [from_totals, now]; window_end = now_ms.
    std::array<KpmSample, 3> sample_kpm(const SliceTotals& from, int64_t window_ms) const;

    SliceTotals totals() const { return totals_; }
    int64_t now_ms() const { return now_ms_; }
    const std::vector<UeState>& ues() const { return ues_; }
    const SlicingAllocation& allocation() const { return allocation_; }
    const SchedProfileMap& scheds() const { return scheds_; }
    uint64_t rejected_controls() const { return rejected_controls_; }

    // Exact ledger identity: cum_arrived == cum_served + cum_dropped + buffer.
    bool conservation_holds() const;

    void set_grant_trace(std::vector<GrantRecord>* trace) { trace_ = trace; }

private:
    ScenarioParams params_;
    TrafficProfile per_ue_traffic_;  // slice totals split across slice UEs
    std::vector<UeState> ues_;
    SlicingAllocation allocation_;
    SchedProfileMap scheds_;
    std::array<size_t, 3> rr_cursor_{0, 0, 0};
    SliceTotals totals_;
    int64_t now_ms_ = 0;
    uint64_t rejected_controls_ = 0;
    std::vector<Rng> arrival_rng_;
    std::vector<Rng> fading_rng_;
    std::vector<Rng> mobility_rng_;
    std::vector<GrantRecord>* trace_ = nullptr;
};

// Snapshot-based window sampler: remembers totals at the last boundary.
class WindowSampler {
public:
    explicit WindowSampler(const World& w) : last_(w.totals()), last_ms_(w.now_ms()) {}
    std::array<KpmSample, 3> sample(const World& w) {
        auto out = w.sample_kpm(last_, w.now_ms() - last_ms_);
        last_ = w.totals();
        last_ms_ = w.now_ms();
        return out;
    }

private:
    SliceTotals last_;
    int64_t last_ms_;
};

}  // namespace ranlab::sim
