#include "ranlab/ran_sim.hpp"

#include <algorithm>
#include <cstdio>

namespace ranlab::sim {

TrafficProfile TrafficProfile::by_id(int id) {
    switch (id) {
        case 1: return profile1();
        case 2: return profile2();
        default: throw std::invalid_argument("unknown traffic profile id " + std::to_string(id));
    }
}

std::string_view sched_policy_name(SchedPolicy p) {
    switch (p) {
        case SchedPolicy::RR: return "RR";
        case SchedPolicy::WF: return "WF";
        case SchedPolicy::PF: return "PF";
    }
    throw std::logic_error("bad SchedPolicy");
}

SchedPolicy sched_policy_from_name(std::string_view name) {
    if (name == "RR") return SchedPolicy::RR;
    if (name == "WF") return SchedPolicy::WF;
    if (name == "PF") return SchedPolicy::PF;
    throw std::invalid_argument("unknown scheduler profile: " + std::string(name));
}

namespace {

constexpr SlicingAllocation kFeasibleTable[] = {
    {{30, 9, 11}}, {{30, 15, 5}}, {{36, 9, 5}},  {{24, 21, 5}},
    {{24, 15, 11}}, {{18, 15, 17}}, {{18, 9, 23}}, {{18, 21, 11}},
    {{12, 27, 11}}, {{12, 15, 23}}, {{12, 9, 29}}, {{6, 27, 17}},
    {{6, 39, 5}},  {{6, 15, 29}},  {{6, 9, 35}},  {{36, 3, 11}},
};

// Spectral efficiency tiers, bits per PRB per TTI. Monotone non-increasing
// in distance; edge tier is still comfortably positive so even 5 PRBs drain
// low-rate slices.
struct EffTier { double max_dist_m; uint64_t bits; };
constexpr EffTier kEffTable[] = {
    {5.0, 780},  {10.0, 720}, {15.0, 660}, {20.0, 600}, {25.0, 540},
    {30.0, 480}, {35.0, 420}, {40.0, 360}, {45.0, 300}, {1e9, 240},
};

constexpr double kFadingSigma = 0.3;
constexpr double kFadingMin = 0.25;
constexpr double kFadingMax = 4.0;
constexpr double kPfEwmaBeta = 0.1;
constexpr double kPfEwmaFloor = 1.0;  // bps, avoids div-by-zero for never-served UEs

}  // namespace

std::span<const SlicingAllocation> feasible_allocations() { return kFeasibleTable; }

bool is_feasible(const SlicingAllocation& a) {
    for (const auto& row : kFeasibleTable)
        if (row == a) return true;
    return false;
}

uint64_t generate_arrivals(const TrafficProfile& profile, UeState& ue, int dt_ms, Rng& rng) {
    if (dt_ms <= 0) throw std::invalid_argument("generate_arrivals: dt must be > 0");
    const double rate_bps = profile.rate_for(ue.slice);
    if (rate_bps <= 0.0) return 0;
    if (ue.slice == SliceId::Embb) {
        const double exact = rate_bps * dt_ms / 8000.0 + ue.arrival_carry_bytes;
        const uint64_t whole = static_cast<uint64_t>(exact);
        ue.arrival_carry_bytes = exact - static_cast<double>(whole);
        return whole;
    }
    const double pkts_per_ms = rate_bps / (8.0 * kPacketBytes * 1000.0);
    const int pkts = rng.poisson(pkts_per_ms * dt_ms);
    return static_cast<uint64_t>(pkts) * kPacketBytes;
}

uint64_t per_prb_rate_table(double distance_m) {
    for (const auto& tier : kEffTable)
        if (distance_m < tier.max_dist_m) return tier.bits;
    return kEffTable[std::size(kEffTable) - 1].bits;
}

uint64_t per_prb_rate(const UeState& ue, bool fading, Rng& fading_rng) {
    const uint64_t base = per_prb_rate_table(ue.distance_m());
    if (!fading) return base;
    double mult = std::exp(kFadingSigma * fading_rng.normal());
    mult = std::clamp(mult, kFadingMin, kFadingMax);
    const double scaled = static_cast<double>(base) * mult;
    return std::max<uint64_t>(1, static_cast<uint64_t>(scaled));
}

void update_mobility(UeState& ue, double radius_m, int dt_ms, Rng& rng) {
    if (ue.speed_mps <= 0.0 || dt_ms <= 0) return;
    double remaining_m = ue.speed_mps * dt_ms / 1000.0;
    while (remaining_m > 0.0) {
        const double dx = ue.waypoint_x_m - ue.pos_x_m;
        const double dy = ue.waypoint_y_m - ue.pos_y_m;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist <= remaining_m) {
            ue.pos_x_m = ue.waypoint_x_m;
            ue.pos_y_m = ue.waypoint_y_m;
            remaining_m -= dist;
            // next waypoint uniform in the disk
            double wx, wy;
            do {
                wx = (2.0 * rng.next_double() - 1.0) * radius_m;
                wy = (2.0 * rng.next_double() - 1.0) * radius_m;
            } while (wx * wx + wy * wy > radius_m * radius_m);
            ue.waypoint_x_m = wx;
            ue.waypoint_y_m = wy;
            if (dist == 0.0) break;  // idle at waypoint; new target next tick
        } else {
            ue.pos_x_m += dx / dist * remaining_m;
            ue.pos_y_m += dy / dist * remaining_m;
            remaining_m = 0.0;
        }
    }
}

std::vector<int> schedule_slice(SchedPolicy policy, std::span<const SchedUe> ues,
                                int prb_budget, size_t& rr_cursor,
                                std::vector<GrantRecord>* trace, int64_t tti, SliceId slice) {
    std::vector<int> grants(ues.size(), 0);
    if (ues.empty() || prb_budget <= 0) return grants;

    // Remaining demand in bytes; a UE stays backlogged until its buffer is
    // covered by granted capacity.
    std::vector<double> demand(ues.size());
    for (size_t i = 0; i < ues.size(); ++i) demand[i] = static_cast<double>(ues[i].buffer_bytes);

    auto backlogged = [&](size_t i) { return demand[i] > 0.0; };
    auto any_backlogged = [&] {
        for (size_t i = 0; i < ues.size(); ++i)
            if (backlogged(i)) return true;
        return false;
    };

    if (rr_cursor >= ues.size()) rr_cursor = 0;

    for (int prb = 0; prb < prb_budget; ++prb) {
        if (!any_backlogged()) break;
        size_t pick = ues.size();
        switch (policy) {
            case SchedPolicy::RR: {
                // persistent pointer cycling over backlogged UEs
                size_t idx = rr_cursor;
                for (size_t step = 0; step < ues.size(); ++step) {
                    const size_t cand = (idx + step) % ues.size();
                    if (backlogged(cand)) {
                        pick = cand;
                        rr_cursor = (cand + 1) % ues.size();
                        break;
                    }
                }
                break;
            }
            case SchedPolicy::WF: {
                uint64_t best_rate = 0;
                for (size_t i = 0; i < ues.size(); ++i) {
                    if (!backlogged(i)) continue;
                    if (pick == ues.size() || ues[i].rate_bits_per_prb > best_rate) {
                        pick = i;
                        best_rate = ues[i].rate_bits_per_prb;
                    }
                }
                break;
            }
            case SchedPolicy::PF: {
                double best_metric = -1.0;
                for (size_t i = 0; i < ues.size(); ++i) {
                    if (!backlogged(i)) continue;
                    const double metric = static_cast<double>(ues[i].rate_bits_per_prb) /
                                          std::max(ues[i].ewma_tput_bps, kPfEwmaFloor);
                    if (pick == ues.size() || metric > best_metric) {
                        pick = i;
                        best_metric = metric;
                    }
                }
                break;
            }
        }
        if (pick == ues.size()) break;
        if (trace) {
            GrantRecord rec;
            rec.tti = tti;
            rec.slice = slice;
            rec.policy = policy;
            rec.prb_index = prb;
            rec.ue_id = ues[pick].ue_id;
            for (size_t i = 0; i < ues.size(); ++i)
                if (backlogged(i))
                    rec.backlogged.push_back({ues[i].ue_id, ues[i].rate_bits_per_prb,
                                              ues[i].ewma_tput_bps, demand[i]});
            trace->push_back(std::move(rec));
        }
        grants[pick] += 1;
        demand[pick] -= static_cast<double>(ues[pick].rate_bits_per_prb) / 8.0;
    }
    return grants;
}

World::World(const ScenarioParams& params) : params_(params) {
    if (!is_feasible(params.initial_allocation))
        throw std::invalid_argument("initial allocation is not a feasible table row");
    allocation_ = params.initial_allocation;
    scheds_ = params.initial_scheds;
    per_ue_traffic_ = params.traffic;
    per_ue_traffic_.embb_bps /= std::max(1, slice_at(params.ue_counts, SliceId::Embb));
    per_ue_traffic_.mmtc_bps /= std::max(1, slice_at(params.ue_counts, SliceId::Mmtc));
    per_ue_traffic_.urllc_bps /= std::max(1, slice_at(params.ue_counts, SliceId::Urllc));

    Rng root(params.seed);
    Rng placement = root.fork(0x706c6163);  // placement stream
    int ue_id = 0;
    for (SliceId s : all_slices()) {
        const int count = slice_at(params.ue_counts, s);
        for (int i = 0; i < count; ++i) {
            UeState ue;
            ue.ue_id = ue_id++;
            ue.slice = s;
            ue.speed_mps = params.speed_mps;
            double x, y;
            do {
                x = (2.0 * placement.next_double() - 1.0) * params.radius_m;
                y = (2.0 * placement.next_double() - 1.0) * params.radius_m;
            } while (x * x + y * y > params.radius_m * params.radius_m);
            ue.pos_x_m = x;
            ue.pos_y_m = y;
            ue.waypoint_x_m = x;
            ue.waypoint_y_m = y;
            ues_.push_back(ue);
        }
    }
    for (const auto& ue : ues_) {
        arrival_rng_.push_back(root.fork(0x61720000ull + static_cast<uint64_t>(ue.ue_id)));
        fading_rng_.push_back(root.fork(0x66610000ull + static_cast<uint64_t>(ue.ue_id)));
        mobility_rng_.push_back(root.fork(0x6d6f0000ull + static_cast<uint64_t>(ue.ue_id)));
    }
}

bool World::apply_slicing(const SlicingAllocation& a) {
    if (!is_feasible(a)) {
        ++rejected_controls_;
        return false;
    }
    allocation_ = a;
    return true;
}

void World::apply_scheds(const SchedProfileMap& m) { scheds_ = m; }

void World::apply_sched(SliceId s, SchedPolicy p) { scheds_[s] = p; }

TtiStats World::step_tti() {
    now_ms_ += kTtiMs;
    TtiStats stats;

    for (size_t i = 0; i < ues_.size(); ++i) {
        auto& ue = ues_[i];
        update_mobility(ue, params_.radius_m, kTtiMs, mobility_rng_[i]);
        uint64_t arrived = generate_arrivals(per_ue_traffic_, ue, kTtiMs, arrival_rng_[i]);
        ue.cum_arrived += arrived;
        if (params_.buffer_cap_bytes > 0) {
            const uint64_t room = params_.buffer_cap_bytes - std::min(params_.buffer_cap_bytes, ue.buffer_bytes);
            const uint64_t dropped = arrived - std::min(arrived, room);
            ue.cum_dropped += dropped;
            arrived -= dropped;
        }
        ue.buffer_bytes += arrived;
        slice_at(stats.arrived_bytes, ue.slice) += arrived;
    }

    for (SliceId s : all_slices()) {
        std::vector<size_t> members;
        std::vector<SchedUe> sched_in;
        for (size_t i = 0; i < ues_.size(); ++i) {
            if (ues_[i].slice != s) continue;
            members.push_back(i);
            SchedUe su;
            su.ue_id = ues_[i].ue_id;
            su.buffer_bytes = ues_[i].buffer_bytes;
            su.rate_bits_per_prb = per_prb_rate(ues_[i], params_.fading, fading_rng_[i]);
            su.ewma_tput_bps = ues_[i].ewma_tput_bps;
            sched_in.push_back(su);
        }
        const int budget = allocation_[s];

        for (const auto& su : sched_in) {
            const uint64_t req =
                (su.buffer_bytes * 8 + su.rate_bits_per_prb - 1) / su.rate_bits_per_prb;
            slice_at(stats.requested_prbs, s) +=
                std::min<uint64_t>(req, static_cast<uint64_t>(kTotalPrbs));
        }

        auto grants = schedule_slice(scheds_[s], sched_in, budget,
                                     rr_cursor_[static_cast<int>(s)], trace_, now_ms_, s);

        for (size_t k = 0; k < members.size(); ++k) {
            auto& ue = ues_[members[k]];
            const uint64_t capacity_bytes =
                static_cast<uint64_t>(grants[k]) * sched_in[k].rate_bits_per_prb / 8;
            const uint64_t served = std::min(ue.buffer_bytes, capacity_bytes);
            const uint64_t pkts_before = ue.cum_served / kPacketBytes;
            ue.buffer_bytes -= served;
            ue.cum_served += served;
            slice_at(stats.served_bytes, s) += served;
            slice_at(stats.granted_prbs, s) += static_cast<uint64_t>(grants[k]);
            slice_at(totals_.served_pkts, s) += ue.cum_served / kPacketBytes - pkts_before;
            const double tti_rate_bps = static_cast<double>(served) * 8.0 * 1000.0 / kTtiMs;
            ue.ewma_tput_bps = (1.0 - kPfEwmaBeta) * ue.ewma_tput_bps + kPfEwmaBeta * tti_rate_bps;
        }
    }

    for (SliceId s : all_slices()) {
        slice_at(totals_.served_bytes, s) += slice_at(stats.served_bytes, s);
        slice_at(totals_.granted_prbs, s) += slice_at(stats.granted_prbs, s);
        slice_at(totals_.requested_prbs, s) += slice_at(stats.requested_prbs, s);
    }
    return stats;
}

std::array<KpmSample, 3> World::sample_kpm(const SliceTotals& from, int64_t window_ms) const {
    if (window_ms <= 0) throw std::invalid_argument("sample_kpm: empty window");
    std::array<KpmSample, 3> out;
    for (SliceId s : all_slices()) {
        KpmSample& k = slice_at(out, s);
        k.window_end_ms = now_ms_;
        k.slice = s;
        const uint64_t served = slice_at(totals_.served_bytes, s) - slice_at(from.served_bytes, s);
        k.dl_brate_mbps =
            static_cast<double>(served) * 8.0 / (static_cast<double>(window_ms) * 1000.0);
        k.dl_tx_pkts = slice_at(totals_.served_pkts, s) - slice_at(from.served_pkts, s);
        k.granted_prbs = slice_at(totals_.granted_prbs, s) - slice_at(from.granted_prbs, s);
        k.requested_prbs = slice_at(totals_.requested_prbs, s) - slice_at(from.requested_prbs, s);
        uint64_t buf = 0;
        for (const auto& ue : ues_)
            if (ue.slice == s) buf += ue.buffer_bytes;
        k.dl_buffer_bytes = buf;
    }
    return out;
}

bool World::conservation_holds() const {
    for (const auto& ue : ues_)
        if (ue.cum_arrived != ue.cum_served + ue.cum_dropped + ue.buffer_bytes) return false;
    return true;
}

}  // namespace ranlab::sim
