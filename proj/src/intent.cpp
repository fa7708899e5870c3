#include "ranlab/intent.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace ranlab::intent {

using nlohmann::json;

std::string_view kpi_name(Kpi k) {
    switch (k) {
        case Kpi::DlBuffer: return "dl_buffer";
        case Kpi::DlBrate: return "dl_brate";
        case Kpi::DlTxPkts: return "dl_tx_pkts";
        case Kpi::PrbRatio: return "prb_ratio";
    }
    throw std::logic_error("bad Kpi");
}

Kpi kpi_from_name(std::string_view name) {
    if (name == "dl_buffer") return Kpi::DlBuffer;
    if (name == "dl_brate") return Kpi::DlBrate;
    if (name == "dl_tx_pkts") return Kpi::DlTxPkts;
    if (name == "prb_ratio") return Kpi::PrbRatio;
    throw IntentError(IntentErrorCode::UnknownKpi, std::string(name));
}

std::string_view intent_error_name(IntentErrorCode c) {
    switch (c) {
        case IntentErrorCode::MalformedJson: return "MalformedJson";
        case IntentErrorCode::MissingField: return "MissingField";
        case IntentErrorCode::BadFieldType: return "BadFieldType";
        case IntentErrorCode::UnknownSlice: return "UnknownSlice";
        case IntentErrorCode::DuplicateSlice: return "DuplicateSlice";
        case IntentErrorCode::UnknownReward: return "UnknownReward";
        case IntentErrorCode::UnknownKpi: return "UnknownKpi";
        case IntentErrorCode::EmptyRewardKpis: return "EmptyRewardKpis";
        case IntentErrorCode::UnknownActionKind: return "UnknownActionKind";
        case IntentErrorCode::EmptyActions: return "EmptyActions";
        case IntentErrorCode::WeightMismatch: return "WeightMismatch";
    }
    return "?";
}

namespace {

// Pre-configured per-slice observation presets used when observation_KPIs is
// omitted; mirrors the shipped slice configurations.
std::vector<Kpi> default_observation(SliceId s) {
    switch (s) {
        case SliceId::Embb: return {Kpi::DlBuffer, Kpi::DlTxPkts};
        case SliceId::Mmtc: return {Kpi::DlBrate, Kpi::DlTxPkts};
        case SliceId::Urllc: return {Kpi::DlBuffer, Kpi::DlBrate};
    }
    return {};
}

std::pair<RewardPrimitive, Direction> reward_from_name(std::string_view name,
                                                       const ParseOptions& opts) {
    if (name == "MaxAverageReward") return {RewardPrimitive::MaxAverage, Direction::Maximize};
    if (name == "MaxElemReward") return {RewardPrimitive::MaxElem, Direction::Maximize};
    if (name == "MaxPrbRatioReward") return {RewardPrimitive::MaxPrbRatio, Direction::Maximize};
    if (opts.accept_min_primitives) {
        if (name == "MinAverageReward") return {RewardPrimitive::MaxAverage, Direction::Minimize};
        if (name == "MinElemReward") return {RewardPrimitive::MaxElem, Direction::Minimize};
    }
    throw IntentError(IntentErrorCode::UnknownReward, std::string(name));
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw IntentError(IntentErrorCode::MissingField, key);
    return j.at(key);
}

std::vector<Kpi> parse_kpi_list(const json& j, const char* field) {
    if (!j.is_array()) throw IntentError(IntentErrorCode::BadFieldType, field);
    std::vector<Kpi> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw IntentError(IntentErrorCode::BadFieldType, field);
        out.push_back(kpi_from_name(v.get<std::string>()));
    }
    return out;
}

}  // namespace

IntentSpec parse_intent(std::string_view text, const ParseOptions& opts) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded())
        throw IntentError(IntentErrorCode::MalformedJson, "not valid JSON");
    if (!root.is_object()) throw IntentError(IntentErrorCode::BadFieldType, "document root");
    const json& in = require(root, "intent");
    if (!in.is_object()) throw IntentError(IntentErrorCode::BadFieldType, "intent");

    IntentSpec spec;

    const json& slices = require(in, "slices");
    if (!slices.is_array() || slices.empty() || slices.size() > 3)
        throw IntentError(IntentErrorCode::BadFieldType, "slices must be an array of 1..3");
    for (const auto& js : slices) {
        SliceIntent si;
        const json& name = require(js, "name");
        if (!name.is_string()) throw IntentError(IntentErrorCode::BadFieldType, "slices[].name");
        try {
            si.name = slice_from_name(name.get<std::string>());
        } catch (const std::invalid_argument&) {
            throw IntentError(IntentErrorCode::UnknownSlice, name.get<std::string>());
        }
        for (const auto& prev : spec.slices)
            if (prev.name == si.name)
                throw IntentError(IntentErrorCode::DuplicateSlice,
                                  std::string(slice_name(si.name)));
        const json& reward = require(js, "reward");
        if (!reward.is_string())
            throw IntentError(IntentErrorCode::BadFieldType, "slices[].reward");
        std::tie(si.reward, si.direction) = reward_from_name(reward.get<std::string>(), opts);

        si.reward_kpis = parse_kpi_list(require(js, "reward_KPIs"), "reward_KPIs");
        if (si.reward_kpis.empty())
            throw IntentError(IntentErrorCode::EmptyRewardKpis,
                              std::string(slice_name(si.name)));
        if (js.contains("observation_KPIs"))
            si.observation_kpis = parse_kpi_list(js.at("observation_KPIs"), "observation_KPIs");
        else
            si.observation_kpis = default_observation(si.name);
        spec.slices.push_back(std::move(si));
    }

    const json& actions = require(in, "actions");
    if (!actions.is_array()) throw IntentError(IntentErrorCode::BadFieldType, "actions");
    for (const auto& a : actions) {
        if (!a.is_string()) throw IntentError(IntentErrorCode::BadFieldType, "actions[]");
        const std::string s = a.get<std::string>();
        if (s == "scheduling")
            spec.action_kinds.insert(ActionKind::Scheduling);
        else if (s == "ran_slicing")
            spec.action_kinds.insert(ActionKind::RanSlicing);
        else
            throw IntentError(IntentErrorCode::UnknownActionKind, s);
    }
    if (spec.action_kinds.empty())
        throw IntentError(IntentErrorCode::EmptyActions, "actions array is empty");

    const json& grt = require(in, "global_reward_type");
    if (!grt.is_string())
        throw IntentError(IntentErrorCode::BadFieldType, "global_reward_type");
    spec.global_reward_type = grt.get<std::string>();

    const json& weights = require(in, "global_reward_weights");
    if (!weights.is_array())
        throw IntentError(IntentErrorCode::BadFieldType, "global_reward_weights");
    for (const auto& w : weights) {
        if (!w.is_number())
            throw IntentError(IntentErrorCode::BadFieldType, "global_reward_weights[]");
        spec.global_reward_weights.push_back(w.get<double>());
    }
    if (spec.global_reward_weights.size() != spec.slices.size())
        throw IntentError(IntentErrorCode::WeightMismatch,
                          std::to_string(spec.global_reward_weights.size()) + " weights for " +
                              std::to_string(spec.slices.size()) + " slices");
    return spec;
}

ActionSpace build_action_space(const std::set<ActionKind>& kinds, int total_prbs) {
    if (kinds.empty()) throw IntentError(IntentErrorCode::EmptyActions, "no action kinds");
    if (total_prbs != kTotalPrbs)
        throw std::invalid_argument("no feasible-allocation rule for total_prbs = " +
                                    std::to_string(total_prbs));
    const bool slicing = kinds.count(ActionKind::RanSlicing) > 0;
    const bool sched = kinds.count(ActionKind::Scheduling) > 0;

    ActionSpace space;
    if (slicing && sched)
        space.kind = ActionSpaceKind::Joint;
    else if (slicing)
        space.kind = ActionSpaceKind::Slicing;
    else
        space.kind = ActionSpaceKind::Scheduling;

    if (slicing) {
        for (const auto& row : sim::feasible_allocations()) {
            e2::ControlDirective d;
            d.slicing = row;
            space.actions.push_back(d);
        }
    }
    if (sched) {
        static constexpr sim::SchedPolicy order[] = {sim::SchedPolicy::RR, sim::SchedPolicy::WF,
                                                     sim::SchedPolicy::PF};
        for (auto e : order)
            for (auto m : order)
                for (auto u : order) {
                    e2::ControlDirective d;
                    e2::SchedDirective sd;
                    sd.single_slice = false;
                    sd.map[SliceId::Embb] = e;
                    sd.map[SliceId::Mmtc] = m;
                    sd.map[SliceId::Urllc] = u;
                    d.sched = sd;
                    space.actions.push_back(d);
                }
    }
    return space;
}

ActionSpace build_sched_single_slice_space(SliceId s) {
    ActionSpace space;
    space.kind = ActionSpaceKind::SchedSingleSlice;
    space.single_slice = s;
    for (auto p : {sim::SchedPolicy::RR, sim::SchedPolicy::WF, sim::SchedPolicy::PF}) {
        e2::ControlDirective d;
        e2::SchedDirective sd;
        sd.single_slice = true;
        sd.slice = s;
        sd.policy = p;
        d.sched = sd;
        space.actions.push_back(d);
    }
    return space;
}

double slice_reward(RewardPrimitive p, std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("slice_reward: empty value window");
    switch (p) {
        case RewardPrimitive::MaxAverage: {
            double sum = 0.0;
            for (double v : values) sum += v;
            return sum / static_cast<double>(values.size());
        }
        case RewardPrimitive::MaxElem:
            return *std::max_element(values.begin(), values.end());
        case RewardPrimitive::MaxPrbRatio:
            throw std::invalid_argument("MaxPrbRatioReward needs granted/requested sums");
    }
    throw std::logic_error("bad RewardPrimitive");
}

double prb_ratio(double granted_sum, double requested_sum) {
    if (requested_sum <= 0.0) return 1.0;
    return std::clamp(granted_sum / requested_sum, 0.0, 1.0);
}

double reward_from_window(const SliceIntent& si, const SliceWindow& w) {
    if (w.samples.empty()) throw std::invalid_argument("reward_from_window: empty window");
    if (si.reward == RewardPrimitive::MaxPrbRatio) {
        double granted = 0.0, requested = 0.0;
        for (const auto& s : w.samples) {
            granted += static_cast<double>(s.granted_prbs);
            requested += static_cast<double>(s.requested_prbs);
        }
        return prb_ratio(granted, requested);
    }
    std::vector<double> values;
    for (Kpi k : si.reward_kpis) {
        for (const auto& s : w.samples) {
            switch (k) {
                case Kpi::DlBuffer: values.push_back(static_cast<double>(s.dl_buffer_bytes)); break;
                case Kpi::DlBrate: values.push_back(s.dl_brate_mbps); break;
                case Kpi::DlTxPkts: values.push_back(static_cast<double>(s.dl_tx_pkts)); break;
                case Kpi::PrbRatio:
                    values.push_back(prb_ratio(static_cast<double>(s.granted_prbs),
                                               static_cast<double>(s.requested_prbs)));
                    break;
            }
        }
    }
    return slice_reward(si.reward, values);
}

double global_reward(std::span<const double> slice_rewards, std::span<const double> weights) {
    if (slice_rewards.size() != weights.size())
        throw std::invalid_argument("global_reward: length mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) sum += weights[i] * slice_rewards[i];
    return sum;
}

double derive_weight(double priority, double scale_ref, Direction dir) {
    if (scale_ref <= 0.0) throw std::invalid_argument("derive_weight: scale_ref must be > 0");
    const double w = priority / scale_ref;
    return dir == Direction::Minimize ? -w : w;
}

std::vector<double> default_weights() { return {72.0440333, 0.229357798, -0.00005}; }
std::vector<double> alternative_weights() { return {72.0440333, 1.5, -0.00005}; }

std::vector<double> weights_by_name(std::string_view name) {
    if (name == "default") return default_weights();
    if (name == "alternative") return alternative_weights();
    throw std::invalid_argument("unknown weight configuration: " + std::string(name));
}

}  // namespace ranlab::intent
