#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ranlab/experiment.hpp"

namespace py = pybind11;
using namespace ranlab;

namespace {

py::dict directive_to_dict(const e2::ControlDirective& d) {
    py::dict out;
    if (d.slicing) {
        py::list prbs;
        for (int v : d.slicing->prbs) prbs.append(v);
        out["slicing"] = prbs;
    }
    if (d.sched) {
        py::dict sched;
        if (d.sched->single_slice) {
            sched[py::str(std::string(slice_name(d.sched->slice)))] =
                std::string(sim::sched_policy_name(d.sched->policy));
        } else {
            for (SliceId s : all_slices())
                sched[py::str(std::string(slice_name(s)))] =
                    std::string(sim::sched_policy_name(d.sched->map[s]));
        }
        out["sched"] = sched;
    }
    return out;
}

py::dict sample_to_dict(const KpmSample& s) {
    py::dict d;
    d["window_end_ms"] = s.window_end_ms;
    d["slice"] = std::string(slice_name(s.slice));
    d["dl_buffer_bytes"] = s.dl_buffer_bytes;
    d["dl_brate_mbps"] = s.dl_brate_mbps;
    d["dl_tx_pkts"] = s.dl_tx_pkts;
    d["granted_prbs"] = s.granted_prbs;
    d["requested_prbs"] = s.requested_prbs;
    return d;
}

std::set<intent::ActionKind> kinds_from_list(const std::vector<std::string>& kinds) {
    std::set<intent::ActionKind> set;
    for (const auto& k : kinds) {
        if (k == "scheduling")
            set.insert(intent::ActionKind::Scheduling);
        else if (k == "ran_slicing")
            set.insert(intent::ActionKind::RanSlicing);
        else
            throw std::invalid_argument("unknown action kind: " + k);
    }
    return set;
}

}  // namespace

PYBIND11_MODULE(_ranlab, m) {
    m.doc() = "RAN slicing control laboratory bindings";

    m.def(
        "feasible_allocations",
        [] {
            py::list out;
            for (const auto& row : sim::feasible_allocations()) {
                py::list triple;
                for (int v : row.prbs) triple.append(v);
                out.append(triple);
            }
            return out;
        },
        "The 16 feasible PRB splits in canonical row order");

    m.def(
        "build_action_space",
        [](const std::vector<std::string>& kinds) {
            const auto space = intent::build_action_space(kinds_from_list(kinds));
            py::list out;
            for (const auto& d : space.actions) out.append(directive_to_dict(d));
            return out;
        },
        py::arg("kinds"), "Action directives for the given kinds (16/27/43)");

    m.def(
        "parse_intent",
        [](const std::string& text) {
            const auto spec = intent::parse_intent(text);
            py::dict out;
            py::list slices;
            for (const auto& s : spec.slices) {
                py::dict d;
                d["name"] = std::string(slice_name(s.name));
                py::list rk;
                for (auto k : s.reward_kpis) rk.append(std::string(intent::kpi_name(k)));
                d["reward_KPIs"] = rk;
                py::list ok;
                for (auto k : s.observation_kpis) ok.append(std::string(intent::kpi_name(k)));
                d["observation_KPIs"] = ok;
                slices.append(d);
            }
            out["slices"] = slices;
            out["global_reward_type"] = spec.global_reward_type;
            out["global_reward_weights"] = spec.global_reward_weights;
            py::list kinds;
            if (spec.action_kinds.count(intent::ActionKind::Scheduling))
                kinds.append("scheduling");
            if (spec.action_kinds.count(intent::ActionKind::RanSlicing))
                kinds.append("ran_slicing");
            out["actions"] = kinds;
            return out;
        },
        py::arg("text"));

    m.def(
        "global_reward",
        [](const std::vector<double>& rewards, const std::vector<double>& weights) {
            return intent::global_reward(rewards, weights);
        },
        py::arg("slice_rewards"), py::arg("weights"));
    m.def("prb_ratio", &intent::prb_ratio, py::arg("granted"), py::arg("requested"));
    m.def(
        "derive_weight",
        [](double priority, double scale_ref, const std::string& direction) {
            return intent::derive_weight(priority, scale_ref,
                                         direction == "minimize"
                                             ? intent::Direction::Minimize
                                             : intent::Direction::Maximize);
        },
        py::arg("priority"), py::arg("scale_ref"), py::arg("direction") = "maximize");
    m.def("default_weights", &intent::default_weights);
    m.def("alternative_weights", &intent::alternative_weights);

    m.def("ppo_clip_term", &drl::ppo_clip_term, py::arg("q"), py::arg("advantage"),
          py::arg("clip_eps"));
    m.def(
        "dqn_td_target",
        [](double reward, double gamma, const std::vector<double>& target_q) {
            const double best = *std::max_element(target_q.begin(), target_q.end());
            return reward + gamma * best;
        },
        py::arg("reward"), py::arg("gamma"), py::arg("target_q"));

    m.def(
        "encode_frame",
        [](uint64_t action_seq, bool accepted) {
            return py::bytes(
                e2::encode_message(e2::E2Message(e2::ControlAck{action_seq, accepted})));
        },
        py::arg("action_seq"), py::arg("accepted"), "Encode a ControlAck frame");
    m.def(
        "decode_frame",
        [](const py::bytes& raw) {
            e2::Decoded decoded;
            std::string detail;
            const std::string buf = raw;
            const auto st = e2::decode_message(buf, decoded, &detail);
            py::dict out;
            out["status"] = std::string(e2::decode_status_name(st));
            out["detail"] = detail;
            out["consumed"] = decoded.consumed;
            return out;
        },
        py::arg("raw"), "Decode status of one frame");

    m.def(
        "run_baseline",
        [](const std::string& scenario_json, const std::string& outdir) {
            const auto scenario = harness::ScenarioConfig::from_json(scenario_json);
            const auto result = harness::run_experiment(scenario, {}, outdir);
            py::dict out;
            out["digest"] = result.digest;
            out["csv_path"] = result.csv_path.string();
            py::dict medians;
            for (const auto& [key, summary] : result.summaries)
                medians[py::str(key)] = summary.median;
            out["medians"] = medians;
            return out;
        },
        py::arg("scenario_json"), py::arg("outdir"),
        "Run an uncontrolled baseline experiment and return its digest and medians");

    m.def(
        "analyze_csv",
        [](const std::string& csv_text, const std::string& kpi, const std::string& slice) {
            const auto s = harness::analyze_csv(csv_text, intent::kpi_from_name(kpi),
                                                slice_from_name(slice));
            py::dict out;
            out["median"] = s.median;
            out["mean"] = s.mean;
            out["count"] = s.count;
            out["cdf"] = s.cdf;
            return out;
        },
        py::arg("csv_text"), py::arg("kpi"), py::arg("slice"));

    m.def("median", [](std::vector<double> v) { return harness::median_of(std::move(v)); });

    m.def(
        "simulate_windows",
        [](uint64_t seed, int profile_id, int windows, int window_ms) {
            sim::ScenarioParams params;
            params.seed = seed;
            params.traffic = sim::TrafficProfile::by_id(profile_id);
            sim::World world(params);
            sim::WindowSampler sampler(world);
            py::list out;
            for (int w = 0; w < windows; ++w) {
                for (int t = 0; t < window_ms; ++t) world.step_tti();
                for (const auto& s : sampler.sample(world)) out.append(sample_to_dict(s));
            }
            return out;
        },
        py::arg("seed") = 1, py::arg("profile_id") = 1, py::arg("windows") = 4,
        py::arg("window_ms") = 250, "Per-slice KPM samples from a default 6-UE deployment");
}
