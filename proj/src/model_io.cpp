#include "ranlab/model_io.hpp"

#include <cstdio>
#include <cstdlib>

#include <nlohmann/json.hpp>

namespace ranlab::drl {

using nlohmann::json;

namespace {

std::string double_to_decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double decimal_to_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw ModelFormatError("bad decimal value '" + s + "'");
    return v;
}

json mlp_to_json(const Mlp& net) {
    json sizes = json::array();
    for (size_t s : net.sizes()) sizes.push_back(s);
    json acts = json::array();
    for (Activation a : net.activations()) acts.push_back(std::string(activation_name(a)));
    json params = json::array();
    for (double p : net.params()) params.push_back(double_to_decimal(p));
    return json{{"activations", acts}, {"params", params}, {"sizes", sizes}};
}

Mlp mlp_from_json(const json& j) {
    std::vector<size_t> sizes;
    for (const auto& v : j.at("sizes")) sizes.push_back(v.get<size_t>());
    std::vector<Activation> acts;
    for (const auto& v : j.at("activations"))
        acts.push_back(activation_from_name(v.get<std::string>()));
    Mlp net(sizes, acts);
    const auto& params = j.at("params");
    if (params.size() != net.param_count())
        throw ModelFormatError("parameter count mismatch");
    for (size_t i = 0; i < net.param_count(); ++i)
        net.params()[i] = decimal_to_double(params[i].get<std::string>());
    return net;
}

json bounds_to_json(const NormBounds& b) {
    json mins = json::array(), maxs = json::array();
    for (size_t k = 0; k < kWindowKpis; ++k) {
        mins.push_back(double_to_decimal(b.min[k]));
        maxs.push_back(double_to_decimal(b.max[k]));
    }
    return json{{"max", maxs}, {"min", mins}};
}

NormBounds bounds_from_json(const json& j) {
    NormBounds b;
    for (size_t k = 0; k < kWindowKpis; ++k) {
        b.min[k] = decimal_to_double(j.at("min").at(k).get<std::string>());
        b.max[k] = decimal_to_double(j.at("max").at(k).get<std::string>());
    }
    return b;
}

std::string_view action_kind_name(intent::ActionSpaceKind k) {
    switch (k) {
        case intent::ActionSpaceKind::Slicing: return "slicing";
        case intent::ActionSpaceKind::Scheduling: return "scheduling";
        case intent::ActionSpaceKind::Joint: return "joint";
        case intent::ActionSpaceKind::SchedSingleSlice: return "sched_single";
    }
    return "?";
}

intent::ActionSpaceKind action_kind_from_name(std::string_view s) {
    if (s == "slicing") return intent::ActionSpaceKind::Slicing;
    if (s == "scheduling") return intent::ActionSpaceKind::Scheduling;
    if (s == "joint") return intent::ActionSpaceKind::Joint;
    if (s == "sched_single") return intent::ActionSpaceKind::SchedSingleSlice;
    throw ModelFormatError("unknown action kind '" + std::string(s) + "'");
}

}  // namespace

int PolicyModel::infer_greedy(std::span<const double> state) const {
    if (is_ppo()) return std::get<PpoAgent>(agent).act_greedy(state);
    return std::get<DqnAgent>(agent).act_greedy(state);
}

std::string save_model(const PolicyModel& m) {
    json j;
    j["version"] = 1;
    j["action_kind"] = std::string(action_kind_name(m.action_kind));
    if (m.single_slice) j["single_slice"] = std::string(slice_name(*m.single_slice));
    j["n_actions"] = m.n_actions;
    j["state_dim"] = m.state_dim;
    json meta = json::object();
    for (const auto& [k, v] : m.metadata) meta[k] = v;
    j["metadata"] = meta;
    j["encoder"] = json{{"bounds", bounds_to_json(m.encoder.bounds)},
                        {"decoder", mlp_to_json(m.encoder.decoder)},
                        {"net", mlp_to_json(m.encoder.encoder)}};
    if (m.is_ppo()) {
        const auto& a = std::get<PpoAgent>(m.agent);
        j["agent"] = json{{"actor", mlp_to_json(a.actor)},
                          {"critic", mlp_to_json(a.critic)},
                          {"gamma", double_to_decimal(a.cfg.gamma)},
                          {"kind", "ppo"}};
    } else {
        const auto& a = std::get<DqnAgent>(m.agent);
        j["agent"] = json{{"epsilon", double_to_decimal(a.cfg.epsilon)},
                          {"gamma", double_to_decimal(a.cfg.gamma)},
                          {"kind", "dqn"},
                          {"q_net", mlp_to_json(a.q_net)}};
    }
    return std::string(kModelMagic) + j.dump();
}

std::string save_encoder(const EncoderModel& m) {
    const json j{{"encoder", json{{"bounds", bounds_to_json(m.bounds)},
                                  {"decoder", mlp_to_json(m.decoder)},
                                  {"net", mlp_to_json(m.encoder)}}},
                 {"kind", "encoder"},
                 {"version", 1}};
    return std::string(kModelMagic) + j.dump();
}

EncoderModel load_encoder(std::string_view bytes) {
    if (bytes.substr(0, kModelMagic.size()) != kModelMagic)
        throw ModelFormatError("bad magic string");
    json j = json::parse(bytes.substr(kModelMagic.size()), nullptr, false);
    if (j.is_discarded()) throw ModelFormatError("malformed encoder JSON");
    if (j.value("kind", "") != "encoder") throw ModelFormatError("not an encoder container");
    EncoderModel m;
    m.encoder = mlp_from_json(j.at("encoder").at("net"));
    m.decoder = mlp_from_json(j.at("encoder").at("decoder"));
    m.bounds = bounds_from_json(j.at("encoder").at("bounds"));
    return m;
}

PolicyModel load_model(std::string_view bytes) {
    if (bytes.substr(0, kModelMagic.size()) != kModelMagic)
        throw ModelFormatError("bad magic string");
    json j = json::parse(bytes.substr(kModelMagic.size()), nullptr, false);
    if (j.is_discarded()) throw ModelFormatError("malformed model JSON");
    if (j.at("version").get<int>() != 1) throw ModelFormatError("unsupported version");

    PolicyModel m;
    m.action_kind = action_kind_from_name(j.at("action_kind").get<std::string>());
    if (j.contains("single_slice"))
        m.single_slice = slice_from_name(j.at("single_slice").get<std::string>());
    m.n_actions = j.at("n_actions").get<size_t>();
    m.state_dim = j.at("state_dim").get<size_t>();
    for (const auto& [k, v] : j.at("metadata").items()) m.metadata[k] = v.get<std::string>();
    m.encoder.encoder = mlp_from_json(j.at("encoder").at("net"));
    m.encoder.decoder = mlp_from_json(j.at("encoder").at("decoder"));
    m.encoder.bounds = bounds_from_json(j.at("encoder").at("bounds"));

    const json& agent = j.at("agent");
    const std::string kind = agent.at("kind").get<std::string>();
    if (kind == "ppo") {
        PpoAgent a;
        a.actor = mlp_from_json(agent.at("actor"));
        a.critic = mlp_from_json(agent.at("critic"));
        a.cfg.gamma = decimal_to_double(agent.at("gamma").get<std::string>());
        m.agent = std::move(a);
    } else if (kind == "dqn") {
        DqnAgent a{mlp_from_json(agent.at("q_net")), Mlp(),       DqnConfig{},
                   ReplayBuffer(DqnConfig{}.buffer_capacity), {}, 0,
                   0};
        a.cfg.gamma = decimal_to_double(agent.at("gamma").get<std::string>());
        a.cfg.epsilon = decimal_to_double(agent.at("epsilon").get<std::string>());
        a.target_net = a.q_net;
        m.agent = std::move(a);
    } else {
        throw ModelFormatError("unknown agent kind '" + kind + "'");
    }
    return m;
}

}  // namespace ranlab::drl
