#include "ranlab/e2_proto.hpp"

#include <nlohmann/json.hpp>

namespace ranlab::e2 {

using nlohmann::json;

namespace {

json sample_to_json(const KpmSample& s) {
    return json{{"dl_brate_mbps", s.dl_brate_mbps},
                {"dl_buffer_bytes", s.dl_buffer_bytes},
                {"dl_tx_pkts", s.dl_tx_pkts},
                {"granted_prbs", s.granted_prbs},
                {"requested_prbs", s.requested_prbs},
                {"slice", std::string(slice_name(s.slice))},
                {"window_end_ms", s.window_end_ms}};
}

KpmSample sample_from_json(const json& j) {
    KpmSample s;
    s.dl_brate_mbps = j.at("dl_brate_mbps").get<double>();
    s.dl_buffer_bytes = j.at("dl_buffer_bytes").get<uint64_t>();
    s.dl_tx_pkts = j.at("dl_tx_pkts").get<uint64_t>();
    s.granted_prbs = j.at("granted_prbs").get<uint64_t>();
    s.requested_prbs = j.at("requested_prbs").get<uint64_t>();
    s.slice = slice_from_name(j.at("slice").get<std::string>());
    s.window_end_ms = j.at("window_end_ms").get<int64_t>();
    return s;
}

json directive_to_json(const ControlDirective& d) {
    json j = json::object();
    if (d.slicing) {
        j["slicing"] = json::array({(*d.slicing)[SliceId::Embb], (*d.slicing)[SliceId::Mmtc],
                                    (*d.slicing)[SliceId::Urllc]});
    }
    if (d.sched) {
        json m = json::object();
        if (d.sched->single_slice) {
            m[std::string(slice_name(d.sched->slice))] =
                std::string(sim::sched_policy_name(d.sched->policy));
        } else {
            for (SliceId s : all_slices())
                m[std::string(slice_name(s))] =
                    std::string(sim::sched_policy_name(d.sched->map[s]));
        }
        j["sched"] = m;
    }
    return j;
}

ControlDirective directive_from_json(const json& j) {
    ControlDirective d;
    if (j.contains("slicing")) {
        const auto& arr = j.at("slicing");
        if (!arr.is_array() || arr.size() != 3)
            throw std::invalid_argument("slicing must be a 3-element array");
        sim::SlicingAllocation a;
        for (int i = 0; i < 3; ++i) a.prbs[i] = arr[i].get<int>();
        d.slicing = a;
    }
    if (j.contains("sched")) {
        const auto& m = j.at("sched");
        if (!m.is_object() || m.empty()) throw std::invalid_argument("sched must be an object");
        SchedDirective sd;
        if (m.size() == 3) {
            sd.single_slice = false;
            for (SliceId s : all_slices())
                sd.map[s] = sim::sched_policy_from_name(
                    m.at(std::string(slice_name(s))).get<std::string>());
        } else if (m.size() == 1) {
            sd.single_slice = true;
            const auto it = m.begin();
            sd.slice = slice_from_name(it.key());
            sd.policy = sim::sched_policy_from_name(it.value().get<std::string>());
        } else {
            throw std::invalid_argument("sched must name one slice or all three");
        }
        d.sched = sd;
    }
    if (!d.slicing && !d.sched)
        throw std::invalid_argument("directive must carry slicing and/or sched");
    return d;
}

struct BodyBuilder {
    json operator()(const Subscribe& m) const {
        return json{{"du_report_ms", m.du_report_ms},
                    {"kpm_log_ms", m.kpm_log_ms},
                    {"type", "subscribe"}};
    }
    json operator()(const KpmReport& m) const {
        json samples = json::array();
        for (const auto& s : m.samples) samples.push_back(sample_to_json(s));
        return json{{"report_seq", m.report_seq}, {"samples", samples}, {"type", "kpm_report"}};
    }
    json operator()(const Control& m) const {
        return json{{"action_seq", m.action_seq},
                    {"directive", directive_to_json(m.directive)},
                    {"type", "control"}};
    }
    json operator()(const ControlAck& m) const {
        return json{{"accepted", m.accepted}, {"action_seq", m.action_seq}, {"type", "control_ack"}};
    }
    json operator()(const ErrorMsg& m) const {
        return json{{"code", m.code}, {"detail", m.detail}, {"type", "error"}};
    }
};

}  // namespace

std::string encode_message(const E2Message& msg) {
    const json body = std::visit(BodyBuilder{}, msg);
    const std::string payload = body.dump();  // nlohmann objects keep sorted keys
    std::string out;
    out.reserve(4 + payload.size());
    const uint32_t len = static_cast<uint32_t>(payload.size());
    out.push_back(static_cast<char>((len >> 24) & 0xff));
    out.push_back(static_cast<char>((len >> 16) & 0xff));
    out.push_back(static_cast<char>((len >> 8) & 0xff));
    out.push_back(static_cast<char>(len & 0xff));
    out += payload;
    return out;
}

std::string_view decode_status_name(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::Ok: return "Ok";
        case DecodeStatus::NeedMoreData: return "NeedMoreData";
        case DecodeStatus::FrameTooLarge: return "FrameTooLarge";
        case DecodeStatus::ProtocolError: return "ProtocolError";
    }
    return "?";
}

DecodeStatus decode_message(std::string_view buf, Decoded& out, std::string* detail) {
    auto fail = [&](DecodeStatus st, std::string why, size_t consumed) {
        if (detail) *detail = std::move(why);
        out.consumed = consumed;
        return st;
    };
    if (buf.size() < 4) return fail(DecodeStatus::NeedMoreData, "short prefix", 0);
    const uint32_t len = (static_cast<uint32_t>(static_cast<unsigned char>(buf[0])) << 24) |
                         (static_cast<uint32_t>(static_cast<unsigned char>(buf[1])) << 16) |
                         (static_cast<uint32_t>(static_cast<unsigned char>(buf[2])) << 8) |
                         static_cast<uint32_t>(static_cast<unsigned char>(buf[3]));
    if (len > kMaxFrameBytes)
        return fail(DecodeStatus::FrameTooLarge, "frame length " + std::to_string(len), 0);
    if (buf.size() < 4 + static_cast<size_t>(len))
        return fail(DecodeStatus::NeedMoreData, "incomplete body", 0);

    const std::string_view payload = buf.substr(4, len);
    const size_t frame_len = 4 + static_cast<size_t>(len);
    json body = json::parse(payload, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("type") ||
        !body.at("type").is_string())
        return fail(DecodeStatus::ProtocolError, "malformed JSON body", frame_len);

    const std::string type = body.at("type").get<std::string>();
    try {
        if (type == "subscribe") {
            Subscribe m;
            m.du_report_ms = body.at("du_report_ms").get<int64_t>();
            m.kpm_log_ms = body.at("kpm_log_ms").get<int64_t>();
            out.msg = m;
        } else if (type == "kpm_report") {
            KpmReport m;
            m.report_seq = body.at("report_seq").get<uint64_t>();
            for (const auto& j : body.at("samples")) m.samples.push_back(sample_from_json(j));
            out.msg = m;
        } else if (type == "control") {
            Control m;
            m.action_seq = body.at("action_seq").get<uint64_t>();
            m.directive = directive_from_json(body.at("directive"));
            out.msg = m;
        } else if (type == "control_ack") {
            ControlAck m;
            m.action_seq = body.at("action_seq").get<uint64_t>();
            m.accepted = body.at("accepted").get<bool>();
            out.msg = m;
        } else if (type == "error") {
            ErrorMsg m;
            m.code = body.at("code").get<std::string>();
            m.detail = body.at("detail").get<std::string>();
            out.msg = m;
        } else {
            return fail(DecodeStatus::ProtocolError, "unknown type '" + type + "'", frame_len);
        }
    } catch (const std::exception& e) {
        return fail(DecodeStatus::ProtocolError, std::string("bad fields: ") + e.what(),
                    frame_len);
    }
    out.consumed = frame_len;
    if (detail) detail->clear();
    return DecodeStatus::Ok;
}

DecodeStatus FrameReader::next(E2Message& out) {
    Decoded d;
    std::string detail;
    const DecodeStatus st = decode_message(buf_, d, &detail);
    switch (st) {
        case DecodeStatus::Ok:
            buf_.erase(0, d.consumed);
            out = std::move(d.msg);
            return st;
        case DecodeStatus::ProtocolError:
            buf_.erase(0, d.consumed);  // frame boundary is intact, skip the body
            last_error_ = detail;
            return st;
        case DecodeStatus::FrameTooLarge:
            last_error_ = detail;
            return st;
        case DecodeStatus::NeedMoreData:
            return st;
    }
    return st;
}

}  // namespace ranlab::e2
