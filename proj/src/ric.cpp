#include "ranlab/ric.hpp"

#include <algorithm>
#include <future>

#include <nlohmann/json.hpp>

#include "ranlab/sha256.hpp"

namespace ranlab::ric {

using nlohmann::json;

void TimerSet::validate() const {
    if (du_report_ms <= 0 || kpm_log_ms <= 0 || action_update_ms <= 0)
        throw std::invalid_argument("timer values must be > 0");
    if (kpm_log_ms > du_report_ms)
        throw std::invalid_argument("kpm_log must not exceed du_report");
    if (action_update_ms < kpm_log_ms)
        throw std::invalid_argument("action_update must be >= kpm_log");
    if (du_report_ms % kpm_log_ms != 0)
        throw std::invalid_argument("du_report must be a multiple of kpm_log");
}

TimerSet TimerSet::by_name(std::string_view name) {
    if (name == "set1") return set1();
    if (name == "set2") return set2();
    if (name == "set3") return set3();
    throw std::invalid_argument("unknown timer set: " + std::string(name));
}

bool ControlDomain::overlaps(const ControlDomain& other) const {
    if (kind == DomainKind::Joint || other.kind == DomainKind::Joint) return true;
    const bool this_sched = kind != DomainKind::Slicing;
    const bool other_sched = other.kind != DomainKind::Slicing;
    if (this_sched != other_sched) return false;  // slicing vs sched never overlap
    if (!this_sched) return true;                 // slicing vs slicing
    if (kind == DomainKind::SchedAll || other.kind == DomainKind::SchedAll) return true;
    return slice == other.slice;
}

std::string ControlDomain::to_string() const {
    switch (kind) {
        case DomainKind::Slicing: return "slicing";
        case DomainKind::SchedAll: return "sched";
        case DomainKind::SchedSlice: return "sched:" + std::string(slice_name(*slice));
        case DomainKind::Joint: return "joint";
    }
    return "?";
}

ControlDomain ControlDomain::parse(std::string_view text) {
    if (text == "slicing") return {DomainKind::Slicing, std::nullopt};
    if (text == "sched") return {DomainKind::SchedAll, std::nullopt};
    if (text == "joint") return {DomainKind::Joint, std::nullopt};
    if (text.rfind("sched:", 0) == 0)
        return {DomainKind::SchedSlice, slice_from_name(text.substr(6))};
    throw std::invalid_argument("unknown control domain: " + std::string(text));
}

std::string_view ric_error_name(RicErrorCode c) {
    switch (c) {
        case RicErrorCode::ActionSpaceMismatch: return "ActionSpaceMismatch";
        case RicErrorCode::CorruptModel: return "CorruptModel";
        case RicErrorCode::UnknownIntent: return "UnknownIntent";
        case RicErrorCode::DomainConflict: return "DomainConflict";
    }
    return "?";
}

std::string XappDescriptor::to_json() const {
    json j{{"domain", domain.to_string()},
           {"id", id},
           {"intent_id", intent_id},
           {"model_id", model_id},
           {"timers", json{{"action_update_ms", timers.action_update_ms},
                           {"du_report_ms", timers.du_report_ms},
                           {"kpm_log_ms", timers.kpm_log_ms}}}};
    if (report_period_ms) j["report_period_ms"] = *report_period_ms;
    return j.dump();
}

XappDescriptor XappDescriptor::from_json(std::string_view text) {
    json j = json::parse(text);
    XappDescriptor d;
    d.id = j.at("id").get<std::string>();
    d.model_id = j.at("model_id").get<std::string>();
    d.intent_id = j.at("intent_id").get<std::string>();
    d.domain = ControlDomain::parse(j.at("domain").get<std::string>());
    d.timers.du_report_ms = j.at("timers").at("du_report_ms").get<int64_t>();
    d.timers.kpm_log_ms = j.at("timers").at("kpm_log_ms").get<int64_t>();
    d.timers.action_update_ms = j.at("timers").at("action_update_ms").get<int64_t>();
    if (j.contains("report_period_ms"))
        d.report_period_ms = j.at("report_period_ms").get<int64_t>();
    return d;
}

size_t expected_actions(const ControlDomain& d) {
    switch (d.kind) {
        case DomainKind::Slicing: return 16;
        case DomainKind::SchedAll: return 27;
        case DomainKind::Joint: return 43;
        case DomainKind::SchedSlice: return 3;
    }
    return 0;
}

drl::PolicyModel validate_onboard(std::string_view model_bytes, const ControlDomain& domain) {
    drl::PolicyModel model;
    try {
        model = drl::load_model(model_bytes);
    } catch (const std::exception& e) {
        throw RicError(RicErrorCode::CorruptModel, e.what());
    }
    const size_t expected = expected_actions(domain);
    if (model.n_actions != expected)
        throw RicError(RicErrorCode::ActionSpaceMismatch,
                       "model has " + std::to_string(model.n_actions) + " actions, domain " +
                           domain.to_string() + " needs " + std::to_string(expected));
    if (domain.kind == DomainKind::SchedSlice &&
        (!model.single_slice || *model.single_slice != *domain.slice))
        throw RicError(RicErrorCode::ActionSpaceMismatch,
                       "per-slice model does not target " + std::string(slice_name(*domain.slice)));
    return model;
}

void EventLog::log(int64_t tick, std::string_view session, std::string_view event,
                   std::string_view payload) {
    const json j{{"digest", sha256_hex(payload)},
                 {"event", std::string(event)},
                 {"session", std::string(session)},
                 {"tick", tick}};
    lines_.push_back(j.dump());
}

std::string EventLog::dump() const {
    std::string out;
    for (const auto& l : lines_) {
        out += l;
        out += '\n';
    }
    return out;
}

namespace {

intent::ActionSpace space_for(const drl::PolicyModel& m) {
    switch (m.action_kind) {
        case intent::ActionSpaceKind::Slicing:
            return intent::build_action_space({intent::ActionKind::RanSlicing});
        case intent::ActionSpaceKind::Scheduling:
            return intent::build_action_space({intent::ActionKind::Scheduling});
        case intent::ActionSpaceKind::Joint:
            return intent::build_action_space(
                {intent::ActionKind::RanSlicing, intent::ActionKind::Scheduling});
        case intent::ActionSpaceKind::SchedSingleSlice:
            return intent::build_sched_single_slice_space(*m.single_slice);
    }
    throw std::logic_error("bad action kind");
}

}  // namespace

XappSession::XappSession(XappDescriptor desc, drl::PolicyModel model, EventLog* log)
    : desc_(std::move(desc)), model_(std::move(model)), space_(space_for(model_)), log_(log) {}

std::vector<SliceId> XappSession::observed_slices() const {
    if (desc_.domain.kind == DomainKind::SchedSlice) return {*desc_.domain.slice};
    return {SliceId::Embb, SliceId::Mmtc, SliceId::Urllc};
}

void XappSession::append_window(std::span<const KpmSample> window) {
    for (const auto& s : window) {
        auto& hist = history_[static_cast<int>(s.slice)];
        hist.push_back({static_cast<double>(s.dl_buffer_bytes), s.dl_brate_mbps,
                        static_cast<double>(s.dl_tx_pkts)});
        while (hist.size() > drl::kWindowLen) hist.pop_front();
    }
}

void XappSession::reset_windows(int64_t tick) {
    for (auto& h : history_) h.clear();
    if (log_) log_->log(tick, desc_.id, "window_reset", "seq gap");
}

bool XappSession::warmed_up() const {
    for (SliceId s : observed_slices())
        if (history_[static_cast<int>(s)].size() < drl::kWindowLen) return false;
    return true;
}

std::vector<double> XappSession::build_state() const {
    std::vector<double> state;
    for (SliceId s : observed_slices()) {
        const auto& hist = history_[static_cast<int>(s)];
        drl::KpmWindow raw{};
        for (size_t t = 0; t < drl::kWindowLen; ++t)
            for (size_t k = 0; k < drl::kWindowKpis; ++k)
                raw[t * drl::kWindowKpis + k] = hist[t][k];
        const auto latent = drl::encode_window(model_.encoder, raw);
        state.insert(state.end(), latent.begin(), latent.end());
    }
    return state;
}

std::optional<e2::ControlDirective> XappSession::on_action_tick(int64_t tick) {
    if (!warmed_up()) return std::nullopt;
    const auto state = build_state();
    const int action = model_.infer_greedy(state);
    const e2::ControlDirective directive = space_.actions.at(static_cast<size_t>(action));
    ++directives_emitted;
    if (log_) {
        e2::Control probe{0, directive};
        log_->log(tick, desc_.id, "directive", e2::encode_message(probe));
    }
    return directive;
}

void XappSession::on_rejected(int64_t tick) {
    ++rejected_acks;
    if (log_) log_->log(tick, desc_.id, "control_rejected", "");
}

MergeResult merge_directives(
    std::span<const std::pair<std::string, e2::ControlDirective>> pending) {
    MergeResult out;
    for (const auto& [owner, d] : pending) {
        if (d.slicing) {
            if (out.slicing_owner)
                out.warnings.push_back("slicing overwritten: " + *out.slicing_owner + " -> " +
                                       owner);
            out.directive.slicing = d.slicing;
            out.slicing_owner = owner;
        }
        if (d.sched) {
            if (d.sched->single_slice) {
                const int idx = static_cast<int>(d.sched->slice);
                if (out.sched_owner[idx])
                    out.warnings.push_back("sched:" + std::string(slice_name(d.sched->slice)) +
                                           " overwritten: " + *out.sched_owner[idx] + " -> " +
                                           owner);
                out.sched_owner[idx] = owner;
                if (!out.directive.sched) {
                    out.directive.sched = *d.sched;
                } else if (out.directive.sched->single_slice &&
                           out.directive.sched->slice == d.sched->slice) {
                    out.directive.sched->policy = d.sched->policy;
                } else {
                    // widen to a full map, keeping previously set slices
                    e2::SchedDirective merged;
                    merged.single_slice = false;
                    if (out.directive.sched->single_slice)
                        merged.map[out.directive.sched->slice] = out.directive.sched->policy;
                    else
                        merged.map = out.directive.sched->map;
                    merged.map[d.sched->slice] = d.sched->policy;
                    out.directive.sched = merged;
                }
            } else {
                for (SliceId s : all_slices()) {
                    const int idx = static_cast<int>(s);
                    if (out.sched_owner[idx])
                        out.warnings.push_back("sched:" + std::string(slice_name(s)) +
                                               " overwritten: " + *out.sched_owner[idx] +
                                               " -> " + owner);
                    out.sched_owner[idx] = owner;
                }
                out.directive.sched = *d.sched;
            }
        }
    }
    return out;
}

Ric::Ric(RicOptions opts, EventLog* log) : opts_(opts), log_(log) {}

void Ric::dispatch(std::vector<Xapp> xapps) {
    for (size_t i = 0; i < xapps.size(); ++i)
        for (size_t j = i + 1; j < xapps.size(); ++j)
            if (xapps[i].desc.domain.overlaps(xapps[j].desc.domain))
                throw RicError(RicErrorCode::DomainConflict,
                               xapps[i].desc.id + " and " + xapps[j].desc.id +
                                   " control overlapping domains");

    for (auto& x : xapps) {
        x.desc.timers.validate();
        sessions_.push_back(std::make_unique<XappSession>(std::move(x.desc), std::move(x.model),
                                                          log_));
    }

    // one Subscribe per distinct effective report period
    for (size_t i = 0; i < sessions_.size(); ++i) {
        const auto& d = sessions_[i]->descriptor();
        const int64_t period = d.effective_report_ms();
        auto it = std::find_if(plans_.begin(), plans_.end(), [&](const SubscriptionPlan& p) {
            return p.report_period_ms == period;
        });
        if (it == plans_.end()) {
            plans_.push_back({period, d.timers.kpm_log_ms, {i}});
        } else {
            it->session_indices.push_back(i);
        }
    }
    next_seq_.assign(plans_.size(), 1);
}

void Ric::on_report(size_t sub, const e2::KpmReport& report) {
    if (sub >= plans_.size()) throw std::out_of_range("unknown subscription");
    auto& plan = plans_[sub];
    const bool gap = report.report_seq != next_seq_[sub];
    next_seq_[sub] = report.report_seq + 1;
    if (gap) {
        for (size_t idx : plan.session_indices) sessions_[idx]->reset_windows(-1);
        return;  // no appends until the stream refills after the reset
    }
    // group batched samples into log windows by window_end
    size_t i = 0;
    while (i < report.samples.size()) {
        const int64_t end = report.samples[i].window_end_ms;
        size_t j = i;
        while (j < report.samples.size() && report.samples[j].window_end_ms == end) ++j;
        const std::span<const KpmSample> window(report.samples.data() + i, j - i);
        for (size_t idx : plan.session_indices) sessions_[idx]->append_window(window);
        i = j;
    }
    if (log_)
        log_->log(report.samples.empty() ? -1 : report.samples.back().window_end_ms, "ric",
                  "report", std::to_string(report.report_seq) + ":" + std::to_string(sub));
}

std::optional<e2::Control> Ric::on_tick(int64_t t_ms) {
    std::vector<size_t> due;
    for (size_t i = 0; i < sessions_.size(); ++i)
        if (t_ms % sessions_[i]->descriptor().timers.action_update_ms == 0) due.push_back(i);
    if (due.empty()) return std::nullopt;

    std::vector<std::pair<std::string, e2::ControlDirective>> pending;
    if (opts_.parallel_sessions) {
        std::vector<std::future<std::optional<e2::ControlDirective>>> futures;
        futures.reserve(due.size());
        for (size_t idx : due)
            futures.push_back(std::async(std::launch::async, [this, idx, t_ms] {
                return sessions_[idx]->on_action_tick(t_ms);
            }));
        for (size_t k = 0; k < due.size(); ++k) {
            auto d = futures[k].get();
            if (d) pending.emplace_back(sessions_[due[k]]->descriptor().id, *d);
        }
    } else {
        for (size_t idx : due) {
            auto d = sessions_[idx]->on_action_tick(t_ms);
            if (d) pending.emplace_back(sessions_[idx]->descriptor().id, *d);
        }
    }
    if (pending.empty()) return std::nullopt;

    MergeResult merged = merge_directives(pending);
    if (log_)
        for (const auto& w : merged.warnings) log_->log(t_ms, "ric", "merge_warning", w);

    e2::Control ctrl{++action_seq_, merged.directive};
    inflight_[ctrl.action_seq] = {merged.slicing_owner};
    if (log_) log_->log(t_ms, "ric", "control", e2::encode_message(e2::E2Message(ctrl)));
    return ctrl;
}

void Ric::on_ack(const e2::ControlAck& ack) {
    auto it = inflight_.find(ack.action_seq);
    if (it == inflight_.end()) return;
    if (!ack.accepted && it->second.slicing_owner) {
        for (auto& s : sessions_)
            if (s->descriptor().id == *it->second.slicing_owner) s->on_rejected(-1);
    }
    inflight_.erase(it);
}

}  // namespace ranlab::ric
