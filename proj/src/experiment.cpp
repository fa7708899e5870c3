#include "ranlab/experiment.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "ranlab/sha256.hpp"

namespace ranlab::harness {

using nlohmann::json;
namespace fs = std::filesystem;

void ScenarioConfig::validate() const {
    if (duration_s <= 0) throw std::invalid_argument("duration must be > 0");
    for (SliceId s : all_slices())
        if (slice_at(ue_counts, s) < 1)
            throw std::invalid_argument("each slice needs at least one UE");
    if (radius_m <= 0) throw std::invalid_argument("radius must be > 0");
    if (speed_mps < 0) throw std::invalid_argument("speed must be >= 0");
    timers();  // throws on unknown set
    if (!custom_traffic) sim::TrafficProfile::by_id(traffic_profile_id);
    if (!sim::is_feasible(initial_allocation))
        throw std::invalid_argument("initial allocation is not a feasible row");
}

sim::ScenarioParams ScenarioConfig::sim_params() const {
    sim::ScenarioParams p;
    p.radius_m = radius_m;
    p.ue_counts = ue_counts;
    p.speed_mps = speed_mps;
    p.traffic = custom_traffic ? *custom_traffic : sim::TrafficProfile::by_id(traffic_profile_id);
    p.seed = seed;
    p.fading = fading;
    p.initial_allocation = initial_allocation;
    p.initial_scheds = initial_scheds;
    return p;
}

std::string ScenarioConfig::to_json() const {
    json j{{"duration_s", duration_s},
           {"fading", fading},
           {"initial_allocation", json::array({initial_allocation.prbs[0],
                                               initial_allocation.prbs[1],
                                               initial_allocation.prbs[2]})},
           {"initial_scheds",
            json::array({std::string(sim::sched_policy_name(initial_scheds[SliceId::Embb])),
                         std::string(sim::sched_policy_name(initial_scheds[SliceId::Mmtc])),
                         std::string(sim::sched_policy_name(initial_scheds[SliceId::Urllc]))})},
           {"name", name},
           {"radius_m", radius_m},
           {"seed", seed},
           {"speed_mps", speed_mps},
           {"timer_set", timer_set},
           {"traffic_profile", traffic_profile_id},
           {"ue_counts", json::array({ue_counts[0], ue_counts[1], ue_counts[2]})}};
    if (custom_traffic)
        j["traffic_bps"] = json::array(
            {custom_traffic->embb_bps, custom_traffic->mmtc_bps, custom_traffic->urllc_bps});
    return j.dump(2) + "\n";
}

ScenarioConfig ScenarioConfig::from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("scenario: malformed JSON");
    ScenarioConfig c;
    c.name = j.value("name", std::string("scenario"));
    c.radius_m = j.value("radius_m", 50.0);
    if (j.contains("ue_counts"))
        for (int i = 0; i < 3; ++i) c.ue_counts[i] = j.at("ue_counts").at(i).get<int>();
    c.speed_mps = j.value("speed_mps", 0.0);
    c.traffic_profile_id = j.value("traffic_profile", 1);
    if (j.contains("traffic_bps")) {
        sim::TrafficProfile t;
        t.embb_bps = j.at("traffic_bps").at(0).get<double>();
        t.mmtc_bps = j.at("traffic_bps").at(1).get<double>();
        t.urllc_bps = j.at("traffic_bps").at(2).get<double>();
        c.custom_traffic = t;
    }
    c.timer_set = j.value("timer_set", std::string("set1"));
    c.duration_s = j.value("duration_s", 60.0);
    c.seed = j.value("seed", uint64_t{1});
    c.fading = j.value("fading", false);
    if (j.contains("initial_allocation"))
        for (int i = 0; i < 3; ++i)
            c.initial_allocation.prbs[i] = j.at("initial_allocation").at(i).get<int>();
    if (j.contains("initial_scheds"))
        for (SliceId s : all_slices())
            c.initial_scheds[s] = sim::sched_policy_from_name(
                j.at("initial_scheds").at(static_cast<int>(s)).get<std::string>());
    c.validate();
    return c;
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty selection");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("cdf of empty selection");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        // last occurrence of each distinct value carries F = count<=x / n
        if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
        out.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

KpiSummary summarize(std::vector<double> values) {
    KpiSummary s;
    s.count = values.size();
    s.median = median_of(values);
    double sum = 0.0;
    for (double v : values) sum += v;  // fixed summation order
    s.mean = sum / static_cast<double>(values.size());
    s.cdf = empirical_cdf(std::move(values));
    return s;
}

std::vector<double> kpi_series(std::string_view csv_text, intent::Kpi kpi, SliceId slice) {
    const auto samples = parse_kpm_csv(csv_text);
    std::vector<double> out;
    for (const auto& s : samples) {
        if (s.slice != slice) continue;
        switch (kpi) {
            case intent::Kpi::DlBuffer: out.push_back(static_cast<double>(s.dl_buffer_bytes)); break;
            case intent::Kpi::DlBrate: out.push_back(s.dl_brate_mbps); break;
            case intent::Kpi::DlTxPkts: out.push_back(static_cast<double>(s.dl_tx_pkts)); break;
            case intent::Kpi::PrbRatio:
                out.push_back(intent::prb_ratio(static_cast<double>(s.granted_prbs),
                                                static_cast<double>(s.requested_prbs)));
                break;
        }
    }
    return out;
}

KpiSummary analyze_csv(std::string_view csv_text, intent::Kpi kpi, SliceId slice) {
    auto series = kpi_series(csv_text, kpi, slice);
    if (series.empty()) throw std::invalid_argument("empty selection");
    return summarize(std::move(series));
}

namespace {

// One direction of a transport link.
class ByteChannel {
public:
    virtual ~ByteChannel() = default;
    virtual void write(std::string_view bytes) = 0;
    virtual std::string drain() = 0;
};

class MemChannel : public ByteChannel {
public:
    void write(std::string_view bytes) override { buf_.append(bytes.data(), bytes.size()); }
    std::string drain() override { return std::exchange(buf_, {}); }

private:
    std::string buf_;
};

// AF_UNIX socketpair endpoint; single-threaded co-sim drains every tick so
// short frames never fill the kernel buffer, but partial writes are handled.
class FdChannel : public ByteChannel {
public:
    FdChannel(int write_fd, int read_fd) : wfd_(write_fd), rfd_(read_fd) {}
    void write(std::string_view bytes) override {
        pending_.append(bytes.data(), bytes.size());
        flush();
    }
    std::string drain() override {
        flush();
        std::string out;
        char buf[4096];
        while (true) {
            const ssize_t n = ::recv(rfd_, buf, sizeof buf, MSG_DONTWAIT);
            if (n <= 0) break;
            out.append(buf, static_cast<size_t>(n));
        }
        return out;
    }

private:
    void flush() {
        while (!pending_.empty()) {
            const ssize_t n = ::send(wfd_, pending_.data(), pending_.size(), MSG_DONTWAIT);
            if (n <= 0) break;
            pending_.erase(0, static_cast<size_t>(n));
        }
    }
    int wfd_;
    int rfd_;
    std::string pending_;
};

struct Link {
    std::unique_ptr<ByteChannel> to_gnb;
    std::unique_ptr<ByteChannel> to_ric;
    e2::FrameReader gnb_reader;  // reads to_gnb bytes
    e2::FrameReader ric_reader;  // reads to_ric bytes
    std::vector<int> fds;

    ~Link() {
        for (int fd : fds) ::close(fd);
    }
};

std::unique_ptr<Link> make_link(Transport transport) {
    auto link = std::make_unique<Link>();
    if (transport == Transport::Memory) {
        link->to_gnb = std::make_unique<MemChannel>();
        link->to_ric = std::make_unique<MemChannel>();
        return link;
    }
    int a[2], b[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, a) != 0 ||
        ::socketpair(AF_UNIX, SOCK_STREAM, 0, b) != 0)
        throw std::runtime_error("socketpair failed: " + std::string(strerror(errno)));
    link->fds = {a[0], a[1], b[0], b[1]};
    link->to_gnb = std::make_unique<FdChannel>(a[0], a[1]);
    link->to_ric = std::make_unique<FdChannel>(b[0], b[1]);
    return link;
}

std::vector<e2::E2Message> pump(ByteChannel& ch, e2::FrameReader& reader) {
    reader.append(ch.drain());
    std::vector<e2::E2Message> out;
    while (true) {
        e2::E2Message msg;
        const auto st = reader.next(msg);
        if (st == e2::DecodeStatus::Ok) {
            out.push_back(std::move(msg));
            continue;
        }
        if (st == e2::DecodeStatus::ProtocolError) continue;  // skipped, keep reading
        break;
    }
    return out;
}

void write_text_file(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json summary_to_json(const std::map<std::string, KpiSummary>& summaries) {
    json j = json::object();
    for (const auto& [key, s] : summaries) {
        json cdf = json::array();
        for (const auto& [x, f] : s.cdf) cdf.push_back(json::array({x, f}));
        j[key] = json{{"cdf", cdf}, {"count", s.count}, {"mean", s.mean}, {"median", s.median}};
    }
    return j;
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& scenario, std::vector<LoadedXapp> xapps,
                                const fs::path& outdir, Transport transport,
                                bool parallel_sessions, bool realtime) {
    scenario.validate();
    fs::create_directories(outdir);
    const fs::path csv_path = outdir / "kpm.csv";
    const fs::path log_path = outdir / "events.jsonl";
    const fs::path summary_path = outdir / "summary.json";

    try {
        const ric::TimerSet timers = scenario.timers();
        sim::World world(scenario.sim_params());
        sim::WindowSampler csv_sampler(world);

        ric::EventLog log;
        ric::Ric ric({.parallel_sessions = parallel_sessions}, &log);

        std::vector<ric::Ric::Xapp> to_dispatch;
        to_dispatch.reserve(xapps.size());
        for (auto& x : xapps) to_dispatch.push_back({x.desc, std::move(x.model)});
        const bool controlled = !to_dispatch.empty();
        if (controlled) ric.dispatch(std::move(to_dispatch));

        // one connection per subscription plus one control connection
        std::vector<std::unique_ptr<Link>> sub_links;
        std::vector<e2::DuReporter> reporters;
        std::unique_ptr<Link> ctrl_link;
        if (controlled) {
            for (const auto& plan : ric.subscriptions()) {
                auto link = make_link(transport);
                link->to_gnb->write(e2::encode_message(plan.subscribe()));
                for (auto& msg : pump(*link->to_gnb, link->gnb_reader)) {
                    const auto& sub = std::get<e2::Subscribe>(msg);
                    reporters.emplace_back(sub.du_report_ms, sub.kpm_log_ms);
                }
                sub_links.push_back(std::move(link));
            }
            ctrl_link = make_link(transport);
        }

        std::string csv;
        csv += kKpmCsvHeader;
        csv += '\n';

        const auto duration_ms = static_cast<int64_t>(scenario.duration_s * 1000.0);
        const auto wall_start = std::chrono::steady_clock::now();
        for (int64_t t = 1; t <= duration_ms; ++t) {
            if (realtime)
                std::this_thread::sleep_until(wall_start + std::chrono::milliseconds(t));
            world.step_tti();

            if (t % timers.kpm_log_ms == 0) {
                const auto window = csv_sampler.sample(world);
                for (const auto& s : window) {
                    csv += kpm_csv_row(s);
                    csv += '\n';
                }
                for (auto& r : reporters) r.on_window(window);
            }

            if (controlled) {
                for (size_t i = 0; i < reporters.size(); ++i) {
                    if (t % reporters[i].report_period_ms() != 0) continue;
                    const e2::KpmReport report = reporters[i].make_report();
                    sub_links[i]->to_ric->write(e2::encode_message(e2::E2Message(report)));
                    log.log(t, "du", "report_sent:" + std::to_string(i),
                            std::to_string(report.report_seq));
                }
                for (size_t i = 0; i < sub_links.size(); ++i)
                    for (auto& msg : pump(*sub_links[i]->to_ric, sub_links[i]->ric_reader))
                        ric.on_report(i, std::get<e2::KpmReport>(msg));

                if (auto ctrl = ric.on_tick(t))
                    ctrl_link->to_gnb->write(e2::encode_message(e2::E2Message(*ctrl)));

                for (auto& msg : pump(*ctrl_link->to_gnb, ctrl_link->gnb_reader)) {
                    const auto& ctrl = std::get<e2::Control>(msg);
                    bool accepted = true;
                    if (ctrl.directive.slicing) {
                        const bool ok = world.apply_slicing(*ctrl.directive.slicing);
                        accepted = accepted && ok;
                        log.log(t, "gnb", ok ? "slicing_applied" : "slicing_rejected",
                                e2::encode_message(msg));
                    }
                    if (ctrl.directive.sched) {
                        if (ctrl.directive.sched->single_slice)
                            world.apply_sched(ctrl.directive.sched->slice,
                                              ctrl.directive.sched->policy);
                        else
                            world.apply_scheds(ctrl.directive.sched->map);
                        log.log(t, "gnb", "sched_applied", e2::encode_message(msg));
                    }
                    ctrl_link->to_ric->write(e2::encode_message(
                        e2::E2Message(e2::ControlAck{ctrl.action_seq, accepted})));
                }
                for (auto& msg : pump(*ctrl_link->to_ric, ctrl_link->ric_reader))
                    ric.on_ack(std::get<e2::ControlAck>(msg));
            }
        }

        if (!world.conservation_holds())
            throw std::runtime_error("byte conservation violated");

        ExperimentResult result;
        result.csv_path = csv_path;
        result.event_log_path = log_path;
        result.summary_path = summary_path;
        result.digest = sha256_hex(csv);
        for (SliceId s : all_slices())
            for (intent::Kpi k : {intent::Kpi::DlBrate, intent::Kpi::DlTxPkts,
                                  intent::Kpi::DlBuffer, intent::Kpi::PrbRatio}) {
                const std::string key =
                    std::string(slice_name(s)) + "/" + std::string(intent::kpi_name(k));
                result.summaries[key] = analyze_csv(csv, k, s);
            }

        write_text_file(csv_path, csv);
        write_text_file(log_path, log.dump());
        json summary{{"digest", result.digest},
                     {"scenario", scenario.name},
                     {"summaries", summary_to_json(result.summaries)}};
        write_text_file(summary_path, summary.dump(2) + "\n");
        return result;
    } catch (...) {
        // partial outputs removed on failure
        std::error_code ec;
        fs::remove(csv_path, ec);
        fs::remove(log_path, ec);
        fs::remove(summary_path, ec);
        throw;
    }
}

}  // namespace ranlab::harness
