#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ranlab/kpm.hpp"
#include "ranlab/ran_sim.hpp"

namespace ranlab::e2 {

// Single-slice scheduling directives carry (slice, policy); full-map
// directives replace all three profiles at once.
struct SchedDirective {
    bool single_slice = false;
    SliceId slice = SliceId::Embb;          // valid when single_slice
    sim::SchedPolicy policy = sim::SchedPolicy::RR;  // valid when single_slice
    sim::SchedProfileMap map{};             // valid when !single_slice
    bool operator==(const SchedDirective&) const = default;
};

// At least one field must be present.
struct ControlDirective {
    std::optional<sim::SlicingAllocation> slicing;
    std::optional<SchedDirective> sched;
    bool operator==(const ControlDirective&) const = default;
};

struct Subscribe {
    int64_t du_report_ms = 0;
    int64_t kpm_log_ms = 0;
    bool operator==(const Subscribe&) const = default;
};

struct KpmReport {
    uint64_t report_seq = 0;
    std::vector<KpmSample> samples;
    bool operator==(const KpmReport&) const = default;
};

struct Control {
    uint64_t action_seq = 0;
    ControlDirective directive;
    bool operator==(const Control&) const = default;
};

struct ControlAck {
    uint64_t action_seq = 0;
    bool accepted = false;
    bool operator==(const ControlAck&) const = default;
};

struct ErrorMsg {
    std::string code;
    std::string detail;
    bool operator==(const ErrorMsg&) const = default;
};

using E2Message = std::variant<Subscribe, KpmReport, Control, ControlAck, ErrorMsg>;

// 4-byte big-endian length prefix + canonical (sorted-key) UTF-8 JSON body
// with a "type" discriminator. Equal messages encode to identical bytes.
std::string encode_message(const E2Message& msg);

inline constexpr size_t kMaxFrameBytes = 1u << 20;  // 1 MiB

enum class DecodeStatus { Ok, NeedMoreData, FrameTooLarge, ProtocolError };

std::string_view decode_status_name(DecodeStatus s);

struct Decoded {
    E2Message msg;
    size_t consumed = 0;  // bytes consumed from the front of the buffer
};

// Decodes one frame from the front of `buf`. All failures are non-fatal and
// typed; `detail` (optional) carries diagnostics. On ProtocolError `consumed`
// in `out` is set to the full frame length so callers can skip it.
DecodeStatus decode_message(std::string_view buf, Decoded& out, std::string* detail = nullptr);

// DU-side report batching for one subscription. Windows accumulate at the
// KPM log cadence; a report carries every window since the last one (or only
// the newest when latest_only emulates reporting loss).
class DuReporter {
public:
    DuReporter(int64_t du_report_ms, int64_t kpm_log_ms, bool latest_only = false)
        : du_report_ms_(du_report_ms), kpm_log_ms_(kpm_log_ms), latest_only_(latest_only) {
        if (du_report_ms <= 0 || kpm_log_ms <= 0 || kpm_log_ms > du_report_ms ||
            du_report_ms % kpm_log_ms != 0)
            throw std::invalid_argument("invalid report/log periods");
    }

    int64_t report_period_ms() const { return du_report_ms_; }

    void on_window(std::span<const KpmSample> window) {
        if (latest_only_) pending_.clear();
        pending_.insert(pending_.end(), window.begin(), window.end());
    }

    KpmReport make_report() {
        KpmReport r;
        r.report_seq = next_seq_++;
        r.samples = std::move(pending_);
        pending_.clear();
        return r;
    }

private:
    int64_t du_report_ms_;
    int64_t kpm_log_ms_;
    bool latest_only_;
    uint64_t next_seq_ = 1;
    std::vector<KpmSample> pending_;
};

// Incremental stream reader: frames decode to the same message sequence
// regardless of chunk boundaries.
class FrameReader {
public:
    void append(std::string_view bytes) { buf_.append(bytes.data(), bytes.size()); }

    // Ok: one message extracted. NeedMoreData: wait for more bytes.
    // ProtocolError: the offending frame was skipped, detail in last_error().
    // FrameTooLarge: stream is poisoned; pending() keeps the bad prefix.
    DecodeStatus next(E2Message& out);

    const std::string& last_error() const { return last_error_; }
    size_t pending() const { return buf_.size(); }

private:
    std::string buf_;
    std::string last_error_;
};

}  // namespace ranlab::e2
