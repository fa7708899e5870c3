#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranlab/common.hpp"

namespace ranlab {

// One per-slice measurement window. The currency of the whole system.
struct KpmSample {
    int64_t window_end_ms = 0;
    SliceId slice = SliceId::Embb;
    uint64_t dl_buffer_bytes = 0;   // sum over slice UEs at window end
    double dl_brate_mbps = 0.0;     // slice mean served rate over the window
    uint64_t dl_tx_pkts = 0;        // served 125-byte units over the window
    uint64_t granted_prbs = 0;      // summed over window
    uint64_t requested_prbs = 0;    // summed over window

    bool operator==(const KpmSample&) const = default;
};

// Exact CSV contract: header string, UTF-8, LF line endings.
inline constexpr std::string_view kKpmCsvHeader =
    "ts_ms,slice,dl_buffer_bytes,dl_brate_mbps,dl_tx_pkts,granted_prbs,requested_prbs";

std::string kpm_csv_row(const KpmSample& s);

struct KpmCsvParseError : std::runtime_error {
    KpmCsvParseError(std::string msg, size_t row, std::string column)
        : std::runtime_error(std::move(msg)), row(row), column(std::move(column)) {}
    size_t row;          // 1-based data row index
    std::string column;  // offending column name (empty for header errors)
};

// Parses a full CSV document (header included). Throws KpmCsvParseError on a
// header mismatch or any non-numeric cell, naming row and column.
std::vector<KpmSample> parse_kpm_csv(std::string_view text);

}  // namespace ranlab
