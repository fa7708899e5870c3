#include "ranlab/kpm.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace ranlab {

std::string kpm_csv_row(const KpmSample& s) {
    char brate[64];
    std::snprintf(brate, sizeof brate, "%.9g", s.dl_brate_mbps);
    std::string row;
    row += std::to_string(s.window_end_ms);
    row += ',';
    row += slice_name(s.slice);
    row += ',';
    row += std::to_string(s.dl_buffer_bytes);
    row += ',';
    row += brate;
    row += ',';
    row += std::to_string(s.dl_tx_pkts);
    row += ',';
    row += std::to_string(s.granted_prbs);
    row += ',';
    row += std::to_string(s.requested_prbs);
    return row;
}

namespace {

const char* kColumns[] = {"ts_ms",       "slice",        "dl_buffer_bytes", "dl_brate_mbps",
                          "dl_tx_pkts",  "granted_prbs", "requested_prbs"};

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

uint64_t parse_u64(std::string_view cell, size_t row, const char* col) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw KpmCsvParseError("non-numeric cell '" + std::string(cell) + "'", row, col);
    return v;
}

double parse_double(std::string_view cell, size_t row, const char* col) {
    std::string tmp(cell);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty())
        throw KpmCsvParseError("non-numeric cell '" + tmp + "'", row, col);
    return v;
}

}  // namespace

std::vector<KpmSample> parse_kpm_csv(std::string_view text) {
    std::vector<KpmSample> out;
    size_t line_start = 0;
    size_t row_index = 0;
    bool saw_header = false;
    while (line_start <= text.size()) {
        size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = text.substr(line_start, line_end - line_start);
        line_start = line_end + 1;
        if (line.empty() && line_start > text.size()) break;
        if (!saw_header) {
            if (line != kKpmCsvHeader)
                throw KpmCsvParseError("header mismatch, got '" + std::string(line) + "'", 0,
                                       "header");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        ++row_index;
        auto cells = split_line(line);
        if (cells.size() != std::size(kColumns))
            throw KpmCsvParseError("expected 7 columns, got " + std::to_string(cells.size()),
                                   row_index, "");
        KpmSample s;
        s.window_end_ms = static_cast<int64_t>(parse_u64(cells[0], row_index, kColumns[0]));
        try {
            s.slice = slice_from_name(cells[1]);
        } catch (const std::invalid_argument&) {
            throw KpmCsvParseError("unknown slice '" + std::string(cells[1]) + "'", row_index,
                                   kColumns[1]);
        }
        s.dl_buffer_bytes = parse_u64(cells[2], row_index, kColumns[2]);
        s.dl_brate_mbps = parse_double(cells[3], row_index, kColumns[3]);
        s.dl_tx_pkts = parse_u64(cells[4], row_index, kColumns[4]);
        s.granted_prbs = parse_u64(cells[5], row_index, kColumns[5]);
        s.requested_prbs = parse_u64(cells[6], row_index, kColumns[6]);
        out.push_back(s);
    }
    if (!saw_header) throw KpmCsvParseError("empty document", 0, "header");
    return out;
}

}  // namespace ranlab
