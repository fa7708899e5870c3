#include "ranlab/catalog.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ranlab/sha256.hpp"

namespace ranlab::cat {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view kind_name(Kind k) {
    switch (k) {
        case Kind::Dataset: return "dataset";
        case Kind::Model: return "model";
        case Kind::Intent: return "intent";
        case Kind::Xapp: return "xapp";
    }
    return "?";
}

Kind kind_from_name(std::string_view s) {
    if (s == "dataset") return Kind::Dataset;
    if (s == "model") return Kind::Model;
    if (s == "intent") return Kind::Intent;
    if (s == "xapp") return Kind::Xapp;
    throw CatalogError(CatalogErrorCode::BadId, "unknown kind '" + std::string(s) + "'");
}

std::string_view catalog_error_name(CatalogErrorCode c) {
    switch (c) {
        case CatalogErrorCode::NotFound: return "NotFound";
        case CatalogErrorCode::DigestMismatch: return "DigestMismatch";
        case CatalogErrorCode::Conflict: return "Conflict";
        case CatalogErrorCode::BadId: return "BadId";
        case CatalogErrorCode::SchemaError: return "SchemaError";
        case CatalogErrorCode::BadCell: return "BadCell";
        case CatalogErrorCode::IoError: return "IoError";
    }
    return "?";
}

namespace {

const char* kind_dir(Kind k) {
    switch (k) {
        case Kind::Dataset: return "datasets";
        case Kind::Model: return "models";
        case Kind::Intent: return "intents";
        case Kind::Xapp: return "xapps";
    }
    return "?";
}

bool id_well_formed(const std::string& id) {
    if (id.empty() || id.size() > 128) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
               c == '.';
    });
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CatalogError(CatalogErrorCode::IoError, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw CatalogError(CatalogErrorCode::IoError, "cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CatalogError(CatalogErrorCode::IoError, "short write " + p.string());
}

// Exclusive advisory lock held for the duration of an index mutation.
class IndexLock {
public:
    explicit IndexLock(const fs::path& root) {
        fd_ = ::open((root / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ >= 0) ::flock(fd_, LOCK_EX);
    }
    ~IndexLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

}  // namespace

Catalog::Catalog(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_);
    for (Kind k : {Kind::Dataset, Kind::Model, Kind::Intent, Kind::Xapp})
        fs::create_directories(root_ / kind_dir(k));
    load_index();
}

void Catalog::load_index() {
    entries_.clear();
    const fs::path index = root_ / "index.json";
    if (!fs::exists(index)) return;
    json j = json::parse(read_file(index), nullptr, false);
    if (j.is_discarded())
        throw CatalogError(CatalogErrorCode::IoError, "corrupt index.json");
    next_created_ = j.value("next_created", uint64_t{1});
    for (const auto& [key, je] : j.at("entries").items()) {
        Entry e;
        e.id = je.at("id").get<std::string>();
        e.kind = kind_from_name(je.at("kind").get<std::string>());
        e.path = je.at("path").get<std::string>();
        e.digest = je.at("digest").get<std::string>();
        e.created = je.at("created").get<uint64_t>();
        for (const auto& [mk, mv] : je.at("metadata").items())
            e.metadata[mk] = mv.get<std::string>();
        entries_[key] = e;
    }
}

void Catalog::save_index() const {
    json entries = json::object();
    for (const auto& [key, e] : entries_) {
        json meta = json::object();
        for (const auto& [mk, mv] : e.metadata) meta[mk] = mv;
        entries[key] = json{{"created", e.created},
                            {"digest", e.digest},
                            {"id", e.id},
                            {"kind", std::string(kind_name(e.kind))},
                            {"metadata", meta},
                            {"path", e.path}};
    }
    const json j{{"entries", entries}, {"next_created", next_created_}};
    // temp + rename so concurrent readers never observe a torn index
    const fs::path tmp = root_ / (".index.tmp." + std::to_string(::getpid()));
    write_file(tmp, j.dump(2) + "\n");
    fs::rename(tmp, root_ / "index.json");
}

Entry Catalog::put(Kind kind, const std::string& id, std::string_view bytes,
                   std::map<std::string, std::string> metadata) {
    if (!id_well_formed(id)) throw CatalogError(CatalogErrorCode::BadId, id);
    IndexLock lock(root_);
    load_index();  // pick up concurrent writers
    const std::string key = std::string(kind_name(kind)) + "/" + id;
    const std::string digest = sha256_hex(bytes);
    if (auto it = entries_.find(key); it != entries_.end()) {
        if (it->second.digest != digest)
            throw CatalogError(CatalogErrorCode::Conflict,
                               key + " exists with a different digest");
        return it->second;  // idempotent re-put
    }
    Entry e;
    e.id = id;
    e.kind = kind;
    e.path = std::string(kind_dir(kind)) + "/" + id;
    e.digest = digest;
    e.created = next_created_++;
    e.metadata = std::move(metadata);
    write_file(root_ / e.path, bytes);
    entries_[key] = e;
    save_index();
    return e;
}

std::optional<Entry> Catalog::find(Kind kind, const std::string& id) const {
    const std::string key = std::string(kind_name(kind)) + "/" + id;
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Catalog::get(Kind kind, const std::string& id) const {
    auto e = find(kind, id);
    if (!e)
        throw CatalogError(CatalogErrorCode::NotFound,
                           std::string(kind_name(kind)) + "/" + id);
    const std::string bytes = read_file(root_ / e->path);
    if (sha256_hex(bytes) != e->digest)
        throw CatalogError(CatalogErrorCode::DigestMismatch, e->path);
    return bytes;
}

std::vector<Entry> Catalog::list(std::optional<Kind> kind, const std::string& id_prefix) const {
    std::vector<Entry> out;
    for (const auto& [key, e] : entries_) {
        if (kind && e.kind != *kind) continue;
        if (!id_prefix.empty() && e.id.rfind(id_prefix, 0) != 0) continue;
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
        if (a.id != b.id) return a.id < b.id;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return out;
}

DatasetRecord Catalog::ingest_dataset(const fs::path& csv, const std::string& id,
                                      std::map<std::string, std::string> metadata) {
    const std::string bytes = read_file(csv);
    std::vector<KpmSample> samples;
    try {
        samples = parse_kpm_csv(bytes);
    } catch (const KpmCsvParseError& e) {
        if (e.column == "header") throw CatalogError(CatalogErrorCode::SchemaError, e.what());
        throw CatalogError(CatalogErrorCode::BadCell,
                           std::string(e.what()) + " at row " + std::to_string(e.row) +
                               " column " + e.column);
    }

    DatasetRecord rec;
    rec.id = id;
    rec.row_count = samples.size();
    for (size_t c = 0; c < 5; ++c) {
        rec.min[c] = samples.empty() ? 0.0 : 1e300;
        rec.max[c] = samples.empty() ? 0.0 : -1e300;
    }
    for (const auto& s : samples) {
        const double cols[5] = {static_cast<double>(s.dl_buffer_bytes), s.dl_brate_mbps,
                                static_cast<double>(s.dl_tx_pkts),
                                static_cast<double>(s.granted_prbs),
                                static_cast<double>(s.requested_prbs)};
        for (size_t c = 0; c < 5; ++c) {
            rec.min[c] = std::min(rec.min[c], cols[c]);
            rec.max[c] = std::max(rec.max[c], cols[c]);
        }
    }

    json meta_bounds;
    static const char* cols[5] = {"dl_buffer_bytes", "dl_brate_mbps", "dl_tx_pkts",
                                  "granted_prbs", "requested_prbs"};
    for (size_t c = 0; c < 5; ++c) {
        char lo[40], hi[40];
        std::snprintf(lo, sizeof lo, "%.17g", rec.min[c]);
        std::snprintf(hi, sizeof hi, "%.17g", rec.max[c]);
        metadata[std::string("min_") + cols[c]] = lo;
        metadata[std::string("max_") + cols[c]] = hi;
    }
    metadata["rows"] = std::to_string(rec.row_count);

    const Entry e = put(Kind::Dataset, id, bytes, std::move(metadata));
    rec.csv_path = e.path;
    rec.source_digest = e.digest;
    return rec;
}

DatasetRecord Catalog::dataset_record(const std::string& id) const {
    auto e = find(Kind::Dataset, id);
    if (!e) throw CatalogError(CatalogErrorCode::NotFound, "dataset/" + id);
    DatasetRecord rec;
    rec.id = id;
    rec.csv_path = e->path;
    rec.source_digest = e->digest;
    rec.row_count = std::stoull(e->metadata.at("rows"));
    static const char* cols[5] = {"dl_buffer_bytes", "dl_brate_mbps", "dl_tx_pkts",
                                  "granted_prbs", "requested_prbs"};
    for (size_t c = 0; c < 5; ++c) {
        rec.min[c] = std::stod(e->metadata.at(std::string("min_") + cols[c]));
        rec.max[c] = std::stod(e->metadata.at(std::string("max_") + cols[c]));
    }
    return rec;
}

}  // namespace ranlab::cat
