#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranlab/kpm.hpp"

namespace ranlab::cat {

enum class Kind { Dataset, Model, Intent, Xapp };

std::string_view kind_name(Kind k);
Kind kind_from_name(std::string_view s);

struct Entry {
    std::string id;
    Kind kind = Kind::Dataset;
    std::string path;    // relative to the catalog root
    std::string digest;  // sha256 hex of the file bytes
    uint64_t created = 0;  // logical insertion counter (deterministic)
    std::map<std::string, std::string> metadata;
};

enum class CatalogErrorCode {
    NotFound,
    DigestMismatch,
    Conflict,       // same id, different digest
    BadId,
    SchemaError,    // dataset header mismatch
    BadCell,        // dataset non-numeric cell
    IoError,
};

std::string_view catalog_error_name(CatalogErrorCode c);

struct CatalogError : std::runtime_error {
    CatalogError(CatalogErrorCode code, std::string detail)
        : std::runtime_error(std::string(catalog_error_name(code)) + ": " + detail),
          code(code) {}
    CatalogErrorCode code;
};

struct DatasetRecord {
    std::string id;
    std::string csv_path;  // catalog-relative
    uint64_t row_count = 0;
    // per numeric column: {dl_buffer_bytes, dl_brate_mbps, dl_tx_pkts,
    // granted_prbs, requested_prbs}
    std::array<double, 5> min{};
    std::array<double, 5> max{};
    std::string source_digest;
};

// Directory layout catalog/{datasets,models,intents,xapps}/<id>, canonical
// index at catalog/index.json. Writers serialize on a lock file; readers
// verify digests.
class Catalog {
public:
    explicit Catalog(std::filesystem::path root);

    Entry put(Kind kind, const std::string& id, std::string_view bytes,
              std::map<std::string, std::string> metadata = {});
    std::string get(Kind kind, const std::string& id) const;
    std::optional<Entry> find(Kind kind, const std::string& id) const;
    std::vector<Entry> list(std::optional<Kind> kind = std::nullopt,
                            const std::string& id_prefix = "") const;

    // Validates the CSV contract, computes bounds in one pass, copies the
    // file into the catalog and indexes it.
    DatasetRecord ingest_dataset(const std::filesystem::path& csv, const std::string& id,
                                 std::map<std::string, std::string> metadata = {});
    DatasetRecord dataset_record(const std::string& id) const;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path path_of(const Entry& e) const { return root_ / e.path; }

private:
    void load_index();
    void save_index() const;

    std::filesystem::path root_;
    std::map<std::string, Entry> entries_;  // key: kind/id
    uint64_t next_created_ = 1;
};

}  // namespace ranlab::cat
