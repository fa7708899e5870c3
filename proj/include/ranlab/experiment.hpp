#pragma once

#include <filesystem>
#include <map>

#include "ranlab/catalog.hpp"
#include "ranlab/intent.hpp"
#include "ranlab/ric.hpp"

namespace ranlab::harness {

struct ScenarioConfig {
    std::string name = "scenario";
    double radius_m = 50.0;              // Location 1 = 50, Location 2 = 20
    std::array<int, 3> ue_counts{2, 2, 2};
    double speed_mps = 0.0;
    int traffic_profile_id = 1;
    std::optional<sim::TrafficProfile> custom_traffic;  // overrides the profile id
    std::string timer_set = "set1";
    double duration_s = 60.0;
    uint64_t seed = 1;
    bool fading = false;
    sim::SlicingAllocation initial_allocation{{18, 15, 17}};
    sim::SchedProfileMap initial_scheds{};

    void validate() const;
    sim::ScenarioParams sim_params() const;
    ric::TimerSet timers() const { return ric::TimerSet::by_name(timer_set); }

    std::string to_json() const;  // canonical keys
    static ScenarioConfig from_json(std::string_view text);
};

struct KpiSummary {
    double median = 0.0;
    double mean = 0.0;
    size_t count = 0;
    std::vector<std::pair<double, double>> cdf;  // (value, F(value)) on the sorted support
};

struct ExperimentResult {
    std::filesystem::path csv_path;
    std::filesystem::path event_log_path;
    std::filesystem::path summary_path;
    // keyed "slice/kpi", recomputed from the CSV text
    std::map<std::string, KpiSummary> summaries;
    std::string digest;  // sha256 of the CSV bytes
};

enum class Transport { Memory, SocketPair };

struct LoadedXapp {
    ric::XappDescriptor desc;
    drl::PolicyModel model;
};

// Virtual-clock co-simulation of gNB + RIC. Writes the KPM CSV, the JSONL
// event log and a summary; removes partial outputs on failure. Fully
// deterministic per (config, model digests, seed). realtime paces the virtual
// clock at one TTI per wall millisecond (demo mode, results unchanged).
ExperimentResult run_experiment(const ScenarioConfig& scenario, std::vector<LoadedXapp> xapps,
                                const std::filesystem::path& outdir,
                                Transport transport = Transport::Memory,
                                bool parallel_sessions = false, bool realtime = false);

// -------- analytics --------

// Even-length inputs take the mean of the two middle order statistics.
double median_of(std::vector<double> values);
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

KpiSummary summarize(std::vector<double> values);

// Extracts a KPI column for one slice from CSV text. prb_ratio is computed
// per row as granted/requested (1 when requested = 0).
std::vector<double> kpi_series(std::string_view csv_text, intent::Kpi kpi, SliceId slice);

KpiSummary analyze_csv(std::string_view csv_text, intent::Kpi kpi, SliceId slice);

// -------- training --------

struct TrainOptions {
    std::string agent = "ppo";          // ppo | dqn
    std::optional<double> gamma;        // default: 0.99 ppo, 0.95 dqn
    int steps = 1000;
    uint64_t seed = 1;
    double lr = 1e-3;
    int encoder_epochs = 25;
    std::string env = "replay";         // replay | live (live is non-paper)
    std::optional<ScenarioConfig> live_scenario;
    intent::ParseOptions parse;
};

struct TrainOutput {
    std::string model_id;
    std::string intent_id;
    std::filesystem::path curve_csv;
    double final_mean_reward = 0.0;
};

// Parses and stores the intent, trains (or reuses) the dataset encoder, then
// trains the agent against a dataset-replay environment and stores the model
// artifact in the catalog. Deterministic per seed.
TrainOutput train(cat::Catalog& catalog, const std::string& intent_text,
                  const std::string& dataset_id, const TrainOptions& opts,
                  const std::filesystem::path& outdir);

// Onboards a catalog model as an xApp: validates the artifact against the
// domain and persists the descriptor. Returns the loaded xApp.
LoadedXapp onboard(cat::Catalog& catalog, const std::string& xapp_id,
                   const std::string& model_id, const std::string& intent_id,
                   const ric::ControlDomain& domain, const ric::TimerSet& timers,
                   std::optional<int64_t> report_period_ms = std::nullopt);

LoadedXapp load_xapp(const cat::Catalog& catalog, const std::string& xapp_id);

// -------- sweep --------

struct SweepSpec {
    std::string dataset_id;
    std::string agent = "ppo";
    int steps = 500;
    uint64_t seed = 1;
    std::string intent_template;                       // full intent JSON
    std::vector<std::set<intent::ActionKind>> action_kinds;
    std::vector<double> gammas;
    std::vector<std::string> weight_names;
    std::vector<std::string> timer_sets;
    std::vector<ScenarioConfig> scenarios;

    static SweepSpec from_json(std::string_view text);
};

struct SweepCellResult {
    std::string cell_id;
    bool ok = false;
    std::string error;
    std::string model_id;
    double median_embb_mbps = 0.0;
    double median_mmtc_pkts = 0.0;
    double median_urllc_buffer = 0.0;
};

// One deterministic train+run per cartesian cell; failures are recorded and
// the sweep continues. Writes `sweep.csv` in outdir after a stable sort.
std::vector<SweepCellResult> run_sweep(cat::Catalog& catalog, const SweepSpec& spec,
                                       const std::filesystem::path& outdir, int jobs = 1);

}  // namespace ranlab::harness
