// ranlab — RAN slicing control laboratory CLI.
//
// Exit codes: 0 ok, 2 validation error, 3 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ranlab/experiment.hpp"

namespace {

using namespace ranlab;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path catalog_root() {
    if (const char* env = std::getenv("RANLAB_CATALOG")) return env;
    return "catalog";
}

harness::ScenarioConfig load_scenario(const std::string& path) {
    return harness::ScenarioConfig::from_json(read_file(path));
}

int run_ingest(const std::string& csv, const std::string& id) {
    cat::Catalog catalog(catalog_root());
    const auto rec = catalog.ingest_dataset(csv, id);
    std::cout << "dataset " << rec.id << " rows=" << rec.row_count
              << " digest=" << rec.source_digest << "\n";
    return kExitOk;
}

int run_train(const std::string& intent_path, const std::string& dataset_id,
              const harness::TrainOptions& opts, const std::string& outdir,
              const std::string& live_scenario_path) {
    cat::Catalog catalog(catalog_root());
    harness::TrainOptions o = opts;
    if (!live_scenario_path.empty()) o.live_scenario = load_scenario(live_scenario_path);
    const auto out = harness::train(catalog, read_file(intent_path), dataset_id, o, outdir);
    std::cout << "model " << out.model_id << "\nintent " << out.intent_id << "\ncurve "
              << out.curve_csv.string() << "\n";
    return kExitOk;
}

int run_onboard(const std::string& xapp_id, const std::string& model_id,
                const std::string& intent_id, const std::string& domain,
                const std::string& timer_set, int64_t report_ms) {
    cat::Catalog catalog(catalog_root());
    std::optional<int64_t> override_ms;
    if (report_ms > 0) override_ms = report_ms;
    const auto xapp =
        harness::onboard(catalog, xapp_id, model_id, intent_id,
                         ric::ControlDomain::parse(domain), ric::TimerSet::by_name(timer_set),
                         override_ms);
    std::cout << "onboarded " << xapp.desc.id << " domain=" << xapp.desc.domain.to_string()
              << " actions=" << xapp.model.n_actions << "\n";
    return kExitOk;
}

int run_dispatch(const std::vector<std::string>& xapp_ids) {
    cat::Catalog catalog(catalog_root());
    std::vector<ric::Ric::Xapp> xapps;
    for (const auto& id : xapp_ids) {
        auto x = harness::load_xapp(catalog, id);
        xapps.push_back({x.desc, std::move(x.model)});
    }
    ric::Ric ric;
    ric.dispatch(std::move(xapps));  // throws DomainConflict before any subscription
    std::cout << "dispatch plan: " << ric.sessions().size() << " sessions, "
              << ric.subscriptions().size() << " subscriptions\n";
    for (const auto& plan : ric.subscriptions()) {
        std::cout << "  subscribe du_report=" << plan.report_period_ms
                  << "ms kpm_log=" << plan.kpm_log_ms << "ms sessions=[";
        for (size_t i = 0; i < plan.session_indices.size(); ++i) {
            if (i) std::cout << ",";
            std::cout << ric.sessions()[plan.session_indices[i]]->descriptor().id;
        }
        std::cout << "]\n";
    }
    return kExitOk;
}

int run_run(const std::string& scenario_path, const std::vector<std::string>& xapp_ids,
            const std::string& outdir, const std::string& transport, bool parallel,
            bool realtime) {
    cat::Catalog catalog(catalog_root());
    const auto scenario = load_scenario(scenario_path);
    std::vector<harness::LoadedXapp> xapps;
    for (const auto& id : xapp_ids) xapps.push_back(harness::load_xapp(catalog, id));
    const auto t = transport == "socketpair" ? harness::Transport::SocketPair
                                             : harness::Transport::Memory;
    const auto result =
        harness::run_experiment(scenario, std::move(xapps), outdir, t, parallel, realtime);
    std::cout << "run complete\n  csv " << result.csv_path.string() << "\n  events "
              << result.event_log_path.string() << "\n  digest " << result.digest << "\n";
    return kExitOk;
}

int run_analyze(const std::string& csv_path, const std::string& kpi, const std::string& slice,
                bool print_cdf) {
    const auto summary = harness::analyze_csv(read_file(csv_path),
                                              intent::kpi_from_name(kpi),
                                              slice_from_name(slice));
    std::cout << slice << "/" << kpi << " n=" << summary.count << " median=" << summary.median
              << " mean=" << summary.mean << "\n";
    if (print_cdf)
        for (const auto& [x, f] : summary.cdf) std::cout << x << " " << f << "\n";
    return kExitOk;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& outdir, int jobs) {
    cat::Catalog catalog(catalog_root());
    const auto spec = harness::SweepSpec::from_json(read_file(spec_path));
    const auto results = harness::run_sweep(catalog, spec, outdir, jobs);
    size_t failures = 0;
    for (const auto& r : results) {
        std::cout << r.cell_id << " " << (r.ok ? "ok" : ("error: " + r.error)) << "\n";
        if (!r.ok) ++failures;
    }
    std::cout << "sweep table: " << (std::filesystem::path(outdir) / "sweep.csv").string()
              << "\n";
    return failures == results.size() && !results.empty() ? kExitRuntime : kExitOk;
}

// gnuplot-ready columns: value, empirical CDF
int run_plot_data(const std::string& csv_path, const std::string& kpi, const std::string& slice,
                  const std::string& out_path) {
    const auto summary = harness::analyze_csv(read_file(csv_path),
                                              intent::kpi_from_name(kpi),
                                              slice_from_name(slice));
    std::ostringstream out;
    out << "# " << slice << " " << kpi << " CDF\n";
    for (const auto& [x, f] : summary.cdf) out << x << " " << f << "\n";
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        f << out.str();
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RAN slicing control laboratory"};
    app.require_subcommand(1);

    // ingest
    std::string csv_path, dataset_id;
    auto* ingest = app.add_subcommand("ingest", "ingest a KPM CSV dataset into the catalog");
    ingest->add_option("--csv", csv_path, "KPM CSV path")->required();
    ingest->add_option("--id", dataset_id, "dataset id")->required();

    // train
    std::string intent_path, train_out = "out/train", live_scenario;
    harness::TrainOptions topts;
    double gamma_opt = -1.0;
    auto* train = app.add_subcommand("train", "train an agent from an intent and a dataset");
    train->add_option("--intent", intent_path, "intent JSON path")->required();
    train->add_option("--dataset", dataset_id, "dataset id")->required();
    train->add_option("--agent", topts.agent, "ppo|dqn")->check(CLI::IsMember({"ppo", "dqn"}));
    train->add_option("--gamma", gamma_opt, "discount factor override");
    train->add_option("--steps", topts.steps, "training steps");
    train->add_option("--seed", topts.seed, "seed");
    train->add_option("--lr", topts.lr, "learning rate");
    train->add_option("--encoder-epochs", topts.encoder_epochs, "autoencoder epochs");
    train->add_option("--env", topts.env, "replay|live (live applies actions to a simulator)")
        ->check(CLI::IsMember({"replay", "live"}));
    train->add_option("--live-scenario", live_scenario, "scenario JSON for env=live");
    train->add_option("--out", train_out, "output directory");
    bool accept_min = false;
    train->add_flag("--accept-min-primitives", accept_min,
                    "accept Min* reward primitive names");

    // onboard
    std::string xapp_id, model_id, intent_id, domain, timer_set = "set1";
    int64_t report_ms = 0;
    auto* onboard = app.add_subcommand("onboard", "validate a model and register an xApp");
    onboard->add_option("--id", xapp_id, "xApp id")->required();
    onboard->add_option("--model", model_id, "catalog model id")->required();
    onboard->add_option("--intent", intent_id, "catalog intent id")->required();
    onboard->add_option("--domain", domain, "slicing|sched|sched:<slice>|joint")->required();
    onboard->add_option("--timers", timer_set, "set1|set2|set3");
    onboard->add_option("--report-ms", report_ms, "report period override (hierarchical)");

    // dispatch
    std::vector<std::string> xapp_ids;
    auto* dispatch = app.add_subcommand("dispatch", "validate domains and print the session plan");
    dispatch->add_option("--xapps", xapp_ids, "xApp ids")->required()->delimiter(',');

    // run
    std::string scenario_path, run_out = "out/run", transport = "memory";
    bool parallel = false, realtime = false;
    auto* run = app.add_subcommand("run", "run a closed-loop experiment");
    run->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    run->add_option("--xapps", xapp_ids, "xApp ids (omit for the static baseline)")
        ->delimiter(',');
    run->add_option("--out", run_out, "output directory");
    run->add_option("--transport", transport, "memory|socketpair")
        ->check(CLI::IsMember({"memory", "socketpair"}));
    run->add_flag("--parallel-sessions", parallel, "per-session inference workers");
    run->add_flag("--realtime", realtime, "pace the virtual clock at wall speed (demo)");

    // analyze
    std::string kpi = "dl_brate", slice = "embb";
    bool print_cdf = false;
    auto* analyze = app.add_subcommand("analyze", "median/mean/CDF of a KPI from a KPM CSV");
    analyze->add_option("--csv", csv_path, "KPM CSV path")->required();
    analyze->add_option("--kpi", kpi, "dl_buffer|dl_brate|dl_tx_pkts|prb_ratio");
    analyze->add_option("--slice", slice, "embb|mmtc|urllc");
    analyze->add_flag("--cdf", print_cdf, "print CDF points");

    // sweep
    std::string sweep_spec, sweep_out = "out/sweep";
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "cartesian train+run grid");
    sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--jobs", jobs, "parallel workers");

    // plot-data
    std::string plot_out;
    auto* plot = app.add_subcommand("plot-data", "emit gnuplot-ready CDF columns");
    plot->add_option("--csv", csv_path, "KPM CSV path")->required();
    plot->add_option("--kpi", kpi, "KPI name");
    plot->add_option("--slice", slice, "slice name");
    plot->add_option("--out", plot_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(csv_path, dataset_id);
        if (*train) {
            if (gamma_opt > 0) topts.gamma = gamma_opt;
            topts.parse.accept_min_primitives = accept_min;
            return run_train(intent_path, dataset_id, topts, train_out, live_scenario);
        }
        if (*onboard)
            return run_onboard(xapp_id, model_id, intent_id, domain, timer_set, report_ms);
        if (*dispatch) return run_dispatch(xapp_ids);
        if (*run) return run_run(scenario_path, xapp_ids, run_out, transport, parallel, realtime);
        if (*analyze) return run_analyze(csv_path, kpi, slice, print_cdf);
        if (*sweep) return run_sweep_cmd(sweep_spec, sweep_out, jobs);
        if (*plot) return run_plot_data(csv_path, kpi, slice, plot_out);
    } catch (const intent::IntentError& e) {
        std::cerr << "intent error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ric::RicError& e) {
        std::cerr << "ric error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const cat::CatalogError& e) {
        std::cerr << "catalog error: " << e.what() << "\n";
        return e.code == cat::CatalogErrorCode::NotFound ||
                       e.code == cat::CatalogErrorCode::BadId ||
                       e.code == cat::CatalogErrorCode::SchemaError ||
                       e.code == cat::CatalogErrorCode::BadCell
                   ? kExitValidation
                   : kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
