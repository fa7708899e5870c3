#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>

#include <nlohmann/json.hpp>

#include "ranlab/experiment.hpp"
#include "ranlab/sha256.hpp"

namespace ranlab::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ReplayData {
    std::vector<SliceId> slices;                   // intent slices, SliceId order
    std::vector<std::vector<double>> states;       // encoded, 3*len(slices) dims
    std::vector<double> rewards;                   // reward of taking any action at t
};

std::array<std::vector<KpmSample>, 3> split_by_slice(const std::vector<KpmSample>& samples) {
    std::array<std::vector<KpmSample>, 3> out;
    for (const auto& s : samples) slice_at(out, s.slice).push_back(s);
    return out;
}

std::vector<drl::KpmWindow> sliding_windows(const std::vector<KpmSample>& rows) {
    std::vector<drl::KpmWindow> out;
    if (rows.size() < drl::kWindowLen) return out;
    for (size_t t = 0; t + drl::kWindowLen <= rows.size(); ++t)
        out.push_back(drl::window_from_samples(
            std::span<const KpmSample>(rows.data() + t, drl::kWindowLen)));
    return out;
}

std::string short_digest(std::string_view bytes) { return sha256_hex(bytes).substr(0, 12); }

// Encoder cache: train once per (dataset, seed, epochs), reuse afterwards.
drl::EncoderModel dataset_encoder(cat::Catalog& catalog, const std::string& dataset_id,
                                  std::span<const drl::KpmWindow> windows, int epochs,
                                  double lr, uint64_t seed) {
    const std::string enc_id = "enc-" + dataset_id + "-s" + std::to_string(seed) + "-e" +
                               std::to_string(epochs);
    if (auto entry = catalog.find(cat::Kind::Model, enc_id))
        return drl::load_encoder(catalog.get(cat::Kind::Model, enc_id));
    Rng rng(seed);
    drl::AutoencoderStats stats;
    auto enc = drl::train_autoencoder(windows, epochs, lr, rng, &stats);
    catalog.put(cat::Kind::Model, enc_id, drl::save_encoder(enc),
                {{"kind", "encoder"}, {"dataset", dataset_id}});
    return enc;
}

ReplayData build_replay(const intent::IntentSpec& spec, const drl::EncoderModel& enc,
                        const std::vector<KpmSample>& samples) {
    ReplayData data;
    for (SliceId s : all_slices())
        for (const auto& si : spec.slices)
            if (si.name == s) data.slices.push_back(s);

    const auto per_slice = split_by_slice(samples);
    size_t min_rows = SIZE_MAX;
    for (SliceId s : data.slices)
        min_rows = std::min(min_rows, slice_at(per_slice, s).size());
    if (min_rows < drl::kWindowLen + 1)
        throw std::invalid_argument("dataset too small: need at least " +
                                    std::to_string(drl::kWindowLen + 1) +
                                    " log windows per slice");

    // step t uses the K windows ending at row t; its reward comes from row t+1
    for (size_t t = drl::kWindowLen - 1; t + 1 < min_rows; ++t) {
        std::vector<double> state;
        for (SliceId s : data.slices) {
            const auto& rows = slice_at(per_slice, s);
            const auto w = drl::window_from_samples(std::span<const KpmSample>(
                rows.data() + t + 1 - drl::kWindowLen, drl::kWindowLen));
            const auto latent = drl::encode_window(enc, w);
            state.insert(state.end(), latent.begin(), latent.end());
        }
        data.states.push_back(std::move(state));

        std::vector<double> slice_rewards;
        for (size_t j = 0; j < spec.slices.size(); ++j) {
            const auto& si = spec.slices[j];
            intent::SliceWindow win;
            win.samples.push_back(slice_at(per_slice, si.name)[t + 1]);
            slice_rewards.push_back(intent::reward_from_window(si, win));
        }
        data.rewards.push_back(
            intent::global_reward(slice_rewards, spec.global_reward_weights));
    }
    return data;
}

intent::ActionSpace action_space_for_intent(const intent::IntentSpec& spec) {
    // a one-slice scheduling intent trains a dedicated per-slice xApp
    if (spec.action_kinds == std::set<intent::ActionKind>{intent::ActionKind::Scheduling} &&
        spec.slices.size() == 1)
        return intent::build_sched_single_slice_space(spec.slices[0].name);
    return intent::build_action_space(spec.action_kinds);
}

struct CurveWriter {
    std::string csv = "step,mean_reward,loss\n";
    void add(int step, double reward, double loss) {
        char line[96];
        std::snprintf(line, sizeof line, "%d,%.9g,%.9g\n", step, reward, loss);
        csv += line;
    }
};

// Training environment: state out, action in, reward out.
class TrainEnv {
public:
    virtual ~TrainEnv() = default;
    virtual const std::vector<double>& state() const = 0;
    virtual double step(int action) = 0;  // applies action, advances, returns reward
};

// Offline dataset replay: states and rewards stream from the dataset
// regardless of the chosen action (no counterfactual data exists).
class ReplayEnv : public TrainEnv {
public:
    explicit ReplayEnv(ReplayData data) : data_(std::move(data)) {}
    const std::vector<double>& state() const override {
        return data_.states[cursor_ % data_.states.size()];
    }
    double step(int) override {
        const double r = data_.rewards[cursor_ % data_.rewards.size()];
        ++cursor_;
        return r;
    }

private:
    ReplayData data_;
    size_t cursor_ = 0;
};

// Live-simulator environment (non-paper training mode): the chosen directive
// is applied to a World and the reward comes from the resulting log window.
class LiveEnv : public TrainEnv {
public:
    LiveEnv(const ScenarioConfig& scenario, intent::IntentSpec spec,
            drl::EncoderModel encoder, intent::ActionSpace space)
        : spec_(std::move(spec)),
          encoder_(std::move(encoder)),
          space_(std::move(space)),
          timers_(scenario.timers()),
          world_(scenario.sim_params()),
          sampler_(world_) {
        for (SliceId s : all_slices())
            for (const auto& si : spec_.slices)
                if (si.name == s) slices_.push_back(s);
        for (size_t k = 0; k < drl::kWindowLen; ++k) advance_one_window();
        rebuild_state();
    }

    const std::vector<double>& state() const override { return state_; }

    double step(int action) override {
        apply(space_.actions.at(static_cast<size_t>(action)));
        for (int64_t ms = 0; ms < timers_.action_update_ms; ms += timers_.kpm_log_ms)
            advance_one_window();
        rebuild_state();
        std::vector<double> rewards;
        for (const auto& si : spec_.slices) {
            intent::SliceWindow w;
            w.samples.push_back(slice_at(last_window_, si.name));
            rewards.push_back(intent::reward_from_window(si, w));
        }
        return intent::global_reward(rewards, spec_.global_reward_weights);
    }

private:
    void apply(const e2::ControlDirective& d) {
        if (d.slicing) world_.apply_slicing(*d.slicing);
        if (d.sched) {
            if (d.sched->single_slice)
                world_.apply_sched(d.sched->slice, d.sched->policy);
            else
                world_.apply_scheds(d.sched->map);
        }
    }
    void advance_one_window() {
        for (int64_t ms = 0; ms < timers_.kpm_log_ms; ++ms) world_.step_tti();
        last_window_ = sampler_.sample(world_);
        for (const auto& s : last_window_) {
            auto& hist = history_[static_cast<int>(s.slice)];
            hist.push_back(s);
            if (hist.size() > drl::kWindowLen) hist.erase(hist.begin());
        }
    }
    void rebuild_state() {
        state_.clear();
        for (SliceId s : slices_) {
            const auto& hist = history_[static_cast<int>(s)];
            const auto w = drl::window_from_samples(hist);
            const auto latent = drl::encode_window(encoder_, w);
            state_.insert(state_.end(), latent.begin(), latent.end());
        }
    }

    intent::IntentSpec spec_;
    drl::EncoderModel encoder_;
    intent::ActionSpace space_;
    ric::TimerSet timers_;
    sim::World world_;
    sim::WindowSampler sampler_;
    std::vector<SliceId> slices_;
    std::array<std::vector<KpmSample>, 3> history_;
    std::array<KpmSample, 3> last_window_;
    std::vector<double> state_;
};

}  // namespace

TrainOutput train(cat::Catalog& catalog, const std::string& intent_text,
                  const std::string& dataset_id, const TrainOptions& opts,
                  const fs::path& outdir) {
    const intent::IntentSpec spec = intent::parse_intent(intent_text, opts.parse);
    const std::string intent_id = "intent-" + short_digest(intent_text);
    catalog.put(cat::Kind::Intent, intent_id, intent_text);

    catalog.dataset_record(dataset_id);  // NotFound check before any work
    const std::string csv_text = catalog.get(cat::Kind::Dataset, dataset_id);
    const auto samples = parse_kpm_csv(csv_text);

    // encoder trains on every slice window in the dataset
    std::vector<drl::KpmWindow> enc_windows;
    for (const auto& rows : split_by_slice(samples)) {
        const auto w = sliding_windows(rows);
        enc_windows.insert(enc_windows.end(), w.begin(), w.end());
    }
    if (enc_windows.empty()) throw std::invalid_argument("dataset has no complete window");
    auto encoder =
        dataset_encoder(catalog, dataset_id, enc_windows, opts.encoder_epochs, opts.lr, opts.seed);

    const intent::ActionSpace space = action_space_for_intent(spec);
    const size_t state_dim = spec.slices.size() * drl::kLatentDim;

    std::unique_ptr<TrainEnv> env;
    if (opts.env == "replay") {
        env = std::make_unique<ReplayEnv>(build_replay(spec, encoder, samples));
    } else if (opts.env == "live") {
        if (!opts.live_scenario)
            throw std::invalid_argument("env=live requires a scenario");
        env = std::make_unique<LiveEnv>(*opts.live_scenario, spec, encoder, space);
    } else {
        throw std::invalid_argument("unknown training env: " + opts.env);
    }

    fs::create_directories(outdir);
    CurveWriter curve;
    Rng rng(opts.seed ^ 0x7261696e);

    drl::PolicyModel model;
    model.encoder = encoder;
    model.action_kind = space.kind;
    model.single_slice = space.single_slice;
    model.n_actions = space.size();
    model.state_dim = state_dim;
    double final_mean_reward = 0.0;

    if (opts.agent == "ppo") {
        drl::PpoConfig cfg;
        cfg.gamma = opts.gamma.value_or(0.99);
        cfg.lr = opts.lr;
        auto agent = drl::PpoAgent::make(state_dim, space.size(), cfg, rng);
        int step = 0;
        while (step < opts.steps) {
            const int chunk = std::min(cfg.horizon, opts.steps - step);
            drl::Trajectory traj;
            double reward_sum = 0.0;
            for (int h = 0; h < chunk; ++h) {
                const std::vector<double> s = env->state();
                auto [a, logp] = agent.act(s, rng);
                const double r = env->step(a);
                traj.states.push_back(s);
                traj.actions.push_back(a);
                traj.log_probs.push_back(logp);
                traj.rewards.push_back(r);
                traj.values.push_back(agent.value(s));
                reward_sum += r;
            }
            traj.bootstrap_value = agent.value(env->state());
            const double objective = agent.update(traj, rng);
            step += chunk;
            final_mean_reward = reward_sum / chunk;
            curve.add(step, final_mean_reward, -objective);
        }
        model.metadata = {{"agent", "ppo"},
                          {"gamma", std::to_string(cfg.gamma)},
                          {"lr", std::to_string(cfg.lr)}};
        model.agent = std::move(agent);
    } else if (opts.agent == "dqn") {
        drl::DqnConfig cfg;
        cfg.gamma = opts.gamma.value_or(0.95);
        cfg.lr = opts.lr;
        auto agent = drl::DqnAgent::make(state_dim, space.size(), cfg, rng);
        double reward_acc = 0.0, loss_acc = 0.0;
        int acc_n = 0;
        for (int step = 0; step < opts.steps; ++step) {
            const std::vector<double> s = env->state();
            const int a = agent.act(s, rng);
            const double r = env->step(a);
            agent.buffer.push({s, a, r, env->state()});
            const auto res = agent.update(rng);
            reward_acc += r;
            loss_acc += res.loss;
            ++acc_n;
            if ((step + 1) % 100 == 0 || step + 1 == opts.steps) {
                final_mean_reward = reward_acc / acc_n;
                curve.add(step + 1, final_mean_reward, loss_acc / acc_n);
                reward_acc = loss_acc = 0.0;
                acc_n = 0;
            }
        }
        model.metadata = {{"agent", "dqn"},
                          {"epsilon_dqn", "0.1"},
                          {"gamma", std::to_string(cfg.gamma)},
                          {"lr", std::to_string(cfg.lr)}};
        model.agent = std::move(agent);
    } else {
        throw std::invalid_argument("unknown agent: " + opts.agent);
    }

    model.metadata["dataset"] = dataset_id;
    model.metadata["intent"] = intent_id;
    model.metadata["steps"] = std::to_string(opts.steps);
    model.metadata["seed"] = std::to_string(opts.seed);
    model.metadata["env"] = opts.env;

    const std::string artifact = drl::save_model(model);
    const std::string model_id = "model-" + opts.agent + "-" + short_digest(artifact);
    catalog.put(cat::Kind::Model, model_id, artifact, model.metadata);

    const fs::path curve_path = outdir / ("curve-" + model_id + ".csv");
    std::ofstream(curve_path, std::ios::binary) << curve.csv;

    return {model_id, intent_id, curve_path, final_mean_reward};
}

LoadedXapp onboard(cat::Catalog& catalog, const std::string& xapp_id,
                   const std::string& model_id, const std::string& intent_id,
                   const ric::ControlDomain& domain, const ric::TimerSet& timers,
                   std::optional<int64_t> report_period_ms) {
    if (!catalog.find(cat::Kind::Intent, intent_id))
        throw ric::RicError(ric::RicErrorCode::UnknownIntent, intent_id);
    std::string bytes;
    try {
        bytes = catalog.get(cat::Kind::Model, model_id);
    } catch (const cat::CatalogError& e) {
        throw ric::RicError(ric::RicErrorCode::CorruptModel, e.what());
    }
    drl::PolicyModel model = ric::validate_onboard(bytes, domain);
    timers.validate();

    ric::XappDescriptor desc;
    desc.id = xapp_id;
    desc.model_id = model_id;
    desc.intent_id = intent_id;
    desc.domain = domain;
    desc.timers = timers;
    desc.report_period_ms = report_period_ms;
    // validation report travels with the catalog entry
    catalog.put(cat::Kind::Xapp, xapp_id, desc.to_json(),
                {{"domain", domain.to_string()},
                 {"model", model_id},
                 {"intent", intent_id},
                 {"actions", std::to_string(model.n_actions)},
                 {"state_dim", std::to_string(model.state_dim)},
                 {"agent", model.metadata.count("agent") ? model.metadata.at("agent") : "?"},
                 {"validation", "ok"}});
    return {desc, std::move(model)};
}

LoadedXapp load_xapp(const cat::Catalog& catalog, const std::string& xapp_id) {
    const auto desc = ric::XappDescriptor::from_json(catalog.get(cat::Kind::Xapp, xapp_id));
    drl::PolicyModel model =
        ric::validate_onboard(catalog.get(cat::Kind::Model, desc.model_id), desc.domain);
    return {desc, std::move(model)};
}

SweepSpec SweepSpec::from_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("sweep spec: malformed JSON");
    SweepSpec spec;
    spec.dataset_id = j.at("dataset").get<std::string>();
    spec.agent = j.value("agent", std::string("ppo"));
    spec.steps = j.value("steps", 500);
    spec.seed = j.value("seed", uint64_t{1});
    spec.intent_template = json{{"intent", j.at("intent")}}.dump();

    const json& axes = j.at("axes");
    for (const auto& kinds : axes.at("action_kinds")) {
        std::set<intent::ActionKind> set;
        for (const auto& k : kinds) {
            const std::string s = k.get<std::string>();
            if (s == "scheduling")
                set.insert(intent::ActionKind::Scheduling);
            else if (s == "ran_slicing")
                set.insert(intent::ActionKind::RanSlicing);
            else
                throw std::invalid_argument("unknown action kind: " + s);
        }
        spec.action_kinds.push_back(std::move(set));
    }
    for (const auto& g : axes.at("gammas")) spec.gammas.push_back(g.get<double>());
    for (const auto& w : axes.at("weights")) spec.weight_names.push_back(w.get<std::string>());
    for (const auto& t : axes.at("timer_sets")) spec.timer_sets.push_back(t.get<std::string>());
    for (const auto& s : axes.at("scenarios"))
        spec.scenarios.push_back(ScenarioConfig::from_json(s.dump()));
    if (spec.action_kinds.empty() || spec.gammas.empty() || spec.weight_names.empty() ||
        spec.timer_sets.empty() || spec.scenarios.empty())
        throw std::invalid_argument("sweep axes must be non-empty");
    return spec;
}

namespace {

std::string format_gamma(double g) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

std::string synthesize_intent(const std::string& tmpl,
                              const std::set<intent::ActionKind>& kinds,
                              const std::string& weight_name) {
    json j = json::parse(tmpl);
    json actions = json::array();
    if (kinds.count(intent::ActionKind::Scheduling)) actions.push_back("scheduling");
    if (kinds.count(intent::ActionKind::RanSlicing)) actions.push_back("ran_slicing");
    j.at("intent")["actions"] = actions;
    json weights = json::array();
    for (double w : intent::weights_by_name(weight_name)) weights.push_back(w);
    j.at("intent")["global_reward_weights"] = weights;
    return j.dump();
}

ric::ControlDomain domain_for_kinds(const std::set<intent::ActionKind>& kinds) {
    const bool slicing = kinds.count(intent::ActionKind::RanSlicing) > 0;
    const bool sched = kinds.count(intent::ActionKind::Scheduling) > 0;
    if (slicing && sched) return {ric::DomainKind::Joint, std::nullopt};
    if (slicing) return {ric::DomainKind::Slicing, std::nullopt};
    return {ric::DomainKind::SchedAll, std::nullopt};
}

std::string kinds_label(const std::set<intent::ActionKind>& kinds) {
    const bool slicing = kinds.count(intent::ActionKind::RanSlicing) > 0;
    const bool sched = kinds.count(intent::ActionKind::Scheduling) > 0;
    if (slicing && sched) return "joint";
    return slicing ? "slicing" : "sched";
}

}  // namespace

std::vector<SweepCellResult> run_sweep(cat::Catalog& catalog, const SweepSpec& spec,
                                       const fs::path& outdir, int jobs) {
    struct Cell {
        std::set<intent::ActionKind> kinds;
        double gamma;
        std::string weights;
        std::string timer_set;
        ScenarioConfig scenario;
        std::string id;
    };
    std::vector<Cell> cells;
    for (size_t ai = 0; ai < spec.action_kinds.size(); ++ai)
        for (double gamma : spec.gammas)
            for (const auto& w : spec.weight_names)
                for (const auto& ts : spec.timer_sets)
                    for (size_t si = 0; si < spec.scenarios.size(); ++si) {
                        Cell c{spec.action_kinds[ai], gamma, w, ts, spec.scenarios[si], ""};
                        c.scenario.timer_set = ts;
                        c.id = kinds_label(c.kinds) + "-g" + format_gamma(gamma) + "-" + w +
                               "-" + ts + "-sc" + std::to_string(si);
                        cells.push_back(std::move(c));
                    }

    fs::create_directories(outdir);
    std::vector<SweepCellResult> results(cells.size());

    auto run_cell = [&](size_t i) {
        const Cell& cell = cells[i];
        SweepCellResult res;
        res.cell_id = cell.id;
        try {
            cat::Catalog local(catalog.root());  // own handle per worker
            const fs::path cell_dir = outdir / "cells" / cell.id;
            fs::create_directories(cell_dir);

            TrainOptions topts;
            topts.agent = spec.agent;
            topts.gamma = cell.gamma;
            topts.steps = spec.steps;
            topts.seed = spec.seed;
            const std::string intent_text =
                synthesize_intent(spec.intent_template, cell.kinds, cell.weights);
            const auto trained = train(local, intent_text, spec.dataset_id, topts, cell_dir);
            res.model_id = trained.model_id;

            auto xapp = onboard(local, "xapp-" + cell.id, trained.model_id, trained.intent_id,
                                domain_for_kinds(cell.kinds),
                                ric::TimerSet::by_name(cell.timer_set));
            const auto experiment =
                run_experiment(cell.scenario, {std::move(xapp)}, cell_dir / "run");

            res.median_embb_mbps = experiment.summaries.at("embb/dl_brate").median;
            res.median_mmtc_pkts = experiment.summaries.at("mmtc/dl_tx_pkts").median;
            res.median_urllc_buffer = experiment.summaries.at("urllc/dl_buffer").median;
            res.ok = true;
        } catch (const std::exception& e) {
            res.ok = false;
            res.error = e.what();
        }
        results[i] = std::move(res);
    };

    if (jobs <= 1) {
        for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= cells.size()) break;
                run_cell(i);
            }
        };
        std::vector<std::future<void>> pool;
        for (int j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }

    std::sort(results.begin(), results.end(),
              [](const SweepCellResult& a, const SweepCellResult& b) {
                  return a.cell_id < b.cell_id;
              });

    std::string table =
        "cell_id,status,model_id,median_embb_mbps,median_mmtc_pkts,median_urllc_buffer,error\n";
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof line, "%s,%s,%s,%.9g,%.9g,%.9g,%s\n", r.cell_id.c_str(),
                      r.ok ? "ok" : "error", r.model_id.c_str(), r.median_embb_mbps,
                      r.median_mmtc_pkts, r.median_urllc_buffer, r.error.c_str());
        table += line;
    }
    std::ofstream(outdir / "sweep.csv", std::ios::binary) << table;
    return results;
}

}  // namespace ranlab::harness
