#pragma once

#include <array>
#include <vector>

#include "ranlab/kpm.hpp"
#include "ranlab/mlp.hpp"

namespace ranlab::drl {

inline constexpr size_t kWindowLen = 10;   // K measurements
inline constexpr size_t kWindowKpis = 3;   // M metrics: dl_buffer, dl_brate, dl_tx_pkts
inline constexpr size_t kWindowFlat = kWindowLen * kWindowKpis;
inline constexpr size_t kLatentDim = 3;

// One K x M slice window, rows time-ordered oldest -> newest, columns in KPI
// order (dl_buffer, dl_brate, dl_tx_pkts). Flattened row-major.
using KpmWindow = std::array<double, kWindowFlat>;

KpmWindow window_from_samples(std::span<const KpmSample> last_k);

// Dataset-wide per-KPI min/max, stored alongside the encoder so inference
// normalizes exactly like training did.
struct NormBounds {
    std::array<double, kWindowKpis> min{0.0, 0.0, 0.0};
    std::array<double, kWindowKpis> max{1.0, 1.0, 1.0};

    static NormBounds from_windows(std::span<const KpmWindow> ws);
    KpmWindow normalize(const KpmWindow& w) const;
    bool operator==(const NormBounds&) const = default;
};

// Encoder 30 -> 256 -> 128 -> 32 -> 3 (relu); the paired decoder mirrors it
// and exists only for training.
struct EncoderModel {
    Mlp encoder;
    Mlp decoder;
    NormBounds bounds;

    static EncoderModel untrained(Rng& rng);

    // expects a normalized window
    std::array<double, kLatentDim> encode(const KpmWindow& normalized) const;
};

// 3-vector latent for one slice window (normalizes internally).
std::array<double, kLatentDim> encode_window(const EncoderModel& enc, const KpmWindow& raw);

struct AutoencoderStats {
    std::vector<double> epoch_mse;  // decreasing training curve
};

// Minibatch Adam on reconstruction MSE; bounds computed from the dataset.
// The returned encoder is frozen afterwards for DRL training.
EncoderModel train_autoencoder(std::span<const KpmWindow> dataset, int epochs, double lr,
                               Rng& rng, AutoencoderStats* stats = nullptr, int batch_size = 16);

// Mean reconstruction MSE over a dataset (normalized domain).
double reconstruction_mse(const EncoderModel& m, std::span<const KpmWindow> dataset);

}  // namespace ranlab::drl
