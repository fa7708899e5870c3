#include "ranlab/autoencoder.hpp"

#include <algorithm>
#include <numeric>

namespace ranlab::drl {

KpmWindow window_from_samples(std::span<const KpmSample> last_k) {
    if (last_k.size() != kWindowLen)
        throw std::invalid_argument("window_from_samples: need exactly 10 samples");
    KpmWindow w{};
    for (size_t t = 0; t < kWindowLen; ++t) {
        w[t * kWindowKpis + 0] = static_cast<double>(last_k[t].dl_buffer_bytes);
        w[t * kWindowKpis + 1] = last_k[t].dl_brate_mbps;
        w[t * kWindowKpis + 2] = static_cast<double>(last_k[t].dl_tx_pkts);
    }
    return w;
}

NormBounds NormBounds::from_windows(std::span<const KpmWindow> ws) {
    NormBounds b;
    if (ws.empty()) return b;
    for (size_t k = 0; k < kWindowKpis; ++k) {
        double lo = ws[0][k], hi = ws[0][k];
        for (const auto& w : ws)
            for (size_t t = 0; t < kWindowLen; ++t) {
                lo = std::min(lo, w[t * kWindowKpis + k]);
                hi = std::max(hi, w[t * kWindowKpis + k]);
            }
        b.min[k] = lo;
        b.max[k] = hi;
    }
    return b;
}

KpmWindow NormBounds::normalize(const KpmWindow& w) const {
    KpmWindow out{};
    for (size_t t = 0; t < kWindowLen; ++t)
        for (size_t k = 0; k < kWindowKpis; ++k) {
            const double span = max[k] - min[k];
            const double v = w[t * kWindowKpis + k];
            out[t * kWindowKpis + k] = span > 0.0 ? std::clamp((v - min[k]) / span, 0.0, 1.0)
                                                  : 0.0;
        }
    return out;
}

EncoderModel EncoderModel::untrained(Rng& rng) {
    EncoderModel m;
    m.encoder = Mlp::random({kWindowFlat, 256, 128, 32, kLatentDim},
                            {Activation::Relu, Activation::Relu, Activation::Relu,
                             Activation::Relu},
                            rng);
    m.decoder = Mlp::random({kLatentDim, 32, 128, 256, kWindowFlat},
                            {Activation::Relu, Activation::Relu, Activation::Relu,
                             Activation::Linear},
                            rng);
    return m;
}

std::array<double, kLatentDim> EncoderModel::encode(const KpmWindow& normalized) const {
    const auto out = encoder.forward(std::span<const double>(normalized));
    std::array<double, kLatentDim> latent{};
    std::copy(out.begin(), out.end(), latent.begin());
    return latent;
}

std::array<double, kLatentDim> encode_window(const EncoderModel& enc, const KpmWindow& raw) {
    return enc.encode(enc.bounds.normalize(raw));
}

namespace {

double sample_loss_and_grads(EncoderModel& m, const KpmWindow& x, std::vector<double>& g_enc,
                             std::vector<double>& g_dec) {
    Mlp::Tape enc_tape, dec_tape;
    const auto latent = m.encoder.forward(std::span<const double>(x), enc_tape);
    const auto recon = m.decoder.forward(latent, dec_tape);
    double loss = 0.0;
    std::vector<double> upstream(recon.size());
    for (size_t i = 0; i < recon.size(); ++i) {
        const double diff = recon[i] - x[i];
        loss += diff * diff;
        upstream[i] = 2.0 * diff / static_cast<double>(recon.size());
    }
    loss /= static_cast<double>(recon.size());
    std::vector<double> latent_grad;
    const auto gd = m.decoder.backward(dec_tape, upstream, &latent_grad);
    const auto ge = m.encoder.backward(enc_tape, latent_grad);
    for (size_t i = 0; i < gd.size(); ++i) g_dec[i] += gd[i];
    for (size_t i = 0; i < ge.size(); ++i) g_enc[i] += ge[i];
    return loss;
}

}  // namespace

EncoderModel train_autoencoder(std::span<const KpmWindow> dataset, int epochs, double lr,
                               Rng& rng, AutoencoderStats* stats, int batch_size) {
    if (dataset.empty()) throw std::invalid_argument("train_autoencoder: empty dataset");
    EncoderModel m = EncoderModel::untrained(rng);
    m.bounds = NormBounds::from_windows(dataset);

    std::vector<KpmWindow> normalized;
    normalized.reserve(dataset.size());
    for (const auto& w : dataset) normalized.push_back(m.bounds.normalize(w));

    AdamState enc_state, dec_state;
    std::vector<size_t> order(normalized.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates with our own stream
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        double epoch_loss = 0.0;
        size_t done = 0;
        while (done < order.size()) {
            const size_t take = std::min<size_t>(batch_size, order.size() - done);
            std::vector<double> g_enc(m.encoder.param_count(), 0.0);
            std::vector<double> g_dec(m.decoder.param_count(), 0.0);
            double batch_loss = 0.0;
            for (size_t i = 0; i < take; ++i)
                batch_loss += sample_loss_and_grads(m, normalized[order[done + i]], g_enc, g_dec);
            const double inv = 1.0 / static_cast<double>(take);
            for (double& g : g_enc) g *= inv;
            for (double& g : g_dec) g *= inv;
            adam_step(m.encoder.params(), g_enc, enc_state, lr);
            adam_step(m.decoder.params(), g_dec, dec_state, lr);
            epoch_loss += batch_loss;
            done += take;
        }
        if (stats) stats->epoch_mse.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return m;
}

double reconstruction_mse(const EncoderModel& m, std::span<const KpmWindow> dataset) {
    if (dataset.empty()) throw std::invalid_argument("reconstruction_mse: empty dataset");
    double total = 0.0;
    for (const auto& raw : dataset) {
        const auto x = m.bounds.normalize(raw);
        const auto latent = m.encoder.forward(std::span<const double>(x));
        const auto recon = m.decoder.forward(latent);
        double loss = 0.0;
        for (size_t i = 0; i < recon.size(); ++i) {
            const double d = recon[i] - x[i];
            loss += d * d;
        }
        total += loss / static_cast<double>(recon.size());
    }
    return total / static_cast<double>(dataset.size());
}

}  // namespace ranlab::drl
