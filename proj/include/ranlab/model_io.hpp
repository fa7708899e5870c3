#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "ranlab/autoencoder.hpp"
#include "ranlab/dqn.hpp"
#include "ranlab/intent.hpp"
#include "ranlab/ppo.hpp"

namespace ranlab::drl {

// Trained agent plus the shared KPM encoder: the artifact that gets
// on-boarded as an xApp.
struct PolicyModel {
    std::variant<PpoAgent, DqnAgent> agent;
    EncoderModel encoder;
    intent::ActionSpaceKind action_kind = intent::ActionSpaceKind::Slicing;
    std::optional<SliceId> single_slice;  // for per-slice scheduling models
    size_t n_actions = 0;
    size_t state_dim = 0;
    std::map<std::string, std::string> metadata;

    bool is_ppo() const { return std::holds_alternative<PpoAgent>(agent); }
    int infer_greedy(std::span<const double> state) const;
};

// Versioned container: magic string "PNDR1" followed by canonical JSON with
// layer sizes, activations, normalization bounds and flattened weights as
// decimal strings. Round-trips bit-exactly.
inline constexpr std::string_view kModelMagic = "PNDR1";

std::string save_model(const PolicyModel& m);
PolicyModel load_model(std::string_view bytes);

// Encoder-only container (same magic + canonical JSON) used to cache the
// dataset encoder between training runs.
std::string save_encoder(const EncoderModel& m);
EncoderModel load_encoder(std::string_view bytes);

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ranlab::drl
