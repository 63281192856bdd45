#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossing/rng.hpp"

namespace crossing {

enum class Activation { Tanh, Relu };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);

struct MlpSpec {
    int input = 6;
    std::vector<int> hidden = {128, 128, 128};
    Activation activation = Activation::Tanh;
    // Pre-squash policy-head bias at init. Negative values make the untrained
    // policy cautious (low throttle), so early episodes terminate quickly via
    // the stall cutoff instead of farming long low-speed rollouts.
    double init_policy_bias = -1.25;
};

/// Feedforward trunk with two linear heads (pre-squash policy mean, value)
/// and a learnable log-std scalar. Parameters live in one flat float vector.
class Network {
  public:
    Network() = default;
    explicit Network(const MlpSpec& spec);

    const MlpSpec& spec() const { return spec_; }
    std::vector<float>& params() { return params_; }
    const std::vector<float>& params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    float log_std() const { return params_.back(); }
    void set_log_std(float v) { params_.back() = v; }

    struct Output {
        float mean = 0.0f;   // pre-squash policy mean
        float value = 0.0f;  // state value
    };

    /// Per-layer activations recorded by forward(), consumed by backward().
    struct Cache {
        std::vector<std::vector<float>> acts;  // input + post-activation per layer
    };

    Output forward(const std::vector<float>& input, Cache* cache = nullptr) const;

    /// Accumulates exact gradients of d_mean*mean + d_value*value into grad
    /// (flat layout matching params). grad must be pre-sized and may carry
    /// contributions from other samples.
    void backward(const Cache& cache, float d_mean, float d_value,
                  std::vector<float>& grad) const;

    /// Orthogonal initialization: gain sqrt(2) (relu) or 5/3 (tanh) for
    /// hidden layers, 0.01 for both heads, zero biases except the policy-head
    /// bias (init_policy_bias), log_std = ln(0.5).
    void init_weights(Rng& rng);

  private:
    struct LayerRef {
        std::size_t w_off = 0, b_off = 0;
        int in = 0, out = 0;
    };
    void build_layout();

    MlpSpec spec_;
    std::vector<LayerRef> layers_;  // trunk layers, then mean head, value head
    std::vector<float> params_;     // [... layers ..., log_std]
};

struct AdamConfig {
    double lr = 2.5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<float> m, v;
    std::int64_t step = 0;
};

/// Bias-corrected Adam update in place. Throws on non-finite gradients.
void adam_step(std::vector<float>& params, const std::vector<float>& grads,
               const AdamConfig& cfg, AdamState& state);

/// Scales grads so their global L2 norm is at most max_norm.
void clip_global_norm(std::vector<float>& grads, double max_norm);

struct NormalizerSnapshot {
    double count = 0.0;
    std::vector<double> mean, var;
    double clip = 10.0;
};

struct PolicyCheckpoint {
    Network net;
    AdamState adam;
    NormalizerSnapshot obs_norm;
    NormalizerSnapshot ret_norm;
    std::string rng_state;
};

/// Versioned JSON checkpoint with base64 float32 blobs; round-trips
/// bit-exactly.
std::string checkpoint_save(const PolicyCheckpoint& ckpt);
PolicyCheckpoint checkpoint_load(const std::string& bytes);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace crossing
