#include "crossing/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace crossing {

const char* activation_name(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    throw std::invalid_argument("unknown activation: " + name);
}

Network::Network(const MlpSpec& spec) : spec_(spec) {
    if (spec.input <= 0 || spec.hidden.empty())
        throw std::invalid_argument("network needs a positive input width and hidden layers");
    build_layout();
}

void Network::build_layout() {
    layers_.clear();
    std::size_t off = 0;
    int in = spec_.input;
    auto add = [&](int out) {
        LayerRef l;
        l.in = in;
        l.out = out;
        l.w_off = off;
        off += static_cast<std::size_t>(in) * out;
        l.b_off = off;
        off += out;
        layers_.push_back(l);
        in = out;
    };
    for (int h : spec_.hidden) add(h);
    int last = spec_.hidden.back();
    in = last;
    add(1);  // mean head
    in = last;
    add(1);  // value head
    params_.assign(off + 1, 0.0f);  // + log_std
}

Network::Output Network::forward(const std::vector<float>& input, Cache* cache) const {
    if (static_cast<int>(input.size()) != spec_.input)
        throw std::invalid_argument("input width mismatch");
    if (cache) {
        cache->acts.clear();
        cache->acts.push_back(input);
    }
    std::vector<float> cur = input;
    std::size_t n_trunk = spec_.hidden.size();
    for (std::size_t li = 0; li < n_trunk; ++li) {
        const LayerRef& l = layers_[li];
        std::vector<float> next(l.out);
        for (int o = 0; o < l.out; ++o) {
            const float* w = params_.data() + l.w_off + static_cast<std::size_t>(o) * l.in;
            float acc = params_[l.b_off + o];
            for (int i = 0; i < l.in; ++i) acc += w[i] * cur[i];
            next[o] = spec_.activation == Activation::Tanh ? std::tanh(acc)
                                                           : (acc > 0.0f ? acc : 0.0f);
        }
        cur = std::move(next);
        if (cache) cache->acts.push_back(cur);
    }
    auto head = [&](const LayerRef& l) {
        const float* w = params_.data() + l.w_off;
        float acc = params_[l.b_off];
        for (int i = 0; i < l.in; ++i) acc += w[i] * cur[i];
        return acc;
    };
    return {head(layers_[n_trunk]), head(layers_[n_trunk + 1])};
}

void Network::backward(const Cache& cache, float d_mean, float d_value,
                       std::vector<float>& grad) const {
    if (grad.size() != params_.size()) throw std::invalid_argument("grad size mismatch");
    std::size_t n_trunk = spec_.hidden.size();
    if (cache.acts.size() != n_trunk + 1) throw std::invalid_argument("stale forward cache");

    const std::vector<float>& top = cache.acts.back();
    std::vector<float> d_top(top.size(), 0.0f);
    auto head_back = [&](const LayerRef& l, float d_out) {
        for (int i = 0; i < l.in; ++i) {
            grad[l.w_off + i] += d_out * top[i];
            d_top[i] += d_out * params_[l.w_off + i];
        }
        grad[l.b_off] += d_out;
    };
    head_back(layers_[n_trunk], d_mean);
    head_back(layers_[n_trunk + 1], d_value);

    std::vector<float> delta = std::move(d_top);
    for (std::size_t li = n_trunk; li-- > 0;) {
        const LayerRef& l = layers_[li];
        const std::vector<float>& out = cache.acts[li + 1];
        const std::vector<float>& in = cache.acts[li];
        // through the activation
        for (int o = 0; o < l.out; ++o) {
            if (spec_.activation == Activation::Tanh)
                delta[o] *= 1.0f - out[o] * out[o];
            else if (out[o] <= 0.0f)
                delta[o] = 0.0f;
        }
        std::vector<float> d_in(l.in, 0.0f);
        for (int o = 0; o < l.out; ++o) {
            const float* w = params_.data() + l.w_off + static_cast<std::size_t>(o) * l.in;
            float* gw = grad.data() + l.w_off + static_cast<std::size_t>(o) * l.in;
            float d = delta[o];
            for (int i = 0; i < l.in; ++i) {
                gw[i] += d * in[i];
                d_in[i] += d * w[i];
            }
            grad[l.b_off + o] += d;
        }
        delta = std::move(d_in);
    }
}

namespace {

// Orthogonal rows via Gram-Schmidt on a Gaussian draw; transposed when the
// matrix is tall.
void orthogonal_fill(float* w, int rows, int cols, double gain, Rng& rng) {
    int r = std::min(rows, cols), c = std::max(rows, cols);
    std::vector<std::vector<double>> basis(r, std::vector<double>(c));
    for (auto& row : basis)
        for (auto& x : row) x = rng.normal();
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < i; ++j) {
            double dot = 0.0;
            for (int k = 0; k < c; ++k) dot += basis[i][k] * basis[j][k];
            for (int k = 0; k < c; ++k) basis[i][k] -= dot * basis[j][k];
        }
        double norm = 0.0;
        for (int k = 0; k < c; ++k) norm += basis[i][k] * basis[i][k];
        norm = std::sqrt(std::max(norm, 1e-30));
        for (int k = 0; k < c; ++k) basis[i][k] /= norm;
    }
    bool transposed = rows > cols;
    for (int o = 0; o < rows; ++o)
        for (int i = 0; i < cols; ++i) {
            double v = transposed ? basis[i][o] : basis[o][i];
            w[o * cols + i] = static_cast<float>(gain * v);
        }
}

}  // namespace

void Network::init_weights(Rng& rng) {
    double hidden_gain = spec_.activation == Activation::Relu ? std::sqrt(2.0) : 5.0 / 3.0;
    std::size_t n_trunk = spec_.hidden.size();
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const LayerRef& l = layers_[li];
        double gain = li < n_trunk ? hidden_gain : 0.01;
        orthogonal_fill(params_.data() + l.w_off, l.out, l.in, gain, rng);
        for (int o = 0; o < l.out; ++o) params_[l.b_off + o] = 0.0f;
    }
    params_[layers_[n_trunk].b_off] = static_cast<float>(spec_.init_policy_bias);
    set_log_std(std::log(0.5f));  // pre-squash action std 0.5
}

void adam_step(std::vector<float>& params, const std::vector<float>& grads,
               const AdamConfig& cfg, AdamState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("grad size mismatch");
    for (float g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient in adam_step");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0f);
        state.v.assign(params.size(), 0.0f);
        state.step = 0;
    }
    state.step += 1;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double m = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        double v = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * double(grads[i]) * grads[i];
        state.m[i] = static_cast<float>(m);
        state.v[i] = static_cast<float>(v);
        double update = cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
        params[i] = static_cast<float>(params[i] - update);
    }
}

void clip_global_norm(std::vector<float>& grads, double max_norm) {
    double sq = 0.0;
    for (float g : grads) sq += double(g) * g;
    double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        double scale = max_norm / norm;
        for (float& g : grads) g = static_cast<float>(g * scale);
    }
}

namespace {

const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    for (std::size_t i = 0; i < n; i += 3) {
        unsigned v = p[i] << 16;
        if (i + 1 < n) v |= p[i + 1] << 8;
        if (i + 2 < n) v |= p[i + 2];
        out.push_back(kB64[(v >> 18) & 63]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(i + 1 < n ? kB64[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < n ? kB64[v & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> b64_decode(const std::string& s) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (s.size() % 4 != 0) throw std::runtime_error("bad base64 payload");
    std::vector<unsigned char> out;
    out.reserve(s.size() / 4 * 3);
    for (std::size_t i = 0; i < s.size(); i += 4) {
        int pad = (s[i + 3] == '=') + (s[i + 2] == '=');
        unsigned v = 0;
        for (int j = 0; j < 4; ++j) {
            char c = s[i + j];
            int d = (c == '=') ? 0 : val(c);
            if (d < 0) throw std::runtime_error("bad base64 payload");
            v = (v << 6) | static_cast<unsigned>(d);
        }
        out.push_back((v >> 16) & 255);
        if (pad < 2) out.push_back((v >> 8) & 255);
        if (pad < 1) out.push_back(v & 255);
    }
    return out;
}

std::string floats_b64(const std::vector<float>& v) {
    return b64_encode(v.data(), v.size() * sizeof(float));
}

std::vector<float> b64_floats(const std::string& s) {
    auto bytes = b64_decode(s);
    if (bytes.size() % sizeof(float) != 0) throw std::runtime_error("bad float blob size");
    std::vector<float> out(bytes.size() / sizeof(float));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

constexpr int kCheckpointVersion = 1;

nlohmann::json norm_to_json(const NormalizerSnapshot& n) {
    return {{"count", n.count}, {"mean", n.mean}, {"var", n.var}, {"clip", n.clip}};
}

NormalizerSnapshot norm_from_json(const nlohmann::json& j) {
    NormalizerSnapshot n;
    n.count = j.at("count").get<double>();
    n.mean = j.at("mean").get<std::vector<double>>();
    n.var = j.at("var").get<std::vector<double>>();
    n.clip = j.at("clip").get<double>();
    return n;
}

}  // namespace

std::string checkpoint_save(const PolicyCheckpoint& ckpt) {
    nlohmann::json j;
    j["format"] = "crossing-policy";
    j["version"] = kCheckpointVersion;
    j["spec"] = {{"input", ckpt.net.spec().input},
                 {"hidden", ckpt.net.spec().hidden},
                 {"activation", activation_name(ckpt.net.spec().activation)}};
    j["params"] = floats_b64(ckpt.net.params());
    j["adam"] = {{"m", floats_b64(ckpt.adam.m)},
                 {"v", floats_b64(ckpt.adam.v)},
                 {"step", ckpt.adam.step}};
    j["obs_norm"] = norm_to_json(ckpt.obs_norm);
    j["ret_norm"] = norm_to_json(ckpt.ret_norm);
    j["rng"] = ckpt.rng_state;
    return j.dump(2) + "\n";
}

PolicyCheckpoint checkpoint_load(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("unreadable checkpoint: ") + e.what());
    }
    if (j.value("format", "") != "crossing-policy")
        throw std::runtime_error("not a crossing policy checkpoint");
    int version = j.value("version", -1);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    MlpSpec spec;
    spec.input = j.at("spec").at("input").get<int>();
    spec.hidden = j.at("spec").at("hidden").get<std::vector<int>>();
    spec.activation = parse_activation(j.at("spec").at("activation").get<std::string>());

    PolicyCheckpoint ckpt;
    ckpt.net = Network(spec);
    auto params = b64_floats(j.at("params").get<std::string>());
    if (params.size() != ckpt.net.param_count())
        throw std::runtime_error("checkpoint parameter blob does not match spec");
    ckpt.net.params() = std::move(params);
    ckpt.adam.m = b64_floats(j.at("adam").at("m").get<std::string>());
    ckpt.adam.v = b64_floats(j.at("adam").at("v").get<std::string>());
    ckpt.adam.step = j.at("adam").at("step").get<std::int64_t>();
    ckpt.obs_norm = norm_from_json(j.at("obs_norm"));
    ckpt.ret_norm = norm_from_json(j.at("ret_norm"));
    ckpt.rng_state = j.at("rng").get<std::string>();
    return ckpt;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << bytes;
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::string out((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return out;
}

}  // namespace crossing
