#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kb/classfn.hpp"
#include "kb/dataset.hpp"

namespace kb {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// --- architectures ----------------------------------------------------------

/// N(x) = sum_k a_k sigma(<w_k, x> + b_k).
struct ShallowNet {
    Eigen::MatrixXd w; // N x n, rows are unit weight vectors
    Eigen::VectorXd b; // N
    Eigen::VectorXd a; // N output coefficients

    int input_bits() const { return static_cast<int>(w.cols()); }
    int units() const { return static_cast<int>(w.rows()); }
};

/// Layered net. Hidden layers pass a_k-scaled unit activations forward,
/// h^{l+1} = a^l .* sigma(W^l h^l + b^l); the final layer sums instead, so a
/// single layer is exactly a ShallowNet.
struct DeepNet {
    struct Layer {
        Eigen::MatrixXd w; // N_l x d_l
        Eigen::VectorXd b; // N_l
        Eigen::VectorXd a; // N_l
    };
    std::vector<Layer> layers;

    int input_bits() const { return layers.empty() ? 0 : static_cast<int>(layers.front().w.cols()); }
    int depth() const { return static_cast<int>(layers.size()); }
};

/// State recursion h^{t+1} = sigma(W h^t + v x^t + b) with h^0 = 0; input
/// bits are fed one per step, most significant first; the readout after the
/// final step is sigma(<w_o, h> + b_o).
struct RecurrentNet {
    Eigen::MatrixXd w;   // N x N
    Eigen::VectorXd v;   // N, input weights for the scalar bit
    Eigen::VectorXd b;   // N
    Eigen::VectorXd w_o; // N
    double b_o = 0.0;
    int sequence_bits = 0; // expected input length

    int units() const { return static_cast<int>(w.rows()); }
    int input_bits() const { return sequence_bits; }
};

using Network = std::variant<ShallowNet, DeepNet, RecurrentNet>;

ShallowNet make_shallow(int input_bits, int units);
DeepNet make_deep(int input_bits, const std::vector<int>& layer_units);
RecurrentNet make_recurrent(int sequence_bits, int state_units);

/// Pinned initializer: every parameter (weights, biases, gains) uniform in
/// [-1, 1], drawn in flat parameter order. Deterministic in the seed.
void init_weights(Network& net, std::uint64_t seed);

int input_bits(const Network& net);
std::string family_name(const Network& net); // "snn" | "dnn" | "rnn"

// --- forward ----------------------------------------------------------------

/// Real-valued output for one input image.
double forward(const Network& net, const Image& x);
/// Thresholded label: output >= 0.5.
int forward_label(const Network& net, const Image& x);

/// Per-layer (DNN/SNN) or per-step (RNN) unit activations sigma(.) of the
/// forward pass; used by perturbation traces and the activation raster.
std::vector<Eigen::VectorXd> forward_trace(const Network& net, const Image& x);

/// Forward pass with selected units forced: activations of (layer, unit)
/// pairs are overridden (ablation forces 0, jitter adds an offset).
struct NodeOverride {
    int layer = 0; // DNN layer index; 0 for SNN; ignored for RNN (every step)
    int unit = 0;
    bool ablate = true;     // force activation to 0
    double jitter = 0.0;    // otherwise add this to the activation
};
double forward_with_override(const Network& net, const Image& x, const NodeOverride& ov);
std::vector<Eigen::VectorXd> forward_trace_with_override(const Network& net, const Image& x,
                                                         const NodeOverride& ov);

// --- training ----------------------------------------------------------------

struct LabeledSet {
    Eigen::MatrixXd x; // B x n, entries 0/1
    Eigen::VectorXd y; // B, entries 0/1

    std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
};

LabeledSet labeled_from_classfn(const ClassFunction& f);
LabeledSet labeled_from_points(const std::vector<Image>& images, const std::vector<int>& labels);

struct TrainConfig {
    double learning_rate = 1.0;
    int epochs = 2000;
    int batch_size = 0; // 0 = full batch
    std::uint64_t seed = 1;
    double target_accuracy = 0.99; // early stop threshold tau
};

struct TrainResult {
    std::vector<double> accuracy_history; // one entry per epoch run
    int epochs_run = 0;
    bool reached_tau = false;
    std::optional<int> diverged_at; // epoch of the first non-finite loss
    double final_accuracy = 0.0;
};

/// Deterministic gradient descent with backpropagation (through time for
/// the recurrent family). Logistic cross-entropy against the 0/1 targets,
/// mean-reduced over the batch.
TrainResult train(Network& net, const LabeledSet& data, const TrainConfig& cfg);

double accuracy(const Network& net, const LabeledSet& data);

// parameter access (flat vector; order matches the serialization layout)
Eigen::VectorXd get_params(const Network& net);
void set_params(Network& net, const Eigen::VectorXd& p);
std::pair<double, Eigen::VectorXd> loss_and_gradient(const Network& net, const LabeledSet& data);
double loss_only(const Network& net, const LabeledSet& data);

// --- implementation length -----------------------------------------------------

struct QuantizationPolicy {
    int bits_per_weight = 16; // 8 or 16
    double clip_min = -8.0;
    double clip_max = 8.0;

    std::uint32_t quantize(double w) const;
    double dequantize(std::uint32_t code) const;
    double step() const {
        return (clip_max - clip_min) / static_cast<double>((1u << bits_per_weight) - 1);
    }
};

/// `KBNN1 <family> <dims...> <bits>` + quantized weight codes (little-endian
/// bytes, layout pinned in the README). The whole byte stream, header
/// included, is what implementation_length measures.
std::vector<std::uint8_t> serialize_network(const Network& net, const QuantizationPolicy& q = {});
Network deserialize_network(const std::vector<std::uint8_t>& bytes);
std::string architecture_header(const Network& net, const QuantizationPolicy& q = {});

void write_network_file(const std::string& path, const Network& net, const QuantizationPolicy& q = {});
Network read_network_file(const std::string& path);

struct ImplementationLength {
    std::int64_t raw_bits = 0;        // serialized size
    std::int64_t compressed_bits = 0; // k_hat of the serialization
};
ImplementationLength implementation_length(const Network& net, const QuantizationPolicy& q = {});

/// E = min(1, K_hat[f] / l(N)); the denominator is the compressed length.
double efficiency_from_khat(std::int64_t k_hat_f, const Network& net, const QuantizationPolicy& q = {});
double efficiency(const Network& net, const ClassFunction& f, const QuantizationPolicy& q = {},
                  const std::vector<Image>* candidates = nullptr);

/// Wrap a trained net as a class function over B^n (backing: network).
ClassFunction classfn_from_network(std::shared_ptr<const Network> net, std::string id = "");

} // namespace kb
