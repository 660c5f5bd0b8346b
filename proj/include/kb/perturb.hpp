#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kb/classfn.hpp"
#include "kb/nets.hpp"

namespace kb {

enum class PerturbationKind { InputBitFlips, NodeAblation, NodeJitter };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::InputBitFlips;
    int flip_count = 1;   // input mode; 0 = null perturbation
    int layer = -1;       // node modes; -1 = every layer
    int unit = -1;        // node modes; -1 = every unit
    double amplitude = 0.5;
    int trials = 1000;
    std::uint64_t seed = 1;
};

/// Monte-Carlo averages of D(x) - D(x + delta) for the trained net and its
/// random-weight twin, over both classes, plus diagnostics.
struct PerturbReport {
    double delta_in_class = 0.0;  // trained net, class-1 inputs
    double delta_out_class = 0.0; // trained net, class-0 inputs
    double control_in = 0.0;      // random twin, class-1 inputs
    double control_out = 0.0;     // random twin, class-0 inputs
    double se_in = 0.0, se_out = 0.0, se_control_in = 0.0, se_control_out = 0.0;
    std::vector<double> layer_trace; // mean |activation diff| per layer/step, trained net, class-1
    double class_fraction = 0.0;     // |H| / |X|
    int trials = 0;

    // node modes
    std::vector<std::vector<double>> flip_probability; // [layer][unit]
    double median_flip_probability = 0.0;
    double land_in_class0_frequency = 0.0; // label changes on class-1 inputs that land in 0
    std::string twin_header;

    std::string to_json() const;
};

/// Flip `flip_count` input bits of samples from each class and average the
/// label changes, for the trained net and a twin with the same architecture
/// and the pinned initializer (seed derived from spec.seed).
/// `class1_pool` supplies H when the domain is too wide to enumerate.
PerturbReport input_perturbation(const Network& trained, const ClassFunction& f,
                                 const PerturbationSpec& spec,
                                 const std::vector<Image>* class1_pool = nullptr);

/// Per-node label-flip probability under ablation (activation forced to 0)
/// or jitter, over a fixed evaluation set: the full domain when n <= 12,
/// otherwise H plus an equal count of seeded class-0 samples.
PerturbReport node_perturbation(const Network& net, const ClassFunction& f,
                                const PerturbationSpec& spec,
                                const std::vector<Image>* class1_pool = nullptr);

/// Perturbational-complexity proxy: binarized activation-difference raster
/// (|diff| > 0.05), node rows x layer/step columns, flattened row-major.
struct PciReport {
    BitString raster;
    int nodes = 0;
    int steps = 0;
    std::int64_t k_hat_raster = 0;
    double index = 0.0; // k_hat / max(1, raster length)

    std::string to_pbm() const; // P1 portable bitmap text
    std::string to_json() const;
};

PciReport pci_proxy(const Network& net, const Image& baseline, const PerturbationSpec& spec);

} // namespace kb
