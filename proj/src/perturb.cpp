#include "kb/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kb/lzw.hpp"
#include "kb/rng.hpp"

namespace kb {
namespace {

constexpr double kRasterThreshold = 0.05;

Image flip_bits(const Image& x, int count, Rng& rng) {
    BitString bits = x.bits();
    if (count <= 0) return Image(bits);
    std::vector<std::size_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(count) && chosen.size() < bits.size()) {
        std::size_t pos = rng.below(bits.size());
        if (std::find(chosen.begin(), chosen.end(), pos) == chosen.end()) chosen.push_back(pos);
    }
    for (std::size_t pos : chosen) bits.set(pos, !bits.bit(pos));
    return Image(bits);
}

Image random_point_in_class(const ClassFunction& f, int want_label, Rng& rng) {
    const int n = f.n();
    for (int attempt = 0; attempt < 1 << 20; ++attempt) {
        std::uint64_t x = n >= 64 ? rng.next_u64() : rng.next_u64() & ((1ULL << n) - 1);
        if (f.label(x) == want_label) return image_from_point(x, n);
    }
    throw InvalidArgument("could not sample the requested class (is it empty?)");
}

struct MeanAccumulator {
    double sum = 0.0, sumsq = 0.0;
    int count = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++count;
    }
    double mean() const { return count ? sum / count : 0.0; }
    double se() const {
        if (count < 2) return 0.0;
        double m = mean();
        double var = (sumsq - m * m * count) / (count - 1);
        return std::sqrt(std::max(var, 0.0) / count);
    }
};

std::vector<Image> class1_samples(const ClassFunction& f, const std::vector<Image>* pool) {
    if (pool) {
        StackedDataset d = model_from_classfn(f, Ordering::CanonicalLexicographic, 0, 1, 0, pool);
        return d.images();
    }
    return model_from_classfn(f).images();
}

} // namespace

PerturbReport input_perturbation(const Network& trained, const ClassFunction& f,
                                 const PerturbationSpec& spec, const std::vector<Image>* class1_pool) {
    if (spec.kind != PerturbationKind::InputBitFlips)
        throw InvalidArgument("input_perturbation expects an input-bit-flip spec");

    std::vector<Image> in_class = class1_samples(f, class1_pool);
    if (in_class.empty()) throw InvalidArgument("class 1 is empty");

    Network twin = trained;
    init_weights(twin, derive_seed(spec.seed, "twin"));

    PerturbReport rep;
    rep.trials = spec.trials;
    rep.twin_header = architecture_header(twin);
    double domain = std::pow(2.0, f.n());
    rep.class_fraction = static_cast<double>(in_class.size()) / domain;

    Rng rng(derive_seed(spec.seed, "input-perturbation"));
    MeanAccumulator din, dout, cin, cout_;
    std::vector<double> trace_sum;
    std::vector<std::size_t> trace_count;

    for (int trial = 0; trial < spec.trials; ++trial) {
        const Image& h = in_class[rng.below(in_class.size())];
        Image hp = flip_bits(h, spec.flip_count, rng);
        din.add(forward_label(trained, h) - forward_label(trained, hp));
        cin.add(forward_label(twin, h) - forward_label(twin, hp));

        auto t0 = forward_trace(trained, h);
        auto t1 = forward_trace(trained, hp);
        if (trace_sum.size() < t0.size()) {
            trace_sum.resize(t0.size(), 0.0);
            trace_count.resize(t0.size(), 0);
        }
        for (std::size_t l = 0; l < t0.size(); ++l) {
            trace_sum[l] += (t0[l] - t1[l]).cwiseAbs().mean();
            trace_count[l]++;
        }

        Image hbar = random_point_in_class(f, 0, rng);
        Image hbarp = flip_bits(hbar, spec.flip_count, rng);
        dout.add(forward_label(trained, hbar) - forward_label(trained, hbarp));
        cout_.add(forward_label(twin, hbar) - forward_label(twin, hbarp));
    }

    rep.delta_in_class = din.mean();
    rep.delta_out_class = dout.mean();
    rep.control_in = cin.mean();
    rep.control_out = cout_.mean();
    rep.se_in = din.se();
    rep.se_out = dout.se();
    rep.se_control_in = cin.se();
    rep.se_control_out = cout_.se();
    rep.layer_trace.resize(trace_sum.size());
    for (std::size_t l = 0; l < trace_sum.size(); ++l)
        rep.layer_trace[l] = trace_count[l] ? trace_sum[l] / static_cast<double>(trace_count[l]) : 0.0;
    return rep;
}

PerturbReport node_perturbation(const Network& net, const ClassFunction& f,
                                const PerturbationSpec& spec, const std::vector<Image>* class1_pool) {
    if (spec.kind == PerturbationKind::InputBitFlips)
        throw InvalidArgument("node_perturbation expects a node spec");

    // fixed evaluation set: full domain when small, else H plus matched 0s
    std::vector<Image> eval;
    std::vector<int> truth;
    if (f.n() <= 12) {
        for (std::uint64_t x = 0; x < f.domain_size(); ++x) {
            eval.push_back(image_from_point(x, f.n()));
            truth.push_back(f.label(x));
        }
    } else {
        std::vector<Image> ones = class1_samples(f, class1_pool);
        Rng rng(derive_seed(spec.seed, "node-eval"));
        for (const Image& img : ones) {
            eval.push_back(img);
            truth.push_back(1);
        }
        for (std::size_t i = 0; i < ones.size(); ++i) {
            eval.push_back(random_point_in_class(f, 0, rng));
            truth.push_back(0);
        }
    }

    // enumerate layer shapes from a probe trace
    std::vector<Eigen::VectorXd> probe = forward_trace(net, eval.front());

    PerturbReport rep;
    rep.trials = static_cast<int>(eval.size());
    double domain = std::pow(2.0, f.n());
    rep.class_fraction = 0.0;
    {
        std::size_t ones = 0;
        for (int t : truth) ones += t == 1;
        rep.class_fraction = static_cast<double>(ones) / domain;
    }

    std::vector<int> base_labels(eval.size());
    for (std::size_t i = 0; i < eval.size(); ++i) base_labels[i] = forward_label(net, eval[i]);

    bool rnn = std::holds_alternative<RecurrentNet>(net);
    int layer_count = rnn ? 1 : static_cast<int>(probe.size());

    std::vector<double> all_probs;
    std::int64_t changes_on_class1 = 0, landed_zero = 0;
    rep.flip_probability.assign(static_cast<std::size_t>(layer_count), {});

    for (int layer = 0; layer < layer_count; ++layer) {
        if (spec.layer >= 0 && layer != spec.layer) continue;
        int units = rnn ? static_cast<int>(std::get<RecurrentNet>(net).units())
                        : static_cast<int>(probe[static_cast<std::size_t>(layer)].size());
        for (int unit = 0; unit < units; ++unit) {
            if (spec.unit >= 0 && unit != spec.unit) continue;
            NodeOverride ov;
            ov.layer = layer;
            ov.unit = unit;
            ov.ablate = spec.kind == PerturbationKind::NodeAblation;
            ov.jitter = spec.amplitude;
            std::size_t flips = 0;
            for (std::size_t i = 0; i < eval.size(); ++i) {
                int lab = forward_with_override(net, eval[i], ov) >= 0.5 ? 1 : 0;
                if (lab != base_labels[i]) {
                    ++flips;
                    if (truth[i] == 1) {
                        ++changes_on_class1;
                        landed_zero += lab == 0;
                    }
                }
            }
            double prob = static_cast<double>(flips) / static_cast<double>(eval.size());
            rep.flip_probability[static_cast<std::size_t>(layer)].push_back(prob);
            all_probs.push_back(prob);
        }
    }

    if (!all_probs.empty()) {
        std::sort(all_probs.begin(), all_probs.end());
        std::size_t mid = all_probs.size() / 2;
        rep.median_flip_probability = all_probs.size() % 2 ? all_probs[mid]
                                                          : 0.5 * (all_probs[mid - 1] + all_probs[mid]);
    }
    rep.land_in_class0_frequency =
        changes_on_class1 ? static_cast<double>(landed_zero) / static_cast<double>(changes_on_class1) : 1.0;
    return rep;
}

PciReport pci_proxy(const Network& net, const Image& baseline, const PerturbationSpec& spec) {
    std::vector<Eigen::VectorXd> before = forward_trace(net, baseline);
    std::vector<Eigen::VectorXd> after;
    if (spec.kind == PerturbationKind::InputBitFlips) {
        Rng rng(derive_seed(spec.seed, "pci"));
        after = forward_trace(net, flip_bits(baseline, spec.flip_count, rng));
    } else {
        NodeOverride ov;
        ov.layer = std::max(spec.layer, 0);
        ov.unit = std::max(spec.unit, 0);
        ov.ablate = spec.kind == PerturbationKind::NodeAblation;
        ov.jitter = spec.amplitude;
        after = forward_trace_with_override(net, baseline, ov);
    }

    PciReport rep;
    rep.steps = static_cast<int>(before.size());
    Eigen::Index widest = 0;
    for (const auto& v : before) widest = std::max(widest, v.size());
    rep.nodes = static_cast<int>(widest);

    rep.raster = BitString::zeros(static_cast<std::size_t>(rep.nodes) * static_cast<std::size_t>(rep.steps));
    for (int node = 0; node < rep.nodes; ++node)
        for (int step = 0; step < rep.steps; ++step) {
            const auto& b = before[static_cast<std::size_t>(step)];
            const auto& a = after[static_cast<std::size_t>(step)];
            double diff = node < b.size() ? std::abs(a[node] - b[node]) : 0.0;
            if (diff > kRasterThreshold)
                rep.raster.set(static_cast<std::size_t>(node) * static_cast<std::size_t>(rep.steps) +
                                   static_cast<std::size_t>(step),
                               true);
        }

    rep.k_hat_raster = lzw::k_hat(rep.raster);
    rep.index = static_cast<double>(rep.k_hat_raster) /
                std::max<double>(1.0, static_cast<double>(rep.raster.size()));
    return rep;
}

std::string PciReport::to_pbm() const {
    std::ostringstream os;
    os << "P1\n" << steps << " " << nodes << "\n";
    for (int node = 0; node < nodes; ++node) {
        for (int step = 0; step < steps; ++step) {
            os << (raster.bit(static_cast<std::size_t>(node) * static_cast<std::size_t>(steps) +
                              static_cast<std::size_t>(step))
                       ? '1'
                       : '0');
            os << (step + 1 == steps ? '\n' : ' ');
        }
    }
    return os.str();
}

std::string PciReport::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"index\":" << index << ",\"k_hat_raster\":" << k_hat_raster << ",\"nodes\":" << nodes
       << ",\"raster_bits\":" << raster.size() << ",\"steps\":" << steps << "}";
    return os.str();
}

std::string PerturbReport::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"class_fraction\":" << class_fraction << ",\"control_in\":" << control_in
       << ",\"control_out\":" << control_out << ",\"delta_in_class\":" << delta_in_class
       << ",\"delta_out_class\":" << delta_out_class
       << ",\"land_in_class0_frequency\":" << land_in_class0_frequency
       << ",\"layer_trace\":[";
    for (std::size_t i = 0; i < layer_trace.size(); ++i)
        os << (i ? "," : "") << layer_trace[i];
    os << "],\"median_flip_probability\":" << median_flip_probability
       << ",\"se_control_in\":" << se_control_in << ",\"se_control_out\":" << se_control_out
       << ",\"se_in\":" << se_in << ",\"se_out\":" << se_out << ",\"trials\":" << trials << "}";
    return os.str();
}

} // namespace kb
