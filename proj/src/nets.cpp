#include "kb/nets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kb/lzw.hpp"
#include "kb/rng.hpp"

namespace kb {
namespace {

Eigen::VectorXd to_vector(const Image& img) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(img.width()));
    for (std::size_t i = 0; i < img.width(); ++i) v[static_cast<Eigen::Index>(i)] = img.bit(i) ? 1.0 : 0.0;
    return v;
}

Eigen::VectorXd layer_sigma(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, const Eigen::VectorXd& h) {
    return (w * h + b).unaryExpr([](double z) { return sigmoid(z); });
}

Eigen::MatrixXd batch_sigma(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

// numerically stable mean of CE(sigma(z_i), y_i) and d/dz
double ce_from_logits(const Eigen::VectorXd& z, const Eigen::VectorXd& y, Eigen::VectorXd* dz) {
    const double inv_b = 1.0 / static_cast<double>(z.size());
    double total = 0.0;
    if (dz) dz->resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        double zi = z[i];
        total += std::max(zi, 0.0) + std::log1p(std::exp(-std::abs(zi))) - y[i] * zi;
        if (dz) (*dz)[i] = (sigmoid(zi) - y[i]) * inv_b;
    }
    return total * inv_b;
}

} // namespace

ShallowNet make_shallow(int input_bits, int units) {
    ShallowNet s;
    s.w = Eigen::MatrixXd::Zero(units, input_bits);
    s.b = Eigen::VectorXd::Zero(units);
    s.a = Eigen::VectorXd::Zero(units);
    return s;
}

DeepNet make_deep(int input_bits, const std::vector<int>& layer_units) {
    if (layer_units.empty()) throw InvalidArgument("a deep net needs at least one layer");
    DeepNet d;
    int in = input_bits;
    for (int units : layer_units) {
        DeepNet::Layer layer;
        layer.w = Eigen::MatrixXd::Zero(units, in);
        layer.b = Eigen::VectorXd::Zero(units);
        layer.a = Eigen::VectorXd::Zero(units);
        d.layers.push_back(std::move(layer));
        in = units;
    }
    return d;
}

RecurrentNet make_recurrent(int sequence_bits, int state_units) {
    RecurrentNet r;
    r.w = Eigen::MatrixXd::Zero(state_units, state_units);
    r.v = Eigen::VectorXd::Zero(state_units);
    r.b = Eigen::VectorXd::Zero(state_units);
    r.w_o = Eigen::VectorXd::Zero(state_units);
    r.b_o = 0.0;
    r.sequence_bits = sequence_bits;
    return r;
}

namespace {

void fill_uniform(Eigen::MatrixXd& m, double r, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = (2.0 * rng.next_unit() - 1.0) * r;
}

void fill_uniform(Eigen::VectorXd& v, double r, Rng& rng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = (2.0 * rng.next_unit() - 1.0) * r;
}

} // namespace

void init_weights(Network& net, std::uint64_t seed) {
    // every parameter uniform in [-1, 1], biases included; the draw order is
    // the flat parameter order, so the stream is pinned by the seed alone
    Rng rng(seed);
    if (auto* s = std::get_if<ShallowNet>(&net)) {
        fill_uniform(s->w, 1.0, rng);
        fill_uniform(s->b, 1.0, rng);
        fill_uniform(s->a, 1.0, rng);
    } else if (auto* d = std::get_if<DeepNet>(&net)) {
        for (auto& layer : d->layers) {
            fill_uniform(layer.w, 1.0, rng);
            fill_uniform(layer.b, 1.0, rng);
            fill_uniform(layer.a, 1.0, rng);
        }
    } else {
        auto& r = std::get<RecurrentNet>(net);
        fill_uniform(r.w, 1.0, rng);
        fill_uniform(r.v, 1.0, rng);
        fill_uniform(r.b, 1.0, rng);
        fill_uniform(r.w_o, 1.0, rng);
        r.b_o = 0.0;
    }
}

int input_bits(const Network& net) {
    return std::visit([](const auto& n) { return n.input_bits(); }, net);
}

std::string family_name(const Network& net) {
    if (std::holds_alternative<ShallowNet>(net)) return "snn";
    if (std::holds_alternative<DeepNet>(net)) return "dnn";
    return "rnn";
}

// --- forward -----------------------------------------------------------------

double forward(const Network& net, const Image& x) {
    if (static_cast<int>(x.width()) != input_bits(net))
        throw WidthMismatch(x.width(), static_cast<std::size_t>(input_bits(net)));
    Eigen::VectorXd v = to_vector(x);
    if (const auto* s = std::get_if<ShallowNet>(&net)) {
        return s->a.dot(layer_sigma(s->w, s->b, v));
    }
    if (const auto* d = std::get_if<DeepNet>(&net)) {
        Eigen::VectorXd h = v;
        for (std::size_t l = 0; l + 1 < d->layers.size(); ++l) {
            const auto& layer = d->layers[l];
            h = (layer.a.array() * layer_sigma(layer.w, layer.b, h).array()).matrix();
        }
        const auto& last = d->layers.back();
        return last.a.dot(layer_sigma(last.w, last.b, h));
    }
    const auto& r = std::get<RecurrentNet>(net);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(r.units());
    for (std::size_t t = 0; t < x.width(); ++t)
        h = (r.w * h + r.v * (x.bit(t) ? 1.0 : 0.0) + r.b).unaryExpr([](double z) { return sigmoid(z); });
    return sigmoid(r.w_o.dot(h) + r.b_o);
}

int forward_label(const Network& net, const Image& x) { return forward(net, x) >= 0.5 ? 1 : 0; }

namespace {

// shared implementation for plain traces and node-forced traces
std::pair<double, std::vector<Eigen::VectorXd>> run_traced(const Network& net, const Image& x,
                                                           const NodeOverride* ov) {
    Eigen::VectorXd v = to_vector(x);
    std::vector<Eigen::VectorXd> trace;
    auto force = [&](Eigen::VectorXd& act, int layer) {
        if (!ov || ov->layer != layer) return;
        if (ov->unit < 0 || ov->unit >= act.size()) throw InvalidArgument("node index out of range");
        if (ov->ablate) act[ov->unit] = 0.0;
        else act[ov->unit] += ov->jitter;
    };
    if (const auto* s = std::get_if<ShallowNet>(&net)) {
        Eigen::VectorXd act = layer_sigma(s->w, s->b, v);
        force(act, 0);
        trace.push_back(act);
        return {s->a.dot(act), trace};
    }
    if (const auto* d = std::get_if<DeepNet>(&net)) {
        Eigen::VectorXd h = v;
        double out = 0.0;
        for (std::size_t l = 0; l < d->layers.size(); ++l) {
            const auto& layer = d->layers[l];
            Eigen::VectorXd act = layer_sigma(layer.w, layer.b, h);
            force(act, static_cast<int>(l));
            trace.push_back(act);
            if (l + 1 < d->layers.size()) h = (layer.a.array() * act.array()).matrix();
            else out = layer.a.dot(act);
        }
        return {out, trace};
    }
    const auto& r = std::get<RecurrentNet>(net);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(r.units());
    for (std::size_t t = 0; t < x.width(); ++t) {
        h = (r.w * h + r.v * (x.bit(t) ? 1.0 : 0.0) + r.b).unaryExpr([](double z) { return sigmoid(z); });
        if (ov) {
            if (ov->unit < 0 || ov->unit >= h.size()) throw InvalidArgument("node index out of range");
            if (ov->ablate) h[ov->unit] = 0.0;
            else h[ov->unit] += ov->jitter;
        }
        trace.push_back(h);
    }
    return {sigmoid(r.w_o.dot(h) + r.b_o), trace};
}

} // namespace

std::vector<Eigen::VectorXd> forward_trace(const Network& net, const Image& x) {
    return run_traced(net, x, nullptr).second;
}

double forward_with_override(const Network& net, const Image& x, const NodeOverride& ov) {
    return run_traced(net, x, &ov).first;
}

std::vector<Eigen::VectorXd> forward_trace_with_override(const Network& net, const Image& x,
                                                         const NodeOverride& ov) {
    return run_traced(net, x, &ov).second;
}

// --- labeled sets --------------------------------------------------------------

LabeledSet labeled_from_classfn(const ClassFunction& f) {
    if (f.n() > 16) throw BudgetExceeded(1ULL << f.n(), 1ULL << 16);
    const std::uint64_t size = f.domain_size();
    LabeledSet set;
    set.x.resize(static_cast<Eigen::Index>(size), f.n());
    set.y.resize(static_cast<Eigen::Index>(size));
    for (std::uint64_t p = 0; p < size; ++p) {
        for (int j = 0; j < f.n(); ++j)
            set.x(static_cast<Eigen::Index>(p), j) = (p >> (f.n() - 1 - j)) & 1ULL ? 1.0 : 0.0;
        set.y[static_cast<Eigen::Index>(p)] = f.label(p) == 1 ? 1.0 : 0.0;
    }
    return set;
}

LabeledSet labeled_from_points(const std::vector<Image>& images, const std::vector<int>& labels) {
    if (images.size() != labels.size()) throw InvalidArgument("images and labels differ in length");
    if (images.empty()) throw InvalidArgument("empty training set");
    LabeledSet set;
    const std::size_t n = images.front().width();
    set.x.resize(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(n));
    set.y.resize(static_cast<Eigen::Index>(images.size()));
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].width() != n) throw WidthMismatch(images[i].width(), n);
        for (std::size_t j = 0; j < n; ++j)
            set.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = images[i].bit(j) ? 1.0 : 0.0;
        set.y[static_cast<Eigen::Index>(i)] = labels[i] ? 1.0 : 0.0;
    }
    return set;
}

// --- parameter vector ------------------------------------------------------------

namespace {

template <typename Fn>
void visit_params(const Network& net, Fn&& fn) {
    if (const auto* s = std::get_if<ShallowNet>(&net)) {
        fn(s->w);
        fn(s->b);
        fn(s->a);
    } else if (const auto* d = std::get_if<DeepNet>(&net)) {
        for (const auto& layer : d->layers) {
            fn(layer.w);
            fn(layer.b);
            fn(layer.a);
        }
    } else {
        const auto& r = std::get<RecurrentNet>(net);
        fn(r.w);
        fn(r.v);
        fn(r.b);
        fn(r.w_o);
        Eigen::MatrixXd bo(1, 1);
        bo(0, 0) = r.b_o;
        fn(bo);
    }
}

Eigen::Index count_params(const Network& net) {
    Eigen::Index total = 0;
    visit_params(net, [&](const auto& m) { total += m.size(); });
    return total;
}

} // namespace

Eigen::VectorXd get_params(const Network& net) {
    Eigen::VectorXd p(count_params(net));
    Eigen::Index at = 0;
    visit_params(net, [&](const auto& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) p[at++] = m(r, c);
    });
    return p;
}

namespace {

void read_block(Eigen::MatrixXd& m, const Eigen::VectorXd& p, Eigen::Index& at) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = p[at++];
}
void read_block(Eigen::VectorXd& v, const Eigen::VectorXd& p, Eigen::Index& at) {
    for (Eigen::Index r = 0; r < v.size(); ++r) v[r] = p[at++];
}

} // namespace

void set_params(Network& net, const Eigen::VectorXd& p) {
    if (p.size() != count_params(net)) throw InvalidArgument("parameter vector has the wrong length");
    Eigen::Index at = 0;
    if (auto* s = std::get_if<ShallowNet>(&net)) {
        read_block(s->w, p, at);
        read_block(s->b, p, at);
        read_block(s->a, p, at);
    } else if (auto* d = std::get_if<DeepNet>(&net)) {
        for (auto& layer : d->layers) {
            read_block(layer.w, p, at);
            read_block(layer.b, p, at);
            read_block(layer.a, p, at);
        }
    } else {
        auto& r = std::get<RecurrentNet>(net);
        read_block(r.w, p, at);
        read_block(r.v, p, at);
        read_block(r.b, p, at);
        read_block(r.w_o, p, at);
        r.b_o = p[at++];
    }
}

// --- batched loss and gradients ------------------------------------------------

namespace {

Eigen::VectorXd batch_logits(const Network& net, const Eigen::MatrixXd& x) {
    if (const auto* s = std::get_if<ShallowNet>(&net)) {
        Eigen::MatrixXd sig = batch_sigma((x * s->w.transpose()).rowwise() + s->b.transpose());
        return (sig * s->a).array() - 0.5; // label threshold at output 0.5
    }
    if (const auto* d = std::get_if<DeepNet>(&net)) {
        Eigen::MatrixXd h = x;
        for (std::size_t l = 0; l + 1 < d->layers.size(); ++l) {
            const auto& layer = d->layers[l];
            Eigen::MatrixXd sig = batch_sigma((h * layer.w.transpose()).rowwise() + layer.b.transpose());
            h = sig.array().rowwise() * layer.a.transpose().array();
        }
        const auto& last = d->layers.back();
        Eigen::MatrixXd sig = batch_sigma((h * last.w.transpose()).rowwise() + last.b.transpose());
        return (sig * last.a).array() - 0.5;
    }
    const auto& r = std::get<RecurrentNet>(net);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.rows(), r.units());
    for (Eigen::Index t = 0; t < x.cols(); ++t)
        h = batch_sigma((h * r.w.transpose() + x.col(t) * r.v.transpose()).rowwise() + r.b.transpose());
    return (h * r.w_o).array() + r.b_o; // sigma(logit) is the output
}

struct Grad {
    double loss = 0.0;
    Eigen::VectorXd g;
};

Grad grad_shallow(const ShallowNet& s, const LabeledSet& data) {
    Eigen::MatrixXd z = (data.x * s.w.transpose()).rowwise() + s.b.transpose();
    Eigen::MatrixXd sig = batch_sigma(z);
    Eigen::VectorXd logits = (sig * s.a).array() - 0.5;
    Eigen::VectorXd dlog;
    Grad out;
    out.loss = ce_from_logits(logits, data.y, &dlog);

    Eigen::VectorXd da = sig.transpose() * dlog;
    Eigen::MatrixXd dz = (dlog * s.a.transpose()).array() * sig.array() * (1.0 - sig.array());
    Eigen::MatrixXd dw = dz.transpose() * data.x;
    Eigen::VectorXd db = dz.colwise().sum().transpose();

    Network holder = s; // reuse the flat layout
    Eigen::VectorXd g(count_params(holder));
    Eigen::Index at = 0;
    for (Eigen::Index c = 0; c < dw.cols(); ++c)
        for (Eigen::Index r = 0; r < dw.rows(); ++r) g[at++] = dw(r, c);
    for (Eigen::Index r = 0; r < db.size(); ++r) g[at++] = db[r];
    for (Eigen::Index r = 0; r < da.size(); ++r) g[at++] = da[r];
    out.g = std::move(g);
    return out;
}

Grad grad_deep(const DeepNet& d, const LabeledSet& data) {
    const std::size_t L = d.layers.size();
    std::vector<Eigen::MatrixXd> inputs(L);  // H_l fed to layer l
    std::vector<Eigen::MatrixXd> sigs(L);    // sigma outputs of layer l
    Eigen::MatrixXd h = data.x;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = d.layers[l];
        inputs[l] = h;
        sigs[l] = batch_sigma((h * layer.w.transpose()).rowwise() + layer.b.transpose());
        if (l + 1 < L) h = sigs[l].array().rowwise() * layer.a.transpose().array();
    }
    Eigen::VectorXd logits = (sigs[L - 1] * d.layers[L - 1].a).array() - 0.5;
    Eigen::VectorXd dlog;
    Grad out;
    out.loss = ce_from_logits(logits, data.y, &dlog);

    std::vector<Eigen::MatrixXd> dws(L);
    std::vector<Eigen::VectorXd> dbs(L), das(L);
    Eigen::MatrixXd grad_h; // dL/dH_{l+1}
    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = d.layers[l];
        Eigen::MatrixXd ds;
        if (l + 1 == L) {
            das[l] = sigs[l].transpose() * dlog;
            ds = dlog * layer.a.transpose();
        } else {
            das[l] = (grad_h.array() * sigs[l].array()).colwise().sum().transpose();
            ds = grad_h.array().rowwise() * layer.a.transpose().array();
        }
        Eigen::MatrixXd dz = ds.array() * sigs[l].array() * (1.0 - sigs[l].array());
        dws[l] = dz.transpose() * inputs[l];
        dbs[l] = dz.colwise().sum().transpose();
        if (l > 0) grad_h = dz * layer.w;
    }

    Eigen::Index total = 0;
    for (std::size_t l = 0; l < L; ++l) total += dws[l].size() + dbs[l].size() + das[l].size();
    Eigen::VectorXd g(total);
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < L; ++l) {
        for (Eigen::Index c = 0; c < dws[l].cols(); ++c)
            for (Eigen::Index r = 0; r < dws[l].rows(); ++r) g[at++] = dws[l](r, c);
        for (Eigen::Index r = 0; r < dbs[l].size(); ++r) g[at++] = dbs[l][r];
        for (Eigen::Index r = 0; r < das[l].size(); ++r) g[at++] = das[l][r];
    }
    out.g = std::move(g);
    return out;
}

Grad grad_recurrent(const RecurrentNet& r, const LabeledSet& data) {
    const Eigen::Index T = data.x.cols();
    const Eigen::Index B = data.x.rows();
    std::vector<Eigen::MatrixXd> states(static_cast<std::size_t>(T) + 1);
    states[0] = Eigen::MatrixXd::Zero(B, r.units());
    for (Eigen::Index t = 0; t < T; ++t)
        states[static_cast<std::size_t>(t) + 1] = batch_sigma(
            (states[static_cast<std::size_t>(t)] * r.w.transpose() + data.x.col(t) * r.v.transpose()).rowwise() +
            r.b.transpose());

    Eigen::VectorXd logits = (states[static_cast<std::size_t>(T)] * r.w_o).array() + r.b_o;
    Eigen::VectorXd dlog;
    Grad out;
    out.loss = ce_from_logits(logits, data.y, &dlog);

    Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(r.units(), r.units());
    Eigen::VectorXd dv = Eigen::VectorXd::Zero(r.units());
    Eigen::VectorXd db = Eigen::VectorXd::Zero(r.units());
    Eigen::VectorXd dwo = states[static_cast<std::size_t>(T)].transpose() * dlog;
    double dbo = dlog.sum();

    Eigen::MatrixXd grad_h = dlog * r.w_o.transpose(); // dL/dH_t at t = T
    for (Eigen::Index t = T; t >= 1; --t) {
        const Eigen::MatrixXd& ht = states[static_cast<std::size_t>(t)];
        Eigen::MatrixXd dz = grad_h.array() * ht.array() * (1.0 - ht.array());
        dw += dz.transpose() * states[static_cast<std::size_t>(t) - 1];
        dv += dz.transpose() * data.x.col(t - 1);
        db += dz.colwise().sum().transpose();
        if (t > 1) grad_h = dz * r.w;
    }

    Eigen::VectorXd g(dw.size() + dv.size() + db.size() + dwo.size() + 1);
    Eigen::Index at = 0;
    for (Eigen::Index c = 0; c < dw.cols(); ++c)
        for (Eigen::Index row = 0; row < dw.rows(); ++row) g[at++] = dw(row, c);
    for (Eigen::Index i = 0; i < dv.size(); ++i) g[at++] = dv[i];
    for (Eigen::Index i = 0; i < db.size(); ++i) g[at++] = db[i];
    for (Eigen::Index i = 0; i < dwo.size(); ++i) g[at++] = dwo[i];
    g[at++] = dbo;
    out.g = std::move(g);
    return out;
}

} // namespace

std::pair<double, Eigen::VectorXd> loss_and_gradient(const Network& net, const LabeledSet& data) {
    Grad g;
    if (const auto* s = std::get_if<ShallowNet>(&net)) g = grad_shallow(*s, data);
    else if (const auto* d = std::get_if<DeepNet>(&net)) g = grad_deep(*d, data);
    else g = grad_recurrent(std::get<RecurrentNet>(net), data);
    return {g.loss, std::move(g.g)};
}

double loss_only(const Network& net, const LabeledSet& data) {
    Eigen::VectorXd logits = batch_logits(net, data.x);
    return ce_from_logits(logits, data.y, nullptr);
}

double accuracy(const Network& net, const LabeledSet& data) {
    Eigen::VectorXd logits = batch_logits(net, data.x);
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        int label = logits[i] >= 0.0 ? 1 : 0;
        hits += label == (data.y[i] >= 0.5 ? 1 : 0);
    }
    return static_cast<double>(hits) / static_cast<double>(logits.size());
}

TrainResult train(Network& net, const LabeledSet& data, const TrainConfig& cfg) {
    if (data.size() == 0) throw InvalidArgument("empty training set");
    TrainResult result;
    Rng rng(cfg.seed);
    const Eigen::Index B = data.x.rows();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.batch_size <= 0 || cfg.batch_size >= B) {
            auto [l, g] = loss_and_gradient(net, data);
            if (!std::isfinite(l)) {
                result.diverged_at = epoch;
                break;
            }
            set_params(net, get_params(net) - cfg.learning_rate * g);
        } else {
            std::vector<Eigen::Index> order(static_cast<std::size_t>(B));
            for (Eigen::Index i = 0; i < B; ++i) order[static_cast<std::size_t>(i)] = i;
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.below(i)]);
            bool diverged = false;
            for (Eigen::Index start = 0; start < B; start += cfg.batch_size) {
                Eigen::Index count = std::min<Eigen::Index>(cfg.batch_size, B - start);
                LabeledSet batch;
                batch.x.resize(count, data.x.cols());
                batch.y.resize(count);
                for (Eigen::Index i = 0; i < count; ++i) {
                    batch.x.row(i) = data.x.row(order[static_cast<std::size_t>(start + i)]);
                    batch.y[i] = data.y[order[static_cast<std::size_t>(start + i)]];
                }
                auto [l, g] = loss_and_gradient(net, batch);
                if (!std::isfinite(l)) {
                    result.diverged_at = epoch;
                    diverged = true;
                    break;
                }
                set_params(net, get_params(net) - cfg.learning_rate * g);
            }
            if (diverged) break;
        }
        result.epochs_run = epoch + 1;
        double acc = accuracy(net, data);
        result.accuracy_history.push_back(acc);
        result.final_accuracy = acc;
        if (acc >= cfg.target_accuracy) {
            result.reached_tau = true;
            break;
        }
    }
    return result;
}

// --- quantization and serialization ------------------------------------------------

std::uint32_t QuantizationPolicy::quantize(double w) const {
    double clipped = std::min(std::max(w, clip_min), clip_max);
    double scaled = (clipped - clip_min) / step();
    return static_cast<std::uint32_t>(std::nearbyint(scaled)); // nearest-even
}

double QuantizationPolicy::dequantize(std::uint32_t code) const {
    return clip_min + static_cast<double>(code) * step();
}

std::string architecture_header(const Network& net, const QuantizationPolicy& q) {
    std::ostringstream os;
    os << "KBNN1 " << family_name(net);
    if (const auto* s = std::get_if<ShallowNet>(&net)) {
        os << " " << s->input_bits() << " " << s->units();
    } else if (const auto* d = std::get_if<DeepNet>(&net)) {
        os << " " << d->input_bits() << " " << d->depth();
        for (const auto& layer : d->layers) os << " " << layer.w.rows();
    } else {
        const auto& r = std::get<RecurrentNet>(net);
        os << " " << r.sequence_bits << " " << r.units();
    }
    os << " " << q.bits_per_weight;
    return os.str();
}

std::vector<std::uint8_t> serialize_network(const Network& net, const QuantizationPolicy& q) {
    if (q.bits_per_weight != 8 && q.bits_per_weight != 16)
        throw InvalidArgument("bits_per_weight must be 8 or 16");
    std::string header = architecture_header(net, q);
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.push_back('\n');
    Eigen::VectorXd p = get_params(net);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::uint32_t code = q.quantize(p[i]);
        bytes.push_back(static_cast<std::uint8_t>(code & 0xFF));
        if (q.bits_per_weight == 16) bytes.push_back(static_cast<std::uint8_t>((code >> 8) & 0xFF));
    }
    return bytes;
}

Network deserialize_network(const std::vector<std::uint8_t>& bytes) {
    auto nl = std::find(bytes.begin(), bytes.end(), static_cast<std::uint8_t>('\n'));
    if (nl == bytes.end()) throw InvalidArgument("network file has no header line");
    std::string header(bytes.begin(), nl);
    std::istringstream hs(header);
    std::string magic, family;
    hs >> magic >> family;
    if (magic != "KBNN1") throw InvalidArgument("not a KBNN1 stream");

    Network net;
    int bits = 16;
    if (family == "snn") {
        int n = 0, units = 0;
        hs >> n >> units >> bits;
        net = make_shallow(n, units);
    } else if (family == "dnn") {
        int n = 0, depth = 0;
        hs >> n >> depth;
        std::vector<int> widths(static_cast<std::size_t>(depth));
        for (auto& w : widths) hs >> w;
        hs >> bits;
        net = make_deep(n, widths);
    } else if (family == "rnn") {
        int n = 0, units = 0;
        hs >> n >> units >> bits;
        net = make_recurrent(n, units);
    } else {
        throw InvalidArgument("unknown network family: " + family);
    }
    QuantizationPolicy q;
    q.bits_per_weight = bits;

    std::size_t offset = static_cast<std::size_t>(nl - bytes.begin()) + 1;
    Eigen::Index count = count_params(net);
    std::size_t per = bits == 16 ? 2 : 1;
    if (bytes.size() - offset < static_cast<std::size_t>(count) * per)
        throw InvalidArgument("network payload truncated");
    Eigen::VectorXd p(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        std::uint32_t code = bytes[offset + static_cast<std::size_t>(i) * per];
        if (per == 2) code |= static_cast<std::uint32_t>(bytes[offset + static_cast<std::size_t>(i) * per + 1]) << 8;
        p[i] = q.dequantize(code);
    }
    set_params(net, p);
    return net;
}

void write_network_file(const std::string& path, const Network& net, const QuantizationPolicy& q) {
    std::vector<std::uint8_t> bytes = serialize_network(net, q);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Network read_network_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_network(bytes);
}

ImplementationLength implementation_length(const Network& net, const QuantizationPolicy& q) {
    std::vector<std::uint8_t> bytes = serialize_network(net, q);
    ImplementationLength len;
    len.raw_bits = static_cast<std::int64_t>(bytes.size()) * 8;
    // two-part bound: the shorter of the stored-raw and LZW encodings, so the
    // length is a valid upper bound even on incompressible weight streams
    len.compressed_bits = std::min(lzw::k_hat(BitString::from_bytes(bytes, bytes.size() * 8)),
                                   len.raw_bits + lzw::kHeaderBits);
    return len;
}

double efficiency_from_khat(std::int64_t k_hat_f, const Network& net, const QuantizationPolicy& q) {
    ImplementationLength len = implementation_length(net, q);
    if (len.compressed_bits <= 0) throw InvalidArgument("zero-length network implementation");
    double e = static_cast<double>(k_hat_f) / static_cast<double>(len.compressed_bits);
    return std::min(1.0, e);
}

double efficiency(const Network& net, const ClassFunction& f, const QuantizationPolicy& q,
                  const std::vector<Image>* candidates) {
    return efficiency_from_khat(k_hat_classfn(f, 1, candidates).k_hat_f, net, q);
}

ClassFunction classfn_from_network(std::shared_ptr<const Network> net, std::string id) {
    int n = input_bits(*net);
    if (id.empty()) id = "net:" + family_name(*net);
    return ClassFunction::from_network_predicate(
        n, [net, n](std::uint64_t x) { return forward_label(*net, image_from_point(x, n)); }, id);
}

} // namespace kb
