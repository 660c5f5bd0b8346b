#include "kb/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "kb/genfn.hpp"
#include "kb/io.hpp"
#include "kb/lzw.hpp"
#include "kb/rng.hpp"

namespace kb {

// --- targets -----------------------------------------------------------------

ClassFunction target_by_id(const std::string& id) {
    auto starts = [&](const char* p) { return id.rfind(p, 0) == 0; };
    if (starts("parity")) {
        int n = std::stoi(id.substr(6));
        return ClassFunction::from_predicate(
            n, 2, [](std::uint64_t x) { return static_cast<int>(std::popcount(x) & 1u); }, id);
    }
    if (starts("const1-")) {
        int n = std::stoi(id.substr(7));
        return ClassFunction::from_predicate(n, 2, [](std::uint64_t) { return 1; }, id);
    }
    if (starts("majority")) {
        int n = std::stoi(id.substr(8));
        return ClassFunction::from_predicate(
            n, 2, [n](std::uint64_t x) { return std::popcount(x) * 2 > n ? 1 : 0; }, id);
    }
    if (starts("sprite") || starts("rule110") || starts("pi-"))
        return classifier_from_genfn(genfn_by_id(id));
    throw InvalidArgument("unknown target id: " + id);
}

// --- hierarchy ------------------------------------------------------------------

namespace {

std::string cell_name(const std::string& family, const std::vector<int>& shape) {
    std::ostringstream os;
    os << family << ":";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    return os.str();
}

std::uint64_t study_hash(const HierarchyStudy& s) {
    std::ostringstream os;
    os << s.target_id << "|" << s.tau << "|" << s.seeds_per_cell << "|" << s.seed << "|";
    for (int w : s.snn_widths) os << w << ",";
    os << "|";
    for (auto [w, d] : s.dnn_grids) os << w << "x" << d << ",";
    os << "|";
    for (int w : s.rnn_states) os << w << ",";
    os << "|" << s.epochs << "|" << s.lr << "|" << s.lr_snn << "|" << s.lr_dnn << "|" << s.lr_rnn
       << "|" << s.batch_size;
    std::string text = os.str();
    return fnv64(std::vector<std::uint8_t>(text.begin(), text.end()));
}

} // namespace

HierarchyReport run_hierarchy(const HierarchyStudy& study) {
    ClassFunction f = target_by_id(study.target_id);
    if (f.n() > 16) throw BudgetExceeded(1ULL << f.n(), 1ULL << 16);
    LabeledSet data = labeled_from_classfn(f);

    HierarchyReport report;
    report.target_id = study.target_id;
    report.tau = study.tau;
    report.config_hash = study_hash(study);

    ClassComplexity cc = k_hat_classfn(f);
    report.k_hat_f = cc.k_hat_f;

    // R_f: entropy of the disordered stack over the ordering-aware complexity
    {
        StackedDataset shuffled =
            model_from_classfn(f, Ordering::SeededPermutation, 0, 1, derive_seed(study.seed, "rf-order"));
        if (!shuffled.empty()) {
            BitString s = concat_dataset(shuffled);
            double h = lzw::entropy_rate(s);
            report.r_f = h * static_cast<double>(s.size()) /
                         static_cast<double>(std::max<std::int64_t>(1, cc.k_hat_f));
        }
    }

    struct FamilyPlan {
        std::string name;
        std::vector<std::vector<int>> shapes;
        double lr;
    };
    std::vector<FamilyPlan> plans;
    {
        FamilyPlan snn{"snn", {}, study.lr_snn > 0 ? study.lr_snn : study.lr};
        for (int w : study.snn_widths) snn.shapes.push_back({w});
        FamilyPlan dnn{"dnn", {}, study.lr_dnn > 0 ? study.lr_dnn : study.lr};
        for (auto [w, d] : study.dnn_grids) dnn.shapes.push_back({w, d});
        FamilyPlan rnn{"rnn", {}, study.lr_rnn > 0 ? study.lr_rnn : study.lr};
        for (int w : study.rnn_states) rnn.shapes.push_back({w});
        plans = {snn, dnn, rnn};
    }

    for (const auto& plan : plans) {
        FamilySummary summary;
        for (const auto& shape : plan.shapes) {
            std::string cname = cell_name(plan.name, shape);
            for (int s = 0; s < study.seeds_per_cell; ++s) {
                Network net;
                if (plan.name == "snn") net = make_shallow(f.n(), shape[0]);
                else if (plan.name == "dnn")
                    net = make_deep(f.n(), std::vector<int>(static_cast<std::size_t>(shape[1]), shape[0]));
                else net = make_recurrent(f.n(), shape[0]);

                CellResult cell;
                cell.family = plan.name;
                cell.cell = cname;
                cell.seed_index = s;
                cell.seed = derive_seed(study.seed, cname, static_cast<std::uint64_t>(s));
                init_weights(net, cell.seed);

                TrainConfig cfg;
                cfg.learning_rate = plan.lr;
                cfg.epochs = study.epochs;
                cfg.batch_size = study.batch_size;
                cfg.seed = cell.seed;
                cfg.target_accuracy = study.tau;
                TrainResult tr = train(net, data, cfg);

                cell.accuracy = tr.final_accuracy;
                cell.epochs_run = tr.epochs_run;
                cell.reached = tr.reached_tau;
                ImplementationLength len = implementation_length(net);
                cell.raw_bits = len.raw_bits;
                cell.impl_bits = len.compressed_bits;
                report.cells.push_back(cell);

                if (cell.reached && (!summary.achieved || cell.impl_bits < summary.min_impl_bits)) {
                    summary.achieved = true;
                    summary.min_impl_bits = cell.impl_bits;
                    summary.best_cell = cname;
                }
            }
        }
        if (summary.achieved)
            summary.efficiency = std::min(
                1.0, static_cast<double>(report.k_hat_f) / static_cast<double>(summary.min_impl_bits));
        report.families[plan.name] = summary;
    }

    const auto& snn = report.families["snn"];
    const auto& dnn = report.families["dnn"];
    const auto& rnn = report.families["rnn"];
    report.dnn_ge_snn = dnn.achieved && snn.achieved && dnn.efficiency >= snn.efficiency;
    report.full_order_pass = rnn.achieved && dnn.achieved && snn.achieved &&
                             rnn.efficiency >= dnn.efficiency && dnn.efficiency >= snn.efficiency;
    return report;
}

std::string HierarchyReport::to_csv() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "family,cell,seed_index,seed,accuracy,epochs_run,reached,raw_bits,impl_bits\n";
    for (const auto& c : cells)
        os << c.family << "," << c.cell << "," << c.seed_index << "," << c.seed << "," << c.accuracy
           << "," << c.epochs_run << "," << (c.reached ? 1 : 0) << "," << c.raw_bits << ","
           << c.impl_bits << "\n";
    return os.str();
}

std::string HierarchyReport::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"config_hash\":\"" << std::hex << config_hash << std::dec << "\"";
    os << ",\"dnn_ge_snn\":" << (dnn_ge_snn ? "true" : "false");
    os << ",\"families\":{";
    bool first = true;
    for (const auto& [name, fam] : families) {
        os << (first ? "" : ",") << "\"" << name << "\":{";
        os << "\"achieved\":" << (fam.achieved ? "true" : "false");
        if (fam.achieved)
            os << ",\"best_cell\":\"" << fam.best_cell << "\",\"efficiency\":" << fam.efficiency
               << ",\"min_impl_bits\":" << fam.min_impl_bits;
        os << "}";
        first = false;
    }
    os << "},\"full_order_pass\":" << (full_order_pass ? "true" : "false");
    os << ",\"k_hat_f\":" << k_hat_f;
    os << ",\"r_f\":" << r_f;
    os << ",\"target\":\"" << target_id << "\"";
    os << ",\"tau\":" << tau << "}";
    return os.str();
}

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

} // namespace

HierarchyStudy parse_study_config(const std::string& text) {
    HierarchyStudy study;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;

        if (key == "target") study.target_id = value;
        else if (key == "tau") study.tau = std::stod(value);
        else if (key == "seeds") study.seeds_per_cell = std::stoi(value);
        else if (key == "seed") study.seed = std::stoull(value);
        else if (key == "snn") study.snn_widths = parse_int_list(value);
        else if (key == "rnn") study.rnn_states = parse_int_list(value);
        else if (key == "dnn") {
            study.dnn_grids.clear();
            std::istringstream ds(value);
            std::string item;
            while (std::getline(ds, item, ',')) {
                auto x = item.find('x');
                if (x == std::string::npos) throw InvalidArgument("dnn grid needs WIDTHxDEPTH: " + item);
                study.dnn_grids.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
            }
        } else if (key == "epochs") study.epochs = std::stoi(value);
        else if (key == "lr") study.lr = std::stod(value);
        else if (key == "lr_snn") study.lr_snn = std::stod(value);
        else if (key == "lr_dnn") study.lr_dnn = std::stod(value);
        else if (key == "lr_rnn") study.lr_rnn = std::stod(value);
        else if (key == "batch") study.batch_size = std::stoi(value);
        else throw InvalidArgument("unknown study key: " + key);
    }
    return study;
}

// --- universal-prior sampler ----------------------------------------------------

BitString elias_gamma(std::uint64_t v) {
    if (v == 0) throw InvalidArgument("gamma code needs v >= 1");
    int bits = std::bit_width(v);
    BitString out = BitString::zeros(static_cast<std::size_t>(bits) - 1);
    out.append_uint(v, static_cast<std::size_t>(bits));
    return out;
}

BitString encode_program(std::uint8_t rule, int width_units, std::uint64_t steps, const BitString& row) {
    if (width_units < 1) throw InvalidArgument("width must be at least one 8-cell unit");
    if (row.size() != static_cast<std::size_t>(width_units) * 8)
        throw WidthMismatch(row.size(), static_cast<std::size_t>(width_units) * 8);
    BitString out;
    out.append_uint(rule, 8);
    out.append(elias_gamma(static_cast<std::uint64_t>(width_units)));
    out.append(elias_gamma(steps + 1));
    out.append(row);
    return out;
}

namespace {

// reads gamma from reader; nullopt when bits run out
std::optional<std::uint64_t> read_gamma(BitReader& reader) {
    std::size_t zeros = 0;
    for (;;) {
        if (reader.remaining() == 0) return std::nullopt;
        if (reader.read(1)) break;
        ++zeros;
        if (zeros > 62) return std::nullopt; // implausible inside the budget
    }
    if (reader.remaining() < zeros) return std::nullopt;
    std::uint64_t rest = zeros ? reader.read(zeros) : 0;
    return (1ULL << zeros) | rest;
}

} // namespace

std::optional<ProgramSample> decode_program(const BitString& bits) {
    BitReader reader(bits);
    if (reader.remaining() < 8) return std::nullopt;
    std::uint8_t rule = static_cast<std::uint8_t>(reader.read(8));
    auto g = read_gamma(reader);
    if (!g) return std::nullopt;
    auto s = read_gamma(reader);
    if (!s) return std::nullopt;
    std::size_t width = static_cast<std::size_t>(*g) * 8;
    if (reader.remaining() < width) return std::nullopt;
    BitString row = BitString::zeros(width);
    for (std::size_t i = 0; i < width; ++i) row.set(i, reader.read(1));

    ProgramSample sample;
    sample.program = bits.slice(0, reader.offset());
    sample.rule = rule;
    sample.width = static_cast<int>(width);
    sample.steps = *s - 1;
    sample.seed_row = std::move(row);
    return sample;
}

SampleRun sample_programs(int count, int max_program_bits, std::uint64_t step_cap, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("need at least one sample");
    SampleRun run;
    Rng rng(derive_seed(seed, "programs"));
    while (static_cast<int>(run.samples.size()) < count) {
        // drawing the whole budget up front and decoding its prefix gives the
        // same distribution as flipping coins one at a time (prefix-freeness)
        BitString draw = rng.next_bits(static_cast<std::size_t>(max_program_bits));
        std::optional<ProgramSample> sample = decode_program(draw);
        if (!sample) {
            ++run.discarded;
            continue;
        }
        sample->halted = sample->steps <= step_cap;
        if (sample->halted) {
            sample->output = ca_evolve(sample->seed_row, sample->rule, sample->steps);
            sample->k_hat_out = lzw::k_hat(sample->output);
            sample->h_out = lzw::entropy_rate(sample->output);
        }
        run.samples.push_back(std::move(*sample));
    }
    return run;
}

std::string SampleRun::to_csv() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "length,rule,width,steps,halted,k_hat_out,h_out\n";
    for (const auto& s : samples)
        os << s.length() << "," << static_cast<int>(s.rule) << "," << s.width << "," << s.steps << ","
           << (s.halted ? 1 : 0) << "," << s.k_hat_out << "," << s.h_out << "\n";
    return os.str();
}

SolomonoffSummary solomonoff_report(const std::vector<ProgramSample>& samples) {
    SolomonoffSummary sum;
    sum.total = static_cast<int>(samples.size());
    std::vector<std::size_t> lengths;
    double h_total = 0.0;
    for (const auto& s : samples) {
        if (!s.halted) continue;
        ++sum.halted;
        lengths.push_back(s.length());
        h_total += s.h_out;
    }
    if (sum.halted < 100) throw InvalidArgument("need at least 100 halted samples");
    std::sort(lengths.begin(), lengths.end());
    sum.median_length = lengths[lengths.size() / 2];
    for (const auto& s : samples) {
        if (!s.halted || s.length() > sum.median_length) continue;
        ++sum.short_programs;
        if (s.h_out > 0.5) ++sum.short_entropic;
    }
    sum.short_entropic_fraction =
        sum.short_programs ? static_cast<double>(sum.short_entropic) / sum.short_programs : 0.0;
    sum.mean_h_out = h_total / sum.halted;
    return sum;
}

std::string SolomonoffSummary::to_json() const {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "{\"halted\":" << halted << ",\"mean_h_out\":" << mean_h_out
       << ",\"median_length\":" << median_length << ",\"short_entropic\":" << short_entropic
       << ",\"short_entropic_fraction\":" << short_entropic_fraction
       << ",\"short_programs\":" << short_programs << ",\"total\":" << total << "}";
    return os.str();
}

} // namespace kb
