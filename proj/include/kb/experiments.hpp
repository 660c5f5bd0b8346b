#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kb/classfn.hpp"
#include "kb/nets.hpp"

namespace kb {

// --- hierarchy study -----------------------------------------------------------

/// Grid-search protocol for comparing implementation efficiency across the
/// three network families on one target function.
struct HierarchyStudy {
    std::string target_id = "parity8";
    double tau = 0.99;
    int seeds_per_cell = 5;
    std::uint64_t seed = 1;
    std::vector<int> snn_widths;
    std::vector<std::pair<int, int>> dnn_grids; // units x depth
    std::vector<int> rnn_states;
    int epochs = 20000;
    double lr = 2.0;
    double lr_snn = 0.0, lr_dnn = 0.0, lr_rnn = 0.0; // 0 = use lr
    int batch_size = 0;
};

struct CellResult {
    std::string family;
    std::string cell;
    int seed_index = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    int epochs_run = 0;
    bool reached = false;
    std::int64_t raw_bits = 0;
    std::int64_t impl_bits = 0;
};

struct FamilySummary {
    bool achieved = false;
    std::int64_t min_impl_bits = 0;
    double efficiency = 0.0;
    std::string best_cell;
};

struct HierarchyReport {
    std::string target_id;
    double tau = 0.0;
    std::uint64_t config_hash = 0;
    std::int64_t k_hat_f = 0;
    double r_f = 0.0;
    std::vector<CellResult> cells;
    std::map<std::string, FamilySummary> families; // snn / dnn / rnn
    bool dnn_ge_snn = false;
    bool full_order_pass = false; // E_rnn >= E_dnn >= E_snn, all achieved

    std::string to_csv() const;
    std::string to_json() const;
};

/// Target functions addressable from study configs: parity<n>, const1-<n>,
/// majority<n>, and sprite<k>x<k> classifiers from the genfn registry.
ClassFunction target_by_id(const std::string& id);

/// Trains every cell x seed, selects the minimal implementation length per
/// family among cells reaching tau, computes E = min(1, K_hat[f]/l(N)) and
/// the conjectured ordering verdict. Deterministic in the study seed.
HierarchyReport run_hierarchy(const HierarchyStudy& study);

/// Plain-text key=value study schema (see README): target, tau, seeds,
/// seed, snn, dnn (WxD list), rnn, epochs, lr[, lr_snn, lr_dnn, lr_rnn, batch].
HierarchyStudy parse_study_config(const std::string& text);

// --- universal-prior sampler ------------------------------------------------------

/// A coin-flip program for the tiny CA machine: rule byte, lattice width in
/// 8-cell units (Elias gamma), step count (gamma of steps+1), then the raw
/// initial row. Prefix-free by construction.
struct ProgramSample {
    BitString program;
    std::uint8_t rule = 0;
    int width = 0;
    std::uint64_t steps = 0;
    BitString seed_row;
    bool halted = false;   // steps <= step_cap
    BitString output;      // final row; empty unless halted
    std::int64_t k_hat_out = 0;
    double h_out = 0.0;

    std::size_t length() const { return program.size(); }
};

BitString elias_gamma(std::uint64_t v); // v >= 1
BitString encode_program(std::uint8_t rule, int width_units, std::uint64_t steps, const BitString& row);

/// Decode one program from the front of `bits`; returns the consumed length
/// or nullopt when bits run out before the program completes.
std::optional<ProgramSample> decode_program(const BitString& bits);

struct SampleRun {
    std::vector<ProgramSample> samples;
    std::int64_t discarded = 0; // draws that exceeded max_program_bits

    std::string to_csv() const;
};

/// Draw `count` accepted programs by fair coin flips; draws longer than
/// max_program_bits are discarded and redrawn (discards are data, reported).
/// Decoded programs run up to step_cap; non-halted samples carry no output.
SampleRun sample_programs(int count, int max_program_bits, std::uint64_t step_cap, std::uint64_t seed);

struct SolomonoffSummary {
    int total = 0;
    int halted = 0;
    std::size_t median_length = 0;       // over halted samples
    int short_programs = 0;              // halted with length <= median
    int short_entropic = 0;              // ... whose output entropy rate > 0.5
    double short_entropic_fraction = 0.0;
    double mean_h_out = 0.0;

    std::string to_json() const;
};

/// Pure function of the samples; needs at least 100 halted ones.
SolomonoffSummary solomonoff_report(const std::vector<ProgramSample>& samples);

} // namespace kb
