#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "etcsim/control.hpp"
#include "etcsim/macsim.hpp"
#include "etcsim/plant.hpp"
#include "etcsim/triggers.hpp"

namespace etcsim {

struct ExperimentConfig {
    TriggerPolicy policy;
    double t_end = 110.0;
    int repetitions = 10;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;  // per repetition; empty: derived from seed
    double sensor_std = 0.0005;
    RadioModel radio;
    MacTimings timings;
    PacketSizes packets;
    PlantModel plant = PlantModel::waterbox();
    ControllerGains gains = ControllerGains::waterbox();
    double min_open_sum_deg = 180.0;
    Vector xi0;  // empty: -h' (empty tanks)
    Mode mode0 = Mode::BothPumps;
    double sample_dt = 0.01;
    std::string out_dir = "out";

    [[nodiscard]] Protocol protocol() const { return protocol_for(policy.kind); }
    /// Throws ConfigError / InfeasibleSchedule.
    void validate() const;
};

/// Load an INI scenario file; missing keys keep their defaults.
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// --- trace -------------------------------------------------------------------

struct LevelSample {
    double t;
    Vector h;  // absolute levels, m
};

struct ActuationRecord {
    Micros time;
    std::size_t frame;
    std::size_t node;
    double from_deg;
    double to_deg;
};

struct FrameRecord {
    std::size_t index;
    Micros start;
    Micros decision;
    bool update;
    bool event_announced;
    Mode mode_after;
    int state_transmissions;
    int control_messages;
    int drops;
};

struct SimulationTrace {
    std::size_t n_nodes = 0;
    Micros t_end = 0;
    Micros covered_until = 0;
    std::vector<LevelSample> levels;
    std::vector<ActuationRecord> actuations;
    std::vector<FrameRecord> frames;
    std::vector<MessageEvent> messages;
    std::vector<StateInterval> intervals;
    std::vector<double> switch_times;
    std::optional<double> first_release;  // first both -> weak pump switch, s
    Currents currents;
};

struct IncompleteTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- metrics -----------------------------------------------------------------

struct WindowMetrics {
    double water_level_overshoot = 0.0;  // m, maximum level in the window
    double switching_time = 0.0;         // s
    double sleep_time = 0.0;             // s, summed over nodes
    double discharge = 0.0;              // mAh, summed over nodes
    double discharge_deep_sleep = 0.0;   // mAh
    double actuations = 0.0;
    double valve_movement = 0.0;         // deg
    double violations = 0.0;
    double state_transmissions = 0.0;
    double control_transmissions = 0.0;
};

struct RunMetrics {
    WindowMetrics full;          // [0, t_end]
    WindowMetrics until_switch;  // [0, t_sm]
    double t_sm = 0.0;
    bool switched = false;
};

struct MetricsReport {
    std::string label;
    std::vector<RunMetrics> runs;
    RunMetrics mean;
    bool failed = false;
    std::string error;
};

RunMetrics compute_metrics(const SimulationTrace& trace, double t_sm, double t_end);
RunMetrics mean_of(const std::vector<RunMetrics>& runs);

// --- runs --------------------------------------------------------------------

struct RunResult {
    SimulationTrace trace;
    EnergyLedger ledger;
    RunMetrics metrics;
    std::uint64_t noise_seed = 0;
    std::uint64_t radio_seed = 0;
};

std::uint64_t noise_seed(const ExperimentConfig& c, int repetition);
std::uint64_t radio_seed(const ExperimentConfig& c, std::size_t cell, int repetition);

/// One repetition, full trace kept.
RunResult run_single(const ExperimentConfig& config, int repetition = 0, std::size_t cell = 0);
MetricsReport run_experiment(const ExperimentConfig& config, std::size_t cell = 0);

// --- sweeps ------------------------------------------------------------------

struct SweepCell {
    Strategy strategy = Strategy::TTC;
    double T = 1.0;
    double sigma = 0.2;
    double mu = 0.95;
    double varrho = 85.0;

    [[nodiscard]] std::string label() const;
};

struct SweepGrid {
    ExperimentConfig base;
    std::vector<SweepCell> cells;

    /// Cross product; parameters irrelevant to a strategy are collapsed.
    static SweepGrid cross(const ExperimentConfig& base, const std::vector<Strategy>& strategies,
                           const std::vector<double>& periods, const std::vector<double>& sigmas,
                           const std::vector<double>& mus, const std::vector<double>& varrhos);
};

ExperimentConfig cell_config(const SweepGrid& grid, std::size_t cell);

/// Reference implementation: cells and repetitions in order.
std::vector<MetricsReport> sweep_serial(const SweepGrid& grid);
/// Every (cell, repetition) pair is an OpenMP task; output identical to the serial sweep.
std::vector<MetricsReport> sweep_parallel(const SweepGrid& grid);

// --- reports -----------------------------------------------------------------

const std::vector<std::string>& metric_columns();
std::vector<double> metric_values(const WindowMetrics& w);

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports);
/// Savings (TTC - strategy) / TTC in percent against the TTC cell with the same T.
void write_savings_csv(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports);
void write_runs_jsonl(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports);
void write_schedule(std::ostream& os, const SlotSchedule& s);

}  // namespace etcsim
