#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "etcsim/triggers.hpp"

namespace etcsim {

using Micros = std::int64_t;

inline Micros ms_to_us(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }
inline Micros s_to_us(double s) { return static_cast<Micros>(std::llround(s * 1e6)); }
inline double us_to_s(Micros us) { return static_cast<double>(us) * 1e-6; }

enum class Protocol { CTDMA, SDCTDMA, ADCTDMA };

std::string to_string(Protocol p);
Protocol protocol_for(Strategy s);

struct InfeasibleSchedule : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class SlotKind { V, X, U };

char to_char(SlotKind k);

struct MacTimings {
    double x_slot_ms = 80.0;
    double uv_slot_ms = 50.0;
    double d_c_ms = 10.0;
    double d_g_ms = 5.0;
    double guard_ms = 1.0;
};

struct PacketSizes {
    int state_x = 36;
    int ack = 1;
    int request_r = 1;
    int request_a = 1;
    int violation_v = 1;
    int control_u = 2;
    int eta_param = 2;
    int theta_param = 2;
    int increment_m = 4;
};

/// One slot. `footprint` covers the usable window plus the trailing guard.
struct Slot {
    std::size_t node = 0;
    SlotKind kind = SlotKind::X;
    Micros start = 0;
    Micros footprint = 0;
    Micros guard = 0;

    [[nodiscard]] Micros end() const { return start + footprint; }
    [[nodiscard]] Micros usable_end() const { return start + footprint - guard; }
};

struct SlotSchedule {
    Protocol protocol = Protocol::CTDMA;
    std::size_t n_nodes = 0;
    Micros frame_length = 0;
    Micros d_c = 0;
    Micros d_g = 0;
    Micros decision_offset = 0;  // start of d_c
    std::vector<Slot> slots;     // in time order

    [[nodiscard]] Micros layout_length() const;
    [[nodiscard]] const Slot& slot(std::size_t node, SlotKind kind) const;
};

/// Canonical layout; frame_length_ms <= 0 means "exactly the minimum".
SlotSchedule build_schedule(Protocol p, std::size_t n_nodes, const MacTimings& t = {}, double frame_length_ms = 0.0);
double min_interval_ms(Protocol p, std::size_t n_nodes, const MacTimings& t = {});

// --- energy ----------------------------------------------------------------

enum class NodeState { Sleep = 0, Idle, Rx, Tx, Sense, Actuate };
inline constexpr std::size_t kNodeStates = 6;

std::string to_string(NodeState s);
NodeState parse_node_state(const std::string& name);

struct Currents {
    std::array<double, kNodeStates> mA{10.0, 20.0, 120.0, 120.0, 40.0, 150.0};
    [[nodiscard]] double operator[](NodeState s) const { return mA[static_cast<std::size_t>(s)]; }
};

class EnergyLedger {
public:
    EnergyLedger() = default;
    EnergyLedger(std::size_t n_nodes, Currents currents);

    void account(std::size_t node, NodeState state, Micros duration);
    /// Seconds are rounded to whole microseconds.
    void account(std::size_t node, const std::string& state, double duration_s);

    [[nodiscard]] std::size_t nodes() const { return time_.size(); }
    [[nodiscard]] Micros time_in(std::size_t node, NodeState s) const { return time_[node][static_cast<std::size_t>(s)]; }
    [[nodiscard]] Micros total_time(std::size_t node) const;
    /// sum_state I_state t_state / 3600, mAh.
    [[nodiscard]] double discharge_mAh(std::size_t node) const;
    /// Same without the sleep term.
    [[nodiscard]] double discharge_deep_sleep_mAh(std::size_t node) const;
    [[nodiscard]] double total_discharge_mAh() const;
    [[nodiscard]] double total_discharge_deep_sleep_mAh() const;
    [[nodiscard]] const Currents& currents() const { return currents_; }

private:
    Currents currents_;
    std::vector<std::array<Micros, kNodeStates>> time_;
};

double discharge_mAh(NodeState s, Micros duration, const Currents& c);

// --- superframe ------------------------------------------------------------

struct RadioModel {
    double loss_probability = 0.0;
    double per_try_ms = 10.0;
    double byte_time_us = 32.0;  // 250 kbit/s
    Currents currents;
    double sense_ms = 5.0;
    double actuate_ms = 50.0;

    void validate(const MacTimings& t) const;
};

enum class MessageKind { StateX, IncrementM, RequestR, RequestA, ViolationV };

std::string to_string(MessageKind k);

/// One try of a request/acknowledge exchange.
struct MessageEvent {
    Micros time = 0;      // try start
    Micros duration = 0;  // whole try, request airtime plus ack wait
    std::size_t node = 0;
    MessageKind kind = MessageKind::StateX;
    int request_bytes = 0;
    int ack_bytes = 0;
    bool success = false;
    std::size_t slot_index = 0;  // index into the frame's schedule
};

struct StateInterval {
    Micros start = 0;
    Micros end = 0;
    std::size_t node = 0;
    NodeState state = NodeState::Sleep;
};

/// What each node wants to do this frame, decided at the sampling instant.
struct NodeIntent {
    bool violation = false;                    // SDC: v_j, ADC: send in the X-slot
    MessageKind payload = MessageKind::StateX; // x or m
};

struct Reception {
    std::vector<bool> v_received;   // SDC: a violation flag arrived
    bool event_announced = false;   // SDC: controller answered "yes"
    std::vector<bool> x_asked;      // node reached the X exchange
    std::vector<bool> x_received;
    Micros decision_time = 0;
};

struct ControlReply {
    bool update = false;                // u (and parameters) go out in the U-slots
    std::vector<bool> command_changed;  // per node
};

struct FrameOutcome {
    Reception reception;
    ControlReply reply;
    std::vector<bool> u_delivered;
    std::vector<Micros> u_time;  // U-slot end: when a delivered command takes effect
    std::vector<bool> actuated;
    int state_transmissions = 0;
    int drops = 0;
    int control_messages = 0;
};

using ControllerFn = std::function<ControlReply(const Reception&)>;

struct FrameSink {
    std::vector<MessageEvent>* messages = nullptr;
    std::vector<StateInterval>* intervals = nullptr;
};

/// Runs one super-frame on [frame_start, frame_end). frame_end may cut the
/// layout short at the end of a run; nothing starts at or after it.
FrameOutcome simulate_superframe(const SlotSchedule& schedule, Micros frame_start, Micros frame_end,
                                 const std::vector<NodeIntent>& intents, const ControllerFn& controller,
                                 const RadioModel& radio, const PacketSizes& packets, std::mt19937_64& rng,
                                 EnergyLedger& ledger, FrameSink sink = {});

struct TraceIssue {
    std::string what;
};

/// Structural checks on a message/interval trace: no try outside the usable
/// window of its slot, no overlapping slots, per-node intervals contiguous.
std::vector<TraceIssue> validate_frame_trace(const SlotSchedule& schedule, Micros frame_start,
                                             const std::vector<MessageEvent>& messages);
std::vector<TraceIssue> validate_schedule(const SlotSchedule& schedule);

}  // namespace etcsim
