#include <algorithm>
#include <cmath>

#include "etcsim/macsim.hpp"

namespace etcsim {

std::string to_string(MessageKind k) {
    switch (k) {
        case MessageKind::StateX: return "x";
        case MessageKind::IncrementM: return "m";
        case MessageKind::RequestR: return "r";
        case MessageKind::RequestA: return "a";
        case MessageKind::ViolationV: return "v";
    }
    return "?";
}

void RadioModel::validate(const MacTimings& t) const {
    if (!(loss_probability >= 0.0 && loss_probability < 1.0))
        throw std::invalid_argument("radio: loss probability must lie in [0, 1)");
    if (!(per_try_ms > 0.0)) throw std::invalid_argument("radio: per-try duration must be positive");
    if (!(byte_time_us > 0.0)) throw std::invalid_argument("radio: byte time must be positive");
    if (!(sense_ms >= 0.0 && actuate_ms >= 0.0)) throw std::invalid_argument("radio: negative task duration");
    if (per_try_ms > std::min(t.x_slot_ms, t.uv_slot_ms))
        throw std::invalid_argument("radio: a single try does not fit in a slot");
    if (36.0 * byte_time_us >= per_try_ms * 1000.0)
        throw std::invalid_argument("radio: state packet airtime exceeds the try duration");
}

namespace {

class NodeTimeline {
public:
    void activity(Micros a, Micros b, NodeState s) {
        if (b > a) acts_.push_back({a, b, 0, s});
    }
    void awake(Micros a, Micros b) {
        if (b > a) awake_.emplace_back(a, b);
    }

    /// Partition [from, to) into intervals; activities win over awake
    /// windows, awake windows are idle, everything else is sleep.
    std::vector<StateInterval> finalize(std::size_t node, Micros from, Micros to) {
        std::sort(acts_.begin(), acts_.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
        std::sort(awake_.begin(), awake_.end());
        std::vector<StateInterval> out;
        auto push = [&](Micros a, Micros b, NodeState s) {
            a = std::max(a, from);
            b = std::min(b, to);
            if (b <= a) return;
            if (!out.empty() && out.back().state == s && out.back().end == a) {
                out.back().end = b;
            } else {
                out.push_back({a, b, node, s});
            }
        };
        auto gap = [&](Micros a, Micros b) {
            Micros c = a;
            for (const auto& [wa, wb] : awake_) {
                const Micros lo = std::max(wa, a);
                const Micros hi = std::min(wb, b);
                if (hi <= lo) continue;
                push(c, lo, NodeState::Sleep);
                push(lo, hi, NodeState::Idle);
                c = std::max(c, hi);
            }
            push(c, b, NodeState::Sleep);
        };
        Micros cursor = from;
        for (const StateInterval& s : acts_) {
            if (s.start >= to) break;
            gap(cursor, s.start);
            push(std::max(s.start, cursor), s.end, s.state);
            cursor = std::max(cursor, std::min(s.end, to));
        }
        gap(cursor, to);
        return out;
    }

private:
    std::vector<StateInterval> acts_;
    std::vector<std::pair<Micros, Micros>> awake_;
};

struct ExchangeResult {
    bool success = false;
    Micros end = 0;
};

class FrameRun {
public:
    FrameRun(const SlotSchedule& s, Micros frame_start, Micros frame_end, const RadioModel& radio,
             std::mt19937_64& rng, FrameSink sink)
        : s_(s), F_(frame_start), E_(frame_end), radio_(radio), rng_(rng), sink_(sink), lines_(s.n_nodes) {
        try_us_ = ms_to_us(radio.per_try_ms);
    }

    NodeTimeline& line(std::size_t j) { return lines_[j]; }

    ExchangeResult exchange(std::size_t slot_index, Micros start, MessageKind kind, int req_bytes, int ack_bytes) {
        const Slot& sl = s_.slots[slot_index];
        const Micros limit = std::min(F_ + sl.usable_end(), E_);
        const Micros air = static_cast<Micros>(std::ceil(req_bytes * radio_.byte_time_us));
        Micros t = start;
        while (t + try_us_ <= limit) {
            const bool ok = draw_success();
            lines_[sl.node].activity(t, t + air, NodeState::Tx);
            lines_[sl.node].activity(t + air, t + try_us_, NodeState::Rx);
            if (sink_.messages)
                sink_.messages->push_back({t, try_us_, sl.node, kind, req_bytes, ack_bytes, ok, slot_index});
            t += try_us_;
            if (ok) return {true, t};
        }
        ++drops;
        return {false, t};
    }

    Micros abs(Micros offset) const { return F_ + offset; }
    bool starts_in_frame(const Slot& sl) const { return F_ + sl.start < E_; }

    int drops = 0;

private:
    bool draw_success() {
        if (radio_.loss_probability <= 0.0) return true;
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return u >= radio_.loss_probability;
    }

    const SlotSchedule& s_;
    Micros F_, E_;
    const RadioModel& radio_;
    std::mt19937_64& rng_;
    FrameSink sink_;
    std::vector<NodeTimeline> lines_;
    Micros try_us_ = 0;
};

}  // namespace

FrameOutcome simulate_superframe(const SlotSchedule& schedule, Micros frame_start, Micros frame_end,
                                 const std::vector<NodeIntent>& intents, const ControllerFn& controller,
                                 const RadioModel& radio, const PacketSizes& packets, std::mt19937_64& rng,
                                 EnergyLedger& ledger, FrameSink sink) {
    const std::size_t n = schedule.n_nodes;
    if (intents.size() != n) throw std::invalid_argument("superframe: one intent per node required");
    if (ledger.nodes() != n) throw std::invalid_argument("superframe: ledger node count mismatch");
    if (frame_end <= frame_start) throw std::invalid_argument("superframe: empty frame");
    const Protocol proto = schedule.protocol;

    FrameRun run(schedule, frame_start, frame_end, radio, rng, sink);
    FrameOutcome out;
    Reception& rx = out.reception;
    rx.v_received.assign(n, false);
    rx.x_asked.assign(n, false);
    rx.x_received.assign(n, false);
    out.u_delivered.assign(n, false);
    out.u_time.assign(n, 0);
    out.actuated.assign(n, false);

    const Micros sensed = frame_start + ms_to_us(radio.sense_ms);
    for (std::size_t j = 0; j < n; ++j) run.line(j).activity(frame_start, sensed, NodeState::Sense);

    for (std::size_t k = 0; k < schedule.slots.size(); ++k) {
        const Slot& sl = schedule.slots[k];
        if (sl.kind != SlotKind::V || !run.starts_in_frame(sl)) continue;
        const std::size_t j = sl.node;
        run.line(j).awake(run.abs(sl.start), std::min(run.abs(sl.end()), frame_end));
        const auto r = run.exchange(k, std::max(run.abs(sl.start), sensed), MessageKind::ViolationV,
                                    packets.violation_v, packets.ack);
        rx.v_received[j] = r.success && intents[j].violation;
    }
    rx.event_announced = std::any_of(rx.v_received.begin(), rx.v_received.end(), [](bool b) { return b; });

    for (std::size_t k = 0; k < schedule.slots.size(); ++k) {
        const Slot& sl = schedule.slots[k];
        if (sl.kind != SlotKind::X || !run.starts_in_frame(sl)) continue;
        const std::size_t j = sl.node;
        const Micros a = run.abs(sl.start);
        const Micros slot_end = std::min(run.abs(sl.end()), frame_end);
        const Micros t0 = std::max(a, sensed);
        const MessageKind kind = proto == Protocol::ADCTDMA ? intents[j].payload : MessageKind::StateX;
        const int bytes = kind == MessageKind::IncrementM ? packets.increment_m : packets.state_x;

        if (proto == Protocol::SDCTDMA) {
            const auto ask = run.exchange(k, t0, MessageKind::RequestA, packets.request_a, packets.ack);
            if (!ask.success || !rx.event_announced) {
                // answered "no" (or never answered): back to sleep at once
                run.line(j).awake(a, ask.end);
                continue;
            }
            run.line(j).awake(a, slot_end);
            rx.x_asked[j] = true;
            rx.x_received[j] = run.exchange(k, ask.end, kind, bytes, packets.ack).success;
        } else {
            if (proto == Protocol::ADCTDMA && !intents[j].violation) continue;
            run.line(j).awake(a, slot_end);
            rx.x_asked[j] = true;
            rx.x_received[j] = run.exchange(k, t0, kind, bytes, packets.ack).success;
        }
        if (rx.x_received[j]) ++out.state_transmissions;
    }

    rx.decision_time = run.abs(schedule.decision_offset);
    if (rx.decision_time < frame_end) out.reply = controller(rx);
    if (out.reply.command_changed.size() != n) out.reply.command_changed.assign(n, false);

    const bool u_slots_run = proto != Protocol::SDCTDMA || rx.event_announced;
    int u_ack = packets.ack;
    if (out.reply.update) {
        u_ack = packets.control_u;
        if (proto == Protocol::SDCTDMA) u_ack += packets.theta_param;
        if (proto == Protocol::ADCTDMA) u_ack += packets.eta_param;
    }
    const Micros act_us = ms_to_us(radio.actuate_ms);
    for (std::size_t k = 0; u_slots_run && k < schedule.slots.size(); ++k) {
        const Slot& sl = schedule.slots[k];
        if (sl.kind != SlotKind::U || !run.starts_in_frame(sl)) continue;
        const std::size_t j = sl.node;
        const Micros a = run.abs(sl.start);
        run.line(j).awake(a, std::min(run.abs(sl.end()), frame_end));
        const auto r = run.exchange(k, std::max(a, sensed), MessageKind::RequestR, packets.request_r, u_ack);
        out.u_time[j] = run.abs(sl.end());
        out.u_delivered[j] = r.success && out.reply.update;
        if (out.u_delivered[j]) ++out.control_messages;
        if (out.u_delivered[j] && out.reply.command_changed[j] && out.u_time[j] < frame_end) {
            out.actuated[j] = true;
            run.line(j).activity(out.u_time[j], std::min(out.u_time[j] + act_us, frame_end), NodeState::Actuate);
        }
    }
    out.drops = run.drops;

    for (std::size_t j = 0; j < n; ++j) {
        for (const StateInterval& iv : run.line(j).finalize(j, frame_start, frame_end)) {
            ledger.account(j, iv.state, iv.end - iv.start);
            if (sink.intervals) sink.intervals->push_back(iv);
        }
    }
    return out;
}

}  // namespace etcsim
