#include <algorithm>
#include <cmath>

#include "etcsim/macsim.hpp"

namespace etcsim {

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::CTDMA: return "C-TDMA";
        case Protocol::SDCTDMA: return "SDC-TDMA";
        case Protocol::ADCTDMA: return "ADC-TDMA";
    }
    return "?";
}

Protocol protocol_for(Strategy s) {
    switch (s) {
        case Strategy::TTC:
        case Strategy::PETC: return Protocol::CTDMA;
        case Strategy::PSDETC: return Protocol::SDCTDMA;
        case Strategy::PADETCabs:
        case Strategy::PADETCrel: return Protocol::ADCTDMA;
    }
    return Protocol::CTDMA;
}

char to_char(SlotKind k) {
    switch (k) {
        case SlotKind::V: return 'V';
        case SlotKind::X: return 'X';
        case SlotKind::U: return 'U';
    }
    return '?';
}

Micros SlotSchedule::layout_length() const { return slots.empty() ? 0 : slots.back().end(); }

const Slot& SlotSchedule::slot(std::size_t node, SlotKind kind) const {
    for (const Slot& s : slots)
        if (s.node == node && s.kind == kind) return s;
    throw std::out_of_range("schedule: no such slot");
}

SlotSchedule build_schedule(Protocol p, std::size_t n_nodes, const MacTimings& t, double frame_length_ms) {
    if (n_nodes == 0) throw InfeasibleSchedule("schedule: need at least one node");
    if (!(t.x_slot_ms > 0 && t.uv_slot_ms > 0 && t.d_c_ms >= 0 && t.d_g_ms >= 0 && t.guard_ms >= 0))
        throw InfeasibleSchedule("schedule: timings must be positive");

    SlotSchedule s;
    s.protocol = p;
    s.n_nodes = n_nodes;
    s.d_c = ms_to_us(t.d_c_ms);
    s.d_g = p == Protocol::SDCTDMA ? ms_to_us(t.d_g_ms) : 0;
    const Micros guard = ms_to_us(t.guard_ms);

    Micros cursor = 0;
    auto block = [&](SlotKind kind, double ms) {
        for (std::size_t j = 0; j < n_nodes; ++j) {
            const Micros fp = ms_to_us(ms) + guard;
            s.slots.push_back({j, kind, cursor, fp, guard});
            cursor += fp;
        }
    };
    if (p == Protocol::SDCTDMA) {
        block(SlotKind::V, t.uv_slot_ms);
        cursor += s.d_g;
    }
    block(SlotKind::X, t.x_slot_ms);
    s.decision_offset = cursor;
    cursor += s.d_c;
    block(SlotKind::U, t.uv_slot_ms);

    s.frame_length = frame_length_ms > 0.0 ? ms_to_us(frame_length_ms) : cursor;
    if (s.frame_length < cursor)
        throw InfeasibleSchedule("schedule: frame length " + std::to_string(frame_length_ms) + " ms below the " +
                                 to_string(p) + " minimum of " + std::to_string(us_to_s(cursor) * 1e3) + " ms");
    return s;
}

double min_interval_ms(Protocol p, std::size_t n_nodes, const MacTimings& t) {
    return static_cast<double>(build_schedule(p, n_nodes, t).layout_length()) / 1000.0;
}

std::vector<TraceIssue> validate_schedule(const SlotSchedule& s) {
    std::vector<TraceIssue> issues;
    for (std::size_t k = 1; k < s.slots.size(); ++k)
        if (s.slots[k].start < s.slots[k - 1].end())
            issues.push_back({"slot " + std::to_string(k) + " overlaps its predecessor"});
    for (const Slot& sl : s.slots)
        if (sl.footprint <= sl.guard) issues.push_back({"slot without usable window"});
    if (s.layout_length() > s.frame_length) issues.push_back({"layout longer than frame"});
    // V before X before U
    auto rank = [](SlotKind k) { return k == SlotKind::V ? 0 : k == SlotKind::X ? 1 : 2; };
    for (std::size_t k = 1; k < s.slots.size(); ++k)
        if (rank(s.slots[k].kind) < rank(s.slots[k - 1].kind)) issues.push_back({"slot blocks out of order"});
    return issues;
}

std::vector<TraceIssue> validate_frame_trace(const SlotSchedule& s, Micros frame_start,
                                             const std::vector<MessageEvent>& messages) {
    std::vector<TraceIssue> issues = validate_schedule(s);
    for (const MessageEvent& m : messages) {
        if (m.slot_index >= s.slots.size()) {
            issues.push_back({"message references unknown slot"});
            continue;
        }
        const Slot& sl = s.slots[m.slot_index];
        if (sl.node != m.node) issues.push_back({"message sent in another node's slot"});
        const Micros a = frame_start + sl.start;
        const Micros b = frame_start + sl.usable_end();
        if (m.time < a || m.time + m.duration > b)
            issues.push_back({"try at " + std::to_string(m.time) + " us leaves the usable window"});
    }
    return issues;
}

}  // namespace etcsim
