#include <doctest.h>

#include <cmath>
#include <random>

#include "etcsim/macsim.hpp"

using namespace etcsim;

namespace {

struct Counts {
    int x = 0, m = 0, r = 0, a = 0, v = 0;
    int u_acks_with_payload = 0;
};

Counts count(const std::vector<MessageEvent>& msgs, const PacketSizes& p) {
    Counts c;
    for (const MessageEvent& e : msgs) {
        if (!e.success) continue;
        switch (e.kind) {
            case MessageKind::StateX: ++c.x; break;
            case MessageKind::IncrementM: ++c.m; break;
            case MessageKind::RequestR:
                ++c.r;
                c.u_acks_with_payload += e.ack_bytes >= p.control_u;
                break;
            case MessageKind::RequestA: ++c.a; break;
            case MessageKind::ViolationV: ++c.v; break;
        }
    }
    return c;
}

ControllerFn always(bool update, std::size_t n) {
    return [=](const Reception&) { return ControlReply{update, std::vector<bool>(n, true)}; };
}

}  // namespace

TEST_CASE("canonical layouts") {
    const SlotSchedule c = build_schedule(Protocol::CTDMA, 3);
    REQUIRE(c.slots.size() == 6);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(c.slots[j].kind == SlotKind::X);
        CHECK(c.slots[j].footprint == ms_to_us(81));
        CHECK(c.slots[j].guard == ms_to_us(1));
        CHECK(c.slots[3 + j].kind == SlotKind::U);
        CHECK(c.slots[3 + j].footprint == ms_to_us(51));
    }
    CHECK(c.decision_offset == ms_to_us(243));
    CHECK(c.slots[3].start == ms_to_us(253));

    const SlotSchedule s = build_schedule(Protocol::SDCTDMA, 3);
    REQUIRE(s.slots.size() == 9);
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.slots[j].kind == SlotKind::V);
    CHECK(s.slots[3].start == ms_to_us(3 * 51 + 5));

    const SlotSchedule one = build_schedule(Protocol::ADCTDMA, 1);
    CHECK(one.slots.size() == 2);
    CHECK(validate_schedule(one).empty());

    CHECK_THROWS_AS(build_schedule(Protocol::CTDMA, 0), InfeasibleSchedule);
    CHECK_THROWS_AS(build_schedule(Protocol::SDCTDMA, 3, {}, 500.0), InfeasibleSchedule);
    CHECK_NOTHROW(build_schedule(Protocol::SDCTDMA, 3, {}, 564.0));
}

TEST_CASE("minimum intervals") {
    CHECK(min_interval_ms(Protocol::SDCTDMA, 3) == 564.0);
    CHECK(min_interval_ms(Protocol::CTDMA, 3) == 406.0);
    CHECK(min_interval_ms(Protocol::ADCTDMA, 3) == 406.0);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(1.0, 100.0);
    for (int k = 0; k < 200; ++k) {
        // Slot arithmetic is in whole microseconds, so draw on that grid.
        auto us = [&](double scale) { return std::round(scale * u(rng) * 1000.0) / 1000.0; };
        MacTimings t{us(1.0), us(1.0), us(1.0), us(1.0), us(0.01)};
        for (std::size_t n = 1; n <= 6; ++n) {
            const double diff = min_interval_ms(Protocol::SDCTDMA, n, t) - min_interval_ms(Protocol::CTDMA, n, t);
            CHECK(diff == doctest::Approx(n * (t.uv_slot_ms + t.guard_ms) + t.d_g_ms).epsilon(1e-12));
        }
    }
}

TEST_CASE("schedules and traces stay inside usable windows") {
    std::mt19937_64 rng(42), coin(43);
    std::bernoulli_distribution flip(0.5);
    RadioModel radio;
    radio.loss_probability = 0.3;
    PacketSizes packets;
    for (Protocol p : {Protocol::CTDMA, Protocol::SDCTDMA, Protocol::ADCTDMA}) {
        for (std::size_t n = 1; n <= 6; ++n) {
            const SlotSchedule s = build_schedule(p, n);
            CHECK(validate_schedule(s).empty());
            EnergyLedger ledger(n, radio.currents);
            std::size_t issues = 0;
            for (int f = 0; f < 1000; ++f) {
                std::vector<NodeIntent> intents(n);
                for (auto& i : intents) {
                    i.violation = flip(coin);
                    i.payload = flip(coin) ? MessageKind::StateX : MessageKind::IncrementM;
                }
                std::vector<MessageEvent> msgs;
                const Micros F = f * s.frame_length;
                simulate_superframe(s, F, F + s.frame_length, intents, always(flip(coin), n), radio, packets, rng,
                                    ledger, {&msgs, nullptr});
                issues += validate_frame_trace(s, F, msgs).size();
            }
            CHECK(issues == 0);
            for (std::size_t j = 0; j < n; ++j) CHECK(ledger.total_time(j) == 1000 * s.frame_length);
        }
    }
}

TEST_CASE("time-triggered frame over C-TDMA") {
    const SlotSchedule s = build_schedule(Protocol::CTDMA, 3, {}, 1000.0);
    RadioModel radio;
    PacketSizes packets;
    std::mt19937_64 rng(1);
    EnergyLedger ledger(3, radio.currents);
    std::vector<MessageEvent> msgs;
    const FrameOutcome o = simulate_superframe(s, 0, s.frame_length, std::vector<NodeIntent>(3), always(true, 3),
                                               radio, packets, rng, ledger, {&msgs, nullptr});
    const Counts c = count(msgs, packets);
    CHECK(c.x == 3);
    CHECK(c.r == 3);
    CHECK(c.u_acks_with_payload == 3);
    CHECK(o.state_transmissions == 3);
    CHECK(o.control_messages == 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(o.actuated[j]);
}

TEST_CASE("synchronous frame without a violation") {
    const SlotSchedule s = build_schedule(Protocol::SDCTDMA, 3, {}, 1000.0);
    RadioModel radio;
    PacketSizes packets;
    std::mt19937_64 rng(1);
    EnergyLedger ledger(3, radio.currents);
    std::vector<MessageEvent> msgs;
    std::vector<StateInterval> ivs;
    bool asked = false;
    const FrameOutcome o = simulate_superframe(
        s, 0, s.frame_length, std::vector<NodeIntent>(3),
        [&](const Reception& r) {
            asked = true;
            CHECK_FALSE(r.event_announced);
            return ControlReply{false, {false, false, false}};
        },
        radio, packets, rng, ledger, {&msgs, &ivs});
    const Counts c = count(msgs, packets);
    CHECK(asked);
    CHECK(c.v == 3);
    CHECK(c.a == 3);
    CHECK(c.x == 0);
    CHECK(c.r == 0);
    CHECK(o.state_transmissions == 0);
    // After the "no" answer each node sleeps until the frame ends.
    for (std::size_t j = 0; j < 3; ++j) {
        const Slot& x = s.slot(j, SlotKind::X);
        Micros last_awake = 0;
        for (const StateInterval& iv : ivs)
            if (iv.node == j && iv.state != NodeState::Sleep) last_awake = std::max(last_awake, iv.end);
        CHECK(last_awake < x.usable_end());
    }
}

TEST_CASE("synchronous frame with one violation collects every state") {
    const SlotSchedule s = build_schedule(Protocol::SDCTDMA, 3, {}, 1000.0);
    RadioModel radio;
    PacketSizes packets;
    std::mt19937_64 rng(1);
    EnergyLedger ledger(3, radio.currents);
    std::vector<MessageEvent> msgs;
    std::vector<NodeIntent> intents(3);
    intents[0].violation = true;
    const FrameOutcome o =
        simulate_superframe(s, 0, s.frame_length, intents, always(true, 3), radio, packets, rng, ledger, {&msgs});
    CHECK(o.reception.event_announced);
    CHECK(o.state_transmissions == 3);
    CHECK(count(msgs, packets).u_acks_with_payload == 3);
}

TEST_CASE("asynchronous frame where only node 2 triggers") {
    const SlotSchedule s = build_schedule(Protocol::ADCTDMA, 3, {}, 1000.0);
    RadioModel radio;
    PacketSizes packets;
    std::mt19937_64 rng(1);
    EnergyLedger ledger(3, radio.currents);
    std::vector<MessageEvent> msgs;
    std::vector<NodeIntent> intents(3);
    intents[1].violation = true;
    const FrameOutcome o =
        simulate_superframe(s, 0, s.frame_length, intents, always(true, 3), radio, packets, rng, ledger, {&msgs});
    const Counts c = count(msgs, packets);
    CHECK(c.x == 1);
    CHECK(o.reception.x_received == std::vector<bool>{false, true, false});
    CHECK(c.r == 3);
    for (const MessageEvent& e : msgs)
        if (e.kind == MessageKind::RequestR) CHECK(e.ack_bytes == packets.control_u + packets.eta_param);
}

TEST_CASE("loss-free frames are deterministic") {
    const SlotSchedule s = build_schedule(Protocol::ADCTDMA, 3, {}, 1000.0);
    RadioModel radio;
    PacketSizes packets;
    std::vector<NodeIntent> intents(3);
    intents[2].violation = true;
    std::vector<MessageEvent> a, b;
    for (auto* out : {&a, &b}) {
        std::mt19937_64 rng(99);
        EnergyLedger ledger(3, radio.currents);
        simulate_superframe(s, 0, s.frame_length, intents, always(true, 3), radio, packets, rng, ledger, {out});
    }
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].time == b[k].time);
        CHECK(a[k].kind == b[k].kind);
    }
}

TEST_CASE("energy ledger") {
    Currents c;
    EnergyLedger l(2, c);
    l.account(0, "sleep", 1.0);
    CHECK(l.discharge_mAh(0) == doctest::Approx(10.0 / 3600.0).epsilon(1e-15));
    CHECK(l.discharge_deep_sleep_mAh(0) == 0.0);
    l.account(1, NodeState::Tx, 0);
    CHECK(l.total_time(1) == 0);
    CHECK(l.discharge_mAh(1) == 0.0);
    CHECK_THROWS_AS(l.account(0, "hibernate", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(parse_node_state("awake"), std::invalid_argument);
    CHECK_THROWS_AS(l.account(0, NodeState::Idle, -1), std::invalid_argument);

    l.account(1, "idle", 2.5);
    l.account(1, "rx", 0.25);
    l.account(1, "actuate", 0.05);
    const double direct = (20.0 * 2.5 + 120.0 * 0.25 + 150.0 * 0.05) / 3600.0;
    CHECK(l.discharge_mAh(1) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(l.total_time(1) == s_to_us(2.8));
}
