#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fencesim/error.hpp"
#include "fencesim/link.hpp"

using namespace fencesim;

TEST_CASE("frame round trip") {
  const ReadingMessage msg = makeReading(Side::C, 0b1010'0000'0001, 123.456789, 517);
  const Frame f = encodeFrame(msg);
  CHECK(f[0] == 'C');
  CHECK(decodeFrame(f) == msg);
  CHECK(msg.timestampUs == 123456789);
}

TEST_CASE("frame wire layout is little-endian with an additive checksum") {
  const Frame f = encodeFrame(makeReading(Side::A, 0x01020304, 1.0, 0x0A0B));
  CHECK(f[1] == 0x04);
  CHECK(f[4] == 0x01);
  // 1 s = 1'000'000 us = 0x0F4240
  CHECK(f[5] == 0x40);
  CHECK(f[6] == 0x42);
  CHECK(f[7] == 0x0F);
  CHECK(f[13] == 0x0B);
  CHECK(f[14] == 0x0A);
  unsigned sum = 0;
  for (int i = 0; i < 15; ++i) sum += f[static_cast<std::size_t>(i)];
  CHECK(f[15] == (sum & 0xFF));
}

TEST_CASE("decode rejects corrupted frames") {
  Frame f = encodeFrame(makeReading(Side::B, 3, 2.0, 1));
  Frame bad = f;
  bad[3] ^= 0x10;
  CHECK_THROWS_AS(decodeFrame(bad), DecodeError);
  std::vector<std::uint8_t> shortFrame(f.begin(), f.begin() + 15);
  CHECK_THROWS_AS(decodeFrame(shortFrame), DecodeError);
  Frame side = f;
  side[0] = 'E';
  side[15] = static_cast<std::uint8_t>(side[15] + ('E' - 'B'));
  CHECK_THROWS_AS(decodeFrame(side), DecodeError);
  CHECK_THROWS_AS(makeReading(Side::A, 0, 1.0), ValidationError);
  CHECK_THROWS_AS(makeReading(Side::A, 1, -1.0), ValidationError);
}

TEST_CASE("sensor bitmaps map back to signatures") {
  const auto layout = buildLayout(FieldSpec{}, PirSpec{}, LayoutKind::A, defaultLayoutParams(LayoutKind::A));
  Signature sig{layout.find(Side::B, 2)->id, layout.find(Side::B, 7)->id, layout.find(Side::A, 0)->id};
  std::sort(sig.begin(), sig.end());
  const auto bits = sensorBitsFor(layout, sig, Side::B);
  CHECK(bits == ((1u << 2) | (1u << 7)));
  Signature back = signatureFor(layout, Side::B, bits);
  CHECK(back == Signature{layout.find(Side::B, 2)->id, layout.find(Side::B, 7)->id});
  CHECK_THROWS_AS(signatureFor(layout, Side::B, 1u << 20), ValidationError);
}

TEST_CASE("measured profiles") {
  const auto row1 = measuredProfile("row1");
  CHECK(row1.senderHeightFt == 4);
  CHECK(row1.receiverHeightFt == 4);
  CHECK(row1.distanceM == 500);
  CHECK(row1.baseLatency == 4.0);
  CHECK(measuredProfile("row2").baseLatency == 0.7);
  CHECK(measuredProfile("row3").baseLatency == 1.1);
  CHECK(measuredProfile("row4").baseLatency == 0.9);
  CHECK(measuredProfile("row4").distanceM == 2000);
  CHECK_THROWS_AS(measuredProfile("row5"), ValidationError);
}

TEST_CASE("schedule slots") {
  GatewaySchedule s{{7, 3, 9}, 0.5};
  CHECK(s.cycleDuration() == 1.5);
  CHECK(s.nextSlot(7, 0.0) == 0);
  CHECK(s.nextSlot(3, 0.0) == 1);
  CHECK(s.nextSlot(7, 0.1) == 3);
  CHECK(s.nextSlot(9, 1.0) == 2);
  CHECK(s.nextSlot(9, 1.01) == 5);
  CHECK(s.ownerOf(4) == 3);
  CHECK_THROWS_AS(s.slotIndexOf(4), ValidationError);
  CHECK_THROWS_AS((GatewaySchedule{{1, 1}, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((GatewaySchedule{{}, 1.0}.validate()), ValidationError);
}

TEST_CASE("zero jitter on the 4 ft / 4 ft / 500 m profile is slot wait plus 4.0 s exactly") {
  Rng rng(1);
  LinkProfile p = measuredProfile("row1");
  p.jitterFraction = 0.0;
  Gateway gw(GatewaySchedule{{0, 1, 2, 3}, 0.25});
  const double now = 1.3;
  const auto arrival = gw.deliver(2, makeReading(Side::C, 1, now), p, now, rng);
  REQUIRE(arrival);
  const double slotStart = 6 * 0.25;  // node 2 owns slots 2, 6, 10, ...; slot 6 is the first at or after 1.3 s
  CHECK(*arrival == slotStart + 4.0);
  CHECK(*arrival - now == doctest::Approx((slotStart - now) + 4.0).epsilon(1e-15));
}

TEST_CASE("queue capacity drops frames and records them") {
  Rng rng(1);
  Gateway gw(GatewaySchedule{{0, 1}, 1.0}, 2);
  const auto p = measuredProfile("row2");
  CHECK(gw.deliver(0, makeReading(Side::A, 1, 0.5), p, 0.5, rng));
  CHECK(gw.deliver(0, makeReading(Side::A, 1, 0.5), p, 0.5, rng));
  CHECK_FALSE(gw.deliver(0, makeReading(Side::A, 1, 0.5), p, 0.5, rng));
  CHECK(gw.stats().dropped == 1);
  CHECK(gw.trace().back().dropped);
  // Once the queued slots have started the queue has room again.
  CHECK(gw.deliver(0, makeReading(Side::A, 1, 10.0), p, 10.0, rng));
}

TEST_CASE("randomized schedules keep FIFO, collision-freedom, fairness and latency bounds") {
  Rng meta(2024);
  int schedules = 0;
  for (; schedules < 1000; ++schedules) {
    const std::size_t n = 1 + static_cast<std::size_t>(meta.canonical() * 6);
    std::vector<NodeId> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back(static_cast<NodeId>(10 * i + 3));
    const double slot = 0.05 + meta.canonical() * 1.5;
    LinkProfile profile = measuredProfiles()[static_cast<std::size_t>(meta.canonical() * 4)];
    profile.jitterFraction = meta.canonical() * 0.5;
    Gateway gw(GatewaySchedule{nodes, slot}, 1000);
    Rng rng(meta.next());

    double now = 0.0;
    std::map<NodeId, std::uint16_t> seq;
    const int frames = 5 + static_cast<int>(meta.canonical() * 60);
    for (int f = 0; f < frames; ++f) {
      now += meta.canonical() < 0.3 ? 0.0 : meta.canonical() * 2.0 * slot;
      const NodeId node = nodes[static_cast<std::size_t>(meta.canonical() * static_cast<double>(n))];
      gw.deliver(node, makeReading(Side::A, 1, now, seq[node]++), profile, now, rng);
    }

    std::set<double> usedSlots;
    std::map<NodeId, const LinkTraceRecord*> last;
    for (const auto& r : gw.trace()) {
      REQUIRE_FALSE(r.dropped);
      // Collision-freedom: no two frames share a slot, and the slot is the node's own.
      REQUIRE(usedSlots.insert(r.slotStartT).second);
      const auto k = static_cast<std::int64_t>(std::llround(r.slotStartT / slot));
      REQUIRE(gw.schedule().ownerOf(k) == r.node);
      REQUIRE(r.slotStartT >= r.enqueueT - 1e-9);
      // Latency bounds relative to the slot start.
      const double lat = r.arrivalT - r.slotStartT;
      REQUIRE(lat >= profile.baseLatency * (1 - profile.jitterFraction) - 1e-9);
      REQUIRE(lat <= profile.baseLatency * (1 + profile.jitterFraction) + 1e-9);
      // Per-node FIFO in both slot and arrival order.
      if (auto it = last.find(r.node); it != last.end()) {
        REQUIRE(r.slotStartT > it->second->slotStartT);
        REQUIRE(r.arrivalT >= it->second->arrivalT);
        REQUIRE(static_cast<std::uint16_t>(it->second->sequence + 1) == r.sequence);
      }
      last[r.node] = &r;
    }
  }
  CHECK(schedules == 1000);
}

TEST_CASE("saturated nodes transmit exactly once per cycle") {
  Rng meta(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(meta.canonical() * 8);
    std::vector<NodeId> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
    const double slot = 0.1 + meta.canonical();
    Gateway gw(GatewaySchedule{nodes, slot}, 64);
    Rng rng(meta.next());
    const int perNode = 3 + static_cast<int>(meta.canonical() * 10);
    // Every node queues its whole backlog at time 0.
    for (int k = 0; k < perNode; ++k)
      for (NodeId node : nodes) gw.deliver(node, makeReading(Side::A, 1, 0.0), measuredProfile("row3"), 0.0, rng);
    std::map<std::int64_t, std::map<NodeId, int>> perCycle;
    for (const auto& r : gw.trace()) {
      const auto k = static_cast<std::int64_t>(std::llround(r.slotStartT / slot));
      perCycle[k / static_cast<std::int64_t>(n)][r.node]++;
    }
    REQUIRE(perCycle.size() == static_cast<std::size_t>(perNode));
    for (const auto& [cycle, counts] : perCycle) {
      REQUIRE(counts.size() == n);
      for (const auto& [node, c] : counts) REQUIRE(c == 1);
    }
  }
}

TEST_CASE("jitter-free latency is the base latency") {
  Rng rng(5);
  LinkProfile p = measuredProfile("row3");
  p.jitterFraction = 0;
  CHECK(sampleLatency(p, rng) == 1.1);
  p.jitterFraction = 0.6;
  CHECK_THROWS_AS(sampleLatency(p, rng), ValidationError);
}

TEST_CASE("link trace csv") {
  Rng rng(1);
  Gateway gw(GatewaySchedule{{0}, 1.0});
  gw.deliver(0, makeReading(Side::A, 1, 0.2), measuredProfile("row2"), 0.2, rng);
  const std::string csv = linkTraceCsv(gw.trace(), "M1");
  CHECK(csv.rfind("scope,nodeId,sequence,enqueueT,slotStartT,arrivalT,bytes,dropped\n", 0) == 0);
  CHECK(csv.find("M1,0,0,0.200000,1.000000,") != std::string::npos);
}
