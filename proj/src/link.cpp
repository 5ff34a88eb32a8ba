#include "fencesim/link.hpp"

#include <algorithm>
#include <cmath>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

ReadingMessage makeReading(Side side, std::uint32_t sensorBits, double timestampSeconds, std::uint16_t sequence) {
  if (!std::isfinite(timestampSeconds) || timestampSeconds < 0.0)
    throw ValidationError("timestamp", "must be finite and >= 0");
  if (sensorBits == 0) throw ValidationError("sensorBits", "at least one sensor must be set");
  return {side, sensorBits, static_cast<std::uint64_t>(std::llround(timestampSeconds * 1e6)), sequence};
}

std::uint32_t sensorBitsFor(const SensorLayout& layout, const Signature& sig, Side side) {
  std::uint32_t bits = 0;
  for (SensorId id : sig) {
    const auto& pose = layout.sensor(id).pose;
    if (pose.side != side) continue;
    if (pose.indexOnSide < 0 || pose.indexOnSide >= 32)
      throw ValidationError("sensorField", "sensor index " + std::to_string(pose.indexOnSide) +
                                               " does not fit the 32-bit frame field");
    bits |= std::uint32_t{1} << pose.indexOnSide;
  }
  return bits;
}

Signature signatureFor(const SensorLayout& layout, Side side, std::uint32_t sensorBits) {
  Signature sig;
  for (int i = 0; i < 32; ++i) {
    if (!(sensorBits & (std::uint32_t{1} << i))) continue;
    const Sensor* s = layout.find(side, i);
    if (!s) throw ValidationError("sensorField", std::string("no sensor ") + sideLabel(side) + std::to_string(i));
    sig.push_back(s->id);
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

namespace {

template <typename T>
void putLe(Frame& f, std::size_t at, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) f[at + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
}

template <typename T>
T getLe(std::span<const std::uint8_t> b, std::size_t at) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[at + i]) << (8 * i);
  return v;
}

std::uint8_t checksum(std::span<const std::uint8_t> b) {
  unsigned sum = 0;
  for (std::size_t i = 0; i < kFrameSize - 1; ++i) sum += b[i];
  return static_cast<std::uint8_t>(sum & 0xFF);
}

}  // namespace

Frame encodeFrame(const ReadingMessage& msg) {
  Frame f{};
  f[0] = static_cast<std::uint8_t>(sideLabel(msg.side));
  putLe<std::uint32_t>(f, 1, msg.sensorBits);
  putLe<std::uint64_t>(f, 5, msg.timestampUs);
  putLe<std::uint16_t>(f, 13, msg.sequence);
  f[15] = checksum(f);
  return f;
}

ReadingMessage decodeFrame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFrameSize) throw DecodeError("frame must be 16 bytes, got " + std::to_string(bytes.size()));
  if (checksum(bytes) != bytes[15]) throw DecodeError("checksum mismatch");
  const auto side = sideFromLabel(static_cast<char>(bytes[0]));
  if (!side) throw DecodeError("unknown side code " + std::to_string(bytes[0]));
  ReadingMessage msg;
  msg.side = *side;
  msg.sensorBits = getLe<std::uint32_t>(bytes, 1);
  msg.timestampUs = getLe<std::uint64_t>(bytes, 5);
  msg.sequence = getLe<std::uint16_t>(bytes, 13);
  return msg;
}

void LinkProfile::validate() const {
  if (!(baseLatency > 0.0)) throw ValidationError("baseLatency", "must be positive");
  if (!(jitterFraction >= 0.0 && jitterFraction <= 0.5))
    throw ValidationError("jitterFraction", "must be in [0, 0.5]");
}

std::span<const LinkProfile> measuredProfiles() {
  static const std::array<LinkProfile, 4> profiles{{
      {"row1", 4.0, 4.0, 500.0, 4.0, 0.1},
      {"row2", 4.0, 35.0, 350.0, 0.7, 0.1},
      {"row3", 35.0, 200.0, 500.0, 1.1, 0.1},
      {"row4", 4.0, 200.0, 2000.0, 0.9, 0.1},
  }};
  return profiles;
}

LinkProfile measuredProfile(std::string_view name) {
  for (const auto& p : measuredProfiles()) {
    if (p.name == name) return p;
  }
  throw ValidationError("link.profile", "unknown measured profile '" + std::string(name) + "'");
}

double sampleLatency(const LinkProfile& profile, Rng& rng) {
  profile.validate();
  if (profile.jitterFraction == 0.0) return profile.baseLatency;
  const double u = rng.uniform(-profile.jitterFraction, profile.jitterFraction);
  return profile.baseLatency * (1.0 + u);
}

void GatewaySchedule::validate() const {
  if (endNodes.empty()) throw ValidationError("link.endNodes", "at least one end node required");
  if (!(slotDuration > 0.0)) throw ValidationError("link.slotDuration", "must be positive");
  auto sorted = endNodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("link.endNodes", "node ids must be distinct");
}

std::size_t GatewaySchedule::slotIndexOf(NodeId node) const {
  auto it = std::find(endNodes.begin(), endNodes.end(), node);
  if (it == endNodes.end()) throw ValidationError("link.node", "node " + std::to_string(node) + " is not scheduled");
  return static_cast<std::size_t>(it - endNodes.begin());
}

std::int64_t GatewaySchedule::nextSlot(NodeId node, double now) const {
  const auto n = static_cast<std::int64_t>(endNodes.size());
  const auto idx = static_cast<std::int64_t>(slotIndexOf(node));
  // Smallest slot = cycle * n + idx with slotStart >= now (small slack for
  // times that are meant to coincide with a slot boundary).
  const double firstSlot = now / slotDuration - 1e-9;
  auto cycle = static_cast<std::int64_t>(std::ceil((firstSlot - static_cast<double>(idx)) / static_cast<double>(n)));
  cycle = std::max<std::int64_t>(cycle, 0);
  return cycle * n + idx;
}

Gateway::Gateway(GatewaySchedule schedule, std::size_t queueCapacity)
    : schedule_(std::move(schedule)), capacity_(queueCapacity) {
  schedule_.validate();
  if (capacity_ == 0) throw ValidationError("link.queueCapacity", "must be positive");
}

std::optional<double> Gateway::deliver(NodeId node, const ReadingMessage& msg, const LinkProfile& profile, double now,
                                       Rng& rng) {
  NodeState& st = nodes_[node];
  while (!st.pendingSlotStarts.empty() && st.pendingSlotStarts.front() <= now) st.pendingSlotStarts.pop_front();

  LinkTraceRecord rec;
  rec.node = node;
  rec.sequence = msg.sequence;
  rec.enqueueT = now;
  if (st.pendingSlotStarts.size() >= capacity_) {
    rec.dropped = true;
    rec.slotStartT = now;
    rec.arrivalT = now;
    trace_.push_back(rec);
    return std::nullopt;
  }

  std::int64_t slot = schedule_.nextSlot(node, now);
  if (st.lastSlot && slot <= *st.lastSlot) slot = *st.lastSlot + static_cast<std::int64_t>(schedule_.endNodes.size());
  st.lastSlot = slot;
  const double start = schedule_.slotStart(slot);
  st.pendingSlotStarts.push_back(start);

  // Reception may overtake an earlier frame under jitter; the gateway holds
  // it back so frames of one node are handed on in order.
  const double arrival = std::max(start + sampleLatency(profile, rng), st.lastArrival);
  st.lastArrival = arrival;

  rec.slotStartT = start;
  rec.arrivalT = arrival;
  trace_.push_back(rec);
  return arrival;
}

LinkStats Gateway::stats() const {
  LinkStats s;
  double sum = 0.0;
  for (const auto& r : trace_) {
    ++s.sent;
    if (r.dropped) {
      ++s.dropped;
      continue;
    }
    ++s.delivered;
    const double lat = r.arrivalT - r.enqueueT;
    sum += lat;
    s.maxLatency = std::max(s.maxLatency, lat);
  }
  if (s.delivered) s.meanLatency = sum / static_cast<double>(s.delivered);
  return s;
}

std::string linkTraceCsv(const std::vector<LinkTraceRecord>& trace, const std::string& scope) {
  std::string out = csvRow({"scope", "nodeId", "sequence", "enqueueT", "slotStartT", "arrivalT", "bytes", "dropped"});
  for (const auto& r : trace) {
    out += csvRow({scope, std::to_string(r.node), std::to_string(r.sequence), fixed(r.enqueueT), fixed(r.slotStartT), fixed(r.arrivalT),
                   std::to_string(r.bytes), r.dropped ? "1" : "0"});
  }
  return out;
}

}  // namespace fencesim
