#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fencesim/geometry.hpp"
#include "fencesim/rng.hpp"

namespace fencesim {

/// One "#side-#sensor-timestamp" reading. `sensorBits` has bit i set when the
/// sensor with indexOnSide i fired; overlap readings set several bits.
struct ReadingMessage {
  Side side = Side::A;
  std::uint32_t sensorBits = 0;
  std::uint64_t timestampUs = 0;
  std::uint16_t sequence = 0;

  double timestamp() const { return static_cast<double>(timestampUs) * 1e-6; }
  friend bool operator==(const ReadingMessage&, const ReadingMessage&) = default;
};

inline constexpr std::size_t kFrameSize = 16;
using Frame = std::array<std::uint8_t, kFrameSize>;

/// Builds a message; throws ValidationError for a negative or non-finite
/// timestamp or an empty bitmap.
ReadingMessage makeReading(Side side, std::uint32_t sensorBits, double timestampSeconds, std::uint16_t sequence = 0);

/// Bitmap of the sensors on `side` within `sig`. Throws ValidationError if a
/// sensor index does not fit the 32-bit field.
std::uint32_t sensorBitsFor(const SensorLayout& layout, const Signature& sig, Side side);
/// Inverse of sensorBitsFor; throws ValidationError for bits with no sensor.
Signature signatureFor(const SensorLayout& layout, Side side, std::uint32_t sensorBits);

// Wire layout, little-endian:
//   [0]      side label 'A'..'D'
//   [1..4]   sensor bitmap (u32)
//   [5..12]  sensing timestamp in microseconds (u64)
//   [13..14] sequence number (u16)
//   [15]     sum of bytes 0..14 modulo 256
Frame encodeFrame(const ReadingMessage& msg);
/// Throws DecodeError on wrong length, bad checksum or unknown side code.
ReadingMessage decodeFrame(std::span<const std::uint8_t> bytes);

struct LinkProfile {
  std::string name;
  double senderHeightFt = 0.0;
  double receiverHeightFt = 0.0;
  double distanceM = 0.0;
  double baseLatency = 1.0;
  double jitterFraction = 0.1;

  void validate() const;
};

/// The four measured sender/receiver configurations, named "row1".."row4".
std::span<const LinkProfile> measuredProfiles();
/// Throws ValidationError for an unknown name.
LinkProfile measuredProfile(std::string_view name);

/// baseLatency * (1 + u), u uniform in [-jitter, +jitter].
double sampleLatency(const LinkProfile& profile, Rng& rng);

using NodeId = std::uint32_t;

/// Round-robin slot plan: slot k starts at k * slotDuration and belongs to
/// endNodes[k mod N].
struct GatewaySchedule {
  std::vector<NodeId> endNodes;
  double slotDuration = 1.0;

  void validate() const;
  double cycleDuration() const { return slotDuration * static_cast<double>(endNodes.size()); }
  /// Position of `node` in the cycle; throws ValidationError if absent.
  std::size_t slotIndexOf(NodeId node) const;
  /// Global index of the first slot owned by `node` starting at or after `now`.
  std::int64_t nextSlot(NodeId node, double now) const;
  double slotStart(std::int64_t slot) const { return static_cast<double>(slot) * slotDuration; }
  NodeId ownerOf(std::int64_t slot) const {
    return endNodes[static_cast<std::size_t>(slot % static_cast<std::int64_t>(endNodes.size()))];
  }
};

struct LinkTraceRecord {
  NodeId node = 0;
  std::uint16_t sequence = 0;
  double enqueueT = 0.0;
  double slotStartT = 0.0;
  double arrivalT = 0.0;
  std::size_t bytes = kFrameSize;
  bool dropped = false;
};

struct LinkStats {
  std::size_t sent = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
  double meanLatency = 0.0;  // arrival - enqueue over delivered frames
  double maxLatency = 0.0;
};

/// Gateway that polls end nodes in round-robin order. Each node transmits at
/// most one queued frame per owned slot, in FIFO order; the gateway hands
/// frames of one node upward in sequence order.
class Gateway {
 public:
  Gateway(GatewaySchedule schedule, std::size_t queueCapacity = 16);

  /// Enqueues `msg` at `now`. Returns the arrival time at the fog node, or
  /// nullopt if the node's queue is full (recorded as a dropped frame).
  std::optional<double> deliver(NodeId node, const ReadingMessage& msg, const LinkProfile& profile, double now,
                                Rng& rng);

  const GatewaySchedule& schedule() const { return schedule_; }
  const std::vector<LinkTraceRecord>& trace() const { return trace_; }
  LinkStats stats() const;

 private:
  struct NodeState {
    std::deque<double> pendingSlotStarts;
    std::optional<std::int64_t> lastSlot;
    double lastArrival = 0.0;
  };

  GatewaySchedule schedule_;
  std::size_t capacity_;
  std::map<NodeId, NodeState> nodes_;
  std::vector<LinkTraceRecord> trace_;
};

std::string linkTraceCsv(const std::vector<LinkTraceRecord>& trace, const std::string& scope = {});

}  // namespace fencesim
