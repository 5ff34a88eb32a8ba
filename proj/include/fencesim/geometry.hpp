#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fencesim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Sides are walked clockwise: A along +x on y = 0, B down x = width,
// C back along y = -height, D up x = 0. The field interior is therefore
// [0, width] x [-height, 0], and positive y is the outward depth beyond side A.
enum class Side : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<Side, 4> kAllSides{Side::A, Side::B, Side::C, Side::D};

char sideLabel(Side side);
std::optional<Side> sideFromLabel(char label);

struct FieldSpec {
  double width = 25.0;
  double height = 25.0;

  void validate() const;

  double sideLength(Side side) const;
  /// Corner where the side starts when walking the perimeter clockwise.
  Point sideStart(Side side) const;
  /// Unit vector along the side in walking direction.
  Point sideDirection(Side side) const;
  /// Unit vector pointing away from the field.
  Point outwardNormal(Side side) const;

  bool inside(Point p) const { return p.x >= 0.0 && p.x <= width && p.y <= 0.0 && p.y >= -height; }
  /// Within `depth` of the rectangle but not strictly inside it.
  bool inBand(Point p, double depth) const;
};

/// PIR detection cone: maximum distance d and base diameter h.
struct PirSpec {
  double maxDistance = 7.0;
  double baseDiameter = 5.0;

  void validate() const;
  /// Apex angle of the cone, 2 atan(h / 2d).
  double coneAngle() const { return 2.0 * std::atan(baseDiameter / (2.0 * maxDistance)); }
};

enum class Orientation : std::uint8_t { VerticalDown, HorizontalOutward };

struct SensorId {
  std::uint16_t value = 0;
  friend auto operator<=>(SensorId, SensorId) = default;
};

struct SensorPose {
  Side side = Side::A;
  int indexOnSide = 0;
  Point position;
  double mountHeight = 0.0;
  Orientation orientation = Orientation::VerticalDown;
};

struct Disk {
  Point center;
  double radius = 0.0;
};

/// Isosceles triangle with its apex at the sensor, opening along `direction`
/// (unit vector) to a base of width `base` at distance `height`.
struct Triangle {
  Point apex;
  Point direction;
  double base = 0.0;
  double height = 0.0;

  std::array<Point, 3> vertices() const;
};

struct Box {
  Point min;
  Point max;
};

class CoverageShape {
 public:
  CoverageShape() = default;
  CoverageShape(Disk disk) : shape_(disk) {}
  CoverageShape(Triangle tri) : shape_(tri) {}

  bool contains(Point p) const;
  Point centroid() const;
  Box bounds() const;
  /// Width of the footprint measured along the side it is mounted on.
  double alongSideWidth() const;

  bool isDisk() const { return std::holds_alternative<Disk>(shape_); }
  const Disk& disk() const { return std::get<Disk>(shape_); }
  const Triangle& triangle() const { return std::get<Triangle>(shape_); }

 private:
  std::variant<Disk, Triangle> shape_;
};

struct Sensor {
  SensorId id;
  SensorPose pose;
  CoverageShape coverage;
};

std::string sensorName(const Sensor& sensor);

enum class LayoutKind : std::uint8_t { A, B, C };

char layoutLabel(LayoutKind kind);
std::optional<LayoutKind> layoutFromLabel(char label);

struct LayoutParams {
  double spacing = 5.0;
  double verticalHeight = 5.0;    // strip height for downward sensors
  double horizontalHeight = 1.5;  // strip height for outward sensors
  double maxGap = 5.0;            // largest tolerated uncovered run along a side
};

/// Defaults used in the 25 m field deployment for each layout.
LayoutParams defaultLayoutParams(LayoutKind kind);

using Signature = std::vector<SensorId>;  // sorted, unique

struct SensorLayout {
  LayoutKind kind = LayoutKind::A;
  FieldSpec field;
  PirSpec pir;
  double spacing = 0.0;
  int rows = 1;
  /// Outward depth reached by the furthest coverage shape; the monitored band.
  double bandDepth = 0.0;
  std::vector<Sensor> sensors;

  const Sensor& sensor(SensorId id) const { return sensors.at(id.value); }
  /// Sensor with the given side and index, if any.
  const Sensor* find(Side side, int indexOnSide) const;
  int countOnSide(Side side) const;
};

std::string signatureName(const Signature& sig, const SensorLayout& layout);

SensorLayout buildLayout(const FieldSpec& field, const PirSpec& pir, LayoutKind kind,
                         const LayoutParams& params);

/// Same layout reflected across the vertical line x = width / 2. Sides B and D
/// swap; sensor ids are kept so regions can be matched up.
SensorLayout mirroredLayout(const SensorLayout& layout);

/// Exact point-in-shape test against every sensor.
Signature coveringSensors(const SensorLayout& layout, Point p);

struct GridCell {
  int ix = 0;
  int iy = 0;
  friend auto operator<=>(GridCell, GridCell) = default;
};

/// Uniform raster over the rectangle expanded by `depth` on all sides.
class Grid {
 public:
  Grid() = default;
  Grid(const FieldSpec& field, double depth, double resolution);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double resolution() const { return resolution_; }
  Point origin() const { return origin_; }

  Point center(GridCell c) const {
    return {origin_.x + (c.ix + 0.5) * resolution_, origin_.y + (c.iy + 0.5) * resolution_};
  }
  std::optional<GridCell> cellOf(Point p) const;
  std::size_t index(GridCell c) const { return static_cast<std::size_t>(c.iy) * nx_ + c.ix; }

 private:
  Point origin_;
  double resolution_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
};

struct CoverageRegion {
  int id = 0;
  Signature signature;
  std::vector<GridCell> cells;
  Point representative;
};

/// Maps sensor signatures to the representative coordinate reported when
/// exactly that set of sensors fires.
class PositionMap {
 public:
  const std::vector<CoverageRegion>& regions() const { return regions_; }
  const Grid& grid() const { return grid_; }
  double resolution() const { return grid_.resolution(); }

  bool contains(const Signature& sig) const { return bySignature_.count(sig) != 0; }
  /// Representative for a signature. Unrealised signatures fall back to the
  /// single-sensor shape centroid, or the mean of those for larger sets.
  Point lookup(const Signature& sig) const;
  Point fallback(SensorId id) const { return fallback_.at(id); }
  /// Canonical region for a realised signature (its largest component).
  const CoverageRegion* regionFor(const Signature& sig) const;

  /// Signature of the raster cell containing `p`; empty outside the band.
  Signature rasterSignature(Point p) const;
  /// Region id of the raster cell containing `p`, or -1.
  int regionAt(Point p) const;

 private:
  friend PositionMap buildPositionMap(const SensorLayout&, double);

  Grid grid_;
  std::vector<CoverageRegion> regions_;
  std::vector<int> cellRegion_;  // per grid cell, -1 if uncovered or off-band
  std::map<Signature, std::size_t> bySignature_;
  std::map<SensorId, Point> fallback_;
};

/// Rasterises the monitored band (depth `layout.bandDepth`) at the given
/// resolution and groups covered cells into 4-connected regions of equal
/// signature.
PositionMap buildPositionMap(const SensorLayout& layout, double gridResolution);

/// Fraction of the band of the given outward depth that no sensor covers.
double blindAreaFraction(const SensorLayout& layout, double band, double resolution = 0.25);

}  // namespace fencesim
