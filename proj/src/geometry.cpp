#include "fencesim/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <tuple>

#include "fencesim/error.hpp"

namespace fencesim {

char sideLabel(Side side) { return static_cast<char>('A' + static_cast<int>(side)); }

std::optional<Side> sideFromLabel(char label) {
  if (label < 'A' || label > 'D') return std::nullopt;
  return static_cast<Side>(label - 'A');
}

char layoutLabel(LayoutKind kind) { return static_cast<char>('A' + static_cast<int>(kind)); }

std::optional<LayoutKind> layoutFromLabel(char label) {
  if (label < 'A' || label > 'C') return std::nullopt;
  return static_cast<LayoutKind>(label - 'A');
}

void FieldSpec::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("field.width", "must be positive");
  if (!(height > 0.0) || !std::isfinite(height)) throw ValidationError("field.height", "must be positive");
}

double FieldSpec::sideLength(Side side) const {
  return (side == Side::A || side == Side::C) ? width : height;
}

Point FieldSpec::sideStart(Side side) const {
  switch (side) {
    case Side::A: return {0.0, 0.0};
    case Side::B: return {width, 0.0};
    case Side::C: return {width, -height};
    case Side::D: return {0.0, -height};
  }
  return {};
}

Point FieldSpec::sideDirection(Side side) const {
  switch (side) {
    case Side::A: return {1.0, 0.0};
    case Side::B: return {0.0, -1.0};
    case Side::C: return {-1.0, 0.0};
    case Side::D: return {0.0, 1.0};
  }
  return {};
}

Point FieldSpec::outwardNormal(Side side) const {
  switch (side) {
    case Side::A: return {0.0, 1.0};
    case Side::B: return {1.0, 0.0};
    case Side::C: return {0.0, -1.0};
    case Side::D: return {-1.0, 0.0};
  }
  return {};
}

bool FieldSpec::inBand(Point p, double depth) const {
  if (p.x > 0.0 && p.x < width && p.y < 0.0 && p.y > -height) return false;
  return p.x >= -depth && p.x <= width + depth && p.y <= depth && p.y >= -height - depth;
}

void PirSpec::validate() const {
  if (!(maxDistance > 0.0)) throw ValidationError("pir.maxDistance", "must be positive");
  if (!(baseDiameter > 0.0)) throw ValidationError("pir.baseDiameter", "must be positive");
}

std::array<Point, 3> Triangle::vertices() const {
  const Point perp{-direction.y, direction.x};
  const Point mid = apex + height * direction;
  return {apex, mid + (base / 2.0) * perp, mid - (base / 2.0) * perp};
}

bool CoverageShape::contains(Point p) const {
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    const Point v = p - d->center;
    return dot(v, v) <= d->radius * d->radius;
  }
  const auto& t = std::get<Triangle>(shape_);
  const Point v = p - t.apex;
  const double along = dot(v, t.direction);
  if (along < 0.0 || along > t.height) return false;
  const double across = std::abs(cross(t.direction, v));
  return across * t.height <= (t.base / 2.0) * along;
}

Point CoverageShape::centroid() const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return d->center;
  const auto v = std::get<Triangle>(shape_).vertices();
  return (1.0 / 3.0) * (v[0] + v[1] + v[2]);
}

Box CoverageShape::bounds() const {
  if (const auto* d = std::get_if<Disk>(&shape_)) {
    return {{d->center.x - d->radius, d->center.y - d->radius},
            {d->center.x + d->radius, d->center.y + d->radius}};
  }
  const auto v = std::get<Triangle>(shape_).vertices();
  Box b{v[0], v[0]};
  for (const Point& p : v) {
    b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y)};
    b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y)};
  }
  return b;
}

double CoverageShape::alongSideWidth() const {
  if (const auto* d = std::get_if<Disk>(&shape_)) return 2.0 * d->radius;
  return std::get<Triangle>(shape_).base;
}

std::string sensorName(const Sensor& sensor) {
  return std::string(1, sideLabel(sensor.pose.side)) + std::to_string(sensor.pose.indexOnSide);
}

std::string signatureName(const Signature& sig, const SensorLayout& layout) {
  std::string out;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) out.push_back(';');
    out += sensorName(layout.sensor(sig[i]));
  }
  return out;
}

LayoutParams defaultLayoutParams(LayoutKind kind) {
  LayoutParams p;
  p.spacing = kind == LayoutKind::B ? 2.5 : 5.0;
  return p;
}

const Sensor* SensorLayout::find(Side side, int indexOnSide) const {
  for (const auto& s : sensors) {
    if (s.pose.side == side && s.pose.indexOnSide == indexOnSide) return &s;
  }
  return nullptr;
}

int SensorLayout::countOnSide(Side side) const {
  return static_cast<int>(std::count_if(sensors.begin(), sensors.end(),
                                        [side](const Sensor& s) { return s.pose.side == side; }));
}

namespace {

struct RowPlan {
  Orientation orientation;
  double alongOffset;  // fraction of spacing
  double depth;        // outward offset of the strip from the boundary
  double mountHeight;
};

std::vector<RowPlan> rowsFor(LayoutKind kind, const PirSpec& pir, const LayoutParams& params) {
  const double radius = pir.baseDiameter / 2.0;
  switch (kind) {
    case LayoutKind::A:
      // Second row interlocks: shifted half a spacing along the side and one
      // radius outward, so its disks close the cusps between first-row disks.
      return {{Orientation::VerticalDown, 0.0, 0.0, params.verticalHeight},
              {Orientation::VerticalDown, 0.5, radius, params.verticalHeight}};
    case LayoutKind::B:
      return {{Orientation::HorizontalOutward, 0.0, 0.0, params.horizontalHeight}};
    case LayoutKind::C:
      return {{Orientation::VerticalDown, 0.0, 0.0, params.verticalHeight},
              {Orientation::HorizontalOutward, 0.0, 0.0, params.horizontalHeight}};
  }
  return {};
}

CoverageShape shapeFor(Orientation o, Point anchor, Point outward, const PirSpec& pir) {
  if (o == Orientation::VerticalDown) return Disk{anchor, pir.baseDiameter / 2.0};
  return Triangle{anchor, outward, pir.baseDiameter, pir.maxDistance};
}

}  // namespace

SensorLayout buildLayout(const FieldSpec& field, const PirSpec& pir, LayoutKind kind,
                         const LayoutParams& params) {
  field.validate();
  pir.validate();
  if (!(params.spacing > 0.0) || !std::isfinite(params.spacing))
    throw ValidationError("layout.spacing", "must be positive");
  if (params.verticalHeight < 0.0) throw ValidationError("layout.verticalHeight", "must be >= 0");
  if (params.horizontalHeight < 0.0) throw ValidationError("layout.horizontalHeight", "must be >= 0");
  if (params.maxGap < 0.0) throw ValidationError("layout.maxGap", "must be >= 0");

  const auto rows = rowsFor(kind, pir, params);
  // Disks (diameter h) and triangles (base h) are both h wide along the side.
  if (const double gap = params.spacing - pir.baseDiameter; gap > params.maxGap)
    throw ValidationError("layout.spacing", "leaves " + std::to_string(gap) +
                                                " m uncovered between adjacent sensors (maxGap " +
                                                std::to_string(params.maxGap) + ")");

  SensorLayout layout;
  layout.kind = kind;
  layout.field = field;
  layout.pir = pir;
  layout.spacing = params.spacing;
  layout.rows = static_cast<int>(rows.size());

  std::uint16_t nextId = 0;
  for (Side side : kAllSides) {
    const double length = field.sideLength(side);
    const int perRow = static_cast<int>(std::floor(length / params.spacing + 1e-9));
    if (perRow < 1)
      throw ValidationError("layout.spacing", std::string("no sensor fits on side ") + sideLabel(side));
    const Point start = field.sideStart(side);
    const Point along = field.sideDirection(side);
    const Point outward = field.outwardNormal(side);
    int index = 0;
    for (const auto& row : rows) {
      for (int k = 0; k < perRow; ++k) {
        const double s = (row.alongOffset + k) * params.spacing;
        if (s >= length) break;
        Sensor sensor;
        sensor.id = SensorId{nextId++};
        sensor.pose.side = side;
        sensor.pose.indexOnSide = index++;
        sensor.pose.position = start + s * along + row.depth * outward;
        sensor.pose.mountHeight = row.mountHeight;
        sensor.pose.orientation = row.orientation;
        sensor.coverage = shapeFor(row.orientation, sensor.pose.position, outward, pir);
        layout.sensors.push_back(sensor);
      }
    }
  }

  double depth = 0.0;
  for (const auto& row : rows) {
    const double reach = row.orientation == Orientation::VerticalDown ? row.depth + pir.baseDiameter / 2.0
                                                                     : row.depth + pir.maxDistance;
    depth = std::max(depth, reach);
  }
  layout.bandDepth = depth;
  return layout;
}

SensorLayout mirroredLayout(const SensorLayout& layout) {
  SensorLayout out = layout;
  const double w = layout.field.width;
  auto reflect = [w](Point p) { return Point{w - p.x, p.y}; };
  auto reflectDir = [](Point d) { return Point{-d.x, d.y}; };
  for (auto& s : out.sensors) {
    if (s.pose.side == Side::B) {
      s.pose.side = Side::D;
    } else if (s.pose.side == Side::D) {
      s.pose.side = Side::B;
    }
    s.pose.position = reflect(s.pose.position);
    if (s.coverage.isDisk()) {
      Disk d = s.coverage.disk();
      d.center = reflect(d.center);
      s.coverage = d;
    } else {
      Triangle t = s.coverage.triangle();
      t.apex = reflect(t.apex);
      t.direction = reflectDir(t.direction);
      s.coverage = t;
    }
  }
  return out;
}

Signature coveringSensors(const SensorLayout& layout, Point p) {
  Signature sig;
  for (const auto& s : layout.sensors) {
    if (s.coverage.contains(p)) sig.push_back(s.id);
  }
  return sig;
}

Grid::Grid(const FieldSpec& field, double depth, double resolution) : resolution_(resolution) {
  origin_ = {-depth, -field.height - depth};
  nx_ = static_cast<int>(std::ceil((field.width + 2.0 * depth) / resolution - 1e-9));
  ny_ = static_cast<int>(std::ceil((field.height + 2.0 * depth) / resolution - 1e-9));
}

std::optional<GridCell> Grid::cellOf(Point p) const {
  const double fx = std::floor((p.x - origin_.x) / resolution_);
  const double fy = std::floor((p.y - origin_.y) / resolution_);
  if (fx < 0 || fy < 0 || fx >= nx_ || fy >= ny_) return std::nullopt;
  return GridCell{static_cast<int>(fx), static_cast<int>(fy)};
}

Point PositionMap::lookup(const Signature& sig) const {
  if (sig.empty()) throw ValidationError("signature", "empty signature has no position");
  if (auto it = bySignature_.find(sig); it != bySignature_.end()) return regions_[it->second].representative;
  if (sig.size() == 1) return fallback_.at(sig.front());
  Point sum;
  for (SensorId id : sig) sum = sum + lookup(Signature{id});
  return (1.0 / static_cast<double>(sig.size())) * sum;
}

const CoverageRegion* PositionMap::regionFor(const Signature& sig) const {
  auto it = bySignature_.find(sig);
  return it == bySignature_.end() ? nullptr : &regions_[it->second];
}

int PositionMap::regionAt(Point p) const {
  const auto cell = grid_.cellOf(p);
  return cell ? cellRegion_[grid_.index(*cell)] : -1;
}

Signature PositionMap::rasterSignature(Point p) const {
  const int r = regionAt(p);
  return r < 0 ? Signature{} : regions_[static_cast<std::size_t>(r)].signature;
}

PositionMap buildPositionMap(const SensorLayout& layout, double gridResolution) {
  if (!(gridResolution > 0.0) || gridResolution > layout.pir.baseDiameter / 4.0 + 1e-12)
    throw ValidationError("gridResolution", "must be in (0, h/4]");

  PositionMap map;
  map.grid_ = Grid(layout.field, layout.bandDepth, gridResolution);
  const Grid& grid = map.grid_;
  const std::size_t cellCount = static_cast<std::size_t>(grid.nx()) * grid.ny();

  // Intern each distinct signature once; cells carry the interned index.
  std::map<Signature, int> interned;
  std::vector<const Signature*> sigOf;
  std::vector<int> cellSig(cellCount, -1);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const GridCell c{ix, iy};
      const Point p = grid.center(c);
      if (!layout.field.inBand(p, layout.bandDepth)) continue;
      Signature sig = coveringSensors(layout, p);
      if (sig.empty()) continue;
      auto [it, inserted] = interned.try_emplace(std::move(sig), static_cast<int>(sigOf.size()));
      if (inserted) sigOf.push_back(&it->first);
      cellSig[grid.index(c)] = it->second;
    }
  }

  map.cellRegion_.assign(cellCount, -1);
  std::deque<GridCell> queue;
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const GridCell seed{ix, iy};
      const int sid = cellSig[grid.index(seed)];
      if (sid < 0 || map.cellRegion_[grid.index(seed)] >= 0) continue;

      CoverageRegion region;
      region.id = static_cast<int>(map.regions_.size());
      region.signature = *sigOf[static_cast<std::size_t>(sid)];
      map.cellRegion_[grid.index(seed)] = region.id;
      queue.push_back(seed);
      while (!queue.empty()) {
        const GridCell c = queue.front();
        queue.pop_front();
        region.cells.push_back(c);
        const GridCell nbrs[4] = {{c.ix + 1, c.iy}, {c.ix - 1, c.iy}, {c.ix, c.iy + 1}, {c.ix, c.iy - 1}};
        for (const GridCell& n : nbrs) {
          if (n.ix < 0 || n.iy < 0 || n.ix >= grid.nx() || n.iy >= grid.ny()) continue;
          const std::size_t ni = grid.index(n);
          if (cellSig[ni] != sid || map.cellRegion_[ni] >= 0) continue;
          map.cellRegion_[ni] = region.id;
          queue.push_back(n);
        }
      }
      std::sort(region.cells.begin(), region.cells.end(),
                [](GridCell a, GridCell b) { return std::tie(a.iy, a.ix) < std::tie(b.iy, b.ix); });

      // Centroid from integer index sums, so symmetric regions land exactly
      // on their axis of symmetry.
      std::int64_t sx = 0, sy = 0;
      for (const GridCell& c : region.cells) {
        sx += c.ix;
        sy += c.iy;
      }
      const double n = static_cast<double>(region.cells.size());
      Point centroid{grid.origin().x + (static_cast<double>(sx) / n + 0.5) * gridResolution,
                     grid.origin().y + (static_cast<double>(sy) / n + 0.5) * gridResolution};
      const auto home = grid.cellOf(centroid);
      if (!home || map.cellRegion_[grid.index(*home)] != region.id) {
        // Non-convex region: snap to the nearest member cell.
        double best = std::numeric_limits<double>::infinity();
        Point snapped = centroid;
        for (const GridCell& c : region.cells) {
          const Point q = grid.center(c);
          const Point d = q - centroid;
          if (const double d2 = dot(d, d); d2 < best) {
            best = d2;
            snapped = q;
          }
        }
        centroid = snapped;
      }
      region.representative = centroid;
      map.regions_.push_back(std::move(region));
    }
  }

  for (std::size_t i = 0; i < map.regions_.size(); ++i) {
    auto [it, inserted] = map.bySignature_.try_emplace(map.regions_[i].signature, i);
    if (!inserted && map.regions_[i].cells.size() > map.regions_[it->second].cells.size()) it->second = i;
  }
  for (const auto& s : layout.sensors) map.fallback_[s.id] = s.coverage.centroid();
  return map;
}

double blindAreaFraction(const SensorLayout& layout, double band, double resolution) {
  if (!(band > 0.0)) throw ValidationError("band", "must be positive");
  if (!(resolution > 0.0)) throw ValidationError("resolution", "must be positive");
  const Grid grid(layout.field, band, resolution);
  std::size_t inBand = 0, blind = 0;
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const Point p = grid.center({ix, iy});
      if (!layout.field.inBand(p, band)) continue;
      ++inBand;
      const bool covered = std::any_of(layout.sensors.begin(), layout.sensors.end(),
                                       [p](const Sensor& s) { return s.coverage.contains(p); });
      if (!covered) ++blind;
    }
  }
  return inBand == 0 ? 0.0 : static_cast<double>(blind) / static_cast<double>(inBand);
}

}  // namespace fencesim
