#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uavmp/errors.hpp"

namespace uavmp::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

/// Latitude/longitude in degrees, altitude in meters above mean sea level.
/// Purely planar uses leave `alt` at zero.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0;

    bool operator==(const GeoPoint&) const = default;
    bool same_latlon(const GeoPoint& o) const { return lat == o.lat && lon == o.lon; }
};

bool is_valid(const GeoPoint& p);

/// Great-circle (haversine) distance on a sphere of mean Earth radius.
double distance_m(const GeoPoint& a, const GeoPoint& b);

/// Straight-line distance combining the great-circle ground distance and the altitude gap.
double distance_3d_m(const GeoPoint& a, const GeoPoint& b);

/// Linear interpolation in lat/lon/alt. Legs in this system are short enough to be
/// treated as straight in the lat/lon plane.
GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double f);

struct Bounds {
    double lat0 = 0.0, lon0 = 0.0, lat1 = 0.0, lon1 = 0.0;

    bool contains(const GeoPoint& p, double slack_deg = 0.0) const {
        return p.lat >= lat0 - slack_deg && p.lat <= lat1 + slack_deg && p.lon >= lon0 - slack_deg &&
               p.lon <= lon1 + slack_deg;
    }
    bool operator==(const Bounds&) const = default;
};

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// Equirectangular tangent frame. Linear in lat/lon, so straight lat/lon segments stay
/// straight in the frame; x east and y north in meters.
class LocalFrame {
public:
    LocalFrame() = default;
    explicit LocalFrame(const GeoPoint& origin);

    Vec2 to_xy(const GeoPoint& p) const;
    GeoPoint to_geo(const Vec2& v, double alt = 0.0) const;

private:
    double lat0_ = 0.0, lon0_ = 0.0, m_per_deg_lat_ = 1.0, m_per_deg_lon_ = 1.0;
};

// ---------------------------------------------------------------------------
// Terrain

/// Node-registered terrain raster. Row 0 is the northern edge (lat1), column 0 the
/// western edge (lon0). Heights in meters.
class ElevationGrid {
public:
    static bool valid_arc_seconds(double arcsec);

    ElevationGrid(Bounds bounds, double arc_seconds, std::size_t rows, std::size_t cols,
                  std::vector<double> heights);

    const Bounds& bounds() const { return bounds_; }
    double arc_seconds() const { return arc_seconds_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const double> heights() const { return heights_; }
    double at(std::size_t row, std::size_t col) const { return heights_[row * cols_ + col]; }

    GeoPoint node(std::size_t row, std::size_t col) const;
    bool contains(const GeoPoint& p) const;

    /// Bilinear interpolation of the four nodes around `p`. Throws BoundsError outside.
    double elevation_at(const GeoPoint& p) const;

    /// Reads the EGRID text format. Throws ValidationError on malformed input.
    static ElevationGrid read(std::istream& in);
    static ElevationGrid load(const std::string& path);
    void write(std::ostream& out) const;
    void save(const std::string& path) const;

    /// Node counts implied by a bounding box at a given resolution.
    static std::pair<std::size_t, std::size_t> shape_for(const Bounds& b, double arcsec);

private:
    Bounds bounds_;
    double arc_seconds_;
    std::size_t rows_, cols_;
    std::vector<double> heights_;
    double dlat_, dlon_;
};

// Synthetic terrains for fixtures and tests.
ElevationGrid flat_grid(const Bounds& b, double arcsec, double height_m);
/// Height rises linearly from `west_m` on the western edge to `east_m` on the eastern edge.
ElevationGrid ramp_grid(const Bounds& b, double arcsec, double west_m, double east_m);
/// Flat `base_m` everywhere except one column of nodes at `ridge_lon` raised to `ridge_m`.
ElevationGrid ridge_grid(const Bounds& b, double arcsec, double base_m, double ridge_m, double ridge_lon);

/// True iff terrain stays strictly below the 3-D segment a-b at every interior sample
/// taken every `step_m` meters. Symmetric in (a, b).
bool line_of_sight(const ElevationGrid& g, const GeoPoint& a, const GeoPoint& b, double step_m);

// ---------------------------------------------------------------------------
// Polygons

struct PolygonZone {
    std::vector<GeoPoint> vertices; // implicitly closed

    bool operator==(const PolygonZone&) const = default;
};

/// Returns an empty string when the zone is valid, otherwise a reason.
std::string polygon_problem(const PolygonZone& z);

/// Even-odd containment in the lat/lon plane; points on the boundary count as inside.
bool point_in_polygon(const PolygonZone& z, const GeoPoint& p);

/// Area centroid in the lat/lon plane.
GeoPoint centroid(const PolygonZone& z);

/// Outward offset of the polygon by `margin_m`. Mitred corners, bevelled when the mitre
/// would exceed twice the margin.
PolygonZone inflate(const PolygonZone& z, double margin_m);

/// True when the closed segment a-b touches the closed polygon.
bool segment_intersects_polygon(const GeoPoint& a, const GeoPoint& b, const PolygonZone& z);

// ---------------------------------------------------------------------------
// Routes

struct LegMeta {
    int profile = -1;     // flight profile kind, -1 when unassigned
    double speed_mps = 0.0;
};

struct Route {
    std::vector<GeoPoint> waypoints;
    std::vector<LegMeta> meta; // one entry per leg (waypoints.size() - 1) when filled in

    double length_m() const;
};

inline constexpr double kDefaultNfzMarginM = 100.0;

/// Visibility-graph router around inflated no-fly zones. Routes are memoized; the
/// memo is guarded so one router can serve concurrent callers.
class RoutePlanner {
public:
    RoutePlanner(std::vector<PolygonZone> nfzs, double margin_m = kDefaultNfzMarginM);

    RoutePlanner(const RoutePlanner&) = delete;
    RoutePlanner& operator=(const RoutePlanner&) = delete;

    /// Shortest obstacle-free polyline from start to goal. Throws NoPathError when the
    /// start or goal lies inside an inflated zone or is enclosed.
    Route route(const GeoPoint& start, const GeoPoint& goal) const;

    /// True if the point is inside any inflated zone.
    bool blocked(const GeoPoint& p) const;

    const std::vector<PolygonZone>& obstacles() const { return obstacles_; }
    double margin_m() const { return margin_m_; }

private:
    Route compute(const GeoPoint& start, const GeoPoint& goal) const;
    bool clear(const Vec2& a, const Vec2& b) const;

    double margin_m_;
    LocalFrame frame_;
    std::vector<PolygonZone> obstacles_;              // inflated by the margin
    std::vector<std::vector<Vec2>> obstacles_xy_;
    std::vector<Vec2> nodes_;                         // candidate corners, slightly further out
    using Key = std::pair<std::pair<double, double>, std::pair<double, double>>;
    mutable std::shared_mutex mu_;
    mutable std::map<Key, std::vector<GeoPoint>> memo_;
};

/// One-shot convenience wrapper around RoutePlanner.
Route route_around_nfzs(const GeoPoint& start, const GeoPoint& goal, const std::vector<PolygonZone>& nfzs,
                        double margin_m = kDefaultNfzMarginM);

struct ClearanceSample {
    double distance_along_m;
    double terrain_m;
    double vehicle_alt_m;

    double clearance_m() const { return vehicle_alt_m - terrain_m; }
};

/// Terrain and vehicle altitude sampled every `step_m` along the route (plus every
/// waypoint). Vehicle altitude is interpolated linearly between waypoints.
std::vector<ClearanceSample> ground_clearance_profile(const ElevationGrid& g, const Route& r, double step_m);

} // namespace uavmp::geo
