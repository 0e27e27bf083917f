#include "uavmp/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "uavmp/units.hpp"

namespace uavmp::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(const Vec2& o, const Vec2& a, const Vec2& b, double eps) {
    const double c = cross(o, a, b);
    if (c > eps) return 1;
    if (c < -eps) return -1;
    return 0;
}

bool within_box(const Vec2& p, const Vec2& a, const Vec2& b, double eps) {
    return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
           p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

// Tolerance for orientation tests, scaled to the magnitude of the coordinates involved.
double area_eps(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double m = std::max({std::abs(a.x - c.x), std::abs(a.y - c.y), std::abs(b.x - c.x), std::abs(b.y - c.y),
                               std::abs(d.x - c.x), std::abs(d.y - c.y), 1e-300});
    return m * m * 1e-13;
}

// Closed segments: touching endpoints and collinear overlap count as intersecting.
bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double eps = area_eps(p1, p2, q1, q2);
    const int o1 = orientation(p1, p2, q1, eps);
    const int o2 = orientation(p1, p2, q2, eps);
    const int o3 = orientation(q1, q2, p1, eps);
    const int o4 = orientation(q1, q2, p2, eps);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    const double box_eps = 1e-12 * (1.0 + std::max({std::abs(p1.x), std::abs(p1.y), std::abs(q1.x), std::abs(q1.y)}));
    if (o1 == 0 && within_box(q1, p1, p2, box_eps)) return true;
    if (o2 == 0 && within_box(q2, p1, p2, box_eps)) return true;
    if (o3 == 0 && within_box(p1, q1, q2, box_eps)) return true;
    if (o4 == 0 && within_box(p2, q1, q2, box_eps)) return true;
    return false;
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double eps = area_eps(a, b, p, p);
    return orientation(a, b, p, eps) == 0 &&
           within_box(p, a, b, 1e-12 * (1.0 + std::max(std::abs(p.x), std::abs(p.y))));
}

bool inside_closed(std::span<const Vec2> poly, const Vec2& p) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, poly[i], poly[(i + 1) % n])) return true;
    }
    bool in = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x) in = !in;
        }
    }
    return in;
}

bool segment_touches_poly(std::span<const Vec2> poly, const Vec2& a, const Vec2& b) {
    if (inside_closed(poly, a) || inside_closed(poly, b)) return true;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_touch(a, b, poly[i], poly[(i + 1) % n])) return true;
    }
    return false;
}

// Lat/lon plane as (x = lon, y = lat). Containment and intersection predicates are
// invariant under the affine map to any LocalFrame.
Vec2 ll(const GeoPoint& p) { return {p.lon, p.lat}; }

std::vector<Vec2> ll(const PolygonZone& z) {
    std::vector<Vec2> out;
    out.reserve(z.vertices.size());
    for (const auto& v : z.vertices) out.push_back(ll(v));
    return out;
}

double signed_area(std::span<const Vec2> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += (p.x - poly[0].x) * (q.y - poly[0].y) - (q.x - poly[0].x) * (p.y - poly[0].y);
    }
    return 0.5 * a;
}

Vec2 unit(Vec2 v) {
    const double l = std::hypot(v.x, v.y);
    return l > 0.0 ? Vec2{v.x / l, v.y / l} : Vec2{0.0, 0.0};
}

} // namespace

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && std::isfinite(p.alt) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

double distance_m(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double sdphi = std::sin((b.lat - a.lat) * kDegToRad * 0.5);
    const double sdlam = std::sin((b.lon - a.lon) * kDegToRad * 0.5);
    const double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlam * sdlam;
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(std::max(0.0, 1.0 - h)));
}

double distance_3d_m(const GeoPoint& a, const GeoPoint& b) {
    return std::hypot(distance_m(a, b), b.alt - a.alt);
}

GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double f) {
    return {a.lat + (b.lat - a.lat) * f, a.lon + (b.lon - a.lon) * f, a.alt + (b.alt - a.alt) * f};
}

LocalFrame::LocalFrame(const GeoPoint& origin)
    : lat0_(origin.lat),
      lon0_(origin.lon),
      m_per_deg_lat_(kEarthRadiusM * kDegToRad),
      m_per_deg_lon_(kEarthRadiusM * kDegToRad * std::cos(origin.lat * kDegToRad)) {}

Vec2 LocalFrame::to_xy(const GeoPoint& p) const {
    return {(p.lon - lon0_) * m_per_deg_lon_, (p.lat - lat0_) * m_per_deg_lat_};
}

GeoPoint LocalFrame::to_geo(const Vec2& v, double alt) const {
    return {lat0_ + v.y / m_per_deg_lat_, lon0_ + v.x / m_per_deg_lon_, alt};
}

// ---------------------------------------------------------------------------

bool ElevationGrid::valid_arc_seconds(double arcsec) {
    return arcsec == 30.0 || arcsec == 15.0 || arcsec == 7.5;
}

std::pair<std::size_t, std::size_t> ElevationGrid::shape_for(const Bounds& b, double arcsec) {
    const auto cells = [arcsec](double span_deg) {
        return static_cast<std::size_t>(std::llround(span_deg * 3600.0 / arcsec));
    };
    return {std::max<std::size_t>(2, cells(b.lat1 - b.lat0) + 1), std::max<std::size_t>(2, cells(b.lon1 - b.lon0) + 1)};
}

ElevationGrid::ElevationGrid(Bounds bounds, double arc_seconds, std::size_t rows, std::size_t cols,
                             std::vector<double> heights)
    : bounds_(bounds), arc_seconds_(arc_seconds), rows_(rows), cols_(cols), heights_(std::move(heights)) {
    std::vector<Issue> issues;
    if (!valid_arc_seconds(arc_seconds_)) issues.push_back({"/arcSeconds", "must be one of 30, 15, 7.5"});
    if (!(bounds_.lat0 < bounds_.lat1) || !(bounds_.lon0 < bounds_.lon1))
        issues.push_back({"/bounds", "lower-left corner must be south-west of upper-right corner"});
    if (rows_ < 2 || cols_ < 2) issues.push_back({"/shape", "grid needs at least 2x2 nodes"});
    if (heights_.size() != rows_ * cols_) issues.push_back({"/heights", "rows*cols does not match height count"});
    for (double h : heights_) {
        if (!std::isfinite(h)) {
            issues.push_back({"/heights", "non-finite height"});
            break;
        }
    }
    if (issues.empty()) {
        const double exp_rows = (bounds_.lat1 - bounds_.lat0) * 3600.0 / arc_seconds_ + 1.0;
        const double exp_cols = (bounds_.lon1 - bounds_.lon0) * 3600.0 / arc_seconds_ + 1.0;
        if (std::abs(static_cast<double>(rows_) - exp_rows) > 1.0 + 1e-9 ||
            std::abs(static_cast<double>(cols_) - exp_cols) > 1.0 + 1e-9)
            issues.push_back({"/shape", "rows/cols inconsistent with bounds at the stated resolution"});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    dlat_ = (bounds_.lat1 - bounds_.lat0) / static_cast<double>(rows_ - 1);
    dlon_ = (bounds_.lon1 - bounds_.lon0) / static_cast<double>(cols_ - 1);
}

GeoPoint ElevationGrid::node(std::size_t row, std::size_t col) const {
    return {bounds_.lat1 - static_cast<double>(row) * dlat_, bounds_.lon0 + static_cast<double>(col) * dlon_,
            at(row, col)};
}

bool ElevationGrid::contains(const GeoPoint& p) const {
    return bounds_.contains(p, 1e-9);
}

double ElevationGrid::elevation_at(const GeoPoint& p) const {
    if (!contains(p)) {
        std::ostringstream os;
        os << std::setprecision(10) << "point (" << p.lat << ", " << p.lon << ") outside elevation grid";
        throw BoundsError(os.str());
    }
    const double fr = std::clamp((bounds_.lat1 - p.lat) / dlat_, 0.0, static_cast<double>(rows_ - 1));
    const double fc = std::clamp((p.lon - bounds_.lon0) / dlon_, 0.0, static_cast<double>(cols_ - 1));
    const std::size_t r0 = std::min(static_cast<std::size_t>(fr), rows_ - 2);
    const std::size_t c0 = std::min(static_cast<std::size_t>(fc), cols_ - 2);
    const double tr = fr - static_cast<double>(r0);
    const double tc = fc - static_cast<double>(c0);
    const double h00 = at(r0, c0), h01 = at(r0, c0 + 1);
    const double h10 = at(r0 + 1, c0), h11 = at(r0 + 1, c0 + 1);
    return (1.0 - tr) * ((1.0 - tc) * h00 + tc * h01) + tr * ((1.0 - tc) * h10 + tc * h11);
}

ElevationGrid ElevationGrid::read(std::istream& in) {
    std::string magic;
    int version = 0;
    Bounds b;
    double arcsec = 0.0;
    std::size_t rows = 0, cols = 0;
    if (!(in >> magic >> version >> b.lat0 >> b.lon0 >> b.lat1 >> b.lon1 >> arcsec >> rows >> cols) ||
        magic != "EGRID" || version != 1)
        throw ValidationError("/header", "expected 'EGRID 1 <lat0> <lon0> <lat1> <lon1> <arcsec> <rows> <cols>'");
    if (rows == 0 || cols == 0 || rows > 100000 || cols > 100000)
        throw ValidationError("/header", "implausible grid shape");
    std::vector<double> h(rows * cols);
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(in >> h[i])) {
            throw ValidationError("/heights/" + std::to_string(i / cols) + "/" + std::to_string(i % cols),
                                    "missing or malformed height");
        }
    }
    return ElevationGrid(b, arcsec, rows, cols, std::move(h));
}

ElevationGrid ElevationGrid::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open elevation grid " + path);
    return read(f);
}

void ElevationGrid::write(std::ostream& out) const {
    out << std::setprecision(12) << "EGRID 1 " << bounds_.lat0 << ' ' << bounds_.lon0 << ' ' << bounds_.lat1 << ' '
        << bounds_.lon1 << ' ' << arc_seconds_ << ' ' << rows_ << ' ' << cols_ << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (c) out << ' ';
            out << at(r, c);
        }
        out << '\n';
    }
}

void ElevationGrid::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw Error("cannot write elevation grid " + path);
    write(f);
}

ElevationGrid flat_grid(const Bounds& b, double arcsec, double height_m) {
    const auto [rows, cols] = ElevationGrid::shape_for(b, arcsec);
    return ElevationGrid(b, arcsec, rows, cols, std::vector<double>(rows * cols, height_m));
}

ElevationGrid ramp_grid(const Bounds& b, double arcsec, double west_m, double east_m) {
    const auto [rows, cols] = ElevationGrid::shape_for(b, arcsec);
    std::vector<double> h(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            h[r * cols + c] = west_m + (east_m - west_m) * static_cast<double>(c) / static_cast<double>(cols - 1);
    return ElevationGrid(b, arcsec, rows, cols, std::move(h));
}

ElevationGrid ridge_grid(const Bounds& b, double arcsec, double base_m, double ridge_m, double ridge_lon) {
    const auto [rows, cols] = ElevationGrid::shape_for(b, arcsec);
    const double dlon = (b.lon1 - b.lon0) / static_cast<double>(cols - 1);
    const auto ridge_col = static_cast<std::size_t>(
        std::clamp(std::llround((ridge_lon - b.lon0) / dlon), 0LL, static_cast<long long>(cols - 1)));
    std::vector<double> h(rows * cols, base_m);
    for (std::size_t r = 0; r < rows; ++r) h[r * cols + ridge_col] = ridge_m;
    return ElevationGrid(b, arcsec, rows, cols, std::move(h));
}

bool line_of_sight(const ElevationGrid& g, const GeoPoint& a, const GeoPoint& b, double step_m) {
    if (!(step_m > 0.0)) throw Error("line_of_sight: step must be positive");
    // Sample in a canonical direction so the result does not depend on argument order.
    const bool swap = std::tie(b.lat, b.lon, b.alt) < std::tie(a.lat, a.lon, a.alt);
    const GeoPoint& p = swap ? b : a;
    const GeoPoint& q = swap ? a : b;
    const double len = distance_3d_m(p, q);
    const auto n = static_cast<std::size_t>(std::ceil(len / step_m));
    for (std::size_t i = 1; i < n; ++i) {
        const GeoPoint s = lerp(p, q, static_cast<double>(i) / static_cast<double>(n));
        if (g.elevation_at(s) >= s.alt) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

std::string polygon_problem(const PolygonZone& z) {
    const auto& v = z.vertices;
    if (v.size() < 3) return "polygon needs at least 3 vertices";
    for (const auto& p : v)
        if (!is_valid(p)) return "vertex coordinates out of range";
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i)
        if (v[i].same_latlon(v[(i + 1) % n])) return "consecutive vertices coincide";
    const LocalFrame f(v.front());
    std::vector<Vec2> xy;
    for (const auto& p : v) xy.push_back(f.to_xy(p));
    if (std::abs(signed_area(xy)) < 1.0) return "polygon has zero area";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_touch(xy[i], xy[(i + 1) % n], xy[j], xy[(j + 1) % n])) return "polygon self-intersects";
        }
    }
    return {};
}

bool point_in_polygon(const PolygonZone& z, const GeoPoint& p) {
    const auto poly = ll(z);
    return inside_closed(poly, ll(p));
}

GeoPoint centroid(const PolygonZone& z) {
    const auto poly = ll(z);
    const Vec2 o = poly.front();
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p{poly[i].x - o.x, poly[i].y - o.y};
        const Vec2 q{poly[(i + 1) % n].x - o.x, poly[(i + 1) % n].y - o.y};
        const double c = p.x * q.y - q.x * p.y;
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (a2 == 0.0) {
        GeoPoint m;
        for (const auto& v : z.vertices) {
            m.lat += v.lat / static_cast<double>(n);
            m.lon += v.lon / static_cast<double>(n);
        }
        return m;
    }
    return {o.y + cy / (3.0 * a2), o.x + cx / (3.0 * a2), 0.0};
}

PolygonZone inflate(const PolygonZone& z, double margin_m) {
    if (margin_m <= 0.0) return z;
    const LocalFrame f(z.vertices.front());
    std::vector<Vec2> xy;
    for (const auto& p : z.vertices) xy.push_back(f.to_xy(p));
    const double orient = signed_area(xy) >= 0.0 ? 1.0 : -1.0;
    const std::size_t n = xy.size();
    PolygonZone out;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& prev = xy[(i + n - 1) % n];
        const Vec2& cur = xy[i];
        const Vec2& next = xy[(i + 1) % n];
        const Vec2 e1 = unit({cur.x - prev.x, cur.y - prev.y});
        const Vec2 e2 = unit({next.x - cur.x, next.y - cur.y});
        // Right-hand normal is outward for counter-clockwise polygons.
        const Vec2 n1{orient * e1.y, -orient * e1.x};
        const Vec2 n2{orient * e2.y, -orient * e2.x};
        const double turn = orient * (e1.x * e2.y - e1.y * e2.x); // > 0 at convex corners
        const double denom = 1.0 + n1.x * n2.x + n1.y * n2.y;
        const bool sharp = denom < 0.5; // mitre longer than twice the margin
        if (turn > 0.0 && sharp) {
            out.vertices.push_back(f.to_geo({cur.x + margin_m * (n1.x + e1.x), cur.y + margin_m * (n1.y + e1.y)}));
            out.vertices.push_back(f.to_geo({cur.x + margin_m * (n2.x - e2.x), cur.y + margin_m * (n2.y - e2.y)}));
        } else {
            const double k = margin_m / std::max(denom, 1e-9);
            out.vertices.push_back(f.to_geo({cur.x + k * (n1.x + n2.x), cur.y + k * (n1.y + n2.y)}));
        }
    }
    return out;
}

bool segment_intersects_polygon(const GeoPoint& a, const GeoPoint& b, const PolygonZone& z) {
    const auto poly = ll(z);
    return segment_touches_poly(poly, ll(a), ll(b));
}

// ---------------------------------------------------------------------------

double Route::length_m() const {
    double s = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) s += distance_m(waypoints[i - 1], waypoints[i]);
    return s;
}

RoutePlanner::RoutePlanner(std::vector<PolygonZone> nfzs, double margin_m) : margin_m_(margin_m) {
    if (!nfzs.empty()) frame_ = LocalFrame(nfzs.front().vertices.front());
    const double node_margin = margin_m_ + std::max(2.0, 0.02 * margin_m_);
    std::vector<Vec2> candidates;
    for (const auto& z : nfzs) {
        obstacles_.push_back(inflate(z, margin_m_));
        std::vector<Vec2> xy;
        for (const auto& p : obstacles_.back().vertices) xy.push_back(frame_.to_xy(p));
        obstacles_xy_.push_back(std::move(xy));
        for (const auto& p : inflate(z, node_margin).vertices) candidates.push_back(frame_.to_xy(p));
    }
    for (const auto& c : candidates) {
        bool free = true;
        for (const auto& ob : obstacles_xy_) {
            if (inside_closed(ob, c)) {
                free = false;
                break;
            }
        }
        if (free) nodes_.push_back(c);
    }
}

bool RoutePlanner::blocked(const GeoPoint& p) const {
    const Vec2 v = frame_.to_xy(p);
    for (const auto& ob : obstacles_xy_)
        if (inside_closed(ob, v)) return true;
    return false;
}

bool RoutePlanner::clear(const Vec2& a, const Vec2& b) const {
    for (const auto& ob : obstacles_xy_)
        if (segment_touches_poly(ob, a, b)) return false;
    return true;
}

Route RoutePlanner::route(const GeoPoint& start, const GeoPoint& goal) const {
    const Key key{{start.lat, start.lon}, {goal.lat, goal.lon}};
    std::vector<GeoPoint> path;
    {
        std::shared_lock lock(mu_);
        if (auto it = memo_.find(key); it != memo_.end()) path = it->second;
    }
    if (path.empty()) {
        path = compute(start, goal).waypoints;
        std::unique_lock lock(mu_);
        memo_.emplace(key, path);
    }
    // The memo is 2-D; altitudes ramp linearly from start to goal by distance.
    Route r;
    r.waypoints = std::move(path);
    const double total = r.length_m();
    double acc = 0.0;
    r.waypoints.front().alt = start.alt;
    for (std::size_t i = 1; i < r.waypoints.size(); ++i) {
        acc += distance_m(r.waypoints[i - 1], r.waypoints[i]);
        r.waypoints[i].alt = total > 0.0 ? start.alt + (goal.alt - start.alt) * acc / total : goal.alt;
    }
    r.waypoints.front() = start;
    if (r.waypoints.size() > 1) r.waypoints.back() = goal;
    return r;
}

Route RoutePlanner::compute(const GeoPoint& start, const GeoPoint& goal) const {
    if (blocked(start)) throw NoPathError("route start lies inside a no-fly zone");
    if (blocked(goal)) throw NoPathError("route goal lies inside a no-fly zone");
    Route r;
    if (start.same_latlon(goal)) {
        r.waypoints = {start};
        return r;
    }
    const Vec2 xs = frame_.to_xy(start);
    const Vec2 xg = frame_.to_xy(goal);
    if (clear(xs, xg)) {
        r.waypoints = {start, goal};
        return r;
    }

    // Uniform-cost search over {start, goal, corner nodes}; edges tested lazily.
    std::vector<Vec2> pts{xs, xg};
    pts.insert(pts.end(), nodes_.begin(), nodes_.end());
    const std::size_t n = pts.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, n);
    std::vector<bool> done(n, false);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[0] = 0.0;
    open.push({0.0, 0});
    while (!open.empty()) {
        const auto [d, u] = open.top();
        open.pop();
        if (done[u]) continue;
        done[u] = true;
        if (u == 1) break;
        for (std::size_t v = 1; v < n; ++v) {
            if (done[v]) continue;
            const double w = std::hypot(pts[v].x - pts[u].x, pts[v].y - pts[u].y);
            if (d + w >= dist[v]) continue;
            if (!clear(pts[u], pts[v])) continue;
            dist[v] = d + w;
            parent[v] = u;
            open.push({dist[v], v});
        }
    }
    if (!done[1]) throw NoPathError("goal is enclosed by no-fly zones");
    std::vector<std::size_t> idx;
    for (std::size_t v = 1; v != 0; v = parent[v]) idx.push_back(v);
    idx.push_back(0);
    std::reverse(idx.begin(), idx.end());
    for (std::size_t i : idx) {
        if (i == 0)
            r.waypoints.push_back(start);
        else if (i == 1)
            r.waypoints.push_back(goal);
        else
            r.waypoints.push_back(frame_.to_geo(pts[i]));
    }
    return r;
}

Route route_around_nfzs(const GeoPoint& start, const GeoPoint& goal, const std::vector<PolygonZone>& nfzs,
                        double margin_m) {
    return RoutePlanner(nfzs, margin_m).route(start, goal);
}

std::vector<ClearanceSample> ground_clearance_profile(const ElevationGrid& g, const Route& r, double step_m) {
    if (!(step_m > 0.0)) throw Error("ground_clearance_profile: step must be positive");
    std::vector<ClearanceSample> out;
    if (r.waypoints.empty()) return out;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < r.waypoints.size(); ++i) {
        const GeoPoint& a = r.waypoints[i];
        const GeoPoint& b = r.waypoints[i + 1];
        const double len = distance_m(a, b);
        const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / step_m)));
        for (std::size_t j = 0; j < n; ++j) {
            const double f = static_cast<double>(j) / static_cast<double>(n);
            const GeoPoint p = lerp(a, b, f);
            out.push_back({cum + len * f, g.elevation_at(p), p.alt});
        }
        cum += len;
    }
    const GeoPoint& last = r.waypoints.back();
    out.push_back({cum, g.elevation_at(last), last.alt});
    return out;
}

} // namespace uavmp::geo
