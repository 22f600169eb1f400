#pragma once

#include <cmath>
#include <vector>

#include "aopsim/common.hpp"

namespace aopsim {

struct Point {
    double x = 0.0;  // metres east
    double y = 0.0;  // metres north
};

inline double dist(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct LatLon {
    double lat = 0.0;
    double lon = 0.0;
};

inline constexpr double kEarthRadiusM = 6371000.0;

// Equirectangular projection about a reference point. Adequate for a
// city-scale site layout (a few km across) and exactly invertible, which the
// dataset round-trip tests rely on.
class Projection {
  public:
    Projection() = default;
    Projection(double ref_lat_deg, double ref_lon_deg)
        : ref_lat_(ref_lat_deg), ref_lon_(ref_lon_deg),
          cos_lat_(std::cos(ref_lat_deg * M_PI / 180.0)) {}

    Point to_xy(const LatLon& p) const {
        const double dlat = (p.lat - ref_lat_) * M_PI / 180.0;
        const double dlon = (p.lon - ref_lon_) * M_PI / 180.0;
        return {kEarthRadiusM * dlon * cos_lat_, kEarthRadiusM * dlat};
    }

    LatLon to_latlon(const Point& p) const {
        return {ref_lat_ + (p.y / kEarthRadiusM) * 180.0 / M_PI,
                ref_lon_ + (p.x / (kEarthRadiusM * cos_lat_)) * 180.0 / M_PI};
    }

    double ref_lat() const { return ref_lat_; }
    double ref_lon() const { return ref_lon_; }

  private:
    double ref_lat_ = 0.0;
    double ref_lon_ = 0.0;
    double cos_lat_ = 1.0;
};

// Piecewise-linear route. Positions are addressed by arc length from the
// start; queries past the end wrap around (vehicles loop their route).
class Polyline {
  public:
    Polyline() = default;
    explicit Polyline(std::vector<Point> pts) : pts_(std::move(pts)) {
        if (pts_.size() < 2) throw DomainError("polyline needs at least 2 points");
        cum_.resize(pts_.size(), 0.0);
        for (size_t i = 1; i < pts_.size(); ++i)
            cum_[i] = cum_[i - 1] + dist(pts_[i - 1], pts_[i]);
        if (cum_.back() <= 0.0) throw DomainError("polyline has zero length");
    }

    double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
    const std::vector<Point>& points() const { return pts_; }

    Point at(double s) const {
        s = std::fmod(s, length());
        if (s < 0.0) s += length();
        size_t i = 1;
        while (i + 1 < cum_.size() && cum_[i] < s) ++i;
        const double seg = cum_[i] - cum_[i - 1];
        const double t = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
        return {pts_[i - 1].x + t * (pts_[i].x - pts_[i - 1].x),
                pts_[i - 1].y + t * (pts_[i].y - pts_[i - 1].y)};
    }

    // Unit direction of travel at arc length s.
    Point heading(double s) const {
        s = std::fmod(s, length());
        if (s < 0.0) s += length();
        size_t i = 1;
        while (i + 1 < cum_.size() && cum_[i] < s) ++i;
        const double dx = pts_[i].x - pts_[i - 1].x;
        const double dy = pts_[i].y - pts_[i - 1].y;
        const double n = std::hypot(dx, dy);
        if (n <= 0.0) return {1.0, 0.0};
        return {dx / n, dy / n};
    }

  private:
    std::vector<Point> pts_;
    std::vector<double> cum_;
};

}  // namespace aopsim
