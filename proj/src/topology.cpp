#include "aopsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "aopsim/common.hpp"
#include "aopsim/rng.hpp"

namespace aopsim {

namespace {

// Capacity draws are pure functions of (seed, link label, endpoint ids), so
// a link's capacity never depends on construction order.
double hashed_capacity(std::uint64_t seed, const char* label, std::uint64_t a, std::uint64_t b,
                       double lo_gbps, double hi_gbps) {
    std::uint64_t h = fnv1a64(label, fnv1a64_u64(seed));
    h = fnv1a64_u64(a, h);
    h = fnv1a64_u64(b, h);
    const double u = static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
    return (lo_gbps + (hi_gbps - lo_gbps) * u) * 1e9;
}

}  // namespace

std::vector<Site> Topology::load_sites_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open site dataset: " + path);
    std::vector<Site> out;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        auto cells = split(t, ',');
        if (header) {
            header = false;
            if (cells.size() < 3 || trim(cells[0]) != "SITE_ID" || trim(cells[1]) != "LATITUDE" ||
                trim(cells[2]) != "LONGITUDE")
                throw ParseError(path + ": expected header SITE_ID,LATITUDE,LONGITUDE[,SITE_TYPE]");
            continue;
        }
        if (cells.size() < 3)
            throw ParseError(path + " line " + std::to_string(lineno) + ": expected at least 3 columns");
        Site s;
        s.id = trim(cells[0]);
        try {
            s.ll.lat = std::stod(trim(cells[1]));
            s.ll.lon = std::stod(trim(cells[2]));
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(lineno) + ": bad coordinate");
        }
        if (s.ll.lat < -90.0 || s.ll.lat > 90.0 || s.ll.lon < -180.0 || s.ll.lon > 180.0)
            throw ParseError(path + " line " + std::to_string(lineno) + ": coordinate out of range");
        if (cells.size() >= 4) s.kind = trim(cells[3]);
        out.push_back(std::move(s));
    }
    if (out.empty()) throw ParseError(path + ": no data rows");
    return out;
}

Topology Topology::build(const Config& cfg) {
    Topology t;
    t.seed_ = cfg.topology.seed;
    t.sites_ = load_sites_csv(cfg.topology.dataset);

    double lat = 0.0, lon = 0.0;
    for (const auto& s : t.sites_) {
        lat += s.ll.lat;
        lon += s.ll.lon;
    }
    t.proj_ = Projection(lat / t.sites_.size(), lon / t.sites_.size());
    for (auto& s : t.sites_) s.xy = t.proj_.to_xy(s.ll);

    const int n_wifi = cfg.topology.wifi_count;
    const int n_sub6 = cfg.topology.ru_count;
    const int n_mm = cfg.topology.oru_count;
    const int n_rats = n_wifi + n_sub6 + n_mm;
    if (n_rats <= 0) throw ConfigError("topology: station counts must sum to a positive number");
    if (static_cast<size_t>(n_rats) > t.sites_.size())
        throw ConfigError("topology: more stations requested than sites available");

    // Stations occupy a seeded sample of sites; kinds are assigned in blocks.
    std::vector<int> order(t.sites_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng rng = Rng::substream(cfg.topology.seed, "topology/rat-sites");
    rng.shuffle(order);
    for (int i = 0; i < n_rats; ++i) {
        RatStation r;
        r.id = i;
        r.site = order[i];
        r.kind = i < n_wifi ? RatKind::wifi : (i < n_wifi + n_sub6 ? RatKind::sub6 : RatKind::mmwave);
        r.xy = t.sites_[r.site].xy;
        t.rats_.push_back(r);
    }

    // Fronthaul: each station connects to its nearest edge-cloud site
    // (the host site itself when co-located).
    t.fronthaul_bps_.resize(t.rats_.size(), 0.0);
    for (auto& r : t.rats_) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < t.sites_.size(); ++k) {
            const double d = dist(r.xy, t.sites_[k].xy);
            if (d < bd) {
                bd = d;
                best = static_cast<int>(k);
            }
        }
        r.fronthaul_ec = best;
        t.fronthaul_bps_[r.id] =
            hashed_capacity(t.seed_, "fronthaul", r.id, best, cfg.topology.fronthaul_gbps_min,
                            cfg.topology.fronthaul_gbps_max);
    }

    // Inter-EC links start as a full mesh; collaboration spaces prune it.
    t.inter_min_ = cfg.topology.inter_ec_gbps_min;
    t.inter_max_ = cfg.topology.inter_ec_gbps_max;
    t.cs_labels_.assign(t.sites_.size(), 0);
    t.build_inter_ec_mesh();

    // One backhaul per edge cloud to the regional cloud.
    t.backhaul_bps_.resize(t.sites_.size(), 0.0);
    for (size_t k = 0; k < t.sites_.size(); ++k)
        t.backhaul_bps_[k] = hashed_capacity(t.seed_, "backhaul", k, 0, cfg.topology.backhaul_gbps_min,
                                             cfg.topology.backhaul_gbps_max);

    double max_x = -std::numeric_limits<double>::infinity(), cy = 0.0;
    for (const auto& s : t.sites_) {
        max_x = std::max(max_x, s.xy.x);
        cy += s.xy.y;
    }
    t.rc_ = {max_x + cfg.topology.rc_offset_m, cy / t.sites_.size()};

    t.resources_.assign(t.sites_.size(), ResourceRow{});
    return t;
}

void Topology::build_inter_ec_mesh() {
    const size_t n = sites_.size();
    inter_ec_.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (cs_labels_[i] != cs_labels_[j]) continue;
            const double c = hashed_capacity(seed_, "inter_ec", i, j, inter_min_, inter_max_);
            inter_ec_[i][j] = c;
            inter_ec_[j][i] = c;
        }
    }
}

double Topology::fronthaul_bps(int rat) const {
    if (rat < 0 || static_cast<size_t>(rat) >= fronthaul_bps_.size())
        throw DomainError("fronthaul_bps: no such station");
    return fronthaul_bps_[rat];
}

bool Topology::has_inter_ec(int a, int b) const {
    if (a < 0 || b < 0 || static_cast<size_t>(a) >= sites_.size() ||
        static_cast<size_t>(b) >= sites_.size() || a == b)
        return false;
    return inter_ec_[a][b] > 0.0;
}

double Topology::inter_ec_bps(int a, int b) const {
    if (!has_inter_ec(a, b)) throw DomainError("inter_ec_bps: no link between those edge clouds");
    return inter_ec_[a][b];
}

int Topology::inter_ec_link_count() const {
    int n = 0;
    for (size_t i = 0; i < sites_.size(); ++i)
        for (size_t j = i + 1; j < sites_.size(); ++j)
            if (inter_ec_[i][j] > 0.0) ++n;
    return n;
}

double Topology::backhaul_bps(int ec) const {
    if (ec < 0 || static_cast<size_t>(ec) >= backhaul_bps_.size())
        throw DomainError("backhaul_bps: no such edge cloud");
    return backhaul_bps_[ec];
}

void Topology::apply_collaboration_spaces(const std::vector<int>& labels) {
    if (labels.size() != sites_.size())
        throw DomainError("apply_collaboration_spaces: one label per site required");
    cs_labels_ = labels;
    build_inter_ec_mesh();
}

bool Topology::same_space(int a, int b) const {
    if (a < 0 || b < 0 || static_cast<size_t>(a) >= sites_.size() ||
        static_cast<size_t>(b) >= sites_.size())
        return false;
    return cs_labels_[a] == cs_labels_[b];
}

std::vector<int> Topology::space_neighbors(int ec) const {
    if (ec < 0 || static_cast<size_t>(ec) >= sites_.size())
        throw DomainError("space_neighbors: no such edge cloud");
    std::vector<int> out;
    for (size_t j = 0; j < sites_.size(); ++j)
        if (static_cast<int>(j) != ec && cs_labels_[j] == cs_labels_[ec]) out.push_back(static_cast<int>(j));
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        const double da = dist(sites_[a].xy, sites_[ec].xy);
        const double db = dist(sites_[b].xy, sites_[ec].xy);
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

bool Topology::update_resource(int reporter_ec, int target_ec, int slot, double avail_hz) {
    if (reporter_ec < 0 || static_cast<size_t>(reporter_ec) >= sites_.size() || target_ec < 0 ||
        static_cast<size_t>(target_ec) >= sites_.size())
        throw DomainError("update_resource: no such edge cloud");
    if (avail_hz < 0.0) throw DomainError("update_resource: negative capacity report");
    if (!same_space(reporter_ec, target_ec))
        throw DomainError("update_resource: report crosses collaboration spaces");
    ResourceRow& row = resources_[target_ec];
    if (slot < row.slot) return false;
    row.slot = slot;
    row.avail_hz = avail_hz;
    return true;
}

const ResourceRow& Topology::resource(int ec) const {
    if (ec < 0 || static_cast<size_t>(ec) >= sites_.size())
        throw DomainError("resource: no such edge cloud");
    return resources_[ec];
}

std::string Topology::summary() const {
    int w = 0, s6 = 0, mm = 0;
    for (const auto& r : rats_) {
        if (r.kind == RatKind::wifi) ++w;
        else if (r.kind == RatKind::sub6) ++s6;
        else ++mm;
    }
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool first = true;
    for (const auto& site : sites_) {
        if (first) {
            min_x = max_x = site.xy.x;
            min_y = max_y = site.xy.y;
            first = false;
        } else {
            min_x = std::min(min_x, site.xy.x);
            max_x = std::max(max_x, site.xy.x);
            min_y = std::min(min_y, site.xy.y);
            max_y = std::max(max_y, site.xy.y);
        }
    }
    std::string out;
    out += "sites: " + std::to_string(sites_.size()) + "\n";
    out += "stations: " + std::to_string(rats_.size()) + " (wifi=" + std::to_string(w) +
           " sub6=" + std::to_string(s6) + " mmwave=" + std::to_string(mm) + ")\n";
    out += "links: fronthaul=" + std::to_string(rats_.size()) +
           " inter_ec=" + std::to_string(inter_ec_link_count()) +
           " backhaul=" + std::to_string(sites_.size()) + "\n";
    out += "bbox_m: " + fmt_fixed(min_x, 1) + " " + fmt_fixed(min_y, 1) + " " + fmt_fixed(max_x, 1) +
           " " + fmt_fixed(max_y, 1) + "\n";
    out += "rc_m: " + fmt_fixed(rc_.x, 1) + " " + fmt_fixed(rc_.y, 1) + "\n";
    return out;
}

}  // namespace aopsim
