#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aopsim/config.hpp"
#include "aopsim/geometry.hpp"

namespace aopsim {

struct Site {
    std::string id;
    LatLon ll;
    Point xy;
    std::string kind;  // optional SITE_TYPE column, may be empty
};

enum class RatKind { wifi, sub6, mmwave };

inline const char* rat_kind_name(RatKind k) {
    switch (k) {
        case RatKind::wifi: return "wifi";
        case RatKind::sub6: return "sub6";
        case RatKind::mmwave: return "mmwave";
    }
    return "?";
}

struct RatStation {
    int id = -1;        // index into rats()
    int site = -1;      // co-located edge-cloud site index
    RatKind kind = RatKind::wifi;
    Point xy;
    int fronthaul_ec = -1;  // edge cloud reached over this station's fronthaul
};

// Per edge cloud, the latest reported spare CPU capacity. Rows carry the
// update-round stamp that produced them so stale reports can be rejected.
struct ResourceRow {
    double avail_hz = 0.0;
    int slot = -1;
};

// Physical deployment: edge-cloud sites loaded from a CSV, a subset of sites
// hosting radio stations, fronthaul/inter-EC/backhaul links with
// seed-deterministic capacities, and one regional cloud placed off-map.
class Topology {
  public:
    static std::vector<Site> load_sites_csv(const std::string& path);
    static Topology build(const Config& cfg);

    const std::vector<Site>& sites() const { return sites_; }
    const std::vector<RatStation>& rats() const { return rats_; }
    const Projection& projection() const { return proj_; }
    Point rc_position() const { return rc_; }

    double fronthaul_bps(int rat) const;
    double inter_ec_bps(int ec_a, int ec_b) const;  // throws if no such link
    bool has_inter_ec(int ec_a, int ec_b) const;
    double backhaul_bps(int ec) const;

    int inter_ec_link_count() const;

    // Collaboration spaces: labels[i] = space id of site i. Rebuilds the
    // inter-EC mesh so only same-space pairs remain connected.
    void apply_collaboration_spaces(const std::vector<int>& labels);
    const std::vector<int>& cs_labels() const { return cs_labels_; }
    bool same_space(int ec_a, int ec_b) const;

    // Members of the space containing ec, excluding ec itself, nearest first.
    std::vector<int> space_neighbors(int ec) const;

    // Resource table maintenance. Returns false when the report is older
    // than the recorded one; throws DomainError for negative capacity or a
    // report crossing collaboration-space boundaries.
    bool update_resource(int reporter_ec, int target_ec, int slot, double avail_hz);
    const ResourceRow& resource(int ec) const;

    std::string summary() const;

  private:
    Projection proj_;
    std::vector<Site> sites_;
    std::vector<RatStation> rats_;
    Point rc_;
    std::vector<double> fronthaul_bps_;             // per rat
    std::vector<double> backhaul_bps_;              // per site
    std::vector<std::vector<double>> inter_ec_;     // dense matrix, <=0 = absent
    std::vector<int> cs_labels_;
    std::vector<ResourceRow> resources_;
    std::uint64_t seed_ = 0;
    double inter_min_ = 0.0, inter_max_ = 0.0;

    void build_inter_ec_mesh();
};

}  // namespace aopsim
