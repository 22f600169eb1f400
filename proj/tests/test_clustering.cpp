#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "aopsim/clustering.hpp"
#include "aopsim/common.hpp"
#include "aopsim/topology.hpp"

using namespace aopsim;

namespace {

std::vector<Point> line3() { return {{0, 0}, {1, 0}, {10, 0}}; }

// Reference message-passing sweep written straight from the update rule,
// with none of the row/column bookkeeping the production code uses.
void naive_sweep(const Matrix& s, Matrix& resp, Matrix& avail, double d) {
    const size_t n = s.size();
    Matrix r_new(n, std::vector<double>(n, 0.0));
    for (size_t r = 0; r < n; ++r) {
        for (size_t w = 0; w < n; ++w) {
            double m = -std::numeric_limits<double>::infinity();
            for (size_t w2 = 0; w2 < n; ++w2)
                if (w2 != w) m = std::max(m, avail[r][w2] + s[r][w2]);
            r_new[r][w] = s[r][w] - m;
        }
    }
    for (size_t r = 0; r < n; ++r)
        for (size_t w = 0; w < n; ++w) resp[r][w] = d * resp[r][w] + (1 - d) * r_new[r][w];
    Matrix a_new(n, std::vector<double>(n, 0.0));
    for (size_t w = 0; w < n; ++w) {
        double colsum = 0.0;
        for (size_t r = 0; r < n; ++r)
            if (r != w) colsum += std::max(0.0, resp[r][w]);
        for (size_t r = 0; r < n; ++r) {
            if (r == w)
                a_new[w][w] = colsum;
            else
                a_new[r][w] = std::min(0.0, resp[w][w] + colsum - std::max(0.0, resp[r][w]));
        }
    }
    for (size_t r = 0; r < n; ++r)
        for (size_t w = 0; w < n; ++w) avail[r][w] = d * avail[r][w] + (1 - d) * a_new[r][w];
}

std::vector<Point> scatter(std::uint64_t seed, int n) {
    Rng rng(seed);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform() * 100.0, rng.uniform() * 100.0});
    return pts;
}

std::set<std::set<int>> as_partition(const std::vector<int>& assignment) {
    std::set<std::set<int>> part;
    std::set<int> exs(assignment.begin(), assignment.end());
    for (int e : exs) {
        std::set<int> members;
        for (size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] == e) members.insert(static_cast<int>(i));
        part.insert(members);
    }
    return part;
}

}  // namespace

TEST_CASE("similarity matrix is negative squared distance with the preference on the diagonal") {
    std::vector<Point> pts = {{0, 0}, {3, 4}, {0, 1}};
    Matrix s = similarity_matrix(pts, -2.5);
    CHECK(s[0][1] == doctest::Approx(-25.0));
    CHECK(s[0][2] == doctest::Approx(-1.0));
    CHECK(s[1][2] == doctest::Approx(-18.0));
    for (size_t i = 0; i < 3; ++i) {
        CHECK(s[i][i] == doctest::Approx(-2.5));
        for (size_t j = 0; j < 3; ++j) CHECK(s[i][j] == doctest::Approx(s[j][i]));
    }
}

TEST_CASE("median off-diagonal similarity") {
    Matrix s = similarity_matrix(line3(), 0.0);
    // pairwise squared gaps 1, 100, 81 -> median -81
    CHECK(median_offdiag(s) == doctest::Approx(-81.0));
    CHECK_THROWS_AS(median_offdiag(similarity_matrix({{0, 0}}, 0.0)), DomainError);
}

TEST_CASE("first undamped sweep reproduces the hand-computed responsibilities") {
    std::vector<Point> pts = line3();
    Matrix s = similarity_matrix(pts, -0.5);
    const size_t n = 3;
    Matrix resp(n, std::vector<double>(n, 0.0));
    Matrix avail(n, std::vector<double>(n, 0.0));
    apacs_sweep(s, resp, avail, 0.0);
    // With zero availabilities: resp(r,w) = Z(r,w) - max_{w'!=w} Z(r,w')
    CHECK(resp[1][2] == doctest::Approx(-80.5));  // -81 - max(-1, -0.5)
    CHECK(resp[0][1] == doctest::Approx(-0.5));   // -1 - max(-0.5, -100)
    CHECK(resp[0][0] == doctest::Approx(0.5));    // -0.5 - (-1)
}

TEST_CASE("availability signs hold after every sweep") {
    std::vector<Point> pts = scatter(11, 8);
    Matrix s = similarity_matrix(pts, 0.0);
    const double pref = median_offdiag(s);
    for (size_t i = 0; i < pts.size(); ++i) s[i][i] = pref;
    Matrix resp(8, std::vector<double>(8, 0.0));
    Matrix avail(8, std::vector<double>(8, 0.0));
    for (int sweep = 0; sweep < 60; ++sweep) {
        apacs_sweep(s, resp, avail, 0.5);
        for (size_t r = 0; r < 8; ++r)
            for (size_t w = 0; w < 8; ++w) {
                if (r == w)
                    CHECK(avail[r][w] >= -1e-12);
                else
                    CHECK(avail[r][w] <= 1e-12);
            }
    }
}

TEST_CASE("damped sweeps match a from-the-rule reference replay") {
    std::vector<Point> pts = scatter(5, 6);
    Matrix s = similarity_matrix(pts, 0.0);
    const double pref = median_offdiag(s);
    for (size_t i = 0; i < pts.size(); ++i) s[i][i] = pref;
    Matrix resp(6, std::vector<double>(6, 0.0)), avail(6, std::vector<double>(6, 0.0));
    Matrix ref_resp = resp, ref_avail = avail;
    for (int sweep = 0; sweep < 10; ++sweep) {
        apacs_sweep(s, resp, avail, 0.5);
        naive_sweep(s, ref_resp, ref_avail, 0.5);
        for (size_t r = 0; r < 6; ++r)
            for (size_t w = 0; w < 6; ++w) {
                CHECK(resp[r][w] == doctest::Approx(ref_resp[r][w]).epsilon(1e-9));
                CHECK(avail[r][w] == doctest::Approx(ref_avail[r][w]).epsilon(1e-9));
            }
    }
}

TEST_CASE("three collinear points split by damping") {
    ApacsOptions opt;

    SUBCASE("heavy damping keeps the far point separate") {
        opt.damping = 0.9;
        ApacsResult r = affinity_cluster(line3(), opt);
        CHECK(r.converged);
        CHECK(r.exemplars.size() == 2);
    }
    SUBCASE("default damping collapses to one space") {
        ApacsResult r = affinity_cluster(line3(), opt);
        CHECK(r.converged);
        CHECK(r.exemplars.size() == 1);
    }
}

TEST_CASE("cluster output is self-consistent") {
    std::vector<Point> pts = scatter(21, 12);
    ApacsResult r = affinity_cluster(pts, ApacsOptions{});
    REQUIRE(r.assignment.size() == pts.size());
    REQUIRE(r.labels.size() == pts.size());
    REQUIRE(!r.exemplars.empty());
    CHECK(std::is_sorted(r.exemplars.begin(), r.exemplars.end()));
    for (int e : r.exemplars) CHECK(r.assignment[e] == e);
    const int k = static_cast<int>(r.exemplars.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::count(r.exemplars.begin(), r.exemplars.end(), r.assignment[i]) == 1);
        CHECK(r.labels[i] >= 0);
        CHECK(r.labels[i] < k);
        // label = rank of the point's exemplar in the ascending exemplar list
        auto it = std::find(r.exemplars.begin(), r.exemplars.end(), r.assignment[i]);
        CHECK(r.labels[i] == static_cast<int>(it - r.exemplars.begin()));
    }
}

TEST_CASE("cluster edge cases") {
    CHECK_THROWS_AS(affinity_cluster({}, ApacsOptions{}), DomainError);

    ApacsResult one = affinity_cluster({{4, 2}}, ApacsOptions{});
    CHECK(one.converged);
    CHECK(one.exemplars == std::vector<int>{0});
    CHECK(one.assignment == std::vector<int>{0});

    ApacsOptions bad;
    bad.damping = 1.0;
    CHECK_THROWS_AS(affinity_cluster(line3(), bad), ConfigError);

    // Too few sweeps to stabilise: still returns a usable partition.
    ApacsOptions brief;
    brief.max_iters = 3;
    ApacsResult r = affinity_cluster(scatter(9, 10), brief);
    CHECK(!r.converged);
    CHECK(r.assignment.size() == 10);
    CHECK(!r.exemplars.empty());
}

TEST_CASE("net similarity sums preferences and nearest-exemplar terms") {
    std::vector<Point> pts = line3();
    Matrix s = similarity_matrix(pts, -81.0);
    CHECK(net_similarity(s, {1}) == doctest::Approx(-81.0 - 1.0 - 81.0));
    CHECK(net_similarity(s, {0, 1}) == doctest::Approx(-81.0 * 2 - 81.0));
    CHECK(net_similarity(s, {0, 1, 2}) == doctest::Approx(-81.0 * 3));
    CHECK_THROWS_AS(net_similarity(s, {}), DomainError);
}

TEST_CASE("exhaustive exemplar search on small fixtures") {
    SUBCASE("three collinear points") {
        Matrix s = similarity_matrix(line3(), -81.0);
        OracleResult best = exemplar_oracle(s);
        CHECK(best.best == doctest::Approx(-163.0));
        CHECK(!best.exemplars.empty());
    }
    SUBCASE("coincident pair elects a single exemplar") {
        Matrix s = similarity_matrix({{5, 5}, {5, 5}}, -5.0);
        OracleResult best = exemplar_oracle(s);
        CHECK(best.best == doctest::Approx(-5.0));
        CHECK(best.exemplars.size() == 1);
    }
    SUBCASE("single point scores its preference") {
        Matrix s = similarity_matrix({{1, 2}}, -7.5);
        OracleResult best = exemplar_oracle(s);
        CHECK(best.best == doctest::Approx(-7.5));
        CHECK(best.exemplars == std::vector<int>{0});
    }
    SUBCASE("refuses fixtures too large to enumerate") {
        std::vector<Point> pts = scatter(3, 16);
        CHECK_THROWS_AS(exemplar_oracle(similarity_matrix(pts, -1.0)), DomainError);
        CHECK_THROWS_AS(exemplar_oracle(Matrix{}), DomainError);
    }
}

TEST_CASE("clustering objective stays within 5% of the enumerated optimum") {
    int ok = 0;
    for (int f = 0; f < 50; ++f) {
        Rng rng = Rng::substream(4, "fixture" + std::to_string(f));
        int n = 5 + static_cast<int>(rng.uniform_int(8));
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back({rng.uniform() * 100.0, rng.uniform() * 100.0});
        ApacsResult r = affinity_cluster(pts, ApacsOptions{});
        const double pref = median_offdiag(similarity_matrix(pts, 0.0));
        Matrix s = similarity_matrix(pts, pref);
        OracleResult best = exemplar_oracle(s);
        const double got = net_similarity(s, r.exemplars);
        if (got >= best.best - 0.05 * std::fabs(best.best) - 1e-9) ++ok;
    }
    CHECK(ok == 50);
}

TEST_CASE("partitions are stable under point relabelling") {
    std::vector<Point> pts = scatter(13, 9);
    std::vector<int> perm = {4, 7, 1, 0, 8, 2, 6, 3, 5};
    std::vector<Point> permuted(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) permuted[i] = pts[perm[i]];

    ApacsResult a = affinity_cluster(pts, ApacsOptions{});
    ApacsResult b = affinity_cluster(permuted, ApacsOptions{});

    auto part_a = as_partition(a.assignment);
    std::vector<int> mapped(pts.size());
    for (size_t j = 0; j < pts.size(); ++j) mapped[perm[j]] = perm[b.assignment[j]];
    CHECK(part_a == as_partition(mapped));
}

TEST_CASE("lower preferences never grow the number of spaces") {
    std::vector<Point> pts = scatter(17, 10);
    const double med = median_offdiag(similarity_matrix(pts, 0.0));
    size_t prev = pts.size() + 1;
    for (double scale : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        ApacsOptions opt;
        opt.median_preference = false;
        opt.preference = med * scale;
        ApacsResult r = affinity_cluster(pts, opt);
        CHECK(r.exemplars.size() <= prev);
        prev = r.exemplars.size();
    }
}

TEST_CASE("kmeans basics") {
    std::vector<Point> pts = scatter(23, 14);
    Rng rng(1);

    SUBCASE("k=1 recovers the total scatter about the centroid") {
        Point c{0, 0};
        for (const Point& p : pts) {
            c.x += p.x / pts.size();
            c.y += p.y / pts.size();
        }
        double scatter_about_mean = 0.0;
        for (const Point& p : pts)
            scatter_about_mean += (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
        KmeansResult r = kmeans(pts, 1, 3, 50, rng);
        CHECK(r.wcss == doctest::Approx(scatter_about_mean).epsilon(1e-9));
        CHECK(r.centers.size() == 1);
    }
    SUBCASE("k=n drives the scatter to zero") {
        KmeansResult r = kmeans(pts, static_cast<int>(pts.size()), 3, 50, rng);
        CHECK(r.wcss == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("labels are in range and every point is charged to its own center") {
        KmeansResult r = kmeans(pts, 4, 5, 50, rng);
        REQUIRE(r.labels.size() == pts.size());
        REQUIRE(r.centers.size() == 4);
        double recomputed = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            REQUIRE(r.labels[i] >= 0);
            REQUIRE(r.labels[i] < 4);
            const Point& c = r.centers[r.labels[i]];
            recomputed += (pts[i].x - c.x) * (pts[i].x - c.x) + (pts[i].y - c.y) * (pts[i].y - c.y);
        }
        CHECK(r.wcss == doctest::Approx(recomputed).epsilon(1e-9));
    }
    SUBCASE("rejects out-of-range k and empty input") {
        CHECK_THROWS_AS(kmeans(pts, 0, 3, 50, rng), DomainError);
        CHECK_THROWS_AS(kmeans(pts, static_cast<int>(pts.size()) + 1, 3, 50, rng), DomainError);
        CHECK_THROWS_AS(kmeans({}, 1, 3, 50, rng), DomainError);
    }
}

TEST_CASE("elbow selection") {
    SUBCASE("three well-separated blobs give k=3") {
        std::vector<Point> pts;
        const double jx[] = {0.0, 0.3, -0.4, 0.2, -0.1};
        const double jy[] = {0.0, -0.2, 0.1, 0.4, -0.3};
        for (auto [cx, cy] : {std::pair{0.0, 0.0}, {50.0, 0.0}, {0.0, 50.0}})
            for (int i = 0; i < 5; ++i) pts.push_back({cx + jx[i], cy + jy[i]});
        Rng rng(2);
        ElbowResult r = elbow_kmeans(pts, 10, 5, 50, rng);
        CHECK(r.k == 3);
        CHECK(r.wcss.size() == 10);
        // within-blob jitter scatter: 3 blobs x sum(jx^2 + jy^2) = 3 * 0.6
        CHECK(r.wcss[2] == doctest::Approx(1.8).epsilon(1e-9));
    }
    SUBCASE("identical points collapse to one cluster") {
        std::vector<Point> pts(6, Point{2, 3});
        Rng rng(2);
        CHECK(elbow_kmeans(pts, 5, 3, 50, rng).k == 1);
    }
    SUBCASE("needs room for an interior elbow") {
        Rng rng(2);
        CHECK_THROWS_AS(elbow_kmeans(scatter(1, 8), 2, 3, 50, rng), DomainError);
        // a wide kmax is clamped to n first
        CHECK_THROWS_AS(elbow_kmeans({{0, 0}, {1, 1}}, 15, 3, 50, rng), DomainError);
        CHECK_THROWS_AS(elbow_kmeans({}, 15, 3, 50, rng), DomainError);
    }
}

TEST_CASE("site dataset clusters as frozen") {
    Config cfg;
    Topology topo = Topology::build(cfg);
    REQUIRE(topo.sites().size() == 125);
    std::vector<Point> pts;
    for (const Site& s : topo.sites()) pts.push_back(s.xy);

    SUBCASE("median preference") {
        CHECK(median_offdiag(similarity_matrix(pts, 0.0)) ==
              doctest::Approx(-1.110190e6).epsilon(1e-5));
    }
    SUBCASE("elbow picks six service zones across seeds") {
        for (std::uint64_t seed : {7ull, 99ull}) {
            Rng rng(seed);
            ElbowResult r = elbow_kmeans(pts, cfg.clustering.kmax, cfg.clustering.kmeans_restarts,
                                         cfg.clustering.kmeans_iters, rng);
            CHECK(r.k == 6);
        }
    }
    SUBCASE("affinity clustering settles on six spaces") {
        ApacsResult r = cluster_sites(pts, cfg);
        CHECK(r.converged);
        REQUIRE(r.exemplars.size() == 6);
        std::vector<int> sizes(6, 0);
        for (int lab : r.labels) sizes[lab]++;
        std::sort(sizes.begin(), sizes.end());
        CHECK(sizes == std::vector<int>{6, 6, 10, 16, 30, 57});
        const double mean_size = 125.0 / 6.0;
        CHECK(mean_size > 8.0);
        CHECK(mean_size < 21.0);
    }
}
