#include "aopsim/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aopsim/common.hpp"

namespace aopsim {

namespace {

int argmax_row(const std::vector<double>& row) {
    int best = 0;
    for (size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best]) best = static_cast<int>(i);
    return best;
}

}  // namespace

Matrix similarity_matrix(const std::vector<Point>& pts, double preference) {
    const size_t n = pts.size();
    Matrix s(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j) {
                s[i][j] = preference;
                continue;
            }
            const double dx = pts[i].x - pts[j].x;
            const double dy = pts[i].y - pts[j].y;
            s[i][j] = -(dx * dx + dy * dy);
        }
    }
    return s;
}

double median_offdiag(const Matrix& s) {
    std::vector<double> v;
    const size_t n = s.size();
    if (n < 2) throw DomainError("median_offdiag: need at least 2 points");
    v.reserve(n * (n - 1));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) v.push_back(s[i][j]);
    std::sort(v.begin(), v.end());
    const size_t m = v.size();
    if (m % 2 == 1) return v[m / 2];
    return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

void apacs_sweep(const Matrix& s, Matrix& resp, Matrix& avail, double damping) {
    const size_t n = s.size();

    // Responsibilities from the previous availabilities, using the row-wise
    // top-two of avail + sim to evaluate the excluded maximum cheaply.
    for (size_t r = 0; r < n; ++r) {
        double max1 = -std::numeric_limits<double>::infinity();
        double max2 = max1;
        size_t arg1 = 0;
        for (size_t w = 0; w < n; ++w) {
            const double v = avail[r][w] + s[r][w];
            if (v > max1) {
                max2 = max1;
                max1 = v;
                arg1 = w;
            } else if (v > max2) {
                max2 = v;
            }
        }
        for (size_t w = 0; w < n; ++w) {
            const double excl = (w == arg1) ? max2 : max1;
            resp[r][w] = damping * resp[r][w] + (1.0 - damping) * (s[r][w] - excl);
        }
    }

    // Availabilities from the fresh responsibilities.
    std::vector<double> colsum(n, 0.0);  // sum over r' != w of max(0, resp(r', w))
    for (size_t w = 0; w < n; ++w) {
        double acc = 0.0;
        for (size_t r = 0; r < n; ++r)
            if (r != w) acc += std::max(0.0, resp[r][w]);
        colsum[w] = acc;
    }
    for (size_t r = 0; r < n; ++r) {
        for (size_t w = 0; w < n; ++w) {
            double computed;
            if (r == w) {
                computed = colsum[w];
            } else {
                computed = std::min(0.0, resp[w][w] + colsum[w] - std::max(0.0, resp[r][w]));
            }
            avail[r][w] = damping * avail[r][w] + (1.0 - damping) * computed;
        }
    }
}

namespace {

// Raw exemplar set: points whose criterion row argmax is themselves.
std::vector<int> raw_exemplars(const Matrix& resp, const Matrix& avail) {
    const size_t n = resp.size();
    std::vector<int> ex;
    std::vector<double> row(n);
    for (size_t r = 0; r < n; ++r) {
        for (size_t w = 0; w < n; ++w) row[w] = resp[r][w] + avail[r][w];
        if (argmax_row(row) == static_cast<int>(r)) ex.push_back(static_cast<int>(r));
    }
    return ex;
}

std::vector<int> assign_to_exemplars(const Matrix& s, const Matrix& resp, const Matrix& avail,
                                     const std::vector<int>& exemplars) {
    const size_t n = s.size();
    std::vector<int> assign(n, -1);
    std::vector<double> row(n);
    for (size_t r = 0; r < n; ++r) {
        bool is_ex = false;
        for (int e : exemplars) is_ex = is_ex || e == static_cast<int>(r);
        if (is_ex) {
            assign[r] = static_cast<int>(r);
            continue;
        }
        for (size_t w = 0; w < n; ++w) row[w] = resp[r][w] + avail[r][w];
        int a = argmax_row(row);
        bool a_is_ex = false;
        for (int e : exemplars) a_is_ex = a_is_ex || e == a;
        if (!a_is_ex) {
            a = exemplars[0];
            for (int e : exemplars)
                if (s[r][e] > s[r][a]) a = e;
        }
        assign[r] = a;
    }
    return assign;
}

std::vector<int> compact_labels(const std::vector<int>& assignment, const std::vector<int>& exemplars) {
    std::vector<int> labels(assignment.size(), -1);
    for (size_t i = 0; i < assignment.size(); ++i) {
        for (size_t k = 0; k < exemplars.size(); ++k)
            if (exemplars[k] == assignment[i]) labels[i] = static_cast<int>(k);
    }
    return labels;
}

}  // namespace

ApacsResult affinity_cluster(const std::vector<Point>& pts, const ApacsOptions& opt) {
    const size_t n = pts.size();
    if (n == 0) throw DomainError("affinity_cluster: empty input");
    ApacsResult res;
    if (n == 1) {
        res.assignment = {0};
        res.exemplars = {0};
        res.labels = {0};
        res.converged = true;
        return res;
    }
    if (opt.damping < 0.0 || opt.damping >= 1.0)
        throw ConfigError("affinity damping must be in [0, 1)");

    Matrix s = similarity_matrix(pts, 0.0);
    const double pref = opt.median_preference ? median_offdiag(s) : opt.preference;
    for (size_t i = 0; i < n; ++i) s[i][i] = pref;

    Matrix resp(n, std::vector<double>(n, 0.0));
    Matrix avail(n, std::vector<double>(n, 0.0));

    int stable = 0;
    bool have_last = false;
    std::vector<int> last_assign, last_ex;
    bool converged = false;
    int it = 0;
    for (it = 1; it <= opt.max_iters; ++it) {
        apacs_sweep(s, resp, avail, opt.damping);
        std::vector<int> ex = raw_exemplars(resp, avail);
        if (ex.empty()) {
            // A degenerate sweep with no self-electing point must not count
            // towards stability, or early all-zero messages would "converge"
            // onto an arbitrary fallback.
            stable = 0;
            have_last = false;
            continue;
        }
        std::vector<int> assign = assign_to_exemplars(s, resp, avail, ex);
        if (have_last && assign == last_assign) {
            ++stable;
        } else {
            stable = 0;
        }
        last_assign = std::move(assign);
        last_ex = std::move(ex);
        have_last = true;
        if (stable >= opt.convergence_window) {
            converged = true;
            break;
        }
    }

    if (converged || have_last) {
        res.assignment = last_assign;
        res.exemplars = last_ex;
    } else {
        // Never saw a usable exemplar set: elect the point with the largest
        // self-criterion and attach everyone to it.
        int best = 0;
        double bc = resp[0][0] + avail[0][0];
        for (size_t r = 1; r < n; ++r) {
            const double c = resp[r][r] + avail[r][r];
            if (c > bc) {
                bc = c;
                best = static_cast<int>(r);
            }
        }
        res.exemplars = {best};
        res.assignment.assign(n, best);
    }
    res.labels = compact_labels(res.assignment, res.exemplars);
    res.converged = converged;
    res.iters = it > opt.max_iters ? opt.max_iters : it;
    return res;
}

double net_similarity(const Matrix& s, const std::vector<int>& exemplars) {
    const size_t n = s.size();
    if (exemplars.empty()) throw DomainError("net_similarity: empty exemplar set");
    double total = 0.0;
    for (size_t r = 0; r < n; ++r) {
        bool is_ex = false;
        for (int e : exemplars) is_ex = is_ex || e == static_cast<int>(r);
        if (is_ex) {
            total += s[r][r];
        } else {
            double best = -std::numeric_limits<double>::infinity();
            for (int e : exemplars) best = std::max(best, s[r][e]);
            total += best;
        }
    }
    return total;
}

OracleResult exemplar_oracle(const Matrix& s) {
    const size_t n = s.size();
    if (n == 0) throw DomainError("exemplar_oracle: empty similarity matrix");
    if (n > 15) throw DomainError("exemplar_oracle: refuses more than 15 points");
    OracleResult out;
    out.best = -std::numeric_limits<double>::infinity();
    std::vector<int> ex;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        ex.clear();
        for (size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) ex.push_back(static_cast<int>(i));
        const double v = net_similarity(s, ex);
        if (v > out.best) {
            out.best = v;
            out.exemplars = ex;
        }
    }
    return out;
}

namespace {

double point_cost(const Point& p, const Point& c) {
    const double dx = p.x - c.x;
    const double dy = p.y - c.y;
    return dx * dx + dy * dy;
}

KmeansResult kmeans_once(const std::vector<Point>& pts, int k, int iters, Rng& rng) {
    const size_t n = pts.size();
    std::vector<Point> centers;
    centers.reserve(k);

    // kmeans++ seeding.
    centers.push_back(pts[rng.uniform_int(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, point_cost(pts[i], c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(pts[rng.uniform_int(n)]);
            continue;
        }
        double target = rng.uniform() * total;
        size_t pick = n - 1;
        for (size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }

    std::vector<int> labels(n, 0);
    for (int step = 0; step < iters; ++step) {
        bool moved = false;
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = point_cost(pts[i], centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = point_cost(pts[i], centers[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                moved = true;
            }
        }
        std::vector<Point> sums(k, Point{});
        std::vector<int> counts(k, 0);
        for (size_t i = 0; i < n; ++i) {
            sums[labels[i]].x += pts[i].x;
            sums[labels[i]].y += pts[i].y;
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seat an empty cluster at the point farthest from its centre.
                size_t far = 0;
                double fd = -1.0;
                for (size_t i = 0; i < n; ++i) {
                    const double d = point_cost(pts[i], centers[labels[i]]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                centers[c] = pts[far];
                moved = true;
            } else {
                centers[c] = {sums[c].x / counts[c], sums[c].y / counts[c]};
            }
        }
        if (!moved && step > 0) break;
    }

    KmeansResult res;
    res.labels = std::move(labels);
    res.centers = std::move(centers);
    res.wcss = 0.0;
    for (size_t i = 0; i < n; ++i) res.wcss += point_cost(pts[i], res.centers[res.labels[i]]);
    return res;
}

}  // namespace

KmeansResult kmeans(const std::vector<Point>& pts, int k, int restarts, int iters, Rng& rng) {
    if (pts.empty()) throw DomainError("kmeans: empty input");
    if (k < 1 || static_cast<size_t>(k) > pts.size())
        throw DomainError("kmeans: k must be in [1, n]");
    KmeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        KmeansResult cand = kmeans_once(pts, k, iters, rng);
        if (cand.wcss < best.wcss) best = std::move(cand);
    }
    return best;
}

ElbowResult elbow_kmeans(const std::vector<Point>& pts, int kmax, int restarts, int iters, Rng& rng) {
    if (pts.empty()) throw DomainError("elbow_kmeans: empty input");
    kmax = std::min<int>(kmax, static_cast<int>(pts.size()));
    if (kmax < 3) throw DomainError("elbow_kmeans: needs kmax >= 3");
    ElbowResult res;
    res.wcss.resize(kmax);
    for (int k = 1; k <= kmax; ++k) res.wcss[k - 1] = kmeans(pts, k, restarts, iters, rng).wcss;

    // All the scatter already gone at k=1 means one degenerate cluster.
    if (res.wcss[0] <= 1e-9) {
        res.k = 1;
        return res;
    }
    int best_k = 2;
    double best_curv = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= kmax - 1; ++k) {
        const double curv = res.wcss[k - 2] - 2.0 * res.wcss[k - 1] + res.wcss[k];
        if (curv > best_curv) {
            best_curv = curv;
            best_k = k;
        }
    }
    res.k = best_k;
    return res;
}

ApacsResult cluster_sites(const std::vector<Point>& pts, const Config& cfg) {
    ApacsOptions opt;
    opt.damping = cfg.clustering.damping;
    opt.max_iters = cfg.clustering.max_iters;
    opt.convergence_window = cfg.clustering.convergence_window;
    if (cfg.clustering.preference == "median") {
        opt.median_preference = true;
    } else {
        opt.median_preference = false;
        try {
            size_t pos = 0;
            opt.preference = std::stod(cfg.clustering.preference, &pos);
            if (pos != cfg.clustering.preference.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("clustering preference must be 'median' or a number");
        }
    }
    return affinity_cluster(pts, opt);
}

}  // namespace aopsim
