#pragma once

#include <vector>

#include "aopsim/config.hpp"
#include "aopsim/geometry.hpp"
#include "aopsim/rng.hpp"

namespace aopsim {

using Matrix = std::vector<std::vector<double>>;

// Pairwise similarity: negative squared euclidean distance off the diagonal,
// the exemplar preference on it.
Matrix similarity_matrix(const std::vector<Point>& pts, double preference);

// Median of the off-diagonal similarities; the default preference.
double median_offdiag(const Matrix& s);

// One damped message-passing sweep. Responsibilities are refreshed from the
// previous availabilities, then availabilities from the fresh
// responsibilities; both blend as new = damping*old + (1-damping)*computed.
void apacs_sweep(const Matrix& s, Matrix& resp, Matrix& avail, double damping);

struct ApacsOptions {
    double damping = 0.5;
    bool median_preference = true;
    double preference = 0.0;  // used when median_preference is false
    int max_iters = 1000;
    int convergence_window = 15;
};

struct ApacsResult {
    std::vector<int> assignment;  // point -> exemplar point index
    std::vector<int> exemplars;   // ascending exemplar indices
    std::vector<int> labels;      // compact 0..k-1, ordered by exemplar index
    bool converged = false;
    int iters = 0;
};

ApacsResult affinity_cluster(const std::vector<Point>& pts, const ApacsOptions& opt);

// Clustering objective: sum of each non-exemplar's similarity to its nearest
// exemplar plus the exemplars' preferences.
double net_similarity(const Matrix& s, const std::vector<int>& exemplars);

struct OracleResult {
    double best = 0.0;
    std::vector<int> exemplars;
};

// Exhaustive search over non-empty exemplar subsets; refuses more than 15
// points.
OracleResult exemplar_oracle(const Matrix& s);

struct KmeansResult {
    std::vector<int> labels;
    std::vector<Point> centers;
    double wcss = 0.0;
};

KmeansResult kmeans(const std::vector<Point>& pts, int k, int restarts, int iters, Rng& rng);

struct ElbowResult {
    int k = 1;
    std::vector<double> wcss;  // wcss[i] for k = i+1
};

// Elbow selection: the k (within 2..kmax-1) maximising the second difference
// of the within-cluster scatter curve.
ElbowResult elbow_kmeans(const std::vector<Point>& pts, int kmax, int restarts, int iters, Rng& rng);

// Full site-clustering step used by the pipeline: affinity clustering over
// site positions with options from the config.
ApacsResult cluster_sites(const std::vector<Point>& pts, const Config& cfg);

}  // namespace aopsim
