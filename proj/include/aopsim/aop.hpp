#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aopsim/rng.hpp"

namespace aopsim {

enum class SamplingKind { zero_wait, random, uniform, beta };

SamplingKind sampling_kind_from_name(const std::string& name);
const char* sampling_kind_name(SamplingKind k);

// Post-delivery idle-time sampler. Draws are confined to [0, 1] s.
struct SamplingPolicy {
    SamplingKind kind = SamplingKind::zero_wait;
    double beta_a = 2.0;
    double beta_b = 5.0;

    double draw(Rng& rng) const;
};

// First and second moments of the idle draw, for closed-form scoring.
struct WaitMoments {
    double mean = 0.0;
    double mean_sq = 0.0;
};

WaitMoments wait_moments(const SamplingPolicy& p);

// Per-vehicle update history. Record i samples at K_i, delivers at
// M_i = K_i + L_i, and idles N_i before the next sample: K_{i+1} = M_i + N_i.
class UpdateTimeline {
  public:
    explicit UpdateTimeline(double first_sample_s = 0.0) : next_k_(first_sample_s) {}

    // Appends a record with processing time L and a policy-drawn idle N.
    void record(double delay_s, const SamplingPolicy& policy, Rng& rng);
    void record_fixed(double delay_s, double idle_s);

    int size() const { return static_cast<int>(l_.size()); }
    double K(int i) const { return k_.at(i); }
    double L(int i) const { return l_.at(i); }
    double N(int i) const { return n_.at(i); }
    double M(int i) const { return k_.at(i) + l_.at(i); }
    double next_sample_at() const { return next_k_; }

    // Instantaneous age t - u(t), defined from the first delivery onwards.
    double age_at(double t) const;

    // Ratio-form average age over the recorded horizon (needs >= 2 records).
    double average_aop() const;

    // Area contributions of record i (i >= 1): the inter-delivery rectangle
    // carried by the previous cycle and the fresh triangle.
    double q1(int i) const;
    double q2(int i) const;

  private:
    std::vector<double> k_, l_, n_;
    double next_k_ = 0.0;
};

// Area pieces for one delivery step.
void age_areas(double l_prev, double n_prev, double l_i, double n_i, double* q1, double* q2);

// Closed-form per-cycle area score for constant processing time L and idle
// moments EN, EN2: E[Q1 + Q2] = 1.5 L^2 + 2 L EN + 0.5 EN2.
double cycle_q_score(double delay_s, const WaitMoments& m);

// Simulates `cycles` update cycles per replication under the policy; the
// model maps (replication, cycle, rng) to that cycle's processing time L.
// Returns the ratio-of-expectations estimate E[sum Q]/E[sum (L+N)] pooled
// over replications.
using CycleModel = std::function<double(int rep, int cycle, Rng& rng)>;

double policy_average_aop(const SamplingPolicy& policy, int replications, int cycles,
                          std::uint64_t seed, const CycleModel& model);

}  // namespace aopsim
