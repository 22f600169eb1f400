#include "aopsim/aop.hpp"

#include <algorithm>

#include "aopsim/common.hpp"

namespace aopsim {

SamplingKind sampling_kind_from_name(const std::string& name) {
    if (name == "zero_wait") return SamplingKind::zero_wait;
    if (name == "random") return SamplingKind::random;
    if (name == "uniform") return SamplingKind::uniform;
    if (name == "beta") return SamplingKind::beta;
    throw ConfigError("unknown sampling kind '" + name +
                      "'; valid kinds: zero_wait, random, uniform, beta");
}

const char* sampling_kind_name(SamplingKind k) {
    switch (k) {
        case SamplingKind::zero_wait: return "zero_wait";
        case SamplingKind::random: return "random";
        case SamplingKind::uniform: return "uniform";
        case SamplingKind::beta: return "beta";
    }
    return "?";
}

double SamplingPolicy::draw(Rng& rng) const {
    switch (kind) {
        case SamplingKind::zero_wait:
            return 0.0;
        case SamplingKind::random:
        case SamplingKind::uniform:
            // Both named draws are uniform on the unit interval; they differ
            // only in which stream consumes them.
            return rng.uniform();
        case SamplingKind::beta:
            return rng.beta(beta_a, beta_b);
    }
    throw InternalError("SamplingPolicy::draw: bad kind");
}

WaitMoments wait_moments(const SamplingPolicy& p) {
    switch (p.kind) {
        case SamplingKind::zero_wait:
            return {0.0, 0.0};
        case SamplingKind::random:
        case SamplingKind::uniform:
            return {0.5, 1.0 / 3.0};
        case SamplingKind::beta: {
            const double a = p.beta_a, b = p.beta_b;
            const double mean = a / (a + b);
            const double mean_sq = a * (a + 1.0) / ((a + b) * (a + b + 1.0));
            return {mean, mean_sq};
        }
    }
    throw InternalError("wait_moments: bad kind");
}

void UpdateTimeline::record_fixed(double delay_s, double idle_s) {
    if (delay_s <= 0.0) throw DomainError("record_update: processing time must be positive");
    if (idle_s < 0.0) throw DomainError("record_update: idle time must be nonnegative");
    k_.push_back(next_k_);
    l_.push_back(delay_s);
    n_.push_back(idle_s);
    next_k_ = k_.back() + delay_s + idle_s;
}

void UpdateTimeline::record(double delay_s, const SamplingPolicy& policy, Rng& rng) {
    record_fixed(delay_s, policy.draw(rng));
}

double UpdateTimeline::age_at(double t) const {
    if (l_.empty() || t < M(0))
        throw DomainError("instantaneous age undefined before the first delivery");
    // Freshest delivered sample: the largest K_i whose M_i <= t.
    double u = K(0);
    for (int i = 1; i < size(); ++i) {
        if (M(i) <= t) u = K(i);
    }
    return t - u;
}

double UpdateTimeline::q1(int i) const {
    if (i < 1 || i >= size()) throw DomainError("q1: record index needs a predecessor");
    return (l_[i - 1] + n_[i - 1]) * l_[i];
}

double UpdateTimeline::q2(int i) const {
    if (i < 1 || i >= size()) throw DomainError("q2: record index needs a predecessor");
    const double s = l_[i] + n_[i];
    return 0.5 * s * s;
}

double UpdateTimeline::average_aop() const {
    if (size() < 2) throw DomainError("average_aop: needs at least 2 records");
    double num = 0.0, den = 0.0;
    for (int i = 1; i < size(); ++i) {
        num += q1(i) + q2(i);
        den += l_[i] + n_[i];
    }
    return num / den;
}

void age_areas(double l_prev, double n_prev, double l_i, double n_i, double* q1, double* q2) {
    if (l_prev < 0.0 || n_prev < 0.0 || l_i < 0.0 || n_i < 0.0)
        throw DomainError("age_areas: negative inputs");
    *q1 = (l_prev + n_prev) * l_i;
    const double s = l_i + n_i;
    *q2 = 0.5 * s * s;
}

double cycle_q_score(double delay_s, const WaitMoments& m) {
    if (delay_s <= 0.0) throw DomainError("cycle_q_score: processing time must be positive");
    return 1.5 * delay_s * delay_s + 2.0 * delay_s * m.mean + 0.5 * m.mean_sq;
}

double policy_average_aop(const SamplingPolicy& policy, int replications, int cycles,
                          std::uint64_t seed, const CycleModel& model) {
    if (cycles < 10) throw DomainError("policy_average_aop: horizon must be at least 10 cycles");
    if (replications < 1) throw DomainError("policy_average_aop: need at least one replication");
    double num = 0.0, den = 0.0;
    for (int rep = 0; rep < replications; ++rep) {
        Rng rng = Rng::substream(seed, "aop/rep" + std::to_string(rep));
        UpdateTimeline tl;
        for (int i = 0; i < cycles; ++i) tl.record(model(rep, i, rng), policy, rng);
        for (int i = 1; i < tl.size(); ++i) {
            num += tl.q1(i) + tl.q2(i);
            den += tl.L(i) + tl.N(i);
        }
    }
    if (den <= 0.0) throw InternalError("policy_average_aop: degenerate horizon");
    return num / den;
}

}  // namespace aopsim
