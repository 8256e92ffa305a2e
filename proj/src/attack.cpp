#include "byrd/attack.hpp"

#include <cmath>
#include <stdexcept>

namespace byrd {

GradVector honest_mean(const std::vector<GradVector>& honest) {
    if (honest.empty()) throw std::invalid_argument("no honest gradients");
    const std::size_t d = honest[0].size();
    GradVector m(d, 0.0);
    for (const auto& g : honest) {
        if (g.size() != d) throw std::invalid_argument("gradient dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) m[i] += g[i];
    }
    const double n = static_cast<double>(honest.size());
    for (double& v : m) v /= n;
    return m;
}

std::vector<GradVector> craft_random_noise(const std::vector<GradVector>& honest,
                                           double mu, int count, RngStream& rng) {
    if (mu < 0.0) throw std::invalid_argument("noise strength mu must be >= 0");
    if (count < 0) throw std::invalid_argument("count must be >= 0");
    const GradVector m = honest_mean(honest);
    const double sd = std::sqrt(mu);
    std::vector<GradVector> out(count);
    for (auto& g : out) {
        g.resize(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) g[i] = m[i] + sd * rng.next_normal();
    }
    return out;
}

std::vector<GradVector> craft_sign_flip(const std::vector<GradVector>& honest,
                                        double mu, int count) {
    if (count < 0) throw std::invalid_argument("count must be >= 0");
    GradVector m = honest_mean(honest);
    for (double& v : m) v *= mu;
    return std::vector<GradVector>(count, m);
}

std::vector<GradVector> craft_zero_gradient(const std::vector<GradVector>& honest,
                                            int count) {
    if (count < 1) throw std::invalid_argument("zero-gradient attack needs count >= 1");
    if (honest.empty()) throw std::invalid_argument("no honest gradients");
    const std::size_t d = honest[0].size();
    GradVector g(d, 0.0);
    for (const auto& h : honest) {
        if (h.size() != d) throw std::invalid_argument("gradient dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) g[i] += h[i];
    }
    for (double& v : g) v = -v / static_cast<double>(count);
    return std::vector<GradVector>(count, g);
}

std::vector<GradVector> apply_attack(const AttackKind& kind,
                                     const std::vector<GradVector>& honest,
                                     int byz_count, RngStream& rng) {
    if (byz_count < 0) throw std::invalid_argument("byz_count must be >= 0");
    std::vector<GradVector> uploads = honest;
    std::vector<GradVector> crafted;
    switch (kind.kind) {
    case AttackKind::Kind::NoAttack:
        if (byz_count != 0)
            throw std::invalid_argument("NoAttack runs treat every worker as honest");
        break;
    case AttackKind::Kind::RandomNoise:
        crafted = craft_random_noise(honest, kind.mu, byz_count, rng);
        break;
    case AttackKind::Kind::SignFlip:
        crafted = craft_sign_flip(honest, kind.mu, byz_count);
        break;
    case AttackKind::Kind::ZeroGradient:
        crafted = craft_zero_gradient(honest, byz_count);
        break;
    }
    for (auto& g : crafted) uploads.push_back(std::move(g));
    return uploads;
}

const char* attack_name(AttackKind::Kind k) {
    switch (k) {
    case AttackKind::Kind::NoAttack:
        return "none";
    case AttackKind::Kind::RandomNoise:
        return "random_noise";
    case AttackKind::Kind::SignFlip:
        return "sign_flip";
    case AttackKind::Kind::ZeroGradient:
        return "zero_gradient";
    }
    return "?";
}

} // namespace byrd
