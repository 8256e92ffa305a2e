#ifndef BYRD_ATTACK_HPP
#define BYRD_ATTACK_HPP

#include "byrd/model.hpp"
#include "byrd/rng.hpp"

#include <vector>

namespace byrd {

// Byzantine upload strategy. `mu` is the attack strength: per-coordinate
// variance for RandomNoise, the scaling factor for SignFlip.
struct AttackKind {
    enum class Kind { NoAttack, RandomNoise, SignFlip, ZeroGradient };
    Kind kind = Kind::NoAttack;
    double mu = 0.0;
    bool operator==(const AttackKind&) const = default;
};

GradVector honest_mean(const std::vector<GradVector>& honest);

// `count` draws from N(honest_mean, mu * I).
std::vector<GradVector> craft_random_noise(const std::vector<GradVector>& honest,
                                           double mu, int count, RngStream& rng);

// Every crafted upload is exactly mu * honest_mean.
std::vector<GradVector> craft_sign_flip(const std::vector<GradVector>& honest,
                                        double mu, int count);

// Crafted uploads sum to the negated honest sum, so the plain mean of all
// honest + crafted uploads is the zero vector. Needs count >= 1.
std::vector<GradVector> craft_zero_gradient(const std::vector<GradVector>& honest,
                                            int count);

// Builds the full upload list: honest gradients in slots 1..H followed by
// `byz_count` crafted vectors. NoAttack requires byz_count == 0 (all
// workers behave honestly in that configuration).
std::vector<GradVector> apply_attack(const AttackKind& kind,
                                     const std::vector<GradVector>& honest,
                                     int byz_count, RngStream& rng);

const char* attack_name(AttackKind::Kind k);

} // namespace byrd

#endif
