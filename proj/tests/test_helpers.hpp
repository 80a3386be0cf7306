#pragma once

#include <memory>
#include <set>
#include <vector>

#include "hyperlip/augtree.hpp"

namespace hyperlip::testing {

// Example: {x/5, (4-x)/5, (x+4)/5} on the line.
inline std::shared_ptr<const SimilitudeSystem> five_map_system() {
    RatMat id{{Rational(1)}};
    RatMat refl{{Rational(-1)}};
    std::vector<std::pair<RatMat, RatVec>> maps{
        {id, {Rational(0)}},
        {refl, {Rational(4, 5)}},
        {id, {Rational(4, 5)}},
    };
    return std::make_shared<SimilitudeSystem>(
        SimilitudeSystem::create(1, Rational(1, 5), std::move(maps)));
}

// Middle-third Cantor system {x/3, (x+2)/3}.
inline std::shared_ptr<const SimilitudeSystem> cantor3() {
    RatMat id{{Rational(1)}};
    std::vector<std::pair<RatMat, RatVec>> maps{
        {id, {Rational(0)}},
        {id, {Rational(2, 3)}},
    };
    return std::make_shared<SimilitudeSystem>(
        SimilitudeSystem::create(1, Rational(1, 3), std::move(maps)));
}

// Planar pair with r = 2/5 and touching diagonals (c_i = 0).
inline std::pair<std::shared_ptr<const SimilitudeSystem>,
                 std::shared_ptr<const SimilitudeSystem>>
planar_pair() {
    RatMat id = mat_identity_q(2);
    Rational r(2, 5);
    Rational c = Rational(1) / r - 1; // r^{-1} - 1 = 3/2
    auto mk = [&](RatVec d3) {
        std::vector<std::pair<RatMat, RatVec>> maps{
            {id, {Rational(0), Rational(0)}},
            {id, {r * c, r * c}},
            {id, {r * d3[0], r * d3[1]}},
        };
        // S_j(x) = r(x + d_j) = r x + r d_j
        return std::make_shared<SimilitudeSystem>(
            SimilitudeSystem::create(2, r, std::move(maps)));
    };
    auto k1 = mk({Rational(0), c});
    auto k2 = mk({c, Rational(0)});
    return {k1, k2};
}

inline std::vector<std::vector<std::string>> component_names(const LeveledGraph& g, int level) {
    std::vector<std::vector<std::string>> out;
    for (const auto& comp : components(g, level)) {
        std::vector<std::string> names;
        for (int v : comp) names.push_back(g.levels[level].names[v]);
        out.push_back(std::move(names));
    }
    return out;
}

} // namespace hyperlip::testing
