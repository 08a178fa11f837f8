#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "rmatch/instance.hpp"

namespace rmatch::testing {

inline Rational Q(const char* text) { return Rational::parse(text); }

inline std::vector<Rational> Qs(std::initializer_list<const char*> xs) {
    std::vector<Rational> out;
    for (const char* x : xs) out.push_back(Q(x));
    return out;
}

inline Instance line(std::initializer_list<const char*> servers, std::initializer_list<const char*> requests,
                     const char* t = "3") {
    return Instance::line(Qs(servers), Qs(requests), Q(t));
}

// Small-denominator random line instance; coincident points are common,
// which exercises zero-length edges and ties.
inline Instance random_line(std::mt19937_64& rng, int n, int grid = 16, Rational t = 3) {
    std::uniform_int_distribution<int> pos(0, grid);
    std::vector<Rational> s, r;
    for (int i = 0; i < n; ++i) s.push_back(Rational(pos(rng), 2));
    for (int i = 0; i < n; ++i) r.push_back(Rational(pos(rng), 2));
    return Instance::line(std::move(s), std::move(r), std::move(t));
}

}  // namespace rmatch::testing
