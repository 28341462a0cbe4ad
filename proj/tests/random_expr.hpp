// Random expression sources over the coordinates t, x, y, z.
#pragma once

#include <cstdio>
#include <random>
#include <string>

namespace fixture {

// Every subterm is finite on [-1,1]^4.
inline std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> num(0.1, 3.0);
    const char* vars[] = {"t", "x", "y", "z"};
    char buf[64];
    switch (pick(rng)) {
        case 0: std::snprintf(buf, sizeof buf, "%.6g", num(rng)); return buf;
        case 1: return vars[rng() % 4];
        case 2: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
        case 4: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
        case 5: return "(" + random_expr(rng, depth - 1) + ")/(2+sin(" + random_expr(rng, depth - 1) + "))";
        case 6: return "-" + random_expr(rng, depth - 1);
        case 7: return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
        case 8: return "exp(" + random_expr(rng, depth - 1) + "/10)";
        default: return "sqrt(1.5+cos(" + random_expr(rng, depth - 1) + "))^1.5";
    }
}

}  // namespace fixture
