#pragma once

#include <cstddef>
#include <vector>

namespace noisyauth {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Minimizes c.x subject to A x = b, x >= 0 with a dense two-phase
// primal simplex (Bland's rule). Intended for the small L1-projection
// programs in this project; rows/cols are at most a few dozen.
// Requires b >= 0 (negate rows beforehand if needed).
LpResult simplex_solve(const std::vector<std::vector<double>>& a,
                       const std::vector<double>& b,
                       const std::vector<double>& c);

}  // namespace noisyauth
