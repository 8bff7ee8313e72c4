#pragma once

// Brute-force window maxima evaluated with window_sum only. They share no
// code with the run enumeration or the sweep and serve as reference values.

#include <algorithm>
#include <complex>
#include <vector>

#include "ehdelta/delta.hpp"

namespace ehd::oracle {

inline constexpr double kEps = 1e-9;

/// sup |window_sum(u, v)| over u in {log d - eps, log d} and v in
/// {log d' - u + eps} (d' >= d) together with v = V, keeping v <= V.
inline double delta_sup(const DivisorProfile& p, double V) {
    const auto& logs = p.logs();
    double best = 0.0;
    for (std::size_t k = 0; k < logs.size(); ++k) {
        for (double u : {logs[k] - kEps, logs[k]}) {
            best = std::max(best, std::abs(window_sum(p, u, V)));
            for (std::size_t j = k; j < logs.size(); ++j) {
                const double v = logs[j] - u + kEps;
                if (v > V) break;
                best = std::max(best, std::abs(window_sum(p, u, v)));
            }
        }
    }
    return best;
}

/// sup over u of |window_sum(u, v)|, sampling every event point and the
/// midpoint between consecutive events.
inline double delta_star(const DivisorProfile& p, double v) {
    std::vector<double> events;
    for (double l : p.logs()) {
        events.push_back(l);
        events.push_back(l - v);
    }
    std::sort(events.begin(), events.end());
    double best = 0.0;
    for (std::size_t k = 0; k < events.size(); ++k) {
        best = std::max(best, std::abs(window_sum(p, events[k], v)));
        if (k + 1 < events.size())
            best = std::max(best, std::abs(window_sum(p, 0.5 * (events[k] + events[k + 1]), v)));
    }
    return best;
}

}  // namespace ehd::oracle
