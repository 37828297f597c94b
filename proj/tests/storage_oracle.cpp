#include "storage_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gridopa::test {
namespace {

struct MonthData {
    std::vector<long> cum; // cumulative production within the month, deci-units
    long total = 0;
    int days = 0;
};

// Highest level (deci-units) keeping storage non-negative through the month
// from start storage r.
long max_level(const MonthData& m, long r) {
    long x = std::numeric_limits<long>::max();
    for (int j = 1; j <= m.days; ++j) x = std::min(x, (r + m.cum[j - 1]) / j);
    return x;
}

// Peak storage within the month (start included) for level x.
long month_peak(const MonthData& m, long r, long x) {
    long peak = r;
    for (int j = 1; j <= m.days; ++j) peak = std::max(peak, r + m.cum[j - 1] - j * x);
    return peak;
}

} // namespace

StoragePlanReference storage_plan_reference(const std::vector<double>& p_in,
                                            const std::vector<int>& months) {
    std::vector<MonthData> data;
    std::size_t cursor = 0;
    long total = 0;
    for (int len : months) {
        MonthData m;
        m.days = len;
        long acc = 0;
        for (int d = 0; d < len; ++d) {
            const long units = std::lround(p_in.at(cursor++) * 10.0);
            if (std::abs(units * 0.1 - p_in[cursor - 1]) > 1e-9)
                throw std::invalid_argument("oracle production must sit on the 0.1 lattice");
            acc += units;
            m.cum.push_back(acc);
        }
        m.total = acc;
        total += acc;
        data.push_back(std::move(m));
    }
    if (cursor != p_in.size()) throw std::invalid_argument("partition does not cover the series");

    const int n_months = static_cast<int>(months.size());
    const long max_storage = total; // storage never exceeds cumulative production

    // Stage 1: f[m][r] = max deliverable from month m onward.
    std::vector<std::vector<long>> f(n_months + 1, std::vector<long>(max_storage + 1, -1));
    std::fill(f[n_months].begin(), f[n_months].end(), 0);
    for (int m = n_months - 1; m >= 0; --m) {
        for (long r = 0; r <= max_storage; ++r) {
            const long xmax = std::min(max_level(data[m], r),
                                       (r + data[m].total) / std::max(1, data[m].days));
            long best = -1;
            for (long x = 0; x <= xmax; ++x) {
                const long r_next = r + data[m].total - static_cast<long>(data[m].days) * x;
                if (r_next < 0 || r_next > max_storage) continue;
                best = std::max(best, static_cast<long>(data[m].days) * x + f[m + 1][r_next]);
            }
            f[m][r] = best;
        }
    }

    // Stage 2: among max-delivery choices, minimize the storage peak.
    std::vector<std::vector<long>> g(n_months + 1,
                                     std::vector<long>(max_storage + 1,
                                                       std::numeric_limits<long>::max()));
    std::fill(g[n_months].begin(), g[n_months].end(), 0);
    for (int m = n_months - 1; m >= 0; --m) {
        for (long r = 0; r <= max_storage; ++r) {
            if (f[m][r] < 0) continue;
            const long xmax = std::min(max_level(data[m], r),
                                       (r + data[m].total) / std::max(1, data[m].days));
            long best = std::numeric_limits<long>::max();
            for (long x = 0; x <= xmax; ++x) {
                const long r_next = r + data[m].total - static_cast<long>(data[m].days) * x;
                if (r_next < 0 || r_next > max_storage) continue;
                if (static_cast<long>(data[m].days) * x + f[m + 1][r_next] != f[m][r]) continue;
                if (g[m + 1][r_next] == std::numeric_limits<long>::max()) continue;
                best = std::min(best, std::max(month_peak(data[m], r, x), g[m + 1][r_next]));
            }
            g[m][r] = best;
        }
    }

    StoragePlanReference ref;
    ref.delivered = 0.1 * static_cast<double>(f[0][0]);
    ref.storage_peak = 0.1 * static_cast<double>(g[0][0]);
    return ref;
}

} // namespace gridopa::test
