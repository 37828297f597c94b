#pragma once

#include <array>
#include <vector>

namespace gridopa::calendar {

inline constexpr int kDaysPerYear = 365;
inline constexpr int kMonthsPerYear = 12;

/// Non-leap month lengths, January first.
inline constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30,
                                                   31, 31, 30, 31, 30, 31};

/// Month index (0 = January) for a day-of-year in [0, 365).
constexpr int month_of_day(int day_of_year) {
    int d = day_of_year;
    for (int m = 0; m < kMonthsPerYear; ++m) {
        if (d < kMonthDays[m]) return m;
        d -= kMonthDays[m];
    }
    return kMonthsPerYear - 1;
}

/// Winter months run November through April.
constexpr bool is_winter_month(int month) { return month >= 10 || month <= 3; }

/// Month index per simulated day, wrapping the 365-day year.
inline int month_of_sim_day(long day) {
    return month_of_day(static_cast<int>(day % kDaysPerYear));
}

/// Partition of a year into month lengths; defaults to the calendar,
/// tests use shorter toy partitions.
using MonthPartition = std::vector<int>;

inline MonthPartition calendar_partition() {
    return MonthPartition(kMonthDays.begin(), kMonthDays.end());
}

} // namespace gridopa::calendar
