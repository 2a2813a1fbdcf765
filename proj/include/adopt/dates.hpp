#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace adopt {

// Calendar day stored as a serial count of days since 1970-01-01.
struct Date {
    std::int64_t serial = 0;

    auto operator<=>(const Date&) const = default;

    Date next_day() const { return Date{serial + 1}; }

    // Parses strict ISO-8601 YYYY-MM-DD.
    static Date parse(const std::string& s);
    std::string to_string() const;
};

inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

inline Date Date::parse(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw std::invalid_argument("bad date '" + s + "', expected YYYY-MM-DD");
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("bad date '" + s + "', expected YYYY-MM-DD");
    const int y = std::stoi(s.substr(0, 4));
    const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
    const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad date '" + s + "'");
    return Date{days_from_civil(y, m, d)};
}

inline std::string Date::to_string() const {
    int y;
    unsigned m, d;
    civil_from_days(serial, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

// Elapsed time between consecutive daily observations, in years.
inline constexpr double kDaysPerYear = 365.0;
inline constexpr double kDt = 1.0 / kDaysPerYear;

}  // namespace adopt
