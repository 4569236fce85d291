#include "t2g/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace t2g {

namespace {

// Days from civil (Howard Hinnant's algorithm), epoch 1970-01-01.
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468);
}

void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yy = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = yy + (m <= 2);
}

int parse_int_field(const std::string& s, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw std::invalid_argument("bad numeric field in date: '" + s + "'");
    return value;
}

}  // namespace

bool is_valid_ymd(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1) return false;
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dmax = mdays[month - 1];
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) dmax = 29;
    return day <= dmax;
}

Date Date::from_ymd(int year, int month, int day) {
    if (!is_valid_ymd(year, month, day))
        throw std::invalid_argument("invalid calendar date");
    return Date{days_from_civil(year, month, day)};
}

Date Date::parse_iso(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw std::invalid_argument("expected yyyy-mm-dd, got '" + s + "'");
    return from_ymd(parse_int_field(s, 0, 4), parse_int_field(s, 5, 2), parse_int_field(s, 8, 2));
}

Date Date::parse_dmy(const std::string& s) {
    if (s.size() != 10 || s[2] != '/' || s[5] != '/')
        throw std::invalid_argument("expected dd/mm/yyyy, got '" + s + "'");
    return from_ymd(parse_int_field(s, 6, 4), parse_int_field(s, 3, 2), parse_int_field(s, 0, 2));
}

void Date::to_ymd(int& year, int& month, int& day) const {
    civil_from_days(serial, year, month, day);
}

std::string Date::iso() const {
    int y, m, d;
    to_ymd(y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

std::string Date::dmy() const {
    int y, m, d;
    to_ymd(y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d, m, y);
    return buf;
}

}  // namespace t2g
