#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace t2g {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// Cheap value type: totally ordered, hashable, usable as a map key.
struct Date {
    std::int32_t serial = 0;

    static Date from_ymd(int year, int month, int day);
    static Date parse_iso(const std::string& s);    // yyyy-mm-dd
    static Date parse_dmy(const std::string& s);    // dd/mm/yyyy

    void to_ymd(int& year, int& month, int& day) const;
    std::string iso() const;                        // yyyy-mm-dd
    std::string dmy() const;                        // dd/mm/yyyy

    Date operator+(int days) const { return Date{serial + days}; }
    Date operator-(int days) const { return Date{serial - days}; }
    int operator-(Date other) const { return serial - other.serial; }
    auto operator<=>(const Date&) const = default;
};

// Hour-resolution timestamp, timezone-naive civil time.
struct HourStamp {
    Date date;
    int hour = 0;  // 0..23

    std::int64_t serial_hours() const {
        return static_cast<std::int64_t>(date.serial) * 24 + hour;
    }
    auto operator<=>(const HourStamp&) const = default;
};

bool is_valid_ymd(int year, int month, int day);

}  // namespace t2g
