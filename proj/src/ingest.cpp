#include "t2g/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "t2g/csv.hpp"

namespace t2g::ingest {

namespace {

constexpr const char* kGroundHeader = "CO_STA,ID,DA_INIZ,DA_FIN,VAL,UM";
constexpr const char* kSatelliteHeader = "station_code,date,no2_mol_m2";
constexpr const char* kRegistryHeader = "station_code,lat,lon,name";

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file '" + path.string() + "'");
    return in;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// An unquoted decimal comma in a numeric column splits it in two. When a row
// has exactly one extra field and the two halves around `value_index` are
// plain digit runs, rejoin them as integer.fraction.
void merge_decimal_comma(std::vector<std::string>& fields, std::size_t expected,
                         std::size_t value_index) {
    if (fields.size() != expected + 1) return;
    if (value_index + 1 >= fields.size()) return;
    if (!all_digits(fields[value_index]) || !all_digits(fields[value_index + 1])) return;
    fields[value_index] += "." + fields[value_index + 1];
    fields.erase(fields.begin() + static_cast<std::ptrdiff_t>(value_index) + 1);
}

// Timestamps come as `dd/mm/yyyy HH`; minutes are fixed to 00.
HourStamp parse_hour_stamp(const std::string& s) {
    std::string t = trim(s);
    if (t.size() != 13 || t[10] != ' ')
        throw std::invalid_argument("expected 'dd/mm/yyyy HH', got '" + s + "'");
    HourStamp stamp;
    stamp.date = Date::parse_dmy(t.substr(0, 10));
    auto hour = parse_integer(t.substr(11, 2));
    if (!hour || *hour < 0 || *hour > 23)
        throw std::invalid_argument("hour out of range in '" + s + "'");
    stamp.hour = static_cast<int>(*hour);
    return stamp;
}

template <typename ExcT>
void report(ParseMode mode, std::vector<RowIssue>& issues, const ExcT& exc) {
    if (mode == ParseMode::strict) throw exc;
    issues.push_back({exc.kind(), exc.line_no(), exc.what()});
}

void check_header(std::ifstream& in, const std::filesystem::path& path, const char* expected) {
    std::string line;
    if (!std::getline(in, line))
        throw MalformedRow(1, "empty file, expected header in '" + path.string() + "'");
    // normalize: drop spaces and compare case-insensitively
    auto canon = [](std::string s) {
        std::string out;
        for (char c : s)
            if (c != ' ' && c != '\t' && c != '\r')
                out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    if (canon(line) != canon(expected))
        throw MalformedRow(1, "unexpected header '" + trim(line) + "', expected '" + expected + "'");
}

}  // namespace

bool StationRegistry::contains(StationCode code) const {
    return std::any_of(entries.begin(), entries.end(),
                       [code](const StationInfo& e) { return e.station_code == code; });
}

GroundParseResult parse_ground_csv(const std::filesystem::path& path,
                                   const std::string& expected_unit, ParseMode mode) {
    std::ifstream in = open_or_throw(path);
    check_header(in, path, kGroundHeader);

    GroundParseResult result;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        merge_decimal_comma(fields, 6, 4);
        if (fields.size() != 6) {
            report(mode, result.issues,
                   MalformedRow(line_no, "expected 6 fields, got " + std::to_string(fields.size())));
            continue;
        }
        HourlyGroundRecord rec;
        auto station = parse_integer(fields[0]);
        auto sensor = parse_integer(fields[1]);
        if (!station || !sensor) {
            report(mode, result.issues, MalformedRow(line_no, "bad station or sensor id"));
            continue;
        }
        rec.station_code = *station;
        rec.sensor_id = *sensor;
        try {
            rec.start = parse_hour_stamp(fields[2]);
            rec.end = parse_hour_stamp(fields[3]);
        } catch (const std::invalid_argument& e) {
            report(mode, result.issues, MalformedRow(line_no, e.what()));
            continue;
        }
        if (rec.end.serial_hours() != rec.start.serial_hours() + 1) {
            report(mode, result.issues,
                   MalformedRow(line_no, "end timestamp is not start + 1 hour"));
            continue;
        }
        auto value = parse_decimal(fields[4]);
        if (!value) {
            report(mode, result.issues, MalformedRow(line_no, "unparseable value '" + fields[4] + "'"));
            continue;
        }
        if (*value < 0.0) {
            report(mode, result.issues,
                   NegativeValue(line_no, "negative concentration " + fields[4]));
            continue;
        }
        rec.value = *value;
        rec.unit = fields[5];
        if (rec.unit != expected_unit) {
            report(mode, result.issues,
                   UnitMismatch(line_no, "unit '" + rec.unit + "' != expected '" + expected_unit + "'"));
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

void write_ground_csv(const std::filesystem::path& path,
                      const std::vector<HourlyGroundRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write file '" + path.string() + "'");
    out << kGroundHeader << "\n";
    for (const auto& rec : records) {
        char hour_buf[8];
        std::snprintf(hour_buf, sizeof hour_buf, "%02d", rec.start.hour);
        out << rec.station_code << ',' << rec.sensor_id << ',' << rec.start.date.dmy() << ' '
            << hour_buf << ',';
        std::snprintf(hour_buf, sizeof hour_buf, "%02d", rec.end.hour);
        out << rec.end.date.dmy() << ' ' << hour_buf << ',' << format_double(rec.value) << ','
            << rec.unit << "\n";
    }
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

SatelliteParseResult parse_satellite_csv(const std::filesystem::path& path, ParseMode mode) {
    std::ifstream in = open_or_throw(path);
    check_header(in, path, kSatelliteHeader);

    SatelliteParseResult result;
    std::set<std::pair<StationCode, Date>> seen;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        merge_decimal_comma(fields, 3, 2);
        if (fields.size() != 3) {
            report(mode, result.issues,
                   MalformedRow(line_no, "expected 3 fields, got " + std::to_string(fields.size())));
            continue;
        }
        auto station = parse_integer(fields[0]);
        if (!station) {
            report(mode, result.issues, MalformedRow(line_no, "bad station code"));
            continue;
        }
        Date date;
        try {
            date = Date::parse_iso(fields[1]);
        } catch (const std::invalid_argument& e) {
            report(mode, result.issues, MalformedRow(line_no, e.what()));
            continue;
        }
        auto value = parse_decimal(fields[2]);
        if (!value) {
            report(mode, result.issues, MalformedRow(line_no, "unparseable value '" + fields[2] + "'"));
            continue;
        }
        if (*value < 0.0) {
            report(mode, result.issues,
                   NegativeValue(line_no, "negative column value " + fields[2]));
            continue;
        }
        if (!seen.insert({*station, date}).second) {
            report(mode, result.issues,
                   DuplicateKey(line_no, "duplicate (station " + std::to_string(*station) +
                                             ", " + date.iso() + ")"));
            continue;
        }
        result.records.push_back({*station, date, *value});
    }
    return result;
}

void write_satellite_csv(const std::filesystem::path& path,
                         const std::vector<SatelliteDailyRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write file '" + path.string() + "'");
    out << kSatelliteHeader << "\n";
    for (const auto& rec : records)
        out << rec.station_code << ',' << rec.date.iso() << ',' << format_double(rec.column_value)
            << "\n";
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

StationRegistry parse_registry_csv(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    check_header(in, path, kRegistryHeader);

    StationRegistry registry;
    std::set<StationCode> seen;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw MalformedRow(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        auto station = parse_integer(fields[0]);
        auto lat = parse_decimal(fields[1]);
        auto lon = parse_decimal(fields[2]);
        if (!station || !lat || !lon)
            throw MalformedRow(line_no, "bad registry row");
        if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0)
            throw MalformedRow(line_no, "coordinates out of range");
        if (!seen.insert(*station).second)
            throw DuplicateKey(line_no, "duplicate station code " + std::to_string(*station));
        registry.entries.push_back({*station, *lat, *lon, fields[3]});
    }
    return registry;
}

void write_registry_csv(const std::filesystem::path& path, const StationRegistry& registry) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write file '" + path.string() + "'");
    out << kRegistryHeader << "\n";
    for (const auto& e : registry.entries)
        out << e.station_code << ',' << format_double(e.latitude) << ','
            << format_double(e.longitude) << ',' << e.name << "\n";
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

StationFilterResult filter_stations(const std::map<StationCode, std::set<Date>>& days_by_station,
                                    const DateRange& range, double min_completeness,
                                    const StationRegistry* registry) {
    if (!(min_completeness > 0.0 && min_completeness <= 1.0))
        throw Error("InvalidSpec", "min_completeness must be in (0, 1]");
    if (range.last < range.first)
        throw Error("InvalidSpec", "date range end precedes start");

    StationFilterResult result;
    const double total_days = range.n_days();
    for (const auto& [station, days] : days_by_station) {
        if (registry && !registry->contains(station)) {
            result.dropped.push_back(station);
            continue;
        }
        std::size_t covered = 0;
        for (const Date& d : days)
            if (d >= range.first && d <= range.last) ++covered;
        const double completeness = static_cast<double>(covered) / total_days;
        if (completeness >= min_completeness)
            result.kept.push_back(station);
        else
            result.dropped.push_back(station);
    }
    return result;
}

}  // namespace t2g::ingest
