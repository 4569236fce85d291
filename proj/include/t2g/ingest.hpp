#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "t2g/date.hpp"
#include "t2g/errors.hpp"

namespace t2g::ingest {

using StationCode = std::int64_t;

// One station-hour NO2 measurement from an ARPAE-format CSV
// (columns CO_STA, ID, DA_INIZ, DA_FIN, VAL, UM).
struct HourlyGroundRecord {
    StationCode station_code = 0;
    std::int64_t sensor_id = 0;
    HourStamp start;
    HourStamp end;   // always start + 1 hour; kept for round-tripping
    double value = 0.0;  // ug/m3, >= 0, finite
    std::string unit;

    bool operator==(const HourlyGroundRecord&) const = default;
};

struct SatelliteDailyRecord {
    StationCode station_code = 0;
    Date date;
    double column_value = 0.0;  // tropospheric NO2 column, mol/m2

    bool operator==(const SatelliteDailyRecord&) const = default;
};

struct StationInfo {
    StationCode station_code = 0;
    double latitude = 0.0;
    double longitude = 0.0;
    std::string name;

    bool operator==(const StationInfo&) const = default;
};

struct StationRegistry {
    std::vector<StationInfo> entries;

    bool contains(StationCode code) const;
};

// ---------------------------------------------------------------------------
// Errors

class ParseError : public Error {
public:
    ParseError(std::string kind, std::size_t line_no, const std::string& message)
        : Error(std::move(kind), message), line_no_(line_no) {}

    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

class MalformedRow : public ParseError {
public:
    MalformedRow(std::size_t line_no, const std::string& message)
        : ParseError("MalformedRow", line_no, message) {}
};

class UnitMismatch : public ParseError {
public:
    UnitMismatch(std::size_t line_no, const std::string& message)
        : ParseError("UnitMismatch", line_no, message) {}
};

class NegativeValue : public ParseError {
public:
    NegativeValue(std::size_t line_no, const std::string& message)
        : ParseError("NegativeValue", line_no, message) {}
};

class DuplicateKey : public ParseError {
public:
    DuplicateKey(std::size_t line_no, const std::string& message)
        : ParseError("DuplicateKey", line_no, message) {}
};

// ---------------------------------------------------------------------------
// Parsing

enum class ParseMode {
    strict,   // first bad row throws
    collect,  // bad rows are reported alongside the good ones
};

struct RowIssue {
    std::string kind;  // MalformedRow | UnitMismatch | NegativeValue | DuplicateKey
    std::size_t line_no = 0;
    std::string message;
};

struct GroundParseResult {
    std::vector<HourlyGroundRecord> records;
    std::vector<RowIssue> issues;  // empty in strict mode (it would have thrown)
};

struct SatelliteParseResult {
    std::vector<SatelliteDailyRecord> records;
    std::vector<RowIssue> issues;
};

// ARPAE-format ground CSV: header row plus 6 comma-separated columns,
// timestamps dd/mm/yyyy HH, VAL accepting '.' or ',' decimals.
GroundParseResult parse_ground_csv(const std::filesystem::path& path,
                                   const std::string& expected_unit,
                                   ParseMode mode = ParseMode::strict);

// Exact inverse of parse_ground_csv for well-formed records.
void write_ground_csv(const std::filesystem::path& path,
                      const std::vector<HourlyGroundRecord>& records);

// Satellite CSV: header `station_code,date,no2_mol_m2`, ISO dates.
SatelliteParseResult parse_satellite_csv(const std::filesystem::path& path,
                                         ParseMode mode = ParseMode::strict);

void write_satellite_csv(const std::filesystem::path& path,
                         const std::vector<SatelliteDailyRecord>& records);

// Registry CSV: header `station_code,lat,lon,name`.
StationRegistry parse_registry_csv(const std::filesystem::path& path);

void write_registry_csv(const std::filesystem::path& path, const StationRegistry& registry);

// ---------------------------------------------------------------------------
// Station completeness filter

struct DateRange {
    Date first;
    Date last;  // inclusive

    int n_days() const { return last - first + 1; }
};

struct StationFilterResult {
    std::vector<StationCode> kept;
    std::vector<StationCode> dropped;
};

// Keeps a station iff its covered-day fraction within `range` is at least
// `min_completeness`. `days_by_station` holds the aggregation-eligible days
// (for ground data: days that survive the daily coverage rule; for satellite
// data: days with a record). When a registry is given, stations missing from
// it are dropped regardless of coverage.
StationFilterResult filter_stations(const std::map<StationCode, std::set<Date>>& days_by_station,
                                    const DateRange& range,
                                    double min_completeness,
                                    const StationRegistry* registry = nullptr);

}  // namespace t2g::ingest
