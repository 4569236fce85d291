#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "t2g/date.hpp"
#include "t2g/errors.hpp"
#include "t2g/ingest.hpp"

namespace t2g::prep {

using ingest::StationCode;

enum class SeriesKind {
    ground_ugm3,
    satellite_molm2,
    satellite_converted_ugm3,
};

const char* unit_for(SeriesKind kind);

// Per-station, per-day values. Dates strictly increasing.
struct DailySeries {
    StationCode station_code = 0;
    SeriesKind kind = SeriesKind::ground_ugm3;
    std::vector<std::pair<Date, double>> points;
    std::string unit;
    bool smoothed = false;

    std::size_t size() const { return points.size(); }
};

// Climatological column-to-surface conversion parameters. The formula is
// the literal recipe (column / height_km) * scale_factor * molar_mass; its
// unit algebra is taken as given, so the output carries a convention tag
// rather than a derived unit.
struct ConversionSpec {
    double height_km = 13.0;              // gas column height, within [8, 20]
    double molar_mass_g_per_mol = 46.055; // NO2
    double scale_factor = 1000.0;

    void validate() const;
};

struct AlignedRow {
    Date date;
    double ground_ugm3 = 0.0;
    double sat_molm2 = 0.0;
    double sat_conv_ugm3 = 0.0;
};

// Inner join of the three per-station daily series.
struct AlignedDailyTable {
    StationCode station_code = 0;
    std::vector<AlignedRow> rows;
};

class MixedStations : public Error {
public:
    explicit MixedStations(const std::string& message) : Error("MixedStations", message) {}
};

class KindMismatch : public Error {
public:
    explicit KindMismatch(const std::string& message) : Error("KindMismatch", message) {}
};

// Daily mean of hourly records, keyed on the start timestamp's date. A date
// is emitted only when distinct-hours-present / 24 >= min_coverage.
DailySeries aggregate_daily(const std::vector<ingest::HourlyGroundRecord>& records,
                            double min_coverage);

double convert_column(double column_value_molm2, const ConversionSpec& spec);

DailySeries convert_series(const DailySeries& series, const ConversionSpec& spec);

// Per-station satellite series from the pooled record list, dates sorted.
std::map<StationCode, DailySeries> satellite_series_by_station(
    const std::vector<ingest::SatelliteDailyRecord>& records);

AlignedDailyTable align(const DailySeries& ground, const DailySeries& sat_raw,
                        const DailySeries& sat_conv);

// Interchange format: station_code,date,ground_ugm3,sat_molm2,sat_conv_ugm3
// with rows grouped by station, dates ascending.
void write_daily_tables(const std::filesystem::path& path,
                        const std::vector<AlignedDailyTable>& tables);

std::vector<AlignedDailyTable> read_daily_tables(const std::filesystem::path& path);

}  // namespace t2g::prep
