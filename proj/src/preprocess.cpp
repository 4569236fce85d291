#include "t2g/preprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "t2g/csv.hpp"

namespace t2g::prep {

const char* unit_for(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::ground_ugm3: return "ug/m3";
        case SeriesKind::satellite_molm2: return "mol/m2";
        case SeriesKind::satellite_converted_ugm3: return "ug/m3 (paper convention)";
    }
    return "";
}

void ConversionSpec::validate() const {
    if (!(height_km >= 8.0 && height_km <= 20.0))
        throw std::invalid_argument("height_km must lie in [8, 20]");
    if (!(molar_mass_g_per_mol > 0.0))
        throw std::invalid_argument("molar_mass_g_per_mol must be positive");
    if (!(scale_factor > 0.0))
        throw std::invalid_argument("scale_factor must be positive");
}

DailySeries aggregate_daily(const std::vector<ingest::HourlyGroundRecord>& records,
                            double min_coverage) {
    if (!(min_coverage > 0.0 && min_coverage <= 1.0))
        throw std::invalid_argument("min_coverage must be in (0, 1]");

    DailySeries series;
    series.kind = SeriesKind::ground_ugm3;
    series.unit = unit_for(series.kind);
    if (records.empty()) return series;

    series.station_code = records.front().station_code;

    struct DayAccum {
        double sum = 0.0;
        std::size_t count = 0;
        unsigned hour_mask = 0;  // distinct hours drive the coverage rule
    };
    std::map<Date, DayAccum> days;
    for (const auto& rec : records) {
        if (rec.station_code != series.station_code)
            throw MixedStations("records span stations " + std::to_string(series.station_code) +
                                " and " + std::to_string(rec.station_code));
        DayAccum& acc = days[rec.start.date];
        acc.sum += rec.value;
        acc.count += 1;
        acc.hour_mask |= 1u << rec.start.hour;
    }

    for (const auto& [date, acc] : days) {
        const int hours_present = std::popcount(acc.hour_mask);
        if (static_cast<double>(hours_present) / 24.0 >= min_coverage)
            series.points.emplace_back(date, acc.sum / static_cast<double>(acc.count));
    }
    return series;
}

double convert_column(double column_value_molm2, const ConversionSpec& spec) {
    spec.validate();
    if (!(column_value_molm2 >= 0.0) || !std::isfinite(column_value_molm2))
        throw std::invalid_argument("column value must be finite and non-negative");
    return column_value_molm2 / spec.height_km * spec.scale_factor * spec.molar_mass_g_per_mol;
}

DailySeries convert_series(const DailySeries& series, const ConversionSpec& spec) {
    if (series.kind != SeriesKind::satellite_molm2)
        throw KindMismatch("convert_series expects a satellite_molm2 series, got unit '" +
                           series.unit + "'");
    DailySeries out;
    out.station_code = series.station_code;
    out.kind = SeriesKind::satellite_converted_ugm3;
    out.unit = unit_for(out.kind);
    out.smoothed = series.smoothed;
    out.points.reserve(series.points.size());
    for (const auto& [date, value] : series.points)
        out.points.emplace_back(date, convert_column(value, spec));
    return out;
}

std::map<StationCode, DailySeries> satellite_series_by_station(
    const std::vector<ingest::SatelliteDailyRecord>& records) {
    std::map<StationCode, DailySeries> by_station;
    for (const auto& rec : records) {
        DailySeries& s = by_station[rec.station_code];
        s.station_code = rec.station_code;
        s.kind = SeriesKind::satellite_molm2;
        s.unit = unit_for(s.kind);
        s.points.emplace_back(rec.date, rec.column_value);
    }
    for (auto& [code, s] : by_station)
        std::sort(s.points.begin(), s.points.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    return by_station;
}

AlignedDailyTable align(const DailySeries& ground, const DailySeries& sat_raw,
                        const DailySeries& sat_conv) {
    if (ground.station_code != sat_raw.station_code ||
        ground.station_code != sat_conv.station_code)
        throw MixedStations("align requires all series from one station");

    std::map<Date, double> raw_by_date, conv_by_date;
    for (const auto& [d, v] : sat_raw.points) raw_by_date[d] = v;
    for (const auto& [d, v] : sat_conv.points) conv_by_date[d] = v;

    AlignedDailyTable table;
    table.station_code = ground.station_code;
    for (const auto& [d, g] : ground.points) {
        auto raw = raw_by_date.find(d);
        auto conv = conv_by_date.find(d);
        if (raw == raw_by_date.end() || conv == conv_by_date.end()) continue;
        table.rows.push_back({d, g, raw->second, conv->second});
    }
    return table;
}

void write_daily_tables(const std::filesystem::path& path,
                        const std::vector<AlignedDailyTable>& tables) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write file '" + path.string() + "'");
    out << "station_code,date,ground_ugm3,sat_molm2,sat_conv_ugm3\n";
    for (const auto& table : tables)
        for (const auto& row : table.rows)
            out << table.station_code << ',' << row.date.iso() << ','
                << format_double(row.ground_ugm3) << ',' << format_double(row.sat_molm2) << ','
                << format_double(row.sat_conv_ugm3) << "\n";
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

std::vector<AlignedDailyTable> read_daily_tables(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) ||
        trim(line) != "station_code,date,ground_ugm3,sat_molm2,sat_conv_ugm3")
        throw ingest::MalformedRow(1, "bad daily-table header in '" + path.string() + "'");

    std::map<StationCode, AlignedDailyTable> by_station;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw ingest::MalformedRow(line_no, "expected 5 fields, got " +
                                                    std::to_string(fields.size()));
        auto station = parse_integer(fields[0]);
        auto ground = parse_decimal(fields[2]);
        auto raw = parse_decimal(fields[3]);
        auto conv = parse_decimal(fields[4]);
        if (!station || !ground || !raw || !conv)
            throw ingest::MalformedRow(line_no, "bad daily-table row");
        Date date;
        try {
            date = Date::parse_iso(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw ingest::MalformedRow(line_no, e.what());
        }
        AlignedDailyTable& table = by_station[*station];
        table.station_code = *station;
        table.rows.push_back({date, *ground, *raw, *conv});
    }

    std::vector<AlignedDailyTable> tables;
    tables.reserve(by_station.size());
    for (auto& [code, table] : by_station) {
        std::sort(table.rows.begin(), table.rows.end(),
                  [](const AlignedRow& a, const AlignedRow& b) { return a.date < b.date; });
        tables.push_back(std::move(table));
    }
    return tables;
}

}  // namespace t2g::prep
