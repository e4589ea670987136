#include "loadforge/partition.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "loadforge/errors.hpp"

namespace loadforge {

namespace {

constexpr double kDay = 86400.0;
constexpr std::size_t kSlotsPerDay = 2880;

// Proleptic Gregorian conversions (H. Hinnant's civil-date algorithms).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

}  // namespace

std::int64_t DayCalendar::day_index(double timestamp) noexcept {
    return static_cast<std::int64_t>(std::floor(timestamp / kDay));
}

std::int64_t DayCalendar::parse_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    auto r = std::from_chars(p, end, y);
    bool ok = r.ec == std::errc{} && r.ptr != end && *r.ptr == '-';
    if (ok) {
        r = std::from_chars(r.ptr + 1, end, m);
        ok = r.ec == std::errc{} && r.ptr != end && *r.ptr == '-';
    }
    if (ok) {
        r = std::from_chars(r.ptr + 1, end, d);
        ok = r.ec == std::errc{} && r.ptr == end;
    }
    if (!ok || m < 1 || m > 12 || d < 1 || d > 31) {
        throw InvalidInput("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const std::int64_t day = days_from_civil(y, m, d);
    std::int64_t yy;
    unsigned mm, dd;
    civil_from_days(day, yy, mm, dd);
    if (mm != m || dd != d) {
        throw InvalidInput("date '" + std::string(text) + "' does not exist");
    }
    return day;
}

std::string DayCalendar::format_date(std::int64_t day) {
    std::int64_t y;
    unsigned m, d;
    civil_from_days(day, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
    return buf;
}

bool DayCalendar::is_day_off(double timestamp) const noexcept {
    const std::int64_t day = day_index(timestamp);
    if (holidays_.count(day)) return true;
    if (!weekends_off_) return false;
    // 1970-01-01 was a Thursday; 0 = Monday.
    const std::int64_t weekday = ((day % 7) + 7 + 3) % 7;
    return weekday >= 5;
}

TimePartition TimePartition::single() { return TimePartition(PartitionKind::Single, DayCalendar{}); }

TimePartition TimePartition::hourly() { return TimePartition(PartitionKind::Hourly, DayCalendar{}); }

TimePartition TimePartition::halfminute_daytype(DayCalendar calendar) {
    return TimePartition(PartitionKind::HalfMinuteDaytype, std::move(calendar));
}

std::size_t TimePartition::size() const noexcept {
    switch (kind_) {
        case PartitionKind::Single: return 1;
        case PartitionKind::Hourly: return 24;
        case PartitionKind::HalfMinuteDaytype: return 2 * kSlotsPerDay;
    }
    return 1;
}

std::size_t TimePartition::subset(double timestamp) const noexcept {
    const double day_start = static_cast<double>(DayCalendar::day_index(timestamp)) * kDay;
    const double seconds = timestamp - day_start;
    switch (kind_) {
        case PartitionKind::Single:
            return 0;
        case PartitionKind::Hourly:
            return std::min<std::size_t>(23, static_cast<std::size_t>(seconds / 3600.0));
        case PartitionKind::HalfMinuteDaytype: {
            const std::size_t slot =
                std::min(kSlotsPerDay - 1, static_cast<std::size_t>(seconds / 30.0));
            return calendar_.is_day_off(timestamp) ? kSlotsPerDay + slot : slot;
        }
    }
    return 0;
}

double TimePartition::cycle_seconds() const noexcept {
    switch (kind_) {
        case PartitionKind::Single: return 0.0;
        case PartitionKind::Hourly: return kDay;
        case PartitionKind::HalfMinuteDaytype: return 7.0 * kDay;
    }
    return 0.0;
}

std::string TimePartition::name() const {
    switch (kind_) {
        case PartitionKind::Single: return "single";
        case PartitionKind::Hourly: return "hourly";
        case PartitionKind::HalfMinuteDaytype: return "halfminute";
    }
    return "single";
}

PartitionKind parse_partition_kind(std::string_view text) {
    if (text == "single") return PartitionKind::Single;
    if (text == "hourly") return PartitionKind::Hourly;
    if (text == "halfminute" || text == "halfminute-daytype") return PartitionKind::HalfMinuteDaytype;
    throw InvalidInput("unknown partition '" + std::string(text) + "' (expected hourly or halfminute)");
}

}  // namespace loadforge
