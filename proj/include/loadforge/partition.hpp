#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace loadforge {

/// Week-day / day-off labelling of UTC epoch timestamps. Weekends are days off by
/// default; extra holidays may be added.
class DayCalendar {
public:
    explicit DayCalendar(bool weekends_off = true) : weekends_off_(weekends_off) {}

    /// Days since 1970-01-01 (UTC).
    static std::int64_t day_index(double timestamp) noexcept;
    /// Parses YYYY-MM-DD into a day index. Throws InvalidInput on malformed dates.
    static std::int64_t parse_date(std::string_view text);
    static std::string format_date(std::int64_t day);

    void add_holiday(std::int64_t day) { holidays_.insert(day); }
    const std::set<std::int64_t>& holidays() const noexcept { return holidays_; }
    bool weekends_off() const noexcept { return weekends_off_; }

    bool is_day_off(double timestamp) const noexcept;

private:
    bool weekends_off_;
    std::set<std::int64_t> holidays_;
};

enum class PartitionKind {
    Single,             // one subset covering all time
    Hourly,             // 24 hour-of-day subsets
    HalfMinuteDaytype,  // 2880 half-minute slots x {week day, day off} = 5760 subsets
};

/// Partition of the timeline into recurring "periods of the day".
class TimePartition {
public:
    static TimePartition single();
    static TimePartition hourly();
    static TimePartition halfminute_daytype(DayCalendar calendar = DayCalendar{});

    PartitionKind kind() const noexcept { return kind_; }
    const DayCalendar& calendar() const noexcept { return calendar_; }
    std::size_t size() const noexcept;
    /// Subset index of a timestamp. For HalfMinuteDaytype, indices >= 2880 are days off.
    std::size_t subset(double timestamp) const noexcept;
    /// Shortest span that visits every subset under the default calendar.
    double cycle_seconds() const noexcept;
    std::string name() const;

private:
    TimePartition(PartitionKind kind, DayCalendar calendar)
        : kind_(kind), calendar_(std::move(calendar)) {}

    PartitionKind kind_;
    DayCalendar calendar_;
};

/// Parses "single", "hourly" or "halfminute".
PartitionKind parse_partition_kind(std::string_view text);

}  // namespace loadforge
