#include <gtest/gtest.h>

#include "cdrev/calendar.hpp"

namespace cdrev {
namespace {

using std::chrono::sys_days;

// Week 0 starts on Monday 2012-01-02, local time UTC-03:00.
// 2012-01-02 is day 15341 since 1970-01-01, so local midnight is
// 15341 * 86400 + 3 * 3600 = 1325473200 UTC.
constexpr std::int64_t kWeek0 = 1325473200;

DatasetCalendar buenos_aires(int weeks = 2) {
  return DatasetCalendar(parse_iso_date("2012-01-02"), -180, weeks);
}

TEST(CalendarTest, RangeStartsAtLocalMidnight) {
  const auto cal = buenos_aires();
  EXPECT_EQ(cal.range_begin(), kWeek0);
  EXPECT_EQ(cal.range_end(), kWeek0 + 14 * 86400);
  EXPECT_FALSE(cal.contains(kWeek0 - 1));
  EXPECT_TRUE(cal.contains(kWeek0));
  EXPECT_FALSE(cal.contains(cal.range_end()));
}

TEST(CalendarTest, MidnightBoundaryWithNegativeOffset) {
  const auto cal = buenos_aires();
  // 2012-01-04 23:59:59 local = 2012-01-05 02:59:59 UTC.
  const std::int64_t before = kWeek0 + 2 * 86400 + 86399;
  EXPECT_EQ(cal.slot_of(before), (SlotIndex{0, 2, 23}));
  EXPECT_EQ(cal.slot_of(before + 1), (SlotIndex{0, 3, 0}));
}

TEST(CalendarTest, MidnightBoundaryWrapsIntoNextWeek) {
  const auto cal = buenos_aires();
  const std::int64_t last_second_of_week0 = kWeek0 + 6 * 86400 + 86399;
  EXPECT_EQ(cal.slot_of(last_second_of_week0), (SlotIndex{0, 6, 23}));
  EXPECT_EQ(cal.slot_of(last_second_of_week0 + 1), (SlotIndex{1, 0, 0}));
}

TEST(CalendarTest, SlotStartInvertsSlotOf) {
  const auto cal = buenos_aires(3);
  for (int w = 0; w < 3; ++w) {
    for (int d = 0; d < 7; ++d) {
      for (int h = 0; h < 24; ++h) {
        const SlotIndex s{w, d, h};
        EXPECT_EQ(cal.slot_of(cal.slot_start(s)), s);
        EXPECT_EQ(cal.slot_of(cal.slot_start(s) + 3599), s);
      }
    }
  }
}

TEST(CalendarTest, DateConversions) {
  const auto cal = buenos_aires();
  EXPECT_EQ(cal.day_of(parse_iso_date("2012-01-02")), (DayIndex{0, 0}));
  EXPECT_EQ(cal.day_of(parse_iso_date("2012-01-10")), (DayIndex{1, 1}));
  EXPECT_FALSE(cal.day_of(parse_iso_date("2012-01-16")));
  EXPECT_FALSE(cal.day_of(parse_iso_date("2012-01-01")));
  EXPECT_EQ(format_iso_date(cal.date_of({1, 1})), "2012-01-10");
  EXPECT_EQ(local_date(kWeek0, -180), parse_iso_date("2012-01-02"));
  EXPECT_EQ(local_date(kWeek0 - 1, -180), parse_iso_date("2012-01-01"));
}

TEST(CalendarTest, ParsesOffsetsAndDates) {
  EXPECT_EQ(parse_utc_offset("-03:00"), -180);
  EXPECT_EQ(parse_utc_offset("+05:30"), 330);
  EXPECT_EQ(format_utc_offset(-180), "-03:00");
  EXPECT_THROW(parse_utc_offset("-3:00"), std::invalid_argument);
  EXPECT_THROW(parse_utc_offset("03:00"), std::invalid_argument);
  EXPECT_THROW(parse_iso_date("2012-02-30"), std::invalid_argument);
  EXPECT_THROW(parse_iso_date("2012/02/03"), std::invalid_argument);
}

TEST(CalendarTest, RejectsEmptyCalendar) {
  EXPECT_THROW(DatasetCalendar(parse_iso_date("2012-01-02"), -180, 0), std::invalid_argument);
}

}  // namespace
}  // namespace cdrev
