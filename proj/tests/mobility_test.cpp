#include <gtest/gtest.h>

#include <sstream>

#include "ampaodv/mobility.hpp"

using namespace ampaodv;

namespace {

WaypointLeg straight(Vec2 a, Vec2 b, double speed, Seconds depart = 0.0) { return {a, b, speed, depart}; }

}  // namespace

TEST(NextLeg, DegenerateSpeedInterval) {
  MobilityConfig cfg;
  cfg.v_min = cfg.v_max = 10.0;
  Rng rng(1);
  EXPECT_EQ(next_leg({10, 10}, cfg, rng).speed, 10.0);
}

TEST(NextLeg, DestinationInsideArea) {
  MobilityConfig cfg;
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    auto leg = next_leg({400, 300}, cfg, rng);
    ASSERT_TRUE(cfg.contains(leg.end));
    ASSERT_GE(leg.speed, cfg.v_min);
    ASSERT_LE(leg.speed, cfg.v_max);
  }
}

TEST(NextLeg, SameStateSameLeg) {
  MobilityConfig cfg;
  Rng a(5), b(5);
  EXPECT_EQ(next_leg({1, 1}, cfg, a, 3.0), next_leg({1, 1}, cfg, b, 3.0));
}

TEST(NextLeg, RejectsPositionOutsideArea) {
  MobilityConfig cfg;
  Rng rng(1);
  EXPECT_THROW((void)next_leg({-1, 0}, cfg, rng), std::invalid_argument);
}

TEST(MobilityConfigTest, Validation) {
  MobilityConfig cfg;
  cfg.v_min = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.v_min = 5;
  cfg.v_max = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.v_max = 6;
  cfg.pause_time = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(PositionAt, MidpointArrivalAndDeparture) {
  auto leg = straight({0, 0}, {100, 0}, 10, 2.0);
  EXPECT_EQ(position_at(leg, 7.0), (Vec2{50, 0}));
  EXPECT_EQ(position_at(leg, 12.0), (Vec2{100, 0}));
  EXPECT_EQ(position_at(leg, 40.0), (Vec2{100, 0}));
  EXPECT_EQ(position_at(leg, 2.0), (Vec2{0, 0}));
  EXPECT_THROW((void)position_at(leg, 1.0), std::invalid_argument);
}

TEST(VelocityAt, DirectionTimesSpeed) {
  EXPECT_EQ(velocity_at(straight({0, 0}, {100, 0}, 10), 5.0), (Vec2{10, 0}));
  EXPECT_EQ(velocity_at(straight({0, 0}, {100, 0}, 10), 11.0), (Vec2{0, 0}));
  EXPECT_EQ(velocity_at(straight({0, 0}, {0, 100}, 4), 10.0), (Vec2{0, 4}));
}

TEST(Extrapolate, Cases) {
  EXPECT_EQ(extrapolate({5, 5}, {0, 0}, 100), (Vec2{5, 5}));
  EXPECT_EQ(extrapolate({0, 0}, {10, 0}, 15), (Vec2{150, 0}));
  EXPECT_EQ(extrapolate({3, 4}, {1, 1}, 0), (Vec2{3, 4}));
  EXPECT_THROW((void)extrapolate({0, 0}, {1, 0}, -1), std::invalid_argument);
}

TEST(TrajectoryTest, PauseHoldsPosition) {
  MobilityConfig cfg;
  cfg.pause_time = 5.0;
  Trajectory t(cfg, 0);
  const auto first = t.current_leg();
  t.advance();
  const auto second = t.current_leg();
  EXPECT_DOUBLE_EQ(second.depart_time, first.arrival_time() + 5.0);
  const Seconds mid_pause = first.arrival_time() + 2.5;
  EXPECT_EQ(t.position(mid_pause), first.end);
  EXPECT_EQ(t.velocity(mid_pause), (Vec2{}));
}

TEST(TrajectoryTest, AdvanceToReachesCoveringLeg) {
  MobilityConfig cfg;
  Trajectory t(cfg, 3);
  t.advance_to(500.0);
  EXPECT_LE(t.current_leg().depart_time, 500.0);
  EXPECT_GT(t.next_departure(), 500.0);
}

TEST(TrajectoryTest, NodesAreIndependentOfNodeCount) {
  MobilityConfig cfg;
  cfg.rng_seed = 11;
  EXPECT_EQ(generate_legs(cfg, 4, 300.0), generate_legs(cfg, 4, 300.0));
  EXPECT_NE(generate_legs(cfg, 4, 300.0).front(), generate_legs(cfg, 5, 300.0).front());
}

TEST(GenerateLegs, MeanSpeedNearMidpoint) {
  MobilityConfig cfg;
  cfg.area_width = cfg.area_height = 50.0;  // short legs, many samples
  double sum = 0;
  std::size_t n = 0;
  for (std::uint32_t node = 0; n < 10000; ++node)
    for (const auto& leg : generate_legs(cfg, node, 200.0)) {
      sum += leg.speed;
      ++n;
    }
  EXPECT_NEAR(sum / static_cast<double>(n), 10.5, 0.02 * 10.5);
}

TEST(GenerateLegs, CoversHorizonContiguously) {
  MobilityConfig cfg;
  auto legs = generate_legs(cfg, 0, 900.0);
  for (std::size_t i = 1; i < legs.size(); ++i) {
    EXPECT_EQ(legs[i].start, legs[i - 1].end);
    EXPECT_DOUBLE_EQ(legs[i].depart_time, legs[i - 1].arrival_time());
  }
  EXPECT_GT(legs.back().arrival_time(), 900.0);
}

TEST(LegDump, HeaderAndRow) {
  std::ostringstream os;
  write_leg_header(os);
  write_leg(os, 3, straight({0, 0}, {100, 0}, 10, 1.5));
  EXPECT_EQ(os.str(), "node_id,depart_time,start_x,start_y,end_x,end_y,speed\n3,1.5,0,0,100,0,10\n");
}
