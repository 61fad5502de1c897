#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flightline/geodesy/geodesy.hpp"

namespace flightline::geo {
namespace {

const FrameOrigin kLakehurst{GeoPoint{39.0, -74.35, 0.0}};

TEST(GeoToEnu, OriginMapsToZero) {
  const auto e = geo_to_enu(GeoPoint{39.0, -74.35, 0.0}, kLakehurst);
  EXPECT_EQ(e, (EnuPoint{0.0, 0.0, 0.0}));
}

TEST(GeoToEnu, NorthStepMatchesHandComputation) {
  // 1e-4 deg * pi/180 * 6371 km = 11.1194927 m
  const auto e = geo_to_enu(GeoPoint{39.0001, -74.35, 0.0}, kLakehurst);
  EXPECT_NEAR(e.north_m, 11.12, 0.005);
  EXPECT_NEAR(e.north_m, 11.1194927, 1e-6);
  EXPECT_DOUBLE_EQ(e.east_m, 0.0);
}

TEST(GeoToEnu, EastStepAtEquatorHasUnitScale) {
  const FrameOrigin equator{GeoPoint{0.0, 0.0, 0.0}};
  const auto e = geo_to_enu(GeoPoint{0.0, 1e-4, 0.0}, equator);
  EXPECT_NEAR(e.east_m, 11.1194927, 1e-6);
  EXPECT_DOUBLE_EQ(e.north_m, 0.0);
}

TEST(GeoToEnu, AltitudePassesThrough) {
  const FrameOrigin raised{GeoPoint{39.0, -74.35, 12.0}};
  EXPECT_DOUBLE_EQ(geo_to_enu(GeoPoint{39.0, -74.35, 20.5}, raised).up_m, 8.5);
}

TEST(GeoToEnu, RejectsOutOfRange) {
  EXPECT_THROW(geo_to_enu(GeoPoint{91.0, 0.0, 0.0}, kLakehurst), ValidationError);
  EXPECT_THROW(geo_to_enu(GeoPoint{0.0, -181.0, 0.0}, kLakehurst), ValidationError);
  EXPECT_THROW(geo_to_enu(GeoPoint{NAN, 0.0, 0.0}, kLakehurst), ValidationError);
  EXPECT_THROW(FrameOrigin(GeoPoint{0.0, 200.0, 0.0}), ValidationError);
}

TEST(GeoToEnu, LinearInLatAndLon) {
  const auto a = geo_to_enu(GeoPoint{39.001, -74.35, 0}, kLakehurst);
  const auto b = geo_to_enu(GeoPoint{39.003, -74.35, 0}, kLakehurst);
  EXPECT_NEAR(b.north_m, 3.0 * a.north_m, 1e-9);
  const auto c = geo_to_enu(GeoPoint{39.0, -74.349, 0}, kLakehurst);
  const auto d = geo_to_enu(GeoPoint{39.0, -74.345, 0}, kLakehurst);
  EXPECT_NEAR(d.east_m, 5.0 * c.east_m, 1e-8);
}

TEST(EnuToGeo, ZeroIsOrigin) {
  EXPECT_EQ(enu_to_geo(EnuPoint{}, kLakehurst), kLakehurst.point());
}

TEST(EnuToGeo, InvertsHandOracle) {
  const auto g = enu_to_geo(EnuPoint{0.0, 11.1194927, 0.0}, kLakehurst);
  EXPECT_NEAR(g.lat_deg, 39.0001, 1e-9);
  EXPECT_NEAR(g.lon_deg, -74.35, 1e-12);
}

TEST(EnuToGeo, RoundTripWithinTenKilometres) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> off(-0.09, 0.09);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint p{39.0 + off(rng), -74.35 + off(rng), off(rng) * 100};
    const auto back = enu_to_geo(geo_to_enu(p, kLakehurst), kLakehurst);
    ASSERT_NEAR(back.lat_deg, p.lat_deg, 1e-9);
    ASSERT_NEAR(back.lon_deg, p.lon_deg, 1e-9);
    ASSERT_NEAR(back.alt_m, p.alt_m, 1e-9);
  }
}

TEST(GroundDistance, ZeroForSamePoint) {
  const GeoPoint a{39.0, -74.35, 5.0};
  EXPECT_EQ(ground_distance(a, a), 0.0);
  EXPECT_EQ(ground_distance(a, GeoPoint{39.0, -74.35, 100.0}), 0.0);
}

TEST(GroundDistance, AntipodesAreHalfCircumference) {
  EXPECT_NEAR(ground_distance(GeoPoint{10.0, 20.0, 0}, GeoPoint{-10.0, -160.0, 0}),
              std::numbers::pi * 6'371'000.0, 1e-3);
}

TEST(GroundDistance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-89.0, 89.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint a{lat(rng), lon(rng), 0}, b{lat(rng), lon(rng), 0}, c{lat(rng), lon(rng), 0};
    ASSERT_EQ(ground_distance(a, b), ground_distance(b, a));
    ASSERT_GE(ground_distance(a, b), 0.0);
    ASSERT_LE(ground_distance(a, c), ground_distance(a, b) + ground_distance(b, c) + 1e-6);
  }
}

TEST(GroundDistance, AgreesWithEnuAtShortRange) {
  const GeoPoint p{39.01, -74.34, 0};
  const auto e = geo_to_enu(p, kLakehurst);
  const double planar = std::hypot(e.east_m, e.north_m);
  EXPECT_NEAR(ground_distance(kLakehurst.point(), p), planar, planar * 1e-3);
}

}  // namespace
}  // namespace flightline::geo
