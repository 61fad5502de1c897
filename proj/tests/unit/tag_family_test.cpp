#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "flightline/fiducial/geometry.hpp"
#include "flightline/fiducial/tag_family.hpp"

namespace flightline::fiducial {
namespace {

// Oracle: rotation as an explicit bit permutation (bit i -> bit (i + n/4) mod n)
// and distance as a bit-by-bit count.
std::uint64_t permute_rotate(std::uint64_t code, int n) {
  std::uint64_t out = 0;
  for (int i = 0; i < n; ++i) {
    if ((code >> i) & 1) out |= std::uint64_t{1} << ((i + n / 4) % n);
  }
  return out;
}

int count_diff(std::uint64_t a, std::uint64_t b, int n) {
  int d = 0;
  for (int i = 0; i < n; ++i) d += static_cast<int>(((a >> i) & 1) != ((b >> i) & 1));
  return d;
}

/// Minimum distance over all pairs, all rotations, and each codeword against its own rotations.
int brute_force_min_distance(const TagFamily& f) {
  int best = f.code_bits + 1;
  for (std::size_t i = 0; i < f.codewords.size(); ++i) {
    std::uint64_t r = f.codewords[i];
    for (int k = 1; k < 4; ++k) {
      r = permute_rotate(r, f.code_bits);
      best = std::min(best, count_diff(f.codewords[i], r, f.code_bits));
    }
    for (std::size_t j = i + 1; j < f.codewords.size(); ++j) {
      std::uint64_t rj = f.codewords[j];
      for (int k = 0; k < 4; ++k) {
        best = std::min(best, count_diff(f.codewords[i], rj, f.code_bits));
        rj = permute_rotate(rj, f.code_bits);
      }
    }
  }
  return best;
}

TEST(Rotate90, MatchesPermutationOracle) {
  for (int n : {4, 16, 52, 64}) {
    std::uint64_t v = 0x9E3779B97F4A7C15ULL;
    const std::uint64_t mask = n == 64 ? ~0ULL : (1ULL << n) - 1;
    for (int i = 0; i < 100; ++i) {
      v = v * 6364136223846793005ULL + 1442695040888963407ULL;
      ASSERT_EQ(rotate90(v & mask, n), permute_rotate(v & mask, n));
      ASSERT_EQ(rotate90(rotate90(rotate90(rotate90(v & mask, n), n), n), n), v & mask);
    }
  }
}

TEST(GenerateFamily, SixteenBitDistanceFiveVerifiedExhaustively) {
  const auto f = generate_family(FamilyParams{16, 10, 5, 20, 1});
  ASSERT_FALSE(f.codewords.empty());
  EXPECT_LE(f.codewords.size(), 20u);
  EXPECT_GE(brute_force_min_distance(f), 5);
  EXPECT_EQ(f.name, "sim16h5");
}

TEST(GenerateFamily, DistanceOneMeansDistinct) {
  const auto f = generate_family(FamilyParams{4, 2, 1, 100, 7});
  ASSERT_FALSE(f.codewords.empty());
  // All four rotations of all codewords are pairwise distinct.
  std::set<std::uint64_t> seen;
  for (auto c : f.codewords) {
    for (int k = 0; k < 4; ++k) {
      seen.insert(c);
      c = permute_rotate(c, 4);
    }
  }
  EXPECT_EQ(seen.size(), 4 * f.codewords.size());
  EXPECT_GE(brute_force_min_distance(f), 1);
}

TEST(GenerateFamily, DeterministicPerSeed) {
  const auto a = generate_family(FamilyParams{16, 10, 5, 20, 99});
  const auto b = generate_family(FamilyParams{16, 10, 5, 20, 99});
  EXPECT_EQ(a.codewords, b.codewords);
  const auto c = generate_family(FamilyParams{16, 10, 5, 20, 100});
  EXPECT_NE(a.codewords, c.codewords);
}

TEST(GenerateFamily, InfeasibleIsEmptyFamilyError) {
  try {
    generate_family(FamilyParams{4, 2, 5, 10, 0});
    FAIL();
  } catch (const FiducialError& e) {
    EXPECT_EQ(e.kind(), FiducialError::Kind::kEmptyFamily);
  }
  EXPECT_THROW(generate_family(FamilyParams{18, 10, 5, 10, 0}), FiducialError);
}

TEST(FamilyFile, WriteThenRead) {
  const auto f = generate_family(FamilyParams{16, 10, 5, 20, 3});
  std::stringstream ss;
  write_family(ss, f);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "# family sim16h5 bits=16 width=10 min_hamming=5");
  const auto back = read_family(ss);
  EXPECT_EQ(back.name, f.name);
  EXPECT_EQ(back.code_bits, 16);
  EXPECT_EQ(back.bits_per_width, 10);
  EXPECT_EQ(back.min_hamming, 5);
  EXPECT_EQ(back.codewords, f.codewords);

  std::istringstream bad("# family x bits=16 width=10 min_hamming=5\n1ffff\n");
  EXPECT_THROW(read_family(bad), FiducialError);
}

}  // namespace
}  // namespace flightline::fiducial
