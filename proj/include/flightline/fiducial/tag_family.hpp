#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace flightline::fiducial {

// Codeword bits are laid out in four quadrant orbits of code_bits/4 cells each,
// ordered so a 90° rotation of the printed tag is a cyclic left shift by
// code_bits/4 within the code_bits-bit word.
struct TagFamily {
  std::string name;
  int code_bits = 0;
  int bits_per_width = 10;
  int min_hamming = 0;
  std::vector<std::uint64_t> codewords;
};

struct FamilyParams {
  int code_bits = 16;
  int bits_per_width = 10;
  int min_hamming = 5;
  std::size_t max_codewords = 30;
  std::uint64_t seed = 0;
  // Upper bound on candidates examined; the scan also ends when the space is exhausted.
  std::uint64_t max_candidates = std::uint64_t{1} << 26;
};

std::uint64_t rotate90(std::uint64_t code, int code_bits);
int hamming_distance(std::uint64_t a, std::uint64_t b);

/// Greedy lexicode over a seeded permutation of the codeword space. A candidate
/// is kept when it is at least min_hamming away from all four rotations of every
/// kept codeword and from its own three nontrivial rotations.
/// Throws FiducialError(kEmptyFamily) if nothing qualifies, kInvalid on bad parameters.
TagFamily generate_family(const FamilyParams& params);

/// Header line `# family <name> bits=<n> width=<b> min_hamming=<d>`, then one
/// zero-padded hex codeword per line.
void write_family(std::ostream& out, const TagFamily& family);
TagFamily read_family(std::istream& in);

}  // namespace flightline::fiducial
