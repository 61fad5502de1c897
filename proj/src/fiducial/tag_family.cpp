#include "flightline/fiducial/tag_family.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "flightline/fiducial/geometry.hpp"

namespace flightline::fiducial {
namespace {

std::uint64_t mask_for(int code_bits) {
  return code_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << code_bits) - 1;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::array<std::uint64_t, 4> rotations(std::uint64_t code, int code_bits) {
  std::array<std::uint64_t, 4> r{code, 0, 0, 0};
  for (int i = 1; i < 4; ++i) r[i] = rotate90(r[i - 1], code_bits);
  return r;
}

}  // namespace

std::uint64_t rotate90(std::uint64_t code, int code_bits) {
  const int q = code_bits / 4;
  const std::uint64_t mask = mask_for(code_bits);
  code &= mask;
  if (q == 0) return code;
  return ((code << q) | (code >> (code_bits - q))) & mask;
}

int hamming_distance(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

TagFamily generate_family(const FamilyParams& params) {
  if (params.code_bits < 4 || params.code_bits > 64 || params.code_bits % 4 != 0) {
    throw FiducialError(FiducialError::Kind::kInvalid, "code_bits must be a multiple of 4 in [4, 64]");
  }
  if (params.min_hamming < 1) throw FiducialError(FiducialError::Kind::kInvalid, "min_hamming must be >= 1");
  if (params.bits_per_width < 1) {
    throw FiducialError(FiducialError::Kind::kInvalid, "bits_per_width must be >= 1");
  }

  const int n = params.code_bits;
  const std::uint64_t mask = mask_for(n);
  std::uint64_t state = params.seed;
  const std::uint64_t start = splitmix64(state) & mask;
  // Odd stride: start + k*stride walks every residue mod 2^n exactly once.
  const std::uint64_t stride = (splitmix64(state) | 1) & mask;
  const std::uint64_t space = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n);
  const std::uint64_t budget = std::min(space, params.max_candidates);

  TagFamily family;
  family.name = "sim" + std::to_string(n) + "h" + std::to_string(params.min_hamming);
  family.code_bits = n;
  family.bits_per_width = params.bits_per_width;
  family.min_hamming = params.min_hamming;

  // Every rotation of every accepted codeword, for the distance checks.
  std::vector<std::uint64_t> taken;
  std::uint64_t candidate = start;
  for (std::uint64_t k = 0; k < budget && family.codewords.size() < params.max_codewords; ++k) {
    const auto rots = rotations(candidate, n);
    bool ok = true;
    for (int i = 1; i < 4 && ok; ++i) ok = hamming_distance(candidate, rots[i]) >= params.min_hamming;
    for (std::size_t j = 0; j < taken.size() && ok; ++j) {
      ok = hamming_distance(candidate, taken[j]) >= params.min_hamming;
    }
    if (ok) {
      family.codewords.push_back(candidate);
      taken.insert(taken.end(), rots.begin(), rots.end());
    }
    candidate = (candidate + stride) & mask;
  }
  if (family.codewords.empty()) {
    throw FiducialError(FiducialError::Kind::kEmptyFamily, "no codeword satisfies the family constraints");
  }
  return family;
}

void write_family(std::ostream& out, const TagFamily& family) {
  out << "# family " << family.name << " bits=" << family.code_bits << " width=" << family.bits_per_width
      << " min_hamming=" << family.min_hamming << '\n';
  const int digits = (family.code_bits + 3) / 4;
  char buf[32];
  for (auto code : family.codewords) {
    std::snprintf(buf, sizeof buf, "%0*llx", digits, static_cast<unsigned long long>(code));
    out << buf << '\n';
  }
}

TagFamily read_family(std::istream& in) {
  TagFamily family;
  std::string line;
  if (!std::getline(in, line)) throw FiducialError(FiducialError::Kind::kInvalid, "empty family file");
  {
    std::istringstream header(line);
    std::string hash, word, bits, width, mh;
    header >> hash >> word >> family.name >> bits >> width >> mh;
    if (hash != "#" || word != "family" || bits.rfind("bits=", 0) != 0 || width.rfind("width=", 0) != 0 ||
        mh.rfind("min_hamming=", 0) != 0) {
      throw FiducialError(FiducialError::Kind::kInvalid, "malformed family header: " + line);
    }
    try {
      family.code_bits = std::stoi(bits.substr(5));
      family.bits_per_width = std::stoi(width.substr(6));
      family.min_hamming = std::stoi(mh.substr(12));
    } catch (const std::exception&) {
      throw FiducialError(FiducialError::Kind::kInvalid, "malformed family header: " + line);
    }
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t used = 0;
    std::uint64_t code = 0;
    try {
      code = std::stoull(line, &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || (code & ~mask_for(family.code_bits)) != 0) {
      throw FiducialError(FiducialError::Kind::kInvalid, "bad codeword on line " + std::to_string(lineno));
    }
    family.codewords.push_back(code);
  }
  return family;
}

}  // namespace flightline::fiducial
