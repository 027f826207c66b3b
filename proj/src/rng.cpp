#include "qaccess/rng.hpp"

#include "qaccess/error.hpp"

namespace qaccess {

namespace {

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::DegenerateFrame: return "degenerate-frame";
    case ErrorKind::WalkFailure: return "walk-failure";
    case ErrorKind::InsufficientPoints: return "insufficient-points";
    case ErrorKind::ExperimentFailure: return "experiment-failure";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::File: return "file";
  }
  return "unknown";
}

std::uint64_t kind_tag(std::string_view kind) noexcept {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : kind) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t substream_seed(std::uint64_t master,
                             std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix(master);
  for (std::uint64_t k : keys) h = mix(h ^ mix(k));
  return h;
}

}  // namespace qaccess
