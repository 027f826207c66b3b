#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace qaccess {

using Rng = std::mt19937_64;

/// Stable 64-bit tag for an experiment kind name, folded into substream seeds.
std::uint64_t kind_tag(std::string_view kind) noexcept;

/// Mixes a master seed with a list of integer keys (kind tag, qubit count,
/// step count, trial index, ...) into a substream seed. The result depends
/// only on the values, never on which worker evaluates it.
std::uint64_t substream_seed(std::uint64_t master,
                             std::initializer_list<std::uint64_t> keys) noexcept;

inline Rng make_substream(std::uint64_t master,
                          std::initializer_list<std::uint64_t> keys) {
  return Rng(substream_seed(master, keys));
}

}  // namespace qaccess
