// Copyright 2026 The mtnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Layer-level backbone search space: per-block genome encoding, random
// sampling, single-field mutation, canonical text keys and decoding into a
// concrete EfficientNet-B0-style backbone.

#ifndef MTNAS_SEARCH_SPACE_HPP_
#define MTNAS_SEARCH_SPACE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mtnas/errors.hpp"

namespace mtnas {

enum class LayerType : std::uint8_t { kIBN, kFusedIBN };
enum class Kernel : std::uint8_t { k3, k5 };
enum class ChannelMultiplier : std::uint8_t { k0_5, k0_75, k1_0, k1_5 };
enum class Expansion : std::uint8_t { k3, k6 };

inline constexpr int kernel_size(Kernel k) { return k == Kernel::k3 ? 3 : 5; }
inline constexpr int expansion_ratio(Expansion e) {
  return e == Expansion::k3 ? 3 : 6;
}
// Multiplier in quarters: 0.5 -> 2, 0.75 -> 3, 1.0 -> 4, 1.5 -> 6.
inline constexpr int multiplier_quarters(ChannelMultiplier m) {
  constexpr std::array<int, 4> kQuarters = {2, 3, 4, 6};
  return kQuarters[static_cast<std::size_t>(m)];
}
inline constexpr double multiplier_value(ChannelMultiplier m) {
  return multiplier_quarters(m) / 4.0;
}

// One block's decisions. Field order is fixed: layer type, kernel,
// channel multiplier, expansion.
struct LayerChoice {
  static constexpr std::size_t kNumFields = 4;
  static constexpr std::array<int, kNumFields> kFieldCardinality = {2, 2, 4, 2};

  LayerType layer_type = LayerType::kIBN;
  Kernel kernel = Kernel::k3;
  ChannelMultiplier multiplier = ChannelMultiplier::k1_0;
  Expansion expansion = Expansion::k6;

  int option(std::size_t field) const {
    switch (field) {
      case 0: return static_cast<int>(layer_type);
      case 1: return static_cast<int>(kernel);
      case 2: return static_cast<int>(multiplier);
      case 3: return static_cast<int>(expansion);
    }
    throw DomainError("LayerChoice field index out of range");
  }

  void set_option(std::size_t field, int value) {
    if (field >= kNumFields) {
      throw DomainError("LayerChoice field index out of range");
    }
    if (value < 0 || value >= kFieldCardinality[field]) {
      throw DomainError("LayerChoice option out of domain");
    }
    switch (field) {
      case 0: layer_type = static_cast<LayerType>(value); break;
      case 1: kernel = static_cast<Kernel>(value); break;
      case 2: multiplier = static_cast<ChannelMultiplier>(value); break;
      case 3: expansion = static_cast<Expansion>(value); break;
    }
  }

  friend bool operator==(const LayerChoice&, const LayerChoice&) = default;
};

inline constexpr std::size_t kNumBlocks = 16;
inline constexpr std::size_t kChoicesPerBlock = 2 * 2 * 4 * 2;

// Fixed backbone skeleton. Base channels are multiples of 8 so every
// multiplier yields an integral filter count.
struct BackboneSkeleton {
  static constexpr std::array<int, kNumBlocks> kBaseChannels = {
      16, 24, 24, 40, 40, 80, 80, 80, 112, 112, 112, 192, 192, 192, 192, 320};
  static constexpr std::array<int, kNumBlocks> kStrides = {
      1, 2, 1, 2, 1, 2, 1, 1, 1, 1, 1, 2, 1, 1, 1, 1};
  static constexpr int kStemStride = 2;
  static constexpr int kStemKernel = 3;
  static constexpr int kStemFilters = 32;
  static constexpr int kInputChannels = 3;
  static constexpr int kFirstBlockExpansion = 1;
};

static_assert([] {
  for (int c : BackboneSkeleton::kBaseChannels) {
    if (c % 8 != 0) return false;
  }
  return true;
}());

// Cardinality of the genome space over `blocks` tunable blocks.
inline boost::multiprecision::cpp_int space_size(std::size_t blocks = kNumBlocks) {
  boost::multiprecision::cpp_int size = 1;
  for (std::size_t i = 0; i < blocks; ++i) size *= kChoicesPerBlock;
  return size;
}

// A point in the search space: one LayerChoice per tunable block. The block
// count is a template parameter so small restricted spaces can be
// enumerated in tests; the production space is `Genome` (16 blocks).
template <std::size_t N>
class BasicGenome {
  static_assert(N >= 1 && N <= kNumBlocks);

 public:
  static constexpr std::size_t kBlocks = N;
  static constexpr std::size_t kNumFields = N * LayerChoice::kNumFields;

  BasicGenome() = default;
  explicit BasicGenome(const std::array<LayerChoice, N>& choices)
      : choices_(choices) {}

  const std::array<LayerChoice, N>& choices() const { return choices_; }
  const LayerChoice& operator[](std::size_t block) const {
    return choices_.at(block);
  }
  LayerChoice& operator[](std::size_t block) { return choices_.at(block); }

  // Flat view over all decision fields, block-major.
  int field(std::size_t flat) const {
    return choices_.at(flat / LayerChoice::kNumFields)
        .option(flat % LayerChoice::kNumFields);
  }
  void set_field(std::size_t flat, int value) {
    choices_.at(flat / LayerChoice::kNumFields)
        .set_option(flat % LayerChoice::kNumFields, value);
  }
  static int field_cardinality(std::size_t flat) {
    return LayerChoice::kFieldCardinality[flat % LayerChoice::kNumFields];
  }

  friend bool operator==(const BasicGenome&, const BasicGenome&) = default;

 private:
  std::array<LayerChoice, N> choices_{};
};

using Genome = BasicGenome<kNumBlocks>;

template <std::size_t N, class Rng>
BasicGenome<N> random_genome(Rng& rng) {
  BasicGenome<N> g;
  for (std::size_t f = 0; f < BasicGenome<N>::kNumFields; ++f) {
    std::uniform_int_distribution<int> pick(0, BasicGenome<N>::field_cardinality(f) - 1);
    g.set_field(f, pick(rng));
  }
  return g;
}

// Resamples exactly one field, chosen uniformly, to one of its other values.
template <std::size_t N, class Rng>
BasicGenome<N> mutate(const BasicGenome<N>& parent, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_field(0, BasicGenome<N>::kNumFields - 1);
  const std::size_t f = pick_field(rng);
  const int card = BasicGenome<N>::field_cardinality(f);
  std::uniform_int_distribution<int> pick_offset(1, card - 1);
  BasicGenome<N> child = parent;
  child.set_field(f, (parent.field(f) + pick_offset(rng)) % card);
  return child;
}

// ---------------------------------------------------------------------------
// Canonical genome keys.
//
// One token per block, joined by '-'. Token grammar:
//   <type><kernel>x<multiplier>e<expansion>
// type is 'I' (IBN) or 'F' (FusedIBN); kernel is 3 or 5; multiplier is one of
// 0.5, 0.75, 1.0, 1.5; expansion is 3 or 6. Example block: "F5x1.5e6".

namespace detail {
inline constexpr std::array<std::string_view, 4> kMultiplierTokens = {
    "0.5", "0.75", "1.0", "1.5"};
}  // namespace detail

inline std::string block_token(const LayerChoice& c) {
  std::string s;
  s += c.layer_type == LayerType::kIBN ? 'I' : 'F';
  s += c.kernel == Kernel::k3 ? '3' : '5';
  s += 'x';
  s += detail::kMultiplierTokens[static_cast<std::size_t>(c.multiplier)];
  s += 'e';
  s += c.expansion == Expansion::k3 ? '3' : '6';
  return s;
}

template <std::size_t N>
std::string encode_key(const BasicGenome<N>& g) {
  std::string key;
  for (std::size_t b = 0; b < N; ++b) {
    if (b > 0) key += '-';
    key += block_token(g[b]);
  }
  return key;
}

template <std::size_t N>
BasicGenome<N> decode_key(std::string_view key) {
  BasicGenome<N> g;
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    throw ParseError("genome key, offset " + std::to_string(pos) + ": " + what, pos);
  };
  auto expect = [&](char want) {
    if (pos >= key.size() || key[pos] != want) {
      fail(std::string("expected '") + want + "'");
    }
    ++pos;
  };
  for (std::size_t b = 0; b < N; ++b) {
    if (b > 0) expect('-');
    LayerChoice c;
    if (pos >= key.size()) fail("unexpected end of key");
    if (key[pos] == 'I') {
      c.layer_type = LayerType::kIBN;
    } else if (key[pos] == 'F') {
      c.layer_type = LayerType::kFusedIBN;
    } else {
      fail("layer type must be 'I' or 'F'");
    }
    ++pos;
    if (pos >= key.size()) fail("unexpected end of key");
    if (key[pos] == '3') {
      c.kernel = Kernel::k3;
    } else if (key[pos] == '5') {
      c.kernel = Kernel::k5;
    } else {
      fail("kernel must be 3 or 5");
    }
    ++pos;
    expect('x');
    bool matched = false;
    for (std::size_t m = 0; m < detail::kMultiplierTokens.size(); ++m) {
      const auto tok = detail::kMultiplierTokens[m];
      if (key.substr(pos, tok.size()) == tok) {
        c.multiplier = static_cast<ChannelMultiplier>(m);
        pos += tok.size();
        matched = true;
        break;
      }
    }
    if (!matched) fail("multiplier must be one of 0.5, 0.75, 1.0, 1.5");
    expect('e');
    if (pos >= key.size()) fail("unexpected end of key");
    if (key[pos] == '3') {
      c.expansion = Expansion::k3;
    } else if (key[pos] == '6') {
      c.expansion = Expansion::k6;
    } else {
      fail("expansion must be 3 or 6");
    }
    ++pos;
    g[b] = c;
  }
  if (pos != key.size()) fail("trailing characters after last block");
  return g;
}

// ---------------------------------------------------------------------------
// Decoded architectures.

enum class LayerKind : std::uint8_t { kConv2D, kIBN, kFusedIBN };

inline std::string_view layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::kConv2D: return "Conv2D";
    case LayerKind::kIBN: return "IBN";
    case LayerKind::kFusedIBN: return "FusedIBN";
  }
  return "?";
}

struct ArchitectureRow {
  int index = 0;
  LayerKind layer = LayerKind::kConv2D;
  int stride = 1;
  int kernel = 3;
  int filters = 0;
  std::optional<int> expansion;

  friend bool operator==(const ArchitectureRow&, const ArchitectureRow&) = default;
};

struct Architecture {
  std::vector<ArchitectureRow> rows;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

inline ArchitectureRow stem_row() {
  return {0, LayerKind::kConv2D, BackboneSkeleton::kStemStride,
          BackboneSkeleton::kStemKernel, BackboneSkeleton::kStemFilters,
          std::nullopt};
}

// Restricted spaces (N < 16) decode onto the first N skeleton blocks.
template <std::size_t N>
Architecture decode(const BasicGenome<N>& g) {
  Architecture a;
  a.rows.reserve(N + 1);
  a.rows.push_back(stem_row());
  for (std::size_t b = 0; b < N; ++b) {
    const LayerChoice& c = g[b];
    ArchitectureRow row;
    row.index = static_cast<int>(b) + 1;
    row.layer = c.layer_type == LayerType::kIBN ? LayerKind::kIBN
                                                : LayerKind::kFusedIBN;
    row.stride = BackboneSkeleton::kStrides[b];
    row.kernel = kernel_size(c.kernel);
    row.filters =
        BackboneSkeleton::kBaseChannels[b] * multiplier_quarters(c.multiplier) / 4;
    row.expansion = b == 0 ? BackboneSkeleton::kFirstBlockExpansion
                           : expansion_ratio(c.expansion);
    a.rows.push_back(row);
  }
  return a;
}

// Architecture text format: CSV with header
//   index,layer,stride,kernel,filters,expansion
// where expansion is "--" for rows without one (the stem).
inline void write_architecture(std::ostream& os, const Architecture& a) {
  os << "index,layer,stride,kernel,filters,expansion\n";
  for (const auto& r : a.rows) {
    os << r.index << ',' << layer_kind_name(r.layer) << ',' << r.stride << ','
       << r.kernel << ',' << r.filters << ',';
    if (r.expansion) {
      os << *r.expansion;
    } else {
      os << "--";
    }
    os << '\n';
  }
}

inline std::string architecture_to_string(const Architecture& a) {
  std::ostringstream os;
  write_architecture(os, a);
  return os.str();
}

inline Architecture read_architecture(std::istream& is) {
  Architecture a;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("architecture line " + std::to_string(line_no) + ": " + what,
                     line_no);
  };
  if (!std::getline(is, line)) fail("missing header");
  ++line_no;
  if (line != "index,layer,stride,kernel,filters,expansion") fail("bad header");
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) fail("expected 6 columns");
    ArchitectureRow r;
    try {
      r.index = std::stoi(cells[0]);
      r.stride = std::stoi(cells[2]);
      r.kernel = std::stoi(cells[3]);
      r.filters = std::stoi(cells[4]);
      if (cells[5] != "--") r.expansion = std::stoi(cells[5]);
    } catch (const std::logic_error&) {
      fail("non-integer field");
    }
    if (cells[1] == "Conv2D") {
      r.layer = LayerKind::kConv2D;
    } else if (cells[1] == "IBN") {
      r.layer = LayerKind::kIBN;
    } else if (cells[1] == "FusedIBN") {
      r.layer = LayerKind::kFusedIBN;
    } else {
      fail("unknown layer '" + cells[1] + "'");
    }
    a.rows.push_back(r);
  }
  return a;
}

}  // namespace mtnas

#endif  // MTNAS_SEARCH_SPACE_HPP_
