#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wvplan {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Value = std::uint16_t;
using DimIndex = std::uint32_t;

/// Exact count of specific states. 128 bits covers every space the
/// generators can build (tireworld with 19 locations is 2^40).
using StateCount = unsigned __int128;

std::string to_string(StateCount count);

struct Dimension {
  std::string name;
  std::vector<std::string> values;
};

/// A full assignment: one value index per dimension.
using SpecificState = std::vector<Value>;

struct Literal {
  DimIndex dim = 0;
  Value value = 0;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Literals sorted by dimension, at most one per dimension.
using PartialAssignment = std::vector<Literal>;

/// Sorts by dimension and rejects a dimension bound twice.
PartialAssignment normalize(PartialAssignment assignment);

/// Cartesian product of named finite dimensions.
class FactoredSpace {
 public:
  static constexpr std::size_t kMaxValues = 1u << 16;

  FactoredSpace() = default;
  explicit FactoredSpace(std::vector<Dimension> dims);

  std::size_t num_dims() const { return dims_.size(); }
  const Dimension& dim(DimIndex d) const { return dims_.at(d); }
  const std::vector<Dimension>& dims() const { return dims_; }
  std::size_t width(DimIndex d) const { return dims_[d].values.size(); }

  std::optional<DimIndex> find_dim(std::string_view name) const;
  std::optional<Value> find_value(DimIndex d, std::string_view value) const;
  DimIndex require_dim(std::string_view name) const;
  Value require_value(DimIndex d, std::string_view value) const;
  Literal literal(std::string_view dim, std::string_view value) const;

  StateCount size() const { return size_; }

  bool valid(std::span<const Value> state) const;
  bool valid(const PartialAssignment& assignment) const;
  bool matches(const PartialAssignment& assignment, std::span<const Value> state) const;

  /// Mixed-radix index with dimension 0 most significant. Only defined
  /// when size() fits in 64 bits.
  std::uint64_t index_of(std::span<const Value> state) const;
  SpecificState state_at(std::uint64_t index) const;

  /// Renders as `dim=value;dim=value;...`.
  std::string format(std::span<const Value> state) const;
  std::string format(const PartialAssignment& assignment) const;
  SpecificState parse_state(std::string_view text) const;

  friend bool operator==(const FactoredSpace& a, const FactoredSpace& b);

 private:
  std::vector<Dimension> dims_;
  StateCount size_ = 1;
};

StateCount space_size(const FactoredSpace& space);

SpecificState apply(const PartialAssignment& effect, SpecificState state);

}  // namespace wvplan
