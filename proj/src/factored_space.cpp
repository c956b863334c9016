#include "wvplan/factored_space.hpp"

#include <algorithm>
#include <set>

namespace wvplan {

std::string to_string(StateCount count) {
  if (count == 0) return "0";
  std::string digits;
  while (count > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(count % 10)));
    count /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

PartialAssignment normalize(PartialAssignment assignment) {
  std::sort(assignment.begin(), assignment.end());
  for (std::size_t i = 1; i < assignment.size(); ++i) {
    if (assignment[i].dim == assignment[i - 1].dim) {
      throw Error("dimension " + std::to_string(assignment[i].dim) + " bound twice");
    }
  }
  return assignment;
}

FactoredSpace::FactoredSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  std::set<std::string> names;
  for (const auto& d : dims_) {
    if (d.name.empty()) throw Error("dimension with empty name");
    if (!names.insert(d.name).second) throw Error("duplicate dimension name '" + d.name + "'");
    if (d.values.size() < 2) {
      throw Error("dimension '" + d.name + "' needs at least two values");
    }
    if (d.values.size() > kMaxValues - 1) {
      throw Error("dimension '" + d.name + "' has too many values");
    }
    std::set<std::string> vals(d.values.begin(), d.values.end());
    if (vals.size() != d.values.size()) {
      throw Error("dimension '" + d.name + "' has duplicate values");
    }
    size_ *= static_cast<StateCount>(d.values.size());
  }
}

std::optional<DimIndex> FactoredSpace::find_dim(std::string_view name) const {
  for (DimIndex d = 0; d < dims_.size(); ++d) {
    if (dims_[d].name == name) return d;
  }
  return std::nullopt;
}

std::optional<Value> FactoredSpace::find_value(DimIndex d, std::string_view value) const {
  const auto& vals = dims_.at(d).values;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == value) return static_cast<Value>(i);
  }
  return std::nullopt;
}

DimIndex FactoredSpace::require_dim(std::string_view name) const {
  auto d = find_dim(name);
  if (!d) throw Error("unknown dimension '" + std::string(name) + "'");
  return *d;
}

Value FactoredSpace::require_value(DimIndex d, std::string_view value) const {
  auto v = find_value(d, value);
  if (!v) {
    throw Error("unknown value '" + std::string(value) + "' for dimension '" + dims_.at(d).name + "'");
  }
  return *v;
}

Literal FactoredSpace::literal(std::string_view dim, std::string_view value) const {
  DimIndex d = require_dim(dim);
  return Literal{d, require_value(d, value)};
}

bool FactoredSpace::valid(std::span<const Value> state) const {
  if (state.size() != dims_.size()) return false;
  for (std::size_t d = 0; d < state.size(); ++d) {
    if (state[d] >= dims_[d].values.size()) return false;
  }
  return true;
}

bool FactoredSpace::valid(const PartialAssignment& assignment) const {
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto& lit = assignment[i];
    if (lit.dim >= dims_.size() || lit.value >= dims_[lit.dim].values.size()) return false;
    if (i > 0 && assignment[i - 1].dim >= lit.dim) return false;
  }
  return true;
}

bool FactoredSpace::matches(const PartialAssignment& assignment, std::span<const Value> state) const {
  return std::all_of(assignment.begin(), assignment.end(),
                     [&](const Literal& lit) { return state[lit.dim] == lit.value; });
}

std::uint64_t FactoredSpace::index_of(std::span<const Value> state) const {
  std::uint64_t index = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    index = index * dims_[d].values.size() + state[d];
  }
  return index;
}

SpecificState FactoredSpace::state_at(std::uint64_t index) const {
  SpecificState state(dims_.size());
  for (std::size_t d = dims_.size(); d-- > 0;) {
    const auto w = dims_[d].values.size();
    state[d] = static_cast<Value>(index % w);
    index /= w;
  }
  return state;
}

std::string FactoredSpace::format(std::span<const Value> state) const {
  std::string out;
  for (std::size_t d = 0; d < state.size(); ++d) {
    if (d > 0) out += ';';
    out += dims_[d].name;
    out += '=';
    out += dims_[d].values.at(state[d]);
  }
  return out;
}

std::string FactoredSpace::format(const PartialAssignment& assignment) const {
  std::string out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (i > 0) out += ';';
    out += dims_.at(assignment[i].dim).name;
    out += '=';
    out += dims_[assignment[i].dim].values.at(assignment[i].value);
  }
  return out;
}

SpecificState FactoredSpace::parse_state(std::string_view text) const {
  SpecificState state(dims_.size(), 0);
  std::vector<bool> seen(dims_.size(), false);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(pos, end - pos);
    if (!item.empty()) {
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw Error("malformed state item '" + std::string(item) + "'");
      DimIndex d = require_dim(item.substr(0, eq));
      state[d] = require_value(d, item.substr(eq + 1));
      seen[d] = true;
    }
    pos = end + 1;
  }
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (!seen[d]) throw Error("state is missing dimension '" + dims_[d].name + "'");
  }
  return state;
}

bool operator==(const FactoredSpace& a, const FactoredSpace& b) {
  if (a.dims_.size() != b.dims_.size()) return false;
  for (std::size_t d = 0; d < a.dims_.size(); ++d) {
    if (a.dims_[d].name != b.dims_[d].name || a.dims_[d].values != b.dims_[d].values) return false;
  }
  return true;
}

StateCount space_size(const FactoredSpace& space) { return space.size(); }

SpecificState apply(const PartialAssignment& effect, SpecificState state) {
  for (const auto& lit : effect) state[lit.dim] = lit.value;
  return state;
}

}  // namespace wvplan
