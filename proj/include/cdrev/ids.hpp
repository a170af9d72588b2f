#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cdrev {

// Interned identifiers. Opaque tokens from the input files are mapped to
// dense integers so that records stay small and graphs can use CSR arrays.
enum class UserId : std::uint32_t {};
enum class AntennaId : std::uint32_t {};

constexpr std::uint32_t index_of(UserId id) { return static_cast<std::uint32_t>(id); }
constexpr std::uint32_t index_of(AntennaId id) { return static_cast<std::uint32_t>(id); }

/// Bidirectional string <-> Id table. Ids are assigned in first-seen order.
template <typename Id>
class Dictionary {
 public:
  Id intern(std::string_view name) {
    if (auto it = index_.find(std::string(name)); it != index_.end()) {
      return it->second;
    }
    const auto id = static_cast<Id>(static_cast<std::uint32_t>(names_.size()));
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  std::optional<Id> find(std::string_view name) const {
    if (auto it = index_.find(std::string(name)); it != index_.end()) {
      return it->second;
    }
    return std::nullopt;
  }

  const std::string& name(Id id) const {
    const auto i = static_cast<std::uint32_t>(id);
    if (i >= names_.size()) {
      throw std::out_of_range("unknown identifier index " + std::to_string(i));
    }
    return names_[i];
  }

  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Id> index_;
};

/// Sorted, duplicate-free set of users.
class UserSet {
 public:
  UserSet() = default;
  UserSet(std::initializer_list<UserId> ids) : UserSet(std::vector<UserId>(ids)) {}
  explicit UserSet(std::vector<UserId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }

  bool contains(UserId u) const { return std::binary_search(ids_.begin(), ids_.end(), u); }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<UserId>& ids() const { return ids_; }

  bool is_subset_of(const UserSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }

  friend bool operator==(const UserSet&, const UserSet&) = default;

 private:
  std::vector<UserId> ids_;
};

}  // namespace cdrev
