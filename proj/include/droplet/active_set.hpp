#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace droplet {

// Set of integer ids in [0, capacity) with O(1) insert, erase and uniform selection.
class ActiveSet {
 public:
  static constexpr std::uint32_t npos = 0xFFFFFFFFu;

  ActiveSet() = default;
  explicit ActiveSet(std::size_t capacity) : pos_(capacity, npos) {}

  void resize(std::size_t capacity) {
    pos_.assign(capacity, npos);
    items_.clear();
  }

  bool contains(std::uint32_t id) const { return pos_[id] != npos; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::uint32_t operator[](std::size_t i) const { return items_[i]; }
  const std::vector<std::uint32_t>& items() const { return items_; }

  void insert(std::uint32_t id) {
    if (pos_[id] != npos) return;
    pos_[id] = static_cast<std::uint32_t>(items_.size());
    items_.push_back(id);
  }

  void erase(std::uint32_t id) {
    const std::uint32_t p = pos_[id];
    if (p == npos) return;
    const std::uint32_t last = items_.back();
    items_[p] = last;
    pos_[last] = p;
    items_.pop_back();
    pos_[id] = npos;
  }

  void set(std::uint32_t id, bool on) {
    if (on)
      insert(id);
    else
      erase(id);
  }

 private:
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint32_t> items_;
};

}  // namespace droplet
